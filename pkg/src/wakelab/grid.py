"""Masked staggered (MAC) grid machinery on a truncated exterior domain.

The domain is the part of the ball B_R outside a solid sphere, voxelized on a
uniform cube [-Rbox, Rbox]^3.  Velocity components live on cell faces, scalars
(pressure, divergence) at cell centers.  Cells are classified by their center:
solid (inside the body), fluid, or exterior-cut (outside B_R).  The velocity
degrees of freedom are the faces between two fluid cells; every other face
carries boundary data imposed directly at the face center (first order).

Conventions used by every operator here:

  * divergence D: cell value = sum of signed face values / h (full-grid
    differencing; DOF fields carry zeros on non-active faces, which *is* the
    homogeneous boundary condition)
  * gradient G: face value = difference of the two adjacent fluid-cell values
    / h, zero on non-active faces  ==>  D = -G^T exactly w.r.t. the plain
    h^3 sums used as inner products
  * vector Laplacian: component-wise 7-point stencil with zero extension
    outside the active set (Dirichlet), re-masked so the operator stays
    symmetric
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

__all__ = [
    "BodySpec",
    "StaggeredDomain",
    "build_truncated_domain",
    "build_annulus_domain",
]

Vec3 = list  # list of three face arrays [ux, uy, uz]


@dataclass(frozen=True)
class BodySpec:
    """Rigid body: a sphere of given radius centered at the origin."""

    radius: float

    def __post_init__(self):
        if self.radius <= 0:
            raise ValueError("body radius must be positive")

    @property
    def diameter(self) -> float:
        return 2.0 * self.radius

    @property
    def min_truncation(self) -> float:
        # smallest admissible truncation radius: twice the body diameter
        return 2.0 * self.diameter


# ======================================================================
#  domain construction
# ======================================================================

class StaggeredDomain:
    """Immutable masked MAC grid.  Build via the module-level constructors."""

    def __init__(self, box_half: float, h: float, fluid: np.ndarray, meta: dict):
        self.box_half = float(box_half)
        self.h = float(h)
        self.fluid = fluid
        self.meta = dict(meta)
        n = fluid.shape[0]
        self.n = n

        # ---- cell indexing -------------------------------------------------
        self.n_cells = int(fluid.sum())
        if self.n_cells == 0:
            raise ValueError("domain has no fluid cells")
        self.cell_index = -np.ones(fluid.shape, dtype=np.int64)
        self.cell_index[fluid] = np.arange(self.n_cells)

        # ---- face masks ----------------------------------------------------
        # active: both neighbor cells fluid; boundary: exactly one fluid
        self.active: list[np.ndarray] = []
        self.boundary: list[np.ndarray] = []
        for ax in range(3):
            shape = [n, n, n]
            shape[ax] += 1
            act = np.zeros(shape, dtype=bool)
            bnd = np.zeros(shape, dtype=bool)
            inner = [slice(None)] * 3
            inner[ax] = slice(1, n)
            # neighbor pair (i-1, i) along ax for interior faces
            a = fluid.take(range(0, n - 1), axis=ax)
            b = fluid.take(range(1, n), axis=ax)
            act[tuple(inner)] = a & b
            bnd[tuple(inner)] = a ^ b
            # outermost faces: active never, boundary iff the single cell is fluid
            first = [slice(None)] * 3
            first[ax] = 0
            last = [slice(None)] * 3
            last[ax] = n
            edge0 = fluid.take(0, axis=ax)
            edge1 = fluid.take(n - 1, axis=ax)
            bnd[tuple(first)] = edge0
            bnd[tuple(last)] = edge1
            self.active.append(act)
            self.boundary.append(bnd)
        self.n_faces_axis = [int(a.sum()) for a in self.active]
        self.n_faces = int(sum(self.n_faces_axis))

        # 1d coordinates
        self.centers_1d = -self.box_half + (np.arange(n) + 0.5) * self.h
        self.nodes_1d = -self.box_half + np.arange(n + 1) * self.h

    # ------------------------------------------------------------- coordinates
    def cell_center_mesh(self):
        c = self.centers_1d
        return np.meshgrid(c, c, c, indexing="ij")

    def cell_radii(self) -> np.ndarray:
        x, y, z = self.cell_center_mesh()
        return np.sqrt(x * x + y * y + z * z)

    def face_coords(self, ax: int):
        """Meshgrid coordinate arrays at the face centers of axis ``ax``."""
        coords = []
        for d in range(3):
            coords.append(self.nodes_1d if d == ax else self.centers_1d)
        return np.meshgrid(*coords, indexing="ij")

    def edge_coords(self, ax: int):
        """Meshgrid coordinate arrays at edge midpoints, edges along ``ax``."""
        coords = []
        for d in range(3):
            coords.append(self.centers_1d if d == ax else self.nodes_1d)
        return np.meshgrid(*coords, indexing="ij")

    def edge_curl(self, E: Vec3) -> Vec3:
        """Face field from an edge field by circulation differences.

        (curl E)_a = d_b E_c - d_c E_b for (a, b, c) cyclic; the differenced
        edge midpoints straddle the face center, so the stencil is exact for
        component profiles quadratic in the differenced coordinate.  The
        discrete divergence of the result vanishes identically (the edge sums
        telescope around each cell).
        """
        out = []
        for ax in range(3):
            b, c = (ax + 1) % 3, (ax + 2) % 3
            out.append((np.diff(E[c], axis=b) - np.diff(E[b], axis=c)) / self.h)
        return out

    # ------------------------------------------------------------- allocation
    def zero_faces(self) -> Vec3:
        out = []
        for ax in range(3):
            out.append(np.zeros(self.active[ax].shape))
        return out

    def zero_nonactive(self, u: Vec3) -> Vec3:
        return [np.where(self.active[ax], u[ax], 0.0) for ax in range(3)]

    def zero_cells(self) -> np.ndarray:
        return np.zeros(self.fluid.shape)

    # ------------------------------------------------------------- pack/unpack
    def pack_faces(self, u: Vec3) -> np.ndarray:
        return np.concatenate([u[ax][self.active[ax]] for ax in range(3)])

    def unpack_faces(self, vec: np.ndarray) -> Vec3:
        out = self.zero_faces()
        ofs = 0
        for ax in range(3):
            m = self.n_faces_axis[ax]
            out[ax][self.active[ax]] = vec[ofs : ofs + m]
            ofs += m
        return out

    def pack_cells(self, p: np.ndarray) -> np.ndarray:
        return p[self.fluid]

    def unpack_cells(self, vec: np.ndarray) -> np.ndarray:
        out = self.zero_cells()
        out[self.fluid] = vec
        return out

    # ======================================================================
    #  first-order operators
    # ======================================================================

    def div(self, u: Vec3) -> np.ndarray:
        """Cell divergence from face arrays (full-grid differencing)."""
        n, h = self.n, self.h
        out = np.zeros((n, n, n))
        for ax in range(3):
            hi = [slice(None)] * 3
            lo = [slice(None)] * 3
            hi[ax] = slice(1, n + 1)
            lo[ax] = slice(0, n)
            out += (u[ax][tuple(hi)] - u[ax][tuple(lo)]) / h
        return out

    def grad(self, p: np.ndarray) -> Vec3:
        """Masked gradient: zero on non-active faces; adjoint of -div."""
        n, h = self.n, self.h
        out = self.zero_faces()
        for ax in range(3):
            inner = [slice(None)] * 3
            inner[ax] = slice(1, n)
            a = p.take(range(1, n), axis=ax)
            b = p.take(range(0, n - 1), axis=ax)
            g = np.zeros(self.active[ax].shape)
            g[tuple(inner)] = (a - b) / h
            out[ax] = np.where(self.active[ax], g, 0.0)
        return out

    def _lap_component(self, a: np.ndarray, h: float) -> np.ndarray:
        out = -6.0 * a.copy()
        for ax in range(a.ndim):
            out += np.roll(a, 1, axis=ax) + np.roll(a, -1, axis=ax)
            # undo the wrap-around: zero Dirichlet beyond the array edge
            first = [slice(None)] * 3
            first[ax] = 0
            last = [slice(None)] * 3
            last[ax] = a.shape[ax] - 1
            edge_lo = [slice(None)] * 3
            edge_lo[ax] = a.shape[ax] - 1
            edge_hi = [slice(None)] * 3
            edge_hi[ax] = 0
            out[tuple(first)] -= a[tuple(edge_lo)]
            out[tuple(last)] -= a[tuple(edge_hi)]
        return out / (h * h)

    def face_laplacian(self, u: Vec3) -> Vec3:
        """Component-wise 7-point Laplacian with zero extension (Dirichlet),
        masked back onto the active faces (symmetric operator)."""
        um = self.zero_nonactive(u)
        out = []
        for ax in range(3):
            la = self._lap_component(um[ax], self.h)
            out.append(np.where(self.active[ax], la, 0.0))
        return out

    def full_grid_laplacian(self, u: Vec3) -> Vec3:
        """Unmasked 7-point Laplacian (for fields defined on the whole box,
        e.g. the solenoidal extension; zero beyond the array edge)."""
        return [self._lap_component(u[ax], self.h) for ax in range(3)]

    # ======================================================================
    #  quadrature
    # ======================================================================

    def face_dot(self, u: Vec3, v: Vec3) -> float:
        return self.h**3 * sum(float(np.sum(u[ax] * v[ax])) for ax in range(3))

    def face_norm(self, u: Vec3) -> float:
        return float(np.sqrt(max(self.face_dot(u, u), 0.0)))

    def cell_dot(self, p: np.ndarray, q: np.ndarray) -> float:
        return self.h**3 * float(np.sum(p * q))

    def cell_norm(self, p: np.ndarray) -> float:
        return float(np.sqrt(max(self.cell_dot(p, p), 0.0)))

    def dirichlet_grad_sq(self, u: Vec3) -> float:
        """||grad u||^2 for zero-trace fields, via (u, -Lap u): exact partner
        of the face Laplacian, so basis gradient orthogonality is algebraic."""
        lap = self.face_laplacian(u)
        return -self.face_dot(u, lap)

    def d2_norm_sq(self, u: Vec3) -> float:
        """Frobenius ||D^2 u||^2: central second differences on each axis,
        forward-forward mixed differences, zero-extended components."""
        h = self.h
        um = self.zero_nonactive(u)
        total = 0.0
        for comp in um:
            for ax in range(3):
                d2 = (np.roll(comp, 1, axis=ax) - 2 * comp + np.roll(comp, -1, axis=ax))
                d2 = _kill_wrap(d2, comp, ax)
                total += float(np.sum((d2 / h**2) ** 2))
            for ax in range(3):
                for bx in range(ax + 1, 3):
                    d1 = np.diff(comp, axis=ax)
                    d11 = np.diff(d1, axis=bx) / h**2
                    total += 2.0 * float(np.sum(d11**2))
        return h**3 * total

    # ======================================================================
    #  interpolation
    # ======================================================================

    def face_to_center(self, u: Vec3) -> np.ndarray:
        """(3, n, n, n) cell-centered velocity by 2-point face averaging."""
        n = self.n
        out = np.zeros((3, n, n, n))
        for ax in range(3):
            hi = [slice(None)] * 3
            lo = [slice(None)] * 3
            hi[ax] = slice(1, n + 1)
            lo[ax] = slice(0, n)
            out[ax] = 0.5 * (u[ax][tuple(hi)] + u[ax][tuple(lo)])
        return out

    def center_grad_tensor(self, uc: np.ndarray) -> np.ndarray:
        """(3, 3, n, n, n): entry [b, a] ~ d u_b / d x_a by central differences
        of cell-centered components (zero extension outside the box)."""
        h = self.h
        out = np.zeros((3, 3) + uc.shape[1:])
        for b in range(3):
            for a in range(3):
                up = np.roll(uc[b], -1, axis=a)
                dn = np.roll(uc[b], 1, axis=a)
                up = _edge_zero(up, a, -1)
                dn = _edge_zero(dn, a, +1)
                out[b, a] = (up - dn) / (2 * h)
        return out

    def transverse_to_face(self, u: Vec3, comp: int, face_ax: int) -> np.ndarray:
        """Component ``comp`` interpolated to the faces of axis ``face_ax`` by
        the 4-point transverse average (comp != face_ax)."""
        if comp == face_ax:
            return u[comp].copy()
        src = u[comp]  # lives on faces of axis ``comp``
        n = self.n
        # average over the ``comp`` axis: node -> center (n+1 -> n values)
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[comp] = slice(0, n)
        hi[comp] = slice(1, n + 1)
        cmid = 0.5 * (src[tuple(lo)] + src[tuple(hi)])  # centered in comp axis
        # spread along the ``face_ax`` axis: center -> node with zero padding
        pad = [(0, 0)] * 3
        pad[face_ax] = (1, 1)
        ext = np.pad(cmid, pad)
        lo = [slice(None)] * 3
        hi = [slice(None)] * 3
        lo[face_ax] = slice(0, n + 1)
        hi[face_ax] = slice(1, n + 2)
        return 0.5 * (ext[tuple(lo)] + ext[tuple(hi)])

    # ======================================================================
    #  sparse operators (for the solvers)
    # ======================================================================

    def cell_poisson_matrix(self) -> sp.csr_matrix:
        """L = div grad on fluid cells: the Neumann (graph) Laplacian over
        fluid-cell adjacency, scaled 1/h^2.  Singular: constants in kernel."""
        n, h = self.n, self.h
        idx = self.cell_index
        rows, cols, vals = [], [], []
        diag = np.zeros(self.n_cells)
        for ax in range(3):
            a = idx.take(range(0, n - 1), axis=ax)
            b = idx.take(range(1, n), axis=ax)
            ok = (a >= 0) & (b >= 0)
            ai = a[ok]
            bi = b[ok]
            rows.extend([ai, bi])
            cols.extend([bi, ai])
            vals.extend([np.full(ai.size, 1.0 / h**2)] * 2)
            np.add.at(diag, ai, -1.0 / h**2)
            np.add.at(diag, bi, -1.0 / h**2)
        rows.append(np.arange(self.n_cells))
        cols.append(np.arange(self.n_cells))
        vals.append(diag)
        L = sp.csr_matrix(
            (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.n_cells, self.n_cells),
        )
        return L

    def face_neg_laplacian_matrix(self) -> sp.csr_matrix:
        """-Laplacian on active faces (Dirichlet zero extension), SPD."""
        blocks = []
        h2 = self.h**2
        for ax in range(3):
            act = self.active[ax]
            m = int(act.sum())
            fid = -np.ones(act.shape, dtype=np.int64)
            fid[act] = np.arange(m)
            rows, cols, vals = [], [], []
            rows.append(np.arange(m))
            cols.append(np.arange(m))
            vals.append(np.full(m, 6.0 / h2))
            for d in range(3):
                sz = act.shape[d]
                a = fid.take(range(0, sz - 1), axis=d)
                b = fid.take(range(1, sz), axis=d)
                ok = (a >= 0) & (b >= 0)
                ai, bi = a[ok], b[ok]
                rows.extend([ai, bi])
                cols.extend([bi, ai])
                vals.extend([np.full(ai.size, -1.0 / h2)] * 2)
            blocks.append(
                sp.csr_matrix(
                    (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                    shape=(m, m),
                )
            )
        return sp.block_diag(blocks, format="csr")

    # ------------------------------------------------------------------ misc
    def fluid_volume(self) -> float:
        return self.n_cells * self.h**3

    def boundary_face_count(self) -> int:
        return int(sum(b.sum() for b in self.boundary))

    def __repr__(self) -> str:  # pragma: no cover
        return (
            f"StaggeredDomain(n={self.n}, h={self.h}, cells={self.n_cells}, "
            f"faces={self.n_faces}, meta={self.meta})"
        )


def _kill_wrap(d2: np.ndarray, comp: np.ndarray, ax: int) -> np.ndarray:
    # np.roll wraps around; re-impose zero extension on both edges
    first = [slice(None)] * 3
    last = [slice(None)] * 3
    first[ax] = 0
    last[ax] = comp.shape[ax] - 1
    d2 = d2.copy()
    d2[tuple(first)] -= comp[tuple(last)]
    d2[tuple(last)] -= comp[tuple(first)]
    return d2


def _edge_zero(arr: np.ndarray, ax: int, direction: int) -> np.ndarray:
    """Zero the slice that np.roll wrapped around."""
    arr = arr.copy()
    sl = [slice(None)] * arr.ndim
    sl[ax] = -1 if direction == -1 else 0
    arr[tuple(sl)] = 0.0
    return arr


# ======================================================================
#  constructors
# ======================================================================

def build_truncated_domain(body: BodySpec, R: float, h: float) -> StaggeredDomain:
    """Voxelize the truncated exterior domain: ball of radius R minus the body.

    Requirements: R at least twice the body diameter, h dividing 2R evenly,
    and the body resolvable (diameter >= 4h, i.e. radius >= 2h).
    """
    if R < body.min_truncation - 1e-12:
        raise ValueError(
            f"truncation radius R={R} too small: need R >= {body.min_truncation} "
            f"(twice the body diameter)"
        )
    ncells = 2.0 * R / h
    if abs(ncells - round(ncells)) > 1e-9:
        raise ValueError(f"h={h} does not divide the box span 2R={2 * R} evenly")
    if body.radius < 2.0 * h - 1e-12:
        raise ValueError(
            f"grid too coarse for the body: radius {body.radius} < 2h = {2 * h}"
        )
    n = int(round(ncells))
    c = -R + (np.arange(n) + 0.5) * h
    x, y, z = np.meshgrid(c, c, c, indexing="ij")
    r = np.sqrt(x * x + y * y + z * z)
    fluid = (r >= body.radius) & (r <= R)
    return StaggeredDomain(R, h, fluid, {"kind": "truncated", "R": R, "radius": body.radius})


def build_annulus_domain(r_in: float, r_out: float, h: float) -> StaggeredDomain:
    """Voxelize a spherical annulus r_in < |x| < r_out (for the divergence solver)."""
    if not 0 < r_in < r_out:
        raise ValueError("need 0 < r_in < r_out")
    half = np.ceil(r_out / h - 1e-9) * h
    n = int(round(2 * half / h))
    c = -half + (np.arange(n) + 0.5) * h
    x, y, z = np.meshgrid(c, c, c, indexing="ij")
    r = np.sqrt(x * x + y * y + z * z)
    fluid = (r > r_in) & (r < r_out)
    return StaggeredDomain(half, h, fluid, {"kind": "annulus", "r_in": r_in, "r_out": r_out})
