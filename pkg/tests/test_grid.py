import numpy as np
import pytest

from wakelab.grid import BodySpec, StaggeredDomain, build_annulus_domain, build_truncated_domain


@pytest.fixture(scope="module")
def dom():
    return build_truncated_domain(BodySpec(1.0), R=4.0, h=0.5)


def random_dof_field(dom, seed=0):
    rng = np.random.default_rng(seed)
    u = dom.zero_faces()
    for ax in range(3):
        u[ax][dom.active[ax]] = rng.normal(size=dom.n_faces_axis[ax])
    return u


# ------------------------------------------------------------- construction

def test_fluid_volume_r1_R4():
    d = build_truncated_domain(BodySpec(1.0), R=4.0, h=0.25)
    exact = 4.0 / 3.0 * np.pi * (4.0**3 - 1.0**3)
    assert abs(d.fluid_volume() - exact) / exact < 0.10


def test_fluid_volume_r1_R8_coarse():
    d = build_truncated_domain(BodySpec(1.0), R=8.0, h=0.5)
    exact = 4.0 / 3.0 * np.pi * (8.0**3 - 1.0**3)
    assert abs(d.fluid_volume() - exact) / exact < 0.10


def test_truncation_too_small_rejected():
    with pytest.raises(ValueError, match="too small"):
        build_truncated_domain(BodySpec(1.0), R=1.9, h=0.1)


def test_uneven_spacing_rejected():
    with pytest.raises(ValueError, match="evenly"):
        build_truncated_domain(BodySpec(1.0), R=4.0, h=0.3)


def test_unresolvable_body_rejected():
    with pytest.raises(ValueError, match="coarse"):
        build_truncated_domain(BodySpec(0.5), R=4.0, h=0.5)


def test_boundary_face_count_scales_like_area(dom):
    # halving h should multiply the boundary-face count by about 4
    fine = build_truncated_domain(BodySpec(1.0), R=4.0, h=0.25)
    ratio = fine.boundary_face_count() / dom.boundary_face_count()
    assert 3.2 < ratio < 4.8


# ----------------------------------------------------------------- operators

def test_div_grad_adjoint(dom):
    rng = np.random.default_rng(1)
    u = random_dof_field(dom, 1)
    q = dom.zero_cells()
    q[dom.fluid] = rng.normal(size=dom.n_cells)
    lhs = dom.cell_dot(dom.div(u), q)
    rhs = -dom.face_dot(u, dom.grad(q))
    assert abs(lhs - rhs) < 1e-12 * max(abs(lhs), 1.0)


def test_divergence_of_linear_field_is_constant(dom):
    # u = (x, y, z) sampled on all faces: full-grid divergence equals 3
    u = []
    for ax in range(3):
        coords = dom.face_coords(ax)
        u.append(coords[ax].copy())
    d = dom.div(u)
    assert np.allclose(d[dom.fluid], 3.0, atol=1e-12)


def test_face_laplacian_symmetric(dom):
    u = random_dof_field(dom, 2)
    v = random_dof_field(dom, 3)
    lhs = dom.face_dot(dom.face_laplacian(u), v)
    rhs = dom.face_dot(u, dom.face_laplacian(v))
    assert abs(lhs - rhs) < 1e-10 * max(abs(lhs), 1.0)


def test_dirichlet_energy_matches_link_sum(dom):
    # (u, -Lap u) equals the sum of squared differences over all face links,
    # zero extension outside the active set
    u = random_dof_field(dom, 4)
    um = dom.zero_nonactive(u)
    h = dom.h
    total = 0.0
    for comp in um:
        for ax in range(3):
            d = np.diff(comp, axis=ax)
            total += np.sum(d * d)
            # links from the array edges to the zero exterior
            first = [slice(None)] * 3
            first[ax] = 0
            last = [slice(None)] * 3
            last[ax] = comp.shape[ax] - 1
            total += np.sum(comp[tuple(first)] ** 2) + np.sum(comp[tuple(last)] ** 2)
    expected = h**3 * total / h**2
    assert np.isclose(dom.dirichlet_grad_sq(u), expected, rtol=1e-12)


def test_cell_poisson_matches_div_grad(dom):
    rng = np.random.default_rng(5)
    p = dom.zero_cells()
    p[dom.fluid] = rng.normal(size=dom.n_cells)
    L = dom.cell_poisson_matrix()
    via_matrix = L @ dom.pack_cells(p)
    via_ops = dom.pack_cells(dom.div(dom.grad(p)))
    assert np.allclose(via_matrix, via_ops, atol=1e-11)


def test_face_neg_laplacian_matrix_matches_operator(dom):
    u = random_dof_field(dom, 6)
    A = dom.face_neg_laplacian_matrix()
    via_matrix = A @ dom.pack_faces(u)
    via_op = dom.pack_faces([-c for c in dom.face_laplacian(u)])
    assert np.allclose(via_matrix, via_op, atol=1e-11)


def test_transverse_interpolation_against_direct_average():
    d = build_truncated_domain(BodySpec(0.5), R=2.0, h=0.25)
    u = random_dof_field(d, 7)
    um = d.zero_nonactive(u)
    # check u_z interpolated onto x-faces at a few interior locations
    out = d.transverse_to_face(um, comp=2, face_ax=0)
    n = d.n
    for (i, j, k) in [(3, 3, 3), (4, 2, 5), (5, 5, 2)]:
        if i == 0 or i > n - 1:
            continue
        expected = 0.25 * (
            um[2][i - 1, j, k]
            + um[2][i - 1, j, k + 1]
            + um[2][i, j, k]
            + um[2][i, j, k + 1]
        )
        assert np.isclose(out[i, j, k], expected, atol=1e-14)


def test_d2_norm_small_grid_loop_oracle():
    d = build_annulus_domain(0.6, 1.9, 0.5)
    u = random_dof_field(d, 8)
    um = d.zero_nonactive(u)
    h = d.h
    total = 0.0
    for comp in um:
        s = comp.shape
        ext = np.pad(comp, 1)
        for ax in range(3):
            for idx in np.ndindex(s):
                e = tuple(np.array(idx) + 1)
                up = list(e)
                dn = list(e)
                up[ax] += 1
                dn[ax] -= 1
                total += ((ext[tuple(up)] - 2 * ext[e] + ext[tuple(dn)]) / h**2) ** 2
        for ax in range(3):
            for bx in range(ax + 1, 3):
                d1 = np.diff(comp, axis=ax)
                d11 = np.diff(d1, axis=bx) / h**2
                total += 2.0 * np.sum(d11**2)
    assert np.isclose(d.d2_norm_sq(u), h**3 * total, rtol=1e-12)


def test_pack_unpack_round_trip(dom):
    u = random_dof_field(dom, 9)
    assert all(
        np.array_equal(a, b) for a, b in zip(dom.unpack_faces(dom.pack_faces(u)), u)
    )
    rng = np.random.default_rng(10)
    p = dom.zero_cells()
    p[dom.fluid] = rng.normal(size=dom.n_cells)
    assert np.array_equal(dom.unpack_cells(dom.pack_cells(p)), p)


def test_annulus_domain_masks():
    d = build_annulus_domain(1.0, 2.0, 0.25)
    r = d.cell_radii()
    assert np.all(r[d.fluid] > 1.0)
    assert np.all(r[d.fluid] < 2.0)
    assert d.n_cells > 0
