"""Divergence-correction solver on an annulus: given mean-free cell data f,
produce a face field z with div z = f and zero boundary trace.

Realized as the least-gradient-energy solution of the constrained problem

    minimize ||grad z||^2   subject to   div z = f,  z = 0 on boundary faces,

whose optimality system is  F z = -G lam,  D z = f  with F the masked face
Laplacian.  Eliminating z gives the Schur equation  (D F^{-1} G) lam = -f,
solved by conjugate gradients: the Schur operator is spectrally equivalent
to the cell mass matrix (the classical inf-sup fact), so the iteration count
is small and h-independent.  Constants are zero modes of the Schur operator;
right-hand side and iterates are kept mean-free.
"""

from __future__ import annotations

import numpy as np

from .cutoffs import annulus_mean_zero_check
from .poisson import SPDSolver

__all__ = ["bogovskii_solve", "bogovskii_constant", "BogovskiiStagnation"]


class BogovskiiStagnation(RuntimeError):
    pass


def bogovskii_solve(
    domain,
    f: np.ndarray,
    *,
    tol: float = 1e-10,
    max_iter: int = 400,
    mean_tol: float = 1e-6,
):
    """Solve div z = f with zero boundary trace and minimal gradient energy.

    ``f`` is a full cell array; it must be mean-free over the fluid region
    (checked via the relative-mean ratio).  Returns the face field z.
    """
    ratio = annulus_mean_zero_check(domain, f)
    if ratio > mean_tol:
        raise ValueError(
            f"right-hand side is not mean-free (relative mean {ratio:.2e})"
        )

    face_solver = SPDSolver(domain.face_neg_laplacian_matrix())
    h3 = domain.h**3

    def schur(lam_packed: np.ndarray) -> np.ndarray:
        lam = domain.unpack_cells(lam_packed)
        g = domain.pack_faces(domain.grad(lam))
        w = face_solver.solve(g)
        d = domain.div(domain.unpack_faces(w))
        out = domain.pack_cells(d)
        return -(out - out.mean())  # -D F^{-1} G = G^T F^{-1} G, PSD

    # KKT system: F z = G lam, D z = f  =>  (-D F^{-1} G) lam = -f
    b = -f[domain.fluid].astype(float)
    b = b - b.mean()
    lam = np.zeros_like(b)
    r = b.copy()
    p = r.copy()
    rs = r @ r
    b_norm = np.sqrt(b @ b)
    if b_norm == 0.0:
        return domain.zero_faces()
    n_iter = 0
    while np.sqrt(rs) > tol * b_norm:
        if n_iter >= max_iter:
            raise BogovskiiStagnation(
                f"conjugate gradients stagnated at {np.sqrt(rs)/b_norm:.2e} "
                f"after {max_iter} iterations"
            )
        Ap = schur(p)
        alpha = rs / (p @ Ap)
        lam += alpha * p
        r -= alpha * Ap
        r -= r.mean()
        rs_new = r @ r
        p = r + (rs_new / rs) * p
        rs = rs_new
        n_iter += 1

    g = domain.pack_faces(domain.grad(domain.unpack_cells(lam)))
    z_packed = face_solver.solve(g)
    z = domain.unpack_faces(z_packed)
    # enforce the achieved divergence residual
    resid = domain.cell_norm(np.where(domain.fluid, domain.div(z) - f, 0.0))
    f_norm = np.sqrt((f[domain.fluid] ** 2).sum() * h3)
    if resid > 100 * tol * max(f_norm, 1e-300):
        raise BogovskiiStagnation(
            f"divergence residual {resid/f_norm:.2e} after converged Schur solve"
        )
    return z


def bogovskii_constant(domain, z, f: np.ndarray) -> float:
    """Measured C0 in ||z||_{1,2} <= C0 ||f||_2."""
    z12 = np.sqrt(domain.face_norm(z) ** 2 + domain.dirichlet_grad_sq(z))
    f_norm = np.sqrt((f[domain.fluid] ** 2).sum() * domain.h**3)
    return float(z12 / f_norm) if f_norm > 0 else 0.0
