"""Sparse elliptic solves: direct factorization for small systems, algebraic
multigrid (CG-accelerated) for large ones.

The cell pressure operator is the singular Neumann Laplacian (constants in the
kernel).  It is regularized by adding 1 to a single diagonal entry: for a
compatible (mean-free) right-hand side this pins the solution value at that
cell to zero and is otherwise exact — take the inner product of
(A + e0 e0^T) x = b with the constant vector to see x[0] = 0.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

__all__ = ["SPDSolver", "NeumannPoisson", "DIRECT_LIMIT"]

# direct factorization is cheaper and more accurate up to roughly this size
DIRECT_LIMIT = 60_000


class SPDSolver:
    """Solve A x = b for a sparse SPD matrix, choosing the backend by size."""

    def __init__(self, A: sp.spmatrix, direct_limit: int = DIRECT_LIMIT):
        self.n = A.shape[0]
        self.A = A.tocsr()
        if self.n <= direct_limit:
            self.kind = "direct"
            self._lu = spla.splu(A.tocsc())
            self._ml = None
        else:
            import pyamg

            self.kind = "amg"
            self._lu = None
            self._ml = pyamg.ruge_stuben_solver(self.A)

    def solve(self, b: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        if self.kind == "direct":
            return self._lu.solve(b)
        x = self._ml.solve(b, tol=tol, accel="cg", maxiter=400)
        return x

    def precondition(self, b: np.ndarray) -> np.ndarray:
        """One cheap approximate solve (V-cycle for AMG, exact for direct)."""
        if self.kind == "direct":
            return self._lu.solve(b)
        return self._ml.solve(b, tol=1e-30, maxiter=1, accel=None)

    def precondition_block(self, B: np.ndarray) -> np.ndarray:
        if self.kind == "direct":
            return self._lu.solve(B)
        return np.column_stack([self.precondition(B[:, j]) for j in range(B.shape[1])])


class NeumannPoisson:
    """div grad phi = rhs on the fluid cells with natural (Neumann) data.

    Works on packed cell vectors.  The right-hand side is mean-projected
    before the solve (the continuous problem is only solvable for compatible
    data; discrete inputs from exact-divergence fields are compatible to
    roundoff already).
    """

    def __init__(self, domain, direct_limit: int = DIRECT_LIMIT):
        self.domain = domain
        A = (-domain.cell_poisson_matrix()).tolil()
        A[0, 0] += 1.0
        self.solver = SPDSolver(A.tocsr(), direct_limit)

    def solve_cells(self, rhs_packed: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        b = rhs_packed - rhs_packed.mean()
        phi = self.solver.solve(-b, tol=tol)
        return phi

    def solve_cells_block(self, rhs_block: np.ndarray, tol: float = 1e-12) -> np.ndarray:
        """Batched variant: rhs_block has one right-hand side per column."""
        b = rhs_block - rhs_block.mean(axis=0, keepdims=True)
        if self.solver.kind == "direct":
            return self.solver._lu.solve(-b)
        return np.column_stack(
            [self.solver.solve(-b[:, j], tol=tol) for j in range(b.shape[1])]
        )
