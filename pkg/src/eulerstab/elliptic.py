"""Dirichlet Poisson solves.

Two backends behind one contract: a cached sparse LU factorization (default)
and a Jacobi-preconditioned conjugate-gradient iteration with a fixed,
deterministic schedule.  Both must deliver a relative residual below 1e-10 and
agree with each other to 1e-9; tests enforce the agreement.

The factorization is computed once per grid and is read-only afterwards, so a
GreenOperator is safe for concurrent readers.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse.linalg import splu

from .errors import SolverFailure
from .grid import Grid, ScalarField, _require_same_grid

__all__ = ["GreenOperator", "green_apply", "conjugate_gradient"]

RESIDUAL_RTOL = 1e-10


def conjugate_gradient(A, b, rtol: float = 1e-12, max_iter: int | None = None):
    """Jacobi-preconditioned CG from a zero start vector; deterministic."""
    n = b.shape[0]
    if max_iter is None:
        max_iter = 20 * n
    norm_b = float(np.linalg.norm(b))
    if norm_b == 0.0:
        return np.zeros_like(b)
    inv_diag = 1.0 / A.diagonal()
    x = np.zeros_like(b)
    r = b.copy()
    z = inv_diag * r
    p = z
    rz = float(np.dot(r, z))
    for _ in range(max_iter):
        Ap = A @ p
        alpha = rz / float(np.dot(p, Ap))
        x = x + alpha * p
        r = r - alpha * Ap
        if float(np.linalg.norm(r)) <= rtol * norm_b:
            return x
        z = inv_diag * r
        rz_new = float(np.dot(r, z))
        p = z + (rz_new / rz) * p
        rz = rz_new
    raise SolverFailure(
        f"conjugate gradient hit the {max_iter}-iteration cap "
        f"(relative residual {np.linalg.norm(r) / norm_b:.3e})"
    )


class GreenOperator:
    """Solution operator of the 5-point -Laplacian with zero Dirichlet data."""

    def __init__(self, grid: Grid):
        self.grid = grid
        self.matrix = grid.laplacian
        self._lu = splu(self.matrix.tocsc())

    def solve_values(self, rhs: np.ndarray, method: str = "direct") -> np.ndarray:
        if not np.any(rhs):
            return np.zeros_like(rhs)
        if method == "direct":
            sol = self._lu.solve(rhs)
        elif method == "cg":
            sol = conjugate_gradient(self.matrix, rhs)
        else:
            raise ValueError(f"unknown solve method {method!r}")
        resid = np.linalg.norm(self.matrix @ sol - rhs) / np.linalg.norm(rhs)
        if resid > RESIDUAL_RTOL:
            raise SolverFailure(f"poisson solve residual {resid:.3e} above {RESIDUAL_RTOL}")
        return sol

    def apply(self, f: ScalarField, method: str = "direct") -> ScalarField:
        if not f.grid.compatible(self.grid):
            _require_same_grid(f, ScalarField(self.grid, np.zeros(self.grid.n_interior)))
        return ScalarField(self.grid, self.solve_values(f.values, method=method))


def green_apply(f: ScalarField, method: str = "direct") -> ScalarField:
    """Solve -Laplace(u) = f with zero boundary values."""
    return f.grid.green.apply(f, method=method)
