"""Eigenvalue certificates for steady-flow stability.

Three ingredients: the principal eigenvalue of the Dirichlet Laplacian, the
first eigenvalue of the linearized operator (-Laplacian minus a multiplier
field), and the coercivity constant of the rank-one-corrected quadratic form

    |grad u|^2 - c u^2 + (integral of c u)^2 / (integral of c)

minimized over unit-L2 fields vanishing on the boundary.  The correction term
is positive semidefinite, so the constant always dominates the plain first
eigenvalue; a positive constant certifies that the flow maximizes kinetic
energy locally within its rearrangement class.

Eigen-iterations start from the normalized all-ones vector and use a fixed
shift-and-factorize schedule, so results are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .errors import ConvergenceFailure, MassViolation
from .grid import Grid, ScalarField, integral
from .monotone import probe_points

__all__ = [
    "ARNOLD_FIRST",
    "ARNOLD_SECOND",
    "WOLANSKY_GHIL",
    "SEMISTABLE",
    "NO_CERTIFICATE",
    "StabilityCertificate",
    "principal_eigenpair",
    "coercivity_delta",
    "classify_stability",
]

ARNOLD_FIRST = "arnold_first"
ARNOLD_SECOND = "arnold_second"
WOLANSKY_GHIL = "wolansky_ghil"
SEMISTABLE = "semistable"
NO_CERTIFICATE = "none"

# strongest first: the semistable criterion subsumes the classical ones
_STRENGTH = (SEMISTABLE, WOLANSKY_GHIL, ARNOLD_SECOND, ARNOLD_FIRST)

CLASSIFY_TOL = 1e-6
RESIDUAL_TOL = 1e-8
_TARGET_RES = 1e-10
_MASS_TOL = 1e-10


@dataclass(frozen=True)
class StabilityCertificate:
    """Spectral evidence and the resulting stability classification."""

    lambda1: float
    mu1: float
    delta: float | None
    mass_gprime: float
    labels: tuple[str, ...]
    classification: str
    profile_id: str
    grid_info: dict = dataclass_field(default_factory=dict)
    evidence: dict = dataclass_field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "lambda1": self.lambda1,
            "mu1": self.mu1,
            "delta": self.delta,
            "mass_gprime": self.mass_gprime,
            "labels": list(self.labels),
            "classification": self.classification,
            "grid": self.grid_info,
            "profile_id": self.profile_id,
            "evidence": self.evidence,
        }


def _inverse_iteration(apply_op, make_solver, sigma0, n,
                       coarse_iters=120, polish_rounds=5):
    """Smallest eigenpair by shifted inverse iteration from the all-ones start.

    A fixed shift below the spectrum drives the coarse phase; Rayleigh-shifted
    refactorizations polish the residual to the 1e-10 level.
    """
    x = np.full(n, 1.0 / np.sqrt(n))
    solve = make_solver(sigma0)
    mu = 0.0
    res = np.inf
    for _ in range(coarse_iters):
        y = solve(x)
        ny = np.linalg.norm(y)
        if not np.isfinite(ny) or ny == 0.0:
            raise ConvergenceFailure("inverse iteration produced a degenerate vector")
        x = y / ny
        ax = apply_op(x)
        mu = float(np.dot(x, ax))
        res = float(np.linalg.norm(ax - mu * x))
        if res < _TARGET_RES:
            break
    tries = 0
    while res > _TARGET_RES and tries < polish_rounds:
        eps = max(1e-9, 1e-9 * abs(mu)) * 10.0**tries
        try:
            solve2 = make_solver(mu - eps)
        except RuntimeError:
            tries += 1
            continue
        for _ in range(4):
            y = solve2(x)
            ny = np.linalg.norm(y)
            if not np.isfinite(ny) or ny == 0.0:
                break
            x = y / ny
            ax = apply_op(x)
            mu = float(np.dot(x, ax))
            res = float(np.linalg.norm(ax - mu * x))
            if res < _TARGET_RES:
                break
        tries += 1
    if res > RESIDUAL_TOL:
        raise ConvergenceFailure(f"eigen residual {res:.3e} above {RESIDUAL_TOL}")
    return mu, x, res


def principal_eigenpair(grid_or_field, c: ScalarField | None = None):
    """Smallest eigenpair of -Laplacian + c with zero Dirichlet data.

    Returns the eigenvalue and the eigenfunction normalized to unit L2 norm
    with positive integral (the first eigenfunction is sign-definite).
    """
    if isinstance(grid_or_field, Grid):
        grid = grid_or_field
    else:
        c = grid_or_field
        grid = c.grid
    A = grid.laplacian
    if c is not None:
        if not np.all(np.isfinite(c.values)):
            raise ConvergenceFailure("coefficient field must be finite")
        A = (A + sparse.diags(c.values)).tocsr()
        sigma0 = min(0.0, float(np.min(c.values))) - 1.0
    else:
        sigma0 = -1.0
    n = grid.n_interior
    ident = sparse.identity(n, format="csr")

    def make_solver(sigma):
        lu = splu((A - sigma * ident).tocsc())
        return lu.solve

    mu, x, _ = _inverse_iteration(A.dot, make_solver, sigma0, n)
    vals = x / grid.h  # unit vector -> unit L2 norm field
    if grid.cell_area * np.sum(vals) < 0:
        vals = -vals
    return mu, ScalarField(grid, vals)


def coercivity_delta(gprime_field: ScalarField) -> float:
    """Smallest eigenvalue of the rank-one-corrected linearized operator.

    The quadratic form is |grad u|^2 - c u^2 plus the nonnegative correction
    (integral of c u)^2 / (integral of c); the correction is applied
    matrix-free through a Sherman-Morrison solve, keeping factorizations
    sparse.  Requires the weight to have positive total mass.
    """
    grid = gprime_field.grid
    c = gprime_field.values
    mass = integral(gprime_field)
    if mass <= 0.0:
        raise MassViolation(f"weight mass {mass:.3e} must be positive")
    A = (grid.laplacian - sparse.diags(c)).tocsr()
    v = np.array(c)
    S = float(np.sum(c))
    n = grid.n_interior
    ident = sparse.identity(n, format="csr")

    def apply_op(x):
        return A @ x + v * (np.dot(v, x) / S)

    def make_solver(sigma):
        lu = splu((A - sigma * ident).tocsc())
        w = lu.solve(v)
        denom = S + float(np.dot(v, w))
        if denom == 0.0 or not np.isfinite(denom):
            raise RuntimeError("singular Sherman-Morrison denominator")

        def solve(b):
            y0 = lu.solve(b)
            return y0 - w * (np.dot(v, y0) / denom)

        return solve

    sigma0 = -max(float(np.max(c)), 0.0) - 1.0
    delta, _, _ = _inverse_iteration(apply_op, make_solver, sigma0, n)
    return delta


def classify_stability(steady, tol: float = CLASSIFY_TOL,
                       probe_density: int = 1024) -> StabilityCertificate:
    """Evaluate every certificate the profile supports and keep the strongest.

    Labels, in increasing generality: a strictly decreasing profile is an
    energy minimizer (``arnold_first``); slopes pinched in (0, lambda1] give a
    global maximizer (``arnold_second``); a strictly increasing profile with a
    positive linearized eigenvalue gives a local maximizer (``wolansky_ghil``);
    a nondecreasing profile whose corrected form is coercive while the
    linearized operator stays nonnegative certifies the semistable criterion
    (``semistable``), which also covers the degenerate zero-mass branch where
    the vorticity is constant.
    """
    profile = steady.profile
    grid = steady.omega_bar.grid
    m, M = profile.m, profile.M
    span_pts = probe_points(m, M, probe_density)
    gp_probe = np.asarray(profile.gprime(span_pts), dtype=float)
    g_probe = np.asarray(profile.g(span_pts), dtype=float) if M > m else np.array([0.0])
    lam1 = grid.lambda1
    cvals = np.asarray(profile.gprime(steady.psi_bar.values), dtype=float)
    cfield = ScalarField(grid, cvals)
    mu1, _ = principal_eigenpair(grid, -1.0 * cfield)
    mass = integral(cfield)

    labels: list[str] = []
    evidence = {
        "min_gprime": float(np.min(gp_probe)),
        "max_gprime": float(np.max(gp_probe)),
        "strictly_increasing": bool(M > m and np.all(np.diff(g_probe) > 0)),
        "tol": tol,
    }
    nondecreasing = profile.kind == "nondecreasing"
    if np.max(gp_probe) < -tol:
        labels.append(ARNOLD_FIRST)
    delta = None
    if nondecreasing:
        if np.min(gp_probe) > tol and np.max(gp_probe) <= lam1 + tol:
            labels.append(ARNOLD_SECOND)
        if evidence["strictly_increasing"] and mu1 > tol:
            labels.append(WOLANSKY_GHIL)
        if mass <= _MASS_TOL:
            # zero total slope mass forces a constant vorticity, which is stable
            evidence["degenerate_mass"] = True
            labels.append(SEMISTABLE)
        else:
            evidence["degenerate_mass"] = False
            delta = coercivity_delta(cfield)
            if delta > tol and mu1 >= -tol:
                labels.append(SEMISTABLE)
    classification = next((lbl for lbl in _STRENGTH if lbl in labels), NO_CERTIFICATE)
    return StabilityCertificate(
        lambda1=lam1,
        mu1=mu1,
        delta=delta,
        mass_gprime=mass,
        labels=tuple(labels),
        classification=classification,
        profile_id=profile.profile_id,
        grid_info={"kind": grid.kind, "nx": grid.nx, "ny": grid.ny, "h": grid.h},
        evidence=evidence,
    )
