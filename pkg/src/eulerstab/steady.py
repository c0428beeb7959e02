"""Construction of steady vorticity fields.

Every construction ends in the same packaging step: the vorticity is the
profile applied to the stream function, the stream function is re-solved from
that vorticity, the profile core is refit to the realized stream-function
range (boundary value zero included), and both the semilinear residual and a
weak-form steadiness residual against a library of compactly supported test
bumps are recorded.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .errors import InvalidSpec, NoConvergence, ResonanceError
from .grid import (
    Grid,
    ScalarField,
    dirichlet_energy,
    gradient_fields,
    inner,
    integral,
    lp_norm,
    perp_gradient,
)
from .monotone import (
    DecreasingProfile,
    MonotoneProfile,
    extend_decreasing,
    extend_monotone,
)
from .rearrange import bump_field, safe_bump_width

__all__ = [
    "SteadyState",
    "linear_steady",
    "solve_semilinear",
    "lane_emden_solve",
    "steady_residual",
    "default_test_fields",
]

SEMILINEAR_TOL = 1e-10
MAX_ITER = 500


@dataclass(frozen=True)
class SteadyState:
    """A steady vorticity field with its stream function and profile."""

    omega_bar: ScalarField
    psi_bar: ScalarField
    profile: MonotoneProfile | DecreasingProfile
    m: float
    M: float
    residual_weak: float
    residual_semilinear: float
    construction: str
    extras: dict = dataclass_field(default_factory=dict)

    @property
    def grid(self) -> Grid:
        return self.omega_bar.grid

    @property
    def M0(self) -> float:
        return integral(self.omega_bar)

    def metadata(self) -> dict:
        return {
            "construction": self.construction,
            "m": self.m,
            "M": self.M,
            "residual_weak": self.residual_weak,
            "residual_semilinear": self.residual_semilinear,
            "M0": self.M0,
            "profile_id": self.profile.profile_id,
            **self.extras,
        }


def _range_with_boundary(psi_vals: np.ndarray) -> tuple[float, float]:
    # the stream function vanishes on the wall, so the closed-domain range
    # always includes zero
    return min(0.0, float(np.min(psi_vals))), max(0.0, float(np.max(psi_vals)))


def _refit_profile(profile, m: float, M: float):
    if profile.m == m and profile.M == M:
        return profile
    core = profile.g_ext.clipped(m, M)
    if profile.kind == "nondecreasing":
        return extend_monotone(core, m=m, M=M)
    return extend_decreasing(core, m=m, M=M)


def _package(grid: Grid, psi_vals: np.ndarray, profile, construction: str,
             extras: dict | None = None) -> SteadyState:
    omega = ScalarField(grid, profile.g_ext(psi_vals))
    psi_bar = grid.green.apply(omega)
    m, M = _range_with_boundary(psi_bar.values)
    profile = _refit_profile(profile, m, M)
    residual_semilinear = lp_norm(
        ScalarField(grid, omega.values - profile.g_ext(psi_bar.values)), 2.0
    )
    residual_weak = steady_residual(omega, psi=psi_bar)
    return SteadyState(
        omega_bar=omega,
        psi_bar=psi_bar,
        profile=profile,
        m=m,
        M=M,
        residual_weak=residual_weak,
        residual_semilinear=residual_semilinear,
        construction=construction,
        extras=dict(extras or {}),
    )


# ---------------------------------------------------------------------------
# constructions
# ---------------------------------------------------------------------------


def linear_steady(alpha: float, beta: float, grid: Grid) -> SteadyState:
    """Steady flow with an affine profile: solve (-Laplacian - alpha) psi = beta.

    Positivity of the stream function is only guaranteed below the principal
    eigenvalue; solves between eigenvalues are allowed and simply produce
    two-signed states (useful as uncertified contrast cases).
    """
    lam1 = grid.lambda1
    if abs(lam1 - alpha) < 1e-6:
        raise ResonanceError(f"alpha={alpha} within 1e-6 of the principal eigenvalue {lam1}")
    n = grid.n_interior
    mat = (grid.laplacian - alpha * sparse.identity(n, format="csr")).tocsc()
    try:
        psi_vals = splu(mat).solve(np.full(n, float(beta)))
    except RuntimeError as exc:
        raise ResonanceError(f"resolvent solve failed at alpha={alpha}: {exc}") from exc
    m, M = _range_with_boundary(psi_vals)
    if alpha >= 0:
        profile = MonotoneProfile.affine(alpha, beta, m, M)
    else:
        profile = DecreasingProfile.affine(alpha, beta, m, M)
    return _package(grid, psi_vals, profile, "linear",
                    {"alpha": float(alpha), "beta": float(beta)})


def solve_semilinear(profile, grid: Grid, init: ScalarField | None = None,
                     method: str = "damped-fixed-point", tol: float = SEMILINEAR_TOL,
                     max_iter: int = MAX_ITER) -> SteadyState:
    """Solve -Laplacian(psi) = g(psi) for the given profile.

    ``damped-fixed-point`` iterates psi <- (1-theta) psi + theta G(g(psi))
    with theta starting at 1, halving whenever the residual grows, floored at
    1/64.  ``newton`` solves (-Laplacian - g'(psi)) delta = g(psi) + Laplacian(psi).
    Convergence is measured by the L2 norm of psi - G(g(psi)).
    """
    green = grid.green
    g_ext = profile.g_ext

    def residual_vec(psi_vals):
        return green.solve_values(np.asarray(g_ext(psi_vals), dtype=float)) - psi_vals

    def l2(vec):
        return float(np.sqrt(grid.cell_area * np.dot(vec, vec)))

    psi = np.zeros(grid.n_interior) if init is None else np.array(init.values)
    r = residual_vec(psi)
    res = l2(r)
    theta = 1.0
    if method == "damped-fixed-point":
        for _ in range(max_iter):
            if res < tol:
                break
            while True:
                cand = psi + theta * r
                r_cand = residual_vec(cand)
                res_cand = l2(r_cand)
                if res_cand <= res or theta <= 1.0 / 64.0:
                    psi, r, res = cand, r_cand, res_cand
                    break
                theta *= 0.5
        else:
            raise NoConvergence(f"fixed point stalled at residual {res:.3e}", res)
    elif method == "newton":
        gprime = profile.gprime
        for _ in range(max_iter):
            if res < tol:
                break
            rhs = np.asarray(g_ext(psi), dtype=float) - grid.laplacian @ psi
            jac = (grid.laplacian - sparse.diags(np.asarray(gprime(psi), dtype=float))).tocsc()
            try:
                delta = splu(jac).solve(rhs)
            except RuntimeError as exc:
                raise NoConvergence(f"singular Newton system: {exc}", res) from exc
            while True:
                cand = psi + theta * delta
                r_cand = residual_vec(cand)
                res_cand = l2(r_cand)
                if res_cand <= res or theta <= 1.0 / 64.0:
                    psi, r, res = cand, r_cand, res_cand
                    break
                theta *= 0.5
        else:
            raise NoConvergence(f"newton stalled at residual {res:.3e}", res)
    else:
        raise InvalidSpec(f"unknown method {method!r}")
    return _package(grid, psi, profile, f"semilinear-{method}", {"iter_residual": res})


def lane_emden_solve(p_exp: float, grid: Grid, tol: float = 1e-13,
                     max_iter: int = MAX_ITER) -> SteadyState:
    """Positive solution of -Laplacian(psi) = psi**p by constrained descent.

    Works on the normalized problem: minimize the Dirichlet energy over
    nonnegative fields with unit (p+1)-norm, taking preconditioned steps
    u <- G(u^p) renormalized each iteration (the update direction is the
    energy gradient preconditioned by the Green operator, clipped at zero).
    The multiplier is the final Dirichlet energy and rescales u to the
    unnormalized solution.
    """
    if not (1.0 < p_exp < 5.0):
        raise InvalidSpec(f"exponent {p_exp} outside (1, 5)")
    green = grid.green
    area = grid.cell_area
    pw = p_exp + 1.0

    def normalize(vals):
        scale = (area * np.sum(np.maximum(vals, 0.0) ** pw)) ** (1.0 / pw)
        if scale == 0.0:
            raise NoConvergence("iterate collapsed to zero", None)
        return vals / scale

    u = normalize(np.array(grid.lambda1_pair[1].values))
    theta = 1.0
    diff = np.inf
    for _ in range(max_iter):
        w = normalize(green.solve_values(np.maximum(u, 0.0) ** p_exp))
        cand = normalize(np.maximum((1.0 - theta) * u + theta * w, 0.0))
        step = float(np.sqrt(area * np.sum((cand - u) ** 2)))
        if step > diff:
            theta = max(theta * 0.5, 1.0 / 64.0)
        diff = step
        u = cand
        if diff < tol:
            break
    lam = dirichlet_energy(ScalarField(grid, u))
    psi = lam ** (1.0 / (p_exp - 1.0)) * u
    resid_vec = green.solve_values(np.maximum(psi, 0.0) ** p_exp) - psi
    resid = float(np.sqrt(area * np.dot(resid_vec, resid_vec)))
    if resid > 1e-8:
        raise NoConvergence(f"ground-state iteration residual {resid:.3e}", resid)
    profile = MonotoneProfile.power_law(p_exp, float(np.max(psi)))
    state = _package(grid, psi, profile, "lane-emden",
                     {"p": float(p_exp), "multiplier": float(lam)})
    return state


# ---------------------------------------------------------------------------
# weak-form steadiness residual
# ---------------------------------------------------------------------------


def default_test_fields(grid: Grid, count: int = 20) -> list[ScalarField]:
    """Deterministic library of interior-supported smooth bumps."""
    fx = (0.18, 0.34, 0.50, 0.66, 0.82)
    fy = (0.20, 0.40, 0.60, 0.80)
    x_org = grid.x0 - grid.h
    y_org = grid.y0 - grid.h
    fields = []
    for j, gy in enumerate(fy):
        for i, gx in enumerate(fx):
            if len(fields) >= count:
                break
            center = (x_org + gx * grid.lx, y_org + gy * grid.ly)
            width = safe_bump_width(grid, center, 0.16 * grid.length_scale)
            if width <= 3.0 * grid.h:
                continue
            fields.append(bump_field(grid, center, width, 1.0))
    return fields


def steady_residual(omega: ScalarField, test_fields: list[ScalarField] | None = None,
                    psi: ScalarField | None = None) -> float:
    """Largest weak-form residual |integral of omega * (v . grad xi)| over the
    test set, normalized by the H1 norm of each test field."""
    grid = omega.grid
    if psi is None:
        psi = grid.green.apply(omega)
    if test_fields is None:
        test_fields = default_test_fields(grid)
    vel = perp_gradient(psi)
    worst = 0.0
    for xi in test_fields:
        xi_x, xi_y = gradient_fields(xi)
        pairing = grid.cell_area * float(
            np.sum(omega.values * (vel.u * xi_x.values + vel.v * xi_y.values))
        )
        h1 = float(np.sqrt(inner(xi, xi) + dirichlet_energy(xi)))
        if h1 > 0:
            worst = max(worst, abs(pairing) / h1)
    return worst
