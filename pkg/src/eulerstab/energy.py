"""Kinetic energy, Casimir functionals, and the supporting functional.

The flow-invariant functional pairs the kinetic energy with the conjugate
Casimir: EC = E - integral of G^*(omega).  Its supporting functional is the
minimum over the shift parameter of

    D_lambda(omega) = -E(omega) ... written out:
    -(1/2) (omega, G omega) + integral of G(G omega - lambda) + lambda * M0,

whose minimizing shift solves ``integral of g(G omega - lambda) = M0`` and is
found by bisection on that nonincreasing function; when the root set is an
interval (plateau profiles) the infimum root is returned, which keeps the
shift of the steady state itself at exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ClassViolation, RootBracketFailure
from .grid import ScalarField, inner, integral
from .rearrange import rearrangement_distance

__all__ = [
    "FunctionalReport",
    "SupportingGapReport",
    "kinetic_energy",
    "ec_functional",
    "minimize_d_lambda",
    "supporting_gap",
]

LAMBDA_TOL = 1e-12


@dataclass(frozen=True)
class FunctionalReport:
    """Values of the energy-Casimir family at one vorticity field."""

    E: float
    casimir: float | None
    EC: float | None
    lambda_bar: float | None
    D_hat: float | None
    M0: float


def kinetic_energy(omega: ScalarField) -> float:
    """Half the Green-operator quadratic form; nonnegative."""
    return 0.5 * inner(omega, omega.grid.green.apply(omega))


def ec_functional(omega: ScalarField, profile) -> FunctionalReport:
    """Energy minus the conjugate Casimir, with the field mass recorded."""
    E = kinetic_energy(omega)
    casimir = float(omega.grid.cell_area * np.sum(profile.G_hat(omega.values)))
    return FunctionalReport(
        E=E, casimir=casimir, EC=E - casimir,
        lambda_bar=None, D_hat=None, M0=integral(omega),
    )


def _minimize_given_psi(omega: ScalarField, psi: ScalarField, profile, M0: float,
                        tol: float = LAMBDA_TOL):
    grid = omega.grid
    area = grid.cell_area
    psi_vals = psi.values
    g = profile.g_ext

    def mass_at(lam: float) -> float:
        return float(area * np.sum(g(psi_vals - lam)))

    span = max(1.0, profile.M - profile.m)
    lo = float(np.min(psi_vals)) - span
    hi = float(np.max(psi_vals)) + span
    for _ in range(60):
        if mass_at(lo) > M0:
            break
        lo -= span
        span *= 2.0
    else:
        raise RootBracketFailure("could not bracket the shift from below")
    span = max(1.0, profile.M - profile.m)
    for _ in range(60):
        if mass_at(hi) <= M0:
            break
        hi += span
        span *= 2.0
    else:
        raise RootBracketFailure("could not bracket the shift from above")
    # leftmost root: bisection on the monotone predicate mass(lambda) <= M0
    for _ in range(200):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        if mass_at(mid) <= M0:
            hi = mid
        else:
            lo = mid
    lam = hi
    d_hat = (
        -0.5 * inner(omega, psi)
        + float(area * np.sum(profile.G(psi_vals - lam)))
        + lam * M0
    )
    return lam, d_hat


def minimize_d_lambda(omega: ScalarField, profile, M0: float,
                      tol: float = LAMBDA_TOL):
    """Minimizing shift and the supporting-functional value at omega.

    Requires a nondecreasing profile (its extension has positive asymptotic
    slopes, which guarantees a finite bracket).
    """
    psi = omega.grid.green.apply(omega)
    return _minimize_given_psi(omega, psi, profile, M0, tol=tol)


@dataclass(frozen=True)
class SupportingGapReport:
    """Per-sample supporting-functional and energy comparisons."""

    rows: list[dict]
    summary: dict


def supporting_gap(steady, samples, class_tol: float | None = None) -> SupportingGapReport:
    """Evaluate the supporting-functional inequalities over class samples.

    Each sample must sit in the rearrangement class of the steady vorticity up
    to ``class_tol`` (defaults to 2 percent of the value span times the domain
    area, the scale of the flow-map interpolation error on coarse grids).
    Rows carry E, EC, the supporting value and its gap, plus the energy
    comparison against the steady state.  For decreasing profiles only the
    energy comparison is defined.
    """
    omega_bar = steady.omega_bar
    grid = omega_bar.grid
    span = float(np.max(omega_bar.values) - np.min(omega_bar.values))
    if class_tol is None:
        class_tol = 0.02 * max(span, 1e-12) * grid.domain_area
    monotone = steady.profile.kind == "nondecreasing"
    M0 = steady.M0
    E_bar = 0.5 * inner(omega_bar, steady.psi_bar)
    if monotone:
        ec_bar = ec_functional(omega_bar, steady.profile)
        lam_bar, d_hat_bar = _minimize_given_psi(
            omega_bar, steady.psi_bar, steady.profile, M0
        )
    rows = []
    for k, item in enumerate(samples):
        sample, spec = item if isinstance(item, tuple) else (item, None)
        dist = rearrangement_distance(omega_bar, sample)
        if dist > class_tol:
            raise ClassViolation(
                f"sample {k}: rearrangement distance {dist:.3e} above {class_tol:.3e}"
            )
        psi = grid.green.apply(sample)
        E = 0.5 * inner(sample, psi)
        row = {
            "sample_id": k,
            "E": E,
            "e_gap": E_bar - E,
            "class_distance": dist,
        }
        if monotone:
            report = ec_functional(sample, steady.profile)
            lam, d_hat = _minimize_given_psi(sample, psi, steady.profile, M0)
            row.update(
                EC=report.EC,
                lambda_bar=lam,
                D_hat=d_hat,
                gap=d_hat - report.EC,
                ec_gap=ec_bar.EC - report.EC,
            )
        if spec is not None:
            row["spec"] = spec
        rows.append(row)
    summary = {
        "count": len(rows),
        "E_bar": E_bar,
        "min_e_gap": min((r["e_gap"] for r in rows), default=None),
        "max_e_gap": max((r["e_gap"] for r in rows), default=None),
    }
    if monotone:
        summary.update(
            EC_bar=ec_bar.EC,
            D_hat_bar=d_hat_bar,
            lambda_bar_steady=lam_bar,
            min_gap=min((r["gap"] for r in rows), default=None),
            max_gap=max((r["gap"] for r in rows), default=None),
        )
    return SupportingGapReport(rows=rows, summary=summary)
