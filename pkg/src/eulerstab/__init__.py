"""Stability laboratory for 2D steady incompressible Euler flows.

Certifies nonlinear stability of steady vorticity fields through spectral and
variational criteria (monotone-profile calculus, eigenvalue bounds, a
rank-one-corrected coercivity constant, supporting functionals) and validates
the certificates empirically by evolving perturbed vorticities under a
conservative semi-Lagrangian discretization of the transport equation.
"""

__version__ = "0.1.0"

from .energy import (
    FunctionalReport,
    ec_functional,
    kinetic_energy,
    minimize_d_lambda,
    supporting_gap,
)
from .grid import (
    Grid,
    ScalarField,
    VelocityField,
    build_grid,
    energy_inner,
    field_reduce,
    inner,
    integral,
    lp_norm,
    perp_gradient,
)
from .elliptic import green_apply
from .monotone import (
    DecreasingProfile,
    MonotoneProfile,
    antiderivative,
    extend_decreasing,
    extend_monotone,
    fenchel_gap,
    generalized_inverse,
    legendre_transform,
    profile_from_json,
    profile_to_json,
)
from .piecewise import Piece, PiecewiseFn, piecewise_from_samples
from .rearrange import (
    DistributionCurve,
    bump_field,
    distribution_function,
    perturb_area_preserving,
    rearrangement_distance,
)
from .simulate import (
    SimState,
    TrajectoryDiagnostics,
    make_state,
    run,
    stability_experiment,
    step,
    turnover_time,
)
from .spectral import (
    StabilityCertificate,
    classify_stability,
    coercivity_delta,
    principal_eigenpair,
)
from .steady import (
    SteadyState,
    lane_emden_solve,
    linear_steady,
    solve_semilinear,
    steady_residual,
)

__all__ = [
    "__version__",
    "Grid", "ScalarField", "VelocityField", "build_grid",
    "integral", "lp_norm", "inner", "energy_inner", "field_reduce",
    "perp_gradient", "green_apply",
    "Piece", "PiecewiseFn", "piecewise_from_samples",
    "MonotoneProfile", "DecreasingProfile",
    "generalized_inverse", "antiderivative", "legendre_transform",
    "fenchel_gap", "extend_monotone", "extend_decreasing",
    "profile_to_json", "profile_from_json",
    "StabilityCertificate", "principal_eigenpair", "coercivity_delta",
    "classify_stability",
    "SteadyState", "linear_steady", "solve_semilinear", "lane_emden_solve",
    "steady_residual",
    "FunctionalReport", "kinetic_energy", "ec_functional",
    "minimize_d_lambda", "supporting_gap",
    "DistributionCurve", "distribution_function", "rearrangement_distance",
    "perturb_area_preserving", "bump_field",
    "SimState", "TrajectoryDiagnostics", "make_state", "step", "run",
    "turnover_time", "stability_experiment",
]
