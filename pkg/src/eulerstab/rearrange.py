"""Rearrangement-class machinery.

Distribution functions (superlevel-set measures), an L1 distance between
sorted value sequences that vanishes exactly on discrete rearrangements, and
area-preserving perturbations built by flowing node positions along the
perpendicular gradient of a compactly supported generator field and pulling
values back by bilinear interpolation.  Bilinear pullback keeps new values
inside the old value range, so the perturbed fields stay honest candidates for
rearrangement-class tests up to the O(h^2) interpolation error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import kernels
from .errors import GridMismatch, SupportViolation
from .grid import Grid, ScalarField, velocity_padded

__all__ = [
    "DistributionCurve",
    "distribution_function",
    "default_thresholds",
    "rearrangement_distance",
    "bump_field",
    "collar_mask",
    "safe_bump_width",
    "perturb_area_preserving",
    "sample_specs",
    "apply_spec",
    "generate_samples",
]

COLLAR_CELLS = 2
MAX_SUBSTEP = 0.5  # max index-units of travel per tracing substep


@dataclass(frozen=True)
class DistributionCurve:
    """Superlevel measures mu(a) = area of {omega > a} at sorted thresholds."""

    thresholds: np.ndarray
    measures: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.thresholds, dtype=float)
        m = np.asarray(self.measures, dtype=float)
        object.__setattr__(self, "thresholds", t)
        object.__setattr__(self, "measures", m)

    def gap(self, other: "DistributionCurve") -> float:
        if not np.array_equal(self.thresholds, other.thresholds):
            raise ValueError("curves use different thresholds")
        return float(np.max(np.abs(self.measures - other.measures))) if self.measures.size else 0.0


def distribution_function(omega: ScalarField, thresholds) -> DistributionCurve:
    thresholds = np.asarray(thresholds, dtype=float)
    if np.any(np.diff(thresholds) < 0):
        raise ValueError("thresholds must be sorted")
    sorted_vals = np.sort(omega.values)
    # count of values strictly above each threshold
    counts = sorted_vals.size - np.searchsorted(sorted_vals, thresholds, side="right")
    return DistributionCurve(thresholds, counts * omega.grid.cell_area)


def default_thresholds(omega: ScalarField, count: int = 17) -> np.ndarray:
    lo = float(np.min(omega.values))
    hi = float(np.max(omega.values))
    if hi <= lo:
        return np.array([lo])
    return lo + (hi - lo) * np.arange(1, count + 1) / (count + 1)


def rearrangement_distance(omega1: ScalarField, omega2: ScalarField) -> float:
    """L1 distance of sorted values times cell area; zero iff the discrete
    fields are exact rearrangements of one another."""
    if not omega1.grid.compatible(omega2.grid):
        raise GridMismatch("fields live on incompatible grids")
    a = np.sort(omega1.values)
    b = np.sort(omega2.values)
    return float(omega1.grid.cell_area * np.sum(np.abs(a - b)))


# ---------------------------------------------------------------------------
# generator fields and flow perturbations
# ---------------------------------------------------------------------------


def _bump1d(u: np.ndarray) -> np.ndarray:
    out = np.zeros_like(u)
    inside = np.abs(u) < 1.0
    ui = u[inside]
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - ui * ui))
    return out


def bump_field(grid: Grid, center, width: float, amplitude: float = 1.0) -> ScalarField:
    """Tensor-product smooth bump, compactly supported in the square of
    half-side ``width`` around ``center`` (physical coordinates)."""
    x, y = grid.coords()
    vals = amplitude * _bump1d((x - center[0]) / width) * _bump1d((y - center[1]) / width)
    return ScalarField(grid, vals)


def collar_mask(grid: Grid, cells: int = COLLAR_CELLS) -> np.ndarray:
    """Interior nodes within ``cells`` steps of the Dirichlet exterior."""
    eroded = ndimage.binary_erosion(
        grid.mask, structure=ndimage.generate_binary_structure(2, 1),
        iterations=cells, border_value=0,
    )
    return grid.mask & ~eroded


def perturb_area_preserving(omega: ScalarField, xi: ScalarField, t: float,
                            max_substep: float = MAX_SUBSTEP) -> ScalarField:
    """Pull omega back along the flow of the perpendicular gradient of xi.

    Node positions are traced backward in time by classical four-stage
    one-step integration with substeps keeping the travel per substep below
    ``max_substep`` cells; values come from bilinear interpolation of the
    padded field.  xi must vanish on the boundary collar.
    """
    grid = omega.grid
    if not grid.compatible(xi.grid):
        raise GridMismatch("generator lives on a different grid")
    collar = collar_mask(grid)
    if np.any(xi.values[collar[grid.mask]] != 0.0):
        raise SupportViolation("generator field must vanish on the boundary collar")
    if t == 0.0:
        return ScalarField(grid, omega.values)
    u_pad, v_pad = velocity_padded(grid, xi.values)
    vmax = float(np.sqrt(np.max(u_pad * u_pad + v_pad * v_pad)))
    nsub = max(1, int(np.ceil(abs(t) * vmax / (max_substep * grid.h))))
    gy, gx = np.mgrid[1.0 : grid.ny + 1.0, 1.0 : grid.nx + 1.0]
    dt_h = (-t / nsub) / grid.h
    fx, fy = kernels.trace_rk4(u_pad, v_pad, gx, gy, dt_h, nsub)
    om_pad = grid.scatter(omega.values)
    new_vals = kernels.bilinear(om_pad, fx, fy)[grid.mask]
    return ScalarField(grid, new_vals)


# ---------------------------------------------------------------------------
# sampling helpers for stability experiments
# ---------------------------------------------------------------------------


def safe_bump_width(grid: Grid, center, width: float) -> float:
    """Clamp a bump half-width so its support square clears the collar."""
    cx, cy = center
    margin = (COLLAR_CELLS + 1.5) * grid.h
    if grid.kind == "disk":
        radius = grid.params["radius"]
        room = (radius - margin - float(np.hypot(cx, cy))) / np.sqrt(2.0)
    else:
        bx = cx - (grid.x0 - grid.h)
        by = cy - (grid.y0 - grid.h)
        room = min(bx, grid.lx - bx, by, grid.ly - by) - margin
    return min(width, max(room, 0.0))


def sample_specs(grid: Grid, count: int, seed: int = 0, t: float = 1e-2,
                 amplitude: float = 1.0) -> list[dict]:
    """Seeded library of perturbation specs: bump centers in the middle of
    the domain, widths safely inside the collar, a common flow time."""
    rng = np.random.default_rng(seed)
    cx0 = grid.x0 - grid.h
    cy0 = grid.y0 - grid.h
    specs = []
    for k in range(count):
        frac = rng.uniform(0.30, 0.70, size=2)
        width = rng.uniform(0.14, 0.26) * grid.length_scale
        center = (cx0 + frac[0] * grid.lx, cy0 + frac[1] * grid.ly)
        width = safe_bump_width(grid, center, width)
        specs.append(
            {
                "xi": {
                    "center": [float(center[0]), float(center[1])],
                    "width": float(width),
                    "amplitude": float(amplitude),
                },
                "t": float(t),
                "seed": int(seed),
                "index": k,
            }
        )
    return specs


def apply_spec(omega: ScalarField, spec: dict) -> ScalarField:
    xi_spec = spec["xi"]
    xi = bump_field(omega.grid, xi_spec["center"], xi_spec["width"], xi_spec["amplitude"])
    return perturb_area_preserving(omega, xi, spec["t"])


def generate_samples(omega: ScalarField, specs) -> list[tuple[ScalarField, dict]]:
    return [(apply_spec(omega, spec), spec) for spec in specs]
