"""Discrete domain, fields, and quadrature.

A grid is a uniform node lattice with implicit zero Dirichlet values outside
the interior mask.  Rectangles use the full lattice; disks are handled by a
staircase mask on the bounding box.  Fields store one value per interior node
(row-major mask order) and are immutable after construction.

Quadrature is the cell sum ``h^2 * sum(values)``, consistent with reading the
node values as piecewise-constant cell data.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dataclass_field
from functools import cached_property

import numpy as np
from scipy import ndimage

from .errors import GridMismatch, InvalidSpec

__all__ = [
    "Grid",
    "ScalarField",
    "VelocityField",
    "build_grid",
    "integral",
    "lp_norm",
    "inner",
    "energy_inner",
    "field_reduce",
    "perp_gradient",
    "gradient_fields",
    "divergence",
    "laplacian_apply",
    "dirichlet_energy",
]

MIN_RESOLUTION = 8


class Grid:
    """Uniform interior-node lattice with Dirichlet exterior.

    Parameters
    ----------
    kind : "rectangle" or "disk"
    h : node spacing
    x0, y0 : physical coordinates of the interior lattice node (ix=0, iy=0)
    mask : (ny, nx) bool array of interior membership
    lx, ly : extents of the bounding box of the open domain
    params : geometry parameters used to build the grid
    """

    def __init__(self, kind, h, x0, y0, mask, lx, ly, params=None):
        mask = np.array(mask, dtype=bool)
        mask.flags.writeable = False
        self.kind = kind
        self.h = float(h)
        self.x0 = float(x0)
        self.y0 = float(y0)
        self.mask = mask
        self.lx = float(lx)
        self.ly = float(ly)
        self.params = dict(params or {})
        self.ny, self.nx = mask.shape
        self.n_interior = int(mask.sum())
        index = np.full(mask.shape, -1, dtype=np.int64)
        index[mask] = np.arange(self.n_interior)
        index.flags.writeable = False
        self.index = index
        iy, ix = np.nonzero(mask)
        self._iy, self._ix = iy, ix

    # -- geometry ------------------------------------------------------------

    @property
    def cell_area(self) -> float:
        return self.h * self.h

    @property
    def domain_area(self) -> float:
        return self.n_interior * self.cell_area

    @property
    def length_scale(self) -> float:
        return min(self.lx, self.ly)

    def coords(self):
        """Physical coordinates (x, y) of the interior nodes, packed order."""
        return self.x0 + self._ix * self.h, self.y0 + self._iy * self.h

    def compatible(self, other: "Grid") -> bool:
        return (
            self is other
            or (
                self.kind == other.kind
                and self.h == other.h
                and self.mask.shape == other.mask.shape
                and bool(np.all(self.mask == other.mask))
            )
        )

    # -- packing -------------------------------------------------------------

    def scatter(self, values: np.ndarray) -> np.ndarray:
        """Packed values -> (ny+2, nx+2) array, zero on the Dirichlet exterior."""
        out = np.zeros((self.ny + 2, self.nx + 2))
        out[1:-1, 1:-1][self.mask] = values
        return out

    def gather(self, padded: np.ndarray) -> np.ndarray:
        return padded[1:-1, 1:-1][self.mask]

    def scatter2(self, values: np.ndarray) -> np.ndarray:
        """Two-ring padded scatter (cubic-stencil layout), zero exterior."""
        out = np.zeros((self.ny + 4, self.nx + 4))
        out[2:-2, 2:-2][self.mask] = values
        return out

    # -- field constructors ----------------------------------------------------

    def field(self, values) -> "ScalarField":
        return ScalarField(self, values)

    def zeros(self) -> "ScalarField":
        return ScalarField(self, np.zeros(self.n_interior))

    def field_from_fn(self, fn) -> "ScalarField":
        x, y = self.coords()
        return ScalarField(self, np.asarray(fn(x, y), dtype=float))

    # -- cached operators -------------------------------------------------------

    @cached_property
    def laplacian(self):
        """Sparse 5-point -Laplacian over packed interior nodes (CSR, SPD)."""
        from scipy import sparse

        ih2 = 1.0 / (self.h * self.h)
        pad = np.full((self.ny + 2, self.nx + 2), -1, dtype=np.int64)
        pad[1:-1, 1:-1] = self.index
        center = self.index[self.mask]
        rows = [center]
        cols = [center]
        data = [np.full(self.n_interior, 4.0 * ih2)]
        for dy, dx in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            nb = pad[1 + dy : self.ny + 1 + dy, 1 + dx : self.nx + 1 + dx][self.mask]
            sel = nb >= 0
            rows.append(center[sel])
            cols.append(nb[sel])
            data.append(np.full(int(sel.sum()), -ih2))
        mat = sparse.coo_matrix(
            (np.concatenate(data), (np.concatenate(rows), np.concatenate(cols))),
            shape=(self.n_interior, self.n_interior),
        )
        return mat.tocsr()

    @cached_property
    def green(self):
        from .elliptic import GreenOperator

        return GreenOperator(self)

    @cached_property
    def lambda1_pair(self):
        """Principal Dirichlet eigenpair of the 5-point -Laplacian."""
        from .spectral import principal_eigenpair

        return principal_eigenpair(self, None)

    @property
    def lambda1(self) -> float:
        return self.lambda1_pair[0]

    def __repr__(self):
        return f"Grid({self.kind}, {self.ny}x{self.nx} nodes, h={self.h:g})"


@dataclass(frozen=True)
class ScalarField:
    """Real values on the interior nodes of a grid (immutable)."""

    grid: Grid
    values: np.ndarray = dataclass_field(repr=False)

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.shape != (self.grid.n_interior,):
            raise GridMismatch(
                f"value count {vals.shape} does not match "
                f"{self.grid.n_interior} interior nodes"
            )
        if not np.all(np.isfinite(vals)):
            raise InvalidSpec("field values must be finite")
        vals.flags.writeable = False
        object.__setattr__(self, "values", vals)

    def __add__(self, other: "ScalarField") -> "ScalarField":
        _require_same_grid(self, other)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        _require_same_grid(self, other)
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, scalar: float) -> "ScalarField":
        return ScalarField(self.grid, self.values * float(scalar))

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return ScalarField(self.grid, -self.values)


@dataclass(frozen=True)
class VelocityField:
    """Velocity components on the interior nodes (immutable)."""

    grid: Grid
    u: np.ndarray = dataclass_field(repr=False)
    v: np.ndarray = dataclass_field(repr=False)

    def __post_init__(self):
        for name in ("u", "v"):
            comp = np.array(getattr(self, name), dtype=float)
            if comp.shape != (self.grid.n_interior,):
                raise GridMismatch("component length does not match interior nodes")
            if not np.all(np.isfinite(comp)):
                raise InvalidSpec("velocity values must be finite")
            comp.flags.writeable = False
            object.__setattr__(self, name, comp)

    @property
    def max_speed(self) -> float:
        return float(np.sqrt(np.max(self.u * self.u + self.v * self.v))) if self.u.size else 0.0


def _require_same_grid(f, g):
    if not f.grid.compatible(g.grid):
        raise GridMismatch("fields live on incompatible grids")


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------


def build_grid(kind: str = "rectangle", n: int = 64, lx: float = 1.0, ly: float = 1.0,
               radius: float = 0.5) -> Grid:
    """Build a grid: ``rectangle`` with n cells along x, or ``disk`` with n
    cells across the diameter.  Interior nodes exclude the boundary."""
    if int(n) != n or n < MIN_RESOLUTION:
        raise InvalidSpec(f"resolution n={n} below minimum {MIN_RESOLUTION}")
    n = int(n)
    if kind == "rectangle":
        if lx <= 0 or ly <= 0:
            raise InvalidSpec("rectangle extents must be positive")
        h = lx / n
        ny_cells = round(ly / h)
        if ny_cells < MIN_RESOLUTION or abs(ny_cells * h - ly) > 1e-9 * max(lx, ly):
            raise InvalidSpec("ly must be an (>= 8)-cell multiple of the spacing lx/n")
        mask = np.ones((ny_cells - 1, n - 1), dtype=bool)
        return Grid("rectangle", h, h, h, mask, lx, ly, {"n": n, "lx": lx, "ly": ly})
    if kind == "disk":
        if radius <= 0:
            raise InvalidSpec("disk radius must be positive")
        h = 2.0 * radius / n
        coords = -radius + h * np.arange(1, n)
        xx, yy = np.meshgrid(coords, coords)
        mask = xx * xx + yy * yy < radius * radius
        if not mask.any():
            raise InvalidSpec("empty disk mask")
        labels, count = ndimage.label(mask)
        if count != 1:
            raise InvalidSpec("disk mask is not connected")
        return Grid("disk", h, coords[0], coords[0], mask, 2 * radius, 2 * radius,
                    {"n": n, "radius": radius})
    raise InvalidSpec(f"unknown grid kind {kind!r}")


# ---------------------------------------------------------------------------
# quadrature and reductions
# ---------------------------------------------------------------------------


def integral(f: ScalarField) -> float:
    return float(f.grid.cell_area * np.sum(f.values))


def lp_norm(f: ScalarField, p: float) -> float:
    if p <= 0:
        raise ValueError("p must be positive")
    if np.isinf(p):
        return float(np.max(np.abs(f.values))) if f.values.size else 0.0
    return float((f.grid.cell_area * np.sum(np.abs(f.values) ** p)) ** (1.0 / p))


def inner(f: ScalarField, g: ScalarField) -> float:
    _require_same_grid(f, g)
    return float(f.grid.cell_area * np.dot(f.values, g.values))


def energy_inner(f: ScalarField, g: ScalarField) -> float:
    """Green-operator inner product, integral of f * (inverse-Laplacian g)."""
    _require_same_grid(f, g)
    return inner(f, f.grid.green.apply(g))


def field_reduce(f: ScalarField, kind: str, other: ScalarField | None = None,
                 p: float | None = None) -> float:
    """Dispatcher over the cell-sum reductions."""
    if kind == "integral":
        return integral(f)
    if kind == "lp_norm":
        return lp_norm(f, 2.0 if p is None else p)
    if kind == "inner":
        if other is None:
            raise ValueError("inner reduction needs a second field")
        return inner(f, other)
    if kind == "energy_inner":
        if other is None:
            raise ValueError("energy_inner reduction needs a second field")
        return energy_inner(f, other)
    raise ValueError(f"unknown reduction {kind!r}")


# ---------------------------------------------------------------------------
# difference operators
# ---------------------------------------------------------------------------


def _padded2(grid: Grid, values: np.ndarray) -> np.ndarray:
    """Two-ring zero padding so centered differences exist on the first ring."""
    out = np.zeros((grid.ny + 4, grid.nx + 4))
    out[2:-2, 2:-2][grid.mask] = values
    return out


def velocity_padded(grid: Grid, psi_values: np.ndarray):
    """(u, v) = (d_y psi, -d_x psi) on the one-ring padded lattice.

    Exterior values are the Dirichlet zeros, so the perpendicular gradient and
    the 5-point Laplacian see the same boundary data and the centered discrete
    divergence vanishes identically.
    """
    p2 = _padded2(grid, psi_values)
    inv2h = 1.0 / (2.0 * grid.h)
    u_pad = (p2[2:, 1:-1] - p2[:-2, 1:-1]) * inv2h
    v_pad = -(p2[1:-1, 2:] - p2[1:-1, :-2]) * inv2h
    return u_pad, v_pad


def max_speed(grid: Grid, psi_values: np.ndarray) -> float:
    """Maximum interior node speed of the flow with the given stream function."""
    u_pad, v_pad = velocity_padded(grid, psi_values)
    u = u_pad[1:-1, 1:-1][grid.mask]
    v = v_pad[1:-1, 1:-1][grid.mask]
    return float(np.sqrt(np.max(u * u + v * v))) if u.size else 0.0


def perp_gradient(psi: ScalarField) -> VelocityField:
    """Perpendicular gradient of the stream function, centered differences."""
    u_pad, v_pad = velocity_padded(psi.grid, psi.values)
    g = psi.grid
    return VelocityField(g, g.gather(u_pad), g.gather(v_pad))


def gradient_fields(f: ScalarField):
    """Centered (d_x, d_y) with zero Dirichlet extension."""
    p2 = _padded2(f.grid, f.values)
    inv2h = 1.0 / (2.0 * f.grid.h)
    fx_pad = (p2[1:-1, 2:] - p2[1:-1, :-2]) * inv2h
    fy_pad = (p2[2:, 1:-1] - p2[:-2, 1:-1]) * inv2h
    g = f.grid
    return g.field(g.gather(fx_pad)), g.field(g.gather(fy_pad))


def divergence(vel: VelocityField) -> ScalarField:
    g = vel.grid
    u_pad = g.scatter(vel.u)
    v_pad = g.scatter(vel.v)
    inv2h = 1.0 / (2.0 * g.h)
    div = (u_pad[1:-1, 2:] - u_pad[1:-1, :-2]) * inv2h \
        + (v_pad[2:, 1:-1] - v_pad[:-2, 1:-1]) * inv2h
    return g.field(div[g.mask])


def laplacian_apply(f: ScalarField) -> ScalarField:
    return f.grid.field(f.grid.laplacian @ f.values)


def dirichlet_energy(f: ScalarField) -> float:
    """Discrete Dirichlet form, the integral of the squared gradient."""
    return inner(f, laplacian_apply(f))
