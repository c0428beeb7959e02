"""Shared test utilities: analytic oracles and seeded generators."""

from __future__ import annotations

import numpy as np

from eulerstab.piecewise import Piece, PiecewiseFn


def discrete_lambda(n: int, j: int = 1, k: int = 1) -> float:
    """Analytic eigenvalue of the 5-point -Laplacian on the unit square with
    n cells per side (interior lattice (n-1) x (n-1))."""
    h = 1.0 / n
    return (4.0 / h**2) * (np.sin(j * np.pi * h / 2.0) ** 2 + np.sin(k * np.pi * h / 2.0) ** 2)


def discrete_eigenfield(grid, j: int = 1, k: int = 1):
    """Unit-L2 eigenfunction of the discrete Laplacian on the unit square."""
    x, y = grid.coords()
    return grid.field(2.0 * np.sin(j * np.pi * x) * np.sin(k * np.pi * y))


def torsion_series(x: float, y: float, terms: int = 400) -> float:
    """Fourier series for the unit-square torsion function at one point."""
    total = 0.0
    for m in range(1, terms, 2):
        for n in range(1, terms, 2):
            coef = 16.0 / (np.pi**4 * m * n * (m * m + n * n))
            total += coef * np.sin(m * np.pi * x) * np.sin(n * np.pi * y)
    return total


def torsion_integral(terms: int = 400) -> float:
    """Integral of the torsion function over the unit square."""
    total = 0.0
    for m in range(1, terms, 2):
        for n in range(1, terms, 2):
            # integral of sin(m pi x) over [0,1] is 2/(m pi) for odd m
            total += 16.0 / (np.pi**4 * m * n * (m * m + n * n)) * (2.0 / (m * np.pi)) * (
                2.0 / (n * np.pi)
            )
    return total


def random_monotone_core(rng: np.random.Generator, decreasing: bool = False) -> PiecewiseFn:
    """Random monotone piecewise-linear/quadratic function on a random interval.

    Built by exactly integrating a nonnegative piecewise-linear slope (so the
    result is C1 piecewise-quadratic), with optional flat stretches; slopes
    live in [0.05, 20] away from the plateaus.
    """
    k = int(rng.integers(1, 5))
    breaks = np.sort(rng.uniform(-3.0, 3.0, size=k + 1))
    while np.min(np.diff(breaks)) < 0.1:
        breaks = np.sort(rng.uniform(-3.0, 3.0, size=k + 1))
    slopes = rng.uniform(0.05, 20.0, size=k + 1)
    flat = rng.random(size=k + 1) < 0.25
    slopes[flat] = 0.0
    if flat.all():
        slopes[0] = rng.uniform(0.05, 20.0)
    pieces = []
    value = float(rng.uniform(-2.0, 2.0))
    for i in range(k):
        lo, hi = float(breaks[i]), float(breaks[i + 1])
        s0, s1 = float(slopes[i]), float(slopes[i + 1])
        # slope increases linearly from s0 to s1 over the piece
        rate = (s1 - s0) / (hi - lo)
        # q(s) = value + s0*(s-lo) + rate*(s-lo)^2/2, expanded in absolute coords
        a2 = rate / 2.0
        a1 = s0 - 2.0 * a2 * lo
        a0 = value - s0 * lo + a2 * lo * lo
        pieces.append(Piece(lo, hi, (a0, a1, a2)))
        value = value + s0 * (hi - lo) + a2 * (hi - lo) ** 2
    fn = PiecewiseFn(pieces)
    return fn.scale_values(-1.0) if decreasing else fn


def smooth_blob(center, width, amplitude=1.0):
    """Compactly supported smooth bump as a coordinate function."""

    def fn(x, y):
        r2 = ((x - center[0]) ** 2 + (y - center[1]) ** 2) / width**2
        out = np.zeros_like(x)
        inside = r2 < 1.0
        out[inside] = amplitude * np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
        return out

    return fn
