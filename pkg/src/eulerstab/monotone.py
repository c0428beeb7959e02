"""Calculus of monotone scalar functions.

Generalized inverses, antiderivatives, convex conjugates, and the C1 monotone
extension of a nondecreasing function from a compact interval to the whole
line.  The extension continues with the tangent line where the end slope is
positive and with a quadratic-then-linear junction where it vanishes, so the
result is C1, strictly increasing outside the core interval, and has positive
asymptotic slopes on both sides.  Those slopes make the conjugate finite
everywhere, which is what the energy functionals downstream rely on.

All operations are pure and the returned objects are immutable, so profiles
can be evaluated concurrently.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import (
    CoercivityViolation,
    MonotonicityViolation,
    QuadratureFailure,
    RegularityViolation,
)
from .piecewise import Piece, PiecewiseFn, piecewise_from_samples

__all__ = [
    "PROBE_DENSITY",
    "BisectionInverse",
    "QuadratureAntiderivative",
    "SupConjugate",
    "generalized_inverse",
    "antiderivative",
    "legendre_transform",
    "fenchel_gap",
    "extend_monotone",
    "extend_decreasing",
    "MonotoneProfile",
    "DecreasingProfile",
    "profile_to_json",
    "profile_from_json",
]

PROBE_DENSITY = 1024  # probe points per unit interval for monotonicity checks
EXTENSION_TAG = "tangent-quadratic"
_SLOPE_EPS = 1e-12
_BRACKET_CAP = 64
_BISECT_ITERS = 120


def probe_points(lo: float, hi: float, density: int = PROBE_DENSITY) -> np.ndarray:
    n = max(2, int(np.ceil(density * (hi - lo))) + 1)
    return np.linspace(lo, hi, n)


def check_monotone(fn, lo, hi, mode: str, density: int = PROBE_DENSITY, atol: float = 1e-12):
    """Probe-grid monotonicity check; raises MonotonicityViolation on failure."""
    pts = probe_points(lo, hi, density)
    vals = np.asarray(fn(pts), dtype=float)
    diffs = np.diff(vals)
    scale = max(1.0, float(np.max(np.abs(vals))))
    if mode == "nondecreasing":
        ok = np.all(diffs >= -atol * scale)
    elif mode == "decreasing":
        ok = np.all(diffs < 0)
    elif mode == "any":
        ok = np.all(diffs >= -atol * scale) or np.all(diffs <= atol * scale)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    if not ok:
        raise MonotonicityViolation(f"function is not {mode} on [{lo}, {hi}]")


class BisectionInverse:
    """Generalized inverse evaluated lazily by bisection.

    For nondecreasing q this is s -> inf{tau : q(tau) = s} (the left edge of
    the level set, hence left-continuous at plateau jumps); for strictly
    decreasing q it is s -> inf{tau : q(tau) <= s}.
    """

    def __init__(self, q: Callable, mode: str):
        if mode not in ("nondecreasing", "decreasing"):
            raise ValueError(f"unknown mode {mode!r}")
        self.q = q
        self.mode = mode

    def _predicate(self, tau, s):
        qv = np.asarray(self.q(tau), dtype=float)
        return qv >= s if self.mode == "nondecreasing" else qv <= s

    def __call__(self, s):
        arr = np.asarray(s, dtype=float)
        scalar = arr.ndim == 0
        flat = np.atleast_1d(arr).astype(float)
        lo = np.full_like(flat, -1.0)
        hi = np.full_like(flat, 1.0)
        for _ in range(_BRACKET_CAP):
            bad_lo = self._predicate(lo, flat)
            bad_hi = ~self._predicate(hi, flat)
            if not (np.any(bad_lo) or np.any(bad_hi)):
                break
            lo[bad_lo] *= 2.0
            hi[bad_hi] *= 2.0
        else:
            raise CoercivityViolation(
                "could not bracket the generalized inverse; "
                "input does not escape to +/- infinity"
            )
        for _ in range(_BISECT_ITERS):
            mid = 0.5 * (lo + hi)
            take = self._predicate(mid, flat)
            hi = np.where(take, mid, hi)
            lo = np.where(take, lo, mid)
        return float(hi[0]) if scalar else hi.reshape(arr.shape)


class QuadratureAntiderivative:
    """Antiderivative by adaptive quadrature, anchored at 0."""

    def __init__(self, fn: Callable, tol_per_unit: float = 1e-12):
        self.fn = fn
        self.tol_per_unit = tol_per_unit

    def _one(self, s: float) -> float:
        if s == 0.0:
            return 0.0
        budget = self.tol_per_unit * max(1.0, abs(s))
        val, err = quad(self.fn, 0.0, s, epsabs=budget, epsrel=1e-13, limit=400)
        if err > 10.0 * budget:
            raise QuadratureFailure(
                f"quadrature error estimate {err:.3e} exceeds budget {budget:.3e} at s={s}"
            )
        return val

    def __call__(self, s):
        arr = np.asarray(s, dtype=float)
        if arr.ndim == 0:
            return self._one(float(arr))
        return np.array([self._one(float(v)) for v in arr.ravel()]).reshape(arr.shape)


class SupConjugate:
    """Convex conjugate evaluated through the attained supremum.

    For q = Q' nondecreasing the supremum of ``s*tau - Q(tau)`` is attained on
    the level set of s, so the conjugate equals ``s*p(s) - Q(p(s))`` with p the
    generalized inverse.  Used when p has no closed form.
    """

    def __init__(self, Q: Callable, p: Callable):
        self.Q = Q
        self.p = p

    def __call__(self, s):
        arr = np.asarray(s, dtype=float)
        tau = self.p(arr)
        out = arr * tau - np.asarray(self.Q(tau), dtype=float)
        return float(out) if arr.ndim == 0 else out


class _ShiftedFn:
    def __init__(self, fn, const):
        self.fn = fn
        self.const = const

    def __call__(self, s):
        return self.fn(s) + self.const


def generalized_inverse(q, mode: str, probe_window=(-16.0, 16.0), density: int = 64):
    """Lazily bisected generalized inverse of a coercive monotone function.

    ``mode='decreasing'`` expects q strictly decreasing with limits -inf/+inf
    at +/-inf; ``mode='nondecreasing'`` expects q continuous nondecreasing with
    limits +/-inf.  The wrong monotonicity on a probe window raises
    MonotonicityViolation; failure to escape raises CoercivityViolation at
    evaluation time.
    """
    check_monotone(q, probe_window[0], probe_window[1], mode, density=density)
    return BisectionInverse(q, mode)


def antiderivative(p, tol_per_unit: float = 1e-12):
    """Antiderivative with value 0 at 0; exact for piecewise inputs."""
    if isinstance(p, PiecewiseFn):
        return p.antidifferentiate(0.0)
    check_monotone(p, -8.0, 8.0, "any", density=64)
    return QuadratureAntiderivative(p, tol_per_unit)


def legendre_transform(Q, q):
    """Convex conjugate of Q, computed as P + const with P the antiderivative
    of the generalized inverse of q = Q' and const the conjugate value at 0."""
    if isinstance(q, PiecewiseFn):
        p = q.invert(increasing=True)
        if p is None:
            p = generalized_inverse(q, "nondecreasing")
    else:
        p = generalized_inverse(q, "nondecreasing")
    P = antiderivative(p)
    p0 = float(p(0.0))
    const = -float(Q(p0))
    if isinstance(P, PiecewiseFn):
        return P.shift_values(const)
    return _ShiftedFn(P, const)


def fenchel_gap(profile: "MonotoneProfile", s, tau):
    """Nonnegative (up to 1e-10 slack) Fenchel-Young gap G^*(s) + G(tau) - s*tau."""
    s_arr = np.asarray(s, dtype=float)
    t_arr = np.asarray(tau, dtype=float)
    out = np.asarray(profile.G_hat(s_arr), dtype=float) + np.asarray(
        profile.G(t_arr), dtype=float
    ) - s_arr * t_arr
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# extensions and profiles
# ---------------------------------------------------------------------------


def _left_extension(g_m: float, slope_m: float, m: float) -> list[Piece]:
    if slope_m > _SLOPE_EPS:
        return [Piece(-np.inf, m, (g_m - slope_m * m, slope_m))]
    return [
        Piece(-np.inf, m - 1.0, (g_m + 1.0 - 2.0 * m, 2.0)),
        Piece(m - 1.0, m, (g_m,), (-1.0, -1.0, m, 2.0)),
    ]


def _right_extension(g_M: float, slope_M: float, M: float) -> list[Piece]:
    if slope_M > _SLOPE_EPS:
        return [Piece(M, np.inf, (g_M - slope_M * M, slope_M))]
    return [
        Piece(M, M + 1.0, (g_M,), (1.0, 1.0, M, 2.0)),
        Piece(M + 1.0, np.inf, (g_M - 2.0 * M - 1.0, 2.0)),
    ]


def _as_piecewise(g) -> PiecewiseFn:
    if isinstance(g, PiecewiseFn):
        return g
    if isinstance(g, tuple) and len(g) == 2:
        return piecewise_from_samples(*g)
    raise RegularityViolation(
        "need a PiecewiseFn (or an (xs, ys) sample pair) so the derivative "
        "and exact antiderivative are available"
    )


@dataclass(frozen=True)
class MonotoneProfile:
    """A nondecreasing C1 nonlinearity on [m, M] with its full-line calculus.

    Fields: the core function ``g``, its extension ``g_ext`` (equal to g on
    [m, M], strictly increasing outside), the extension derivative ``gprime``,
    the antiderivative ``G`` with G(0) = 0, the convex conjugate ``G_hat``,
    and the asymptotic slopes ``c1`` (at +inf) and ``c2`` (at -inf).
    """

    g: PiecewiseFn
    m: float
    M: float
    g_ext: PiecewiseFn
    gprime: PiecewiseFn
    G: PiecewiseFn
    G_hat: Callable
    c1: float
    c2: float
    extension: str = EXTENSION_TAG

    @property
    def kind(self) -> str:
        return "nondecreasing"

    def gap(self, s, tau):
        return fenchel_gap(self, s, tau)

    @property
    def profile_id(self) -> str:
        payload = json.dumps(profile_to_json(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    @classmethod
    def from_core(cls, g, m: float | None = None, M: float | None = None,
                  density: int = PROBE_DENSITY) -> "MonotoneProfile":
        return extend_monotone(g, m=m, M=M, density=density)

    @classmethod
    def affine(cls, alpha: float, beta: float, lo: float, hi: float) -> "MonotoneProfile":
        if alpha < 0:
            raise MonotonicityViolation("affine profile with negative slope is decreasing")
        core = PiecewiseFn([Piece(lo, hi, (beta, alpha))])
        return extend_monotone(core)

    @classmethod
    def power_law(cls, expnt: float, hi: float) -> "MonotoneProfile":
        if expnt <= 1.0 or hi <= 0.0:
            raise RegularityViolation("power-law profile needs exponent > 1 and hi > 0")
        core = PiecewiseFn([Piece(0.0, hi, (0.0,), (1.0, 1.0, 0.0, expnt))])
        return extend_monotone(core)


@dataclass(frozen=True)
class DecreasingProfile:
    """A strictly decreasing C1 nonlinearity on [m, M] with a coercive extension."""

    g: PiecewiseFn
    m: float
    M: float
    g_ext: PiecewiseFn
    gprime: PiecewiseFn
    c1: float
    c2: float
    extension: str = EXTENSION_TAG

    @property
    def kind(self) -> str:
        return "decreasing"

    @property
    def profile_id(self) -> str:
        payload = json.dumps(profile_to_json(self), sort_keys=True)
        return hashlib.sha256(payload.encode()).hexdigest()[:16]

    @classmethod
    def affine(cls, alpha: float, beta: float, lo: float, hi: float) -> "DecreasingProfile":
        if alpha >= 0:
            raise MonotonicityViolation("decreasing profile needs a negative slope")
        core = PiecewiseFn([Piece(lo, hi, (beta, alpha))])
        return extend_decreasing(core)


def extend_monotone(g, m: float | None = None, M: float | None = None,
                    density: int = PROBE_DENSITY) -> MonotoneProfile:
    """Extend a C1 nondecreasing function on [m, M] to the whole line.

    Tangent-line continuation where the end slope is positive; where it
    vanishes, a unit-width quadratic matches value and slope before handing
    over to a line of slope 2.  Raises RegularityViolation when the derivative
    is unavailable or the function decreases on a probe grid.
    """
    core = _as_piecewise(g)
    lo, hi = core.domain
    m = lo if m is None else m
    M = hi if M is None else M
    if not (np.isfinite(m) and np.isfinite(M)) or m > M:
        raise RegularityViolation(f"invalid core interval [{m}, {M}]")
    core = core.clipped(m, M) if (m, M) != core.domain else core
    try:
        check_monotone(core, m, M, "nondecreasing", density=density)
    except MonotonicityViolation as exc:
        raise RegularityViolation(str(exc)) from exc
    gprime_core = core.differentiate()
    slope_m = float(gprime_core(m))
    slope_M = float(gprime_core(M))
    if slope_m < -1e-10 or slope_M < -1e-10:
        raise RegularityViolation("negative end slope; core is not nondecreasing")
    g_m = float(core(m))
    g_M = float(core(M))
    pieces = _left_extension(g_m, slope_m, m)
    if M > m:
        pieces += list(core.pieces)
    pieces += _right_extension(g_M, slope_M, M)
    g_ext = PiecewiseFn(pieces)
    G = g_ext.antidifferentiate(0.0)
    p = g_ext.invert(increasing=True)
    if p is not None:
        G_hat = p.antidifferentiate(0.0).shift_values(-float(G(p(0.0))))
    else:
        p_b = BisectionInverse(g_ext, "nondecreasing")
        G_hat = SupConjugate(G, p_b)
    c1 = slope_M if slope_M > _SLOPE_EPS else 2.0
    c2 = slope_m if slope_m > _SLOPE_EPS else 2.0
    return MonotoneProfile(
        g=core, m=float(m), M=float(M), g_ext=g_ext,
        gprime=g_ext.differentiate(), G=G, G_hat=G_hat, c1=c1, c2=c2,
    )


def extend_decreasing(g, m: float | None = None, M: float | None = None,
                      density: int = PROBE_DENSITY) -> DecreasingProfile:
    """Mirror of extend_monotone for strictly decreasing cores."""
    core = _as_piecewise(g)
    lo, hi = core.domain
    m = lo if m is None else m
    M = hi if M is None else M
    core = core.clipped(m, M) if (m, M) != core.domain else core
    try:
        check_monotone(core, m, M, "decreasing", density=density)
    except MonotonicityViolation as exc:
        raise RegularityViolation(str(exc)) from exc
    flipped = extend_monotone(core.scale_values(-1.0), m=m, M=M, density=density)
    g_ext = flipped.g_ext.scale_values(-1.0)
    return DecreasingProfile(
        g=core, m=float(m), M=float(M), g_ext=g_ext,
        gprime=g_ext.differentiate(), c1=flipped.c1, c2=flipped.c2,
    )


# ---------------------------------------------------------------------------
# serialization (exact decimal-string round trip)
# ---------------------------------------------------------------------------


def profile_to_json(profile) -> dict:
    return {
        "kind": profile.kind,
        "m": repr(profile.m),
        "M": repr(profile.M),
        "extension": profile.extension,
        "pieces": profile.g.to_jsonable()["pieces"],
    }


def profile_from_json(data: dict):
    core = PiecewiseFn.from_jsonable({"pieces": data["pieces"]})
    m, M = float(data["m"]), float(data["M"])
    if data["kind"] == "nondecreasing":
        return extend_monotone(core, m=m, M=M)
    if data["kind"] == "decreasing":
        return extend_decreasing(core, m=m, M=M)
    raise ValueError(f"unknown profile kind {data['kind']!r}")
