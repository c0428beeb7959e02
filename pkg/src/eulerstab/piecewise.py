"""Piecewise scalar functions with exact calculus.

Every piece is a polynomial plus an optional shifted power term

    value(s) = poly(s) + b * (sigma * (s - s0)) ** alpha

with ``sigma`` in {+1, -1} orienting the base so it is nonnegative on the
piece.  This family is closed under differentiation and antidifferentiation,
and pieces that are polynomials of degree <= 2, or constant-plus-power, invert
in closed form.  That closure is what keeps generalized inverses,
antiderivatives and convex conjugates of the profiles built here exact instead
of tabulated.

Conventions:

* pieces tile a contiguous interval, possibly unbounded at either end;
* ``closed == "left"`` assigns a break point to the piece starting there,
  ``closed == "right"`` to the piece ending there (used for left-continuous
  inverses at plateau jumps).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import MonotonicityViolation

__all__ = ["Piece", "PiecewiseFn", "piecewise_from_samples"]

_INF = float("inf")


def _poly_eval(coeffs, s):
    out = np.zeros_like(s)
    for c in reversed(coeffs):
        out = out * s + c
    return out


def _poly_derive(coeffs):
    return tuple(k * c for k, c in enumerate(coeffs) if k >= 1)


def _poly_integrate(coeffs):
    return (0.0,) + tuple(c / (k + 1.0) for k, c in enumerate(coeffs))


@dataclass(frozen=True)
class Piece:
    """One piece: polynomial (ascending coefficients) plus optional power term."""

    lo: float
    hi: float
    poly: tuple[float, ...] = (0.0,)
    power: tuple[float, float, float, float] | None = None  # (b, sigma, s0, alpha)

    def value(self, s):
        out = _poly_eval(self.poly, s)
        if self.power is not None:
            b, sg, s0, al = self.power
            base = sg * (s - s0)
            # the base is >= 0 on the piece by construction; clamp the rounding
            # noise that appears when s sits exactly on a mapped break point
            base = np.maximum(base, 0.0)
            out = out + b * base**al
        return out

    def derivative(self) -> "Piece":
        power = None
        if self.power is not None:
            b, sg, s0, al = self.power
            power = (b * al * sg, sg, s0, al - 1.0)
        return Piece(self.lo, self.hi, _poly_derive(self.poly) or (0.0,), power)

    def antiderivative(self) -> "Piece":
        power = None
        if self.power is not None:
            b, sg, s0, al = self.power
            power = (b * sg / (al + 1.0), sg, s0, al + 1.0)
        return Piece(self.lo, self.hi, _poly_integrate(self.poly), power)

    def scaled(self, factor: float) -> "Piece":
        power = None
        if self.power is not None:
            b, sg, s0, al = self.power
            power = (b * factor, sg, s0, al)
        return Piece(self.lo, self.hi, tuple(c * factor for c in self.poly), power)

    def shifted(self, const: float) -> "Piece":
        poly = (self.poly[0] + const,) + self.poly[1:]
        return Piece(self.lo, self.hi, poly, self.power)

    def is_constant(self) -> bool:
        flat_poly = all(c == 0.0 for c in self.poly[1:])
        flat_power = self.power is None or self.power[0] == 0.0 or self.power[3] == 0.0
        return flat_poly and flat_power


class PiecewiseFn:
    """Scalar function assembled from contiguous :class:`Piece` objects."""

    def __init__(self, pieces, closed: str = "left"):
        pieces = tuple(pieces)
        if not pieces:
            raise ValueError("need at least one piece")
        for a, b in zip(pieces, pieces[1:]):
            if not np.isclose(a.hi, b.lo, rtol=0.0, atol=0.0):
                raise ValueError(f"pieces not contiguous at {a.hi} vs {b.lo}")
            if a.hi < a.lo:
                raise ValueError("piece with negative width")
        if closed not in ("left", "right"):
            raise ValueError("closed must be 'left' or 'right'")
        self.pieces = pieces
        self.closed = closed
        self._breaks = np.array([p.hi for p in pieces[:-1]], dtype=float)

    # -- basic protocol ----------------------------------------------------

    @property
    def domain(self) -> tuple[float, float]:
        return (self.pieces[0].lo, self.pieces[-1].hi)

    def _piece_index(self, s):
        side = "right" if self.closed == "left" else "left"
        return np.searchsorted(self._breaks, s, side=side)

    def __call__(self, s):
        arr = np.asarray(s, dtype=float)
        scalar = arr.ndim == 0
        flat = np.atleast_1d(arr)
        idx = self._piece_index(flat)
        out = np.empty_like(flat)
        for i, piece in enumerate(self.pieces):
            sel = idx == i
            if np.any(sel):
                out[sel] = piece.value(flat[sel])
        return float(out[0]) if scalar else out.reshape(arr.shape)

    def deriv(self, s):
        return self.differentiate()(s)

    # -- exact calculus ----------------------------------------------------

    def differentiate(self) -> "PiecewiseFn":
        return PiecewiseFn([p.derivative() for p in self.pieces], self.closed)

    def antidifferentiate(self, anchor: float = 0.0) -> "PiecewiseFn":
        lo, hi = self.domain
        if not (lo <= anchor <= hi):
            raise ValueError(f"anchor {anchor} outside domain [{lo}, {hi}]")
        raw = [p.antiderivative() for p in self.pieces]
        j = int(self._piece_index(np.asarray(anchor, dtype=float)))
        consts = [0.0] * len(raw)
        consts[j] = -float(raw[j].value(np.asarray(anchor, dtype=float)))
        for i in range(j + 1, len(raw)):
            b = raw[i].lo
            left = float(raw[i - 1].value(np.asarray(b, dtype=float))) + consts[i - 1]
            consts[i] = left - float(raw[i].value(np.asarray(b, dtype=float)))
        for i in range(j - 1, -1, -1):
            b = raw[i].hi
            right = float(raw[i + 1].value(np.asarray(b, dtype=float))) + consts[i + 1]
            consts[i] = right - float(raw[i].value(np.asarray(b, dtype=float)))
        return PiecewiseFn([p.shifted(c) for p, c in zip(raw, consts)], self.closed)

    def scale_values(self, factor: float) -> "PiecewiseFn":
        return PiecewiseFn([p.scaled(factor) for p in self.pieces], self.closed)

    def shift_values(self, const: float) -> "PiecewiseFn":
        return PiecewiseFn([p.shifted(const) for p in self.pieces], self.closed)

    def clipped(self, lo: float, hi: float) -> "PiecewiseFn":
        """Restrict the domain to [lo, hi] (pieces are absolute, so exact)."""
        if hi <= lo:
            raise ValueError("empty clip interval")
        kept = []
        for p in self.pieces:
            a, b = max(p.lo, lo), min(p.hi, hi)
            if a < b or (a == b and lo == hi):
                kept.append(Piece(a, b, p.poly, p.power))
        if not kept:
            raise ValueError("clip interval outside domain")
        return PiecewiseFn(kept, self.closed)

    # -- closed-form inversion ----------------------------------------------

    def invert(self, increasing: bool = True):
        """Closed-form inverse, or None when a piece has no algebraic inverse.

        The inverse of a nondecreasing function is the left edge of each level
        set, so plateau pieces are dropped and the result is marked
        right-closed (left-continuous at the jumps).  ``increasing=False``
        inverts a strictly decreasing function.
        """
        inv_pieces: list[tuple[float, float, Piece]] = []
        for p in self.pieces:
            unbounded = np.isinf(p.lo) or np.isinf(p.hi)
            if p.is_constant():
                if unbounded or not increasing:
                    return None  # cannot invert a flat tail / plateau in decreasing mode
                continue
            if np.isinf(p.lo):
                y_at_lo = -_INF if increasing else _INF
            else:
                y_at_lo = float(p.value(np.asarray(p.lo, dtype=float)))
            if np.isinf(p.hi):
                y_at_hi = _INF if increasing else -_INF
            else:
                y_at_hi = float(p.value(np.asarray(p.hi, dtype=float)))
            y_lo, y_hi = (y_at_lo, y_at_hi) if increasing else (y_at_hi, y_at_lo)
            if y_hi <= y_lo:
                if y_hi == y_lo:
                    continue  # numerically flat piece, treat as plateau
                raise MonotonicityViolation("piece values move the wrong way")
            inv = _invert_piece(p, increasing)
            if inv is None:
                return None
            inv_pieces.append((y_lo, y_hi, inv))
        if not inv_pieces:
            return None
        inv_pieces.sort(key=lambda t: t[0])
        pieces = []
        for k, (y_lo, y_hi, body) in enumerate(inv_pieces):
            lo = y_lo if k == 0 else pieces[-1].hi
            pieces.append(Piece(lo, y_hi, body.poly, body.power))
        return PiecewiseFn(pieces, closed="right")

    # -- serialization -------------------------------------------------------

    def to_jsonable(self) -> dict:
        pieces = []
        for p in self.pieces:
            entry = {
                "lo": repr(p.lo),
                "hi": repr(p.hi),
                "poly": [repr(c) for c in p.poly],
            }
            if p.power is not None:
                entry["power"] = [repr(v) for v in p.power]
            pieces.append(entry)
        return {"closed": self.closed, "pieces": pieces}

    @classmethod
    def from_jsonable(cls, data: dict) -> "PiecewiseFn":
        pieces = []
        for entry in data["pieces"]:
            power = entry.get("power")
            pieces.append(
                Piece(
                    float(entry["lo"]),
                    float(entry["hi"]),
                    tuple(float(c) for c in entry["poly"]),
                    tuple(float(v) for v in power) if power is not None else None,
                )
            )
        return cls(pieces, closed=data.get("closed", "left"))


def _invert_piece(p: Piece, increasing: bool) -> Piece | None:
    """Invert one monotone piece; interval bookkeeping happens in the caller."""
    deg = len(p.poly) - 1
    while deg > 0 and p.poly[deg] == 0.0:
        deg -= 1
    if p.power is None or p.power[0] == 0.0:
        if deg == 1:
            a0, a1 = p.poly[0], p.poly[1]
            return Piece(0.0, 0.0, (-a0 / a1, 1.0 / a1))
        if deg == 2:
            a0, a1, a2 = p.poly[0], p.poly[1], (p.poly[2] if len(p.poly) > 2 else 0.0)
            # vertex form: s = -a1/(2 a2) + branch * sqrt(D) / (2 a2), and the
            # monotone branch always carries sign(q') = +1 (increasing) / -1
            branch = 1.0 if increasing else -1.0
            y0 = a0 - a1 * a1 / (4.0 * a2)
            coef = branch * np.sqrt(abs(4.0 * a2)) / (2.0 * a2)
            return Piece(0.0, 0.0, (-a1 / (2.0 * a2),), (coef, np.sign(a2), y0, 0.5))
        return None
    if deg == 0:
        b, sg, s0, al = p.power
        a0 = p.poly[0]
        if al <= 0.0:
            return None
        sig_y = 1.0 if b > 0 else -1.0
        coef = sg * abs(b) ** (-1.0 / al)
        return Piece(0.0, 0.0, (s0,), (coef, sig_y, a0, 1.0 / al))
    return None


def piecewise_from_samples(xs, ys) -> PiecewiseFn:
    """Linear interpolant of sorted samples as an exact PiecewiseFn."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.ndim != 1 or xs.shape != ys.shape or xs.size < 2:
        raise ValueError("need matching 1-d sample arrays with >= 2 points")
    if np.any(np.diff(xs) <= 0):
        raise ValueError("sample abscissae must be strictly increasing")
    pieces = []
    for x0, x1, y0, y1 in zip(xs[:-1], xs[1:], ys[:-1], ys[1:]):
        slope = (y1 - y0) / (x1 - x0)
        pieces.append(Piece(float(x0), float(x1), (float(y0 - slope * x0), float(slope))))
    return PiecewiseFn(pieces)
