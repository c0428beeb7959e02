"""Pure-numpy kernel implementations.

Coordinates are in padded-lattice index units: a field array of shape (R, C)
holds interior node data in [2, C-3] x [2, R-3] (two-ring padding for the
simulator, one-ring for the tracing helpers); exterior cells of the simulator
arrays are never referenced.

The simulator step traces node positions backward along the analytic
perpendicular gradient of a cubic Lagrange interpolant of the stream function
built from interior data only, then gathers the vorticity through the same
interpolant.  Using one interpolation operator for both makes the discrete
transport exactly consistent: fields that are functions of the stream
function at the nodes are advected along its interpolated level sets, so
steady states drift only at the trajectory-integration level.  Gathered
values are clipped to the 4x4 stencil bounds, which preserves the global
sup-norm bound of the advected quantity.

Feet may overshoot the interior node hull by a sub-cell margin (the boundary
stencil extrapolates); the hard clamp beyond that only catches pathological
velocity fields.
"""

from __future__ import annotations

import numpy as np

FOOT_MARGIN = 0.75  # cells beyond the node hull a foot may travel


def _clamp(a, lo, hi):
    return np.minimum(np.maximum(a, lo), hi)


def bilinear(f: np.ndarray, gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Sample f at (gx, gy); points are clamped to the array box."""
    rows, cols = f.shape
    gx = _clamp(gx, 0.0, cols - 1.0)
    gy = _clamp(gy, 0.0, rows - 1.0)
    x0 = np.minimum(np.floor(gx), cols - 2.0).astype(np.int64)
    y0 = np.minimum(np.floor(gy), rows - 2.0).astype(np.int64)
    fx = gx - x0
    fy = gy - y0
    return (
        f[y0, x0] * (1.0 - fx) * (1.0 - fy)
        + f[y0, x0 + 1] * fx * (1.0 - fy)
        + f[y0 + 1, x0] * (1.0 - fx) * fy
        + f[y0 + 1, x0 + 1] * fx * fy
    )


def _lag_w(t):
    return (
        -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0,
        t * (t - 2.0) * (t - 3.0) / 2.0,
        -t * (t - 1.0) * (t - 3.0) / 2.0,
        t * (t - 1.0) * (t - 2.0) / 6.0,
    )


def _lag_dw(t):
    return (
        -((t - 2.0) * (t - 3.0) + (t - 1.0) * (t - 3.0) + (t - 1.0) * (t - 2.0)) / 6.0,
        ((t - 2.0) * (t - 3.0) + t * (t - 3.0) + t * (t - 2.0)) / 2.0,
        -((t - 1.0) * (t - 3.0) + t * (t - 3.0) + t * (t - 1.0)) / 2.0,
        ((t - 1.0) * (t - 2.0) + t * (t - 2.0) + t * (t - 1.0)) / 6.0,
    )


def _origins(x, y, rows, cols):
    a0 = _clamp(np.floor(x) - 1.0, 2.0, cols - 6.0).astype(np.int64)
    b0 = _clamp(np.floor(y) - 1.0, 2.0, rows - 6.0).astype(np.int64)
    return a0, b0


def lagrange_sample(f: np.ndarray, gx: np.ndarray, gy: np.ndarray,
                    clip_bounds: bool = False) -> np.ndarray:
    """Cubic Lagrange sample from interior data (stencils shifted at walls)."""
    rows, cols = f.shape
    a0, b0 = _origins(gx, gy, rows, cols)
    wx = _lag_w(gx - a0)
    wy = _lag_w(gy - b0)
    out = np.zeros_like(gx)
    lo = np.full_like(gx, np.inf)
    hi = np.full_like(gx, -np.inf)
    for b in range(4):
        row = np.zeros_like(gx)
        for a in range(4):
            s = f[b0 + b, a0 + a]
            row = row + wx[a] * s
            if clip_bounds:
                lo = np.minimum(lo, s)
                hi = np.maximum(hi, s)
        out = out + wy[b] * row
    if clip_bounds:
        out = _clamp(out, lo, hi)
    return out


def _grad_perp(psi: np.ndarray, gx: np.ndarray, gy: np.ndarray):
    """Index-space perpendicular gradient of the psi interpolant."""
    rows, cols = psi.shape
    a0, b0 = _origins(gx, gy, rows, cols)
    tx = gx - a0
    ty = gy - b0
    wx, dwx = _lag_w(tx), _lag_dw(tx)
    wy, dwy = _lag_w(ty), _lag_dw(ty)
    d_dy = np.zeros_like(gx)
    d_dx = np.zeros_like(gx)
    for b in range(4):
        row_w = np.zeros_like(gx)
        row_dw = np.zeros_like(gx)
        for a in range(4):
            s = psi[b0 + b, a0 + a]
            row_w = row_w + wx[a] * s
            row_dw = row_dw + dwx[a] * s
        d_dy = d_dy + dwy[b] * row_w
        d_dx = d_dx + wy[b] * row_dw
    return d_dy, -d_dx


def advect_semilag(om_pad, psi_pad, coef):
    """One semi-Lagrangian step on two-ring padded arrays.

    ``coef = dt / h^2`` converts the index-space stream-function gradient to
    an index displacement.  Midpoint backtrace, Lagrange gather clipped to the
    stencil bounds; returns the interior block (R-4, C-4).
    """
    rows, cols = om_pad.shape
    xlo, xhi = 2.0 - FOOT_MARGIN, cols - 3.0 + FOOT_MARGIN
    ylo, yhi = 2.0 - FOOT_MARGIN, rows - 3.0 + FOOT_MARGIN
    gy, gx = np.mgrid[2.0 : rows - 2.0, 2.0 : cols - 2.0]
    un, vn = _grad_perp(psi_pad, gx, gy)
    mx = _clamp(gx - 0.5 * coef * un, xlo, xhi)
    my = _clamp(gy - 0.5 * coef * vn, ylo, yhi)
    um, vm = _grad_perp(psi_pad, mx, my)
    fx = _clamp(gx - coef * um, xlo, xhi)
    fy = _clamp(gy - coef * vm, ylo, yhi)
    return lagrange_sample(om_pad, fx, fy, clip_bounds=True)


def trace_rk4(u_pad, v_pad, gx, gy, dt_h, nsub):
    """Classical four-stage tracing of dX/dt = velocity, nsub equal substeps.

    One-ring padded velocity arrays, bilinear sampling; positions stay
    clamped to the node hull.
    """
    rows, cols = u_pad.shape
    xlo, xhi = 1.0, cols - 2.0
    ylo, yhi = 1.0, rows - 2.0
    x = np.array(gx, dtype=float)
    y = np.array(gy, dtype=float)
    for _ in range(int(nsub)):
        k1x = bilinear(u_pad, x, y)
        k1y = bilinear(v_pad, x, y)
        k2x = bilinear(u_pad, x + 0.5 * dt_h * k1x, y + 0.5 * dt_h * k1y)
        k2y = bilinear(v_pad, x + 0.5 * dt_h * k1x, y + 0.5 * dt_h * k1y)
        k3x = bilinear(u_pad, x + 0.5 * dt_h * k2x, y + 0.5 * dt_h * k2y)
        k3y = bilinear(v_pad, x + 0.5 * dt_h * k2x, y + 0.5 * dt_h * k2y)
        k4x = bilinear(u_pad, x + dt_h * k3x, y + dt_h * k3y)
        k4y = bilinear(v_pad, x + dt_h * k3x, y + dt_h * k3y)
        x = _clamp(x + dt_h * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0, xlo, xhi)
        y = _clamp(y + dt_h * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0, ylo, yhi)
    return x, y
