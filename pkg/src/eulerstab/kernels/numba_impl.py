"""Numba-jitted kernel implementations.

Same contracts and per-node arithmetic as ``numpy_impl`` (see there for the
coordinate conventions and the consistency argument); the loops here compile
with ``@njit`` and avoid the temporary arrays of the vectorized path.
"""

from __future__ import annotations

import numpy as np
from numba import njit

FOOT_MARGIN = 0.75


@njit(cache=True)
def _sample(f, gx, gy):
    rows, cols = f.shape
    x = min(max(gx, 0.0), cols - 1.0)
    y = min(max(gy, 0.0), rows - 1.0)
    x0 = int(np.floor(x))
    y0 = int(np.floor(y))
    if x0 > cols - 2:
        x0 = cols - 2
    if y0 > rows - 2:
        y0 = rows - 2
    fx = x - x0
    fy = y - y0
    return (
        f[y0, x0] * (1.0 - fx) * (1.0 - fy)
        + f[y0, x0 + 1] * fx * (1.0 - fy)
        + f[y0 + 1, x0] * (1.0 - fx) * fy
        + f[y0 + 1, x0 + 1] * fx * fy
    )


@njit(cache=True, inline="always")
def _origin(p, n):
    a = int(np.floor(p)) - 1
    if a < 2:
        a = 2
    if a > n - 6:
        a = n - 6
    return a


@njit(cache=True, inline="always")
def _lw(t, k):
    if k == 0:
        return -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0
    if k == 1:
        return t * (t - 2.0) * (t - 3.0) / 2.0
    if k == 2:
        return -t * (t - 1.0) * (t - 3.0) / 2.0
    return t * (t - 1.0) * (t - 2.0) / 6.0


@njit(cache=True, inline="always")
def _ldw(t, k):
    if k == 0:
        return -((t - 2.0) * (t - 3.0) + (t - 1.0) * (t - 3.0) + (t - 1.0) * (t - 2.0)) / 6.0
    if k == 1:
        return ((t - 2.0) * (t - 3.0) + t * (t - 3.0) + t * (t - 2.0)) / 2.0
    if k == 2:
        return -((t - 1.0) * (t - 3.0) + t * (t - 3.0) + t * (t - 1.0)) / 2.0
    return ((t - 1.0) * (t - 2.0) + t * (t - 2.0) + t * (t - 1.0)) / 6.0


@njit(cache=True)
def _lag_value(f, gx, gy, clip_bounds):
    rows, cols = f.shape
    a0 = _origin(gx, cols)
    b0 = _origin(gy, rows)
    tx = gx - a0
    ty = gy - b0
    out = 0.0
    lo = np.inf
    hi = -np.inf
    for b in range(4):
        row = 0.0
        wyb = _lw(ty, b)
        for a in range(4):
            s = f[b0 + b, a0 + a]
            row += _lw(tx, a) * s
            if clip_bounds:
                if s < lo:
                    lo = s
                if s > hi:
                    hi = s
        out += wyb * row
    if clip_bounds:
        out = min(max(out, lo), hi)
    return out


@njit(cache=True)
def _lag_grad_perp(psi, gx, gy):
    rows, cols = psi.shape
    a0 = _origin(gx, cols)
    b0 = _origin(gy, rows)
    tx = gx - a0
    ty = gy - b0
    d_dy = 0.0
    d_dx = 0.0
    for b in range(4):
        row_w = 0.0
        row_dw = 0.0
        for a in range(4):
            s = psi[b0 + b, a0 + a]
            row_w += _lw(tx, a) * s
            row_dw += _ldw(tx, a) * s
        d_dy += _ldw(ty, b) * row_w
        d_dx += _lw(ty, b) * row_dw
    return d_dy, -d_dx


@njit(cache=True)
def bilinear(f, gx, gy):
    out = np.empty(gx.shape)
    flat_x = gx.ravel()
    flat_y = gy.ravel()
    flat_o = out.ravel()
    for k in range(flat_x.size):
        flat_o[k] = _sample(f, flat_x[k], flat_y[k])
    return out


@njit(cache=True)
def lagrange_sample(f, gx, gy, clip_bounds=False):
    out = np.empty(gx.shape)
    flat_x = gx.ravel()
    flat_y = gy.ravel()
    flat_o = out.ravel()
    for k in range(flat_x.size):
        flat_o[k] = _lag_value(f, flat_x[k], flat_y[k], clip_bounds)
    return out


@njit(cache=True)
def advect_semilag(om_pad, psi_pad, coef):
    rows, cols = om_pad.shape
    xlo, xhi = 2.0 - FOOT_MARGIN, cols - 3.0 + FOOT_MARGIN
    ylo, yhi = 2.0 - FOOT_MARGIN, rows - 3.0 + FOOT_MARGIN
    out = np.empty((rows - 4, cols - 4))
    for j in range(2, rows - 2):
        for i in range(2, cols - 2):
            gx = float(i)
            gy = float(j)
            un, vn = _lag_grad_perp(psi_pad, gx, gy)
            mx = min(max(gx - 0.5 * coef * un, xlo), xhi)
            my = min(max(gy - 0.5 * coef * vn, ylo), yhi)
            um, vm = _lag_grad_perp(psi_pad, mx, my)
            fx = min(max(gx - coef * um, xlo), xhi)
            fy = min(max(gy - coef * vm, ylo), yhi)
            out[j - 2, i - 2] = _lag_value(om_pad, fx, fy, True)
    return out


@njit(cache=True)
def trace_rk4(u_pad, v_pad, gx, gy, dt_h, nsub):
    rows, cols = u_pad.shape
    xlo, xhi = 1.0, cols - 2.0
    ylo, yhi = 1.0, rows - 2.0
    x = gx.copy().astype(np.float64)
    y = gy.copy().astype(np.float64)
    flat_x = x.ravel()
    flat_y = y.ravel()
    for k in range(flat_x.size):
        px = flat_x[k]
        py = flat_y[k]
        for _ in range(nsub):
            k1x = _sample(u_pad, px, py)
            k1y = _sample(v_pad, px, py)
            k2x = _sample(u_pad, px + 0.5 * dt_h * k1x, py + 0.5 * dt_h * k1y)
            k2y = _sample(v_pad, px + 0.5 * dt_h * k1x, py + 0.5 * dt_h * k1y)
            k3x = _sample(u_pad, px + 0.5 * dt_h * k2x, py + 0.5 * dt_h * k2y)
            k3y = _sample(v_pad, px + 0.5 * dt_h * k2x, py + 0.5 * dt_h * k2y)
            k4x = _sample(u_pad, px + dt_h * k3x, py + dt_h * k3y)
            k4y = _sample(v_pad, px + dt_h * k3x, py + dt_h * k3y)
            px = min(max(px + dt_h * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0, xlo), xhi)
            py = min(max(py + dt_h * (k1y + 2.0 * k2y + 2.0 * k3y + k4y) / 6.0, ylo), yhi)
        flat_x[k] = px
        flat_y[k] = py
    return x, y
