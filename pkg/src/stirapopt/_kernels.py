"""Compiled classical RK4 loops for the three linear models.

Each kernel advances ``n`` steps of size ``h``. Coefficients are supplied on
the half-step grid, so step ``k`` reads indices ``2k, 2k+1, 2k+2``. States at
the local grid indices listed in ``rec`` (sorted, each < n) are written to
``out`` before the corresponding step is taken.

Return value: ``(bad_step, max_norm_increase)``; ``bad_step`` is -1 unless the
state became non-finite, in which case integration stops at that step.
"""
import numpy as np
from numba import njit


@njit(cache=True)
def rk4_reduced(s, c, h, state, rec, out):
    c1 = state[0]
    c3 = state[1]
    n = (s.shape[0] - 1) // 2
    r = 0
    max_inc = 0.0
    norm = c1 * c1 + c3 * c3
    for k in range(n):
        if r < rec.shape[0] and rec[r] == k:
            out[r, 0] = c1
            out[r, 1] = c3
            r += 1
        s0, c0 = s[2 * k], c[2 * k]
        sm, cm = s[2 * k + 1], c[2 * k + 1]
        s1, c1_ = s[2 * k + 2], c[2 * k + 2]

        b = -0.5 * (s0 * c1 + c0 * c3)
        k1a, k1b = b * s0, b * c0
        y1, y3 = c1 + 0.5 * h * k1a, c3 + 0.5 * h * k1b
        b = -0.5 * (sm * y1 + cm * y3)
        k2a, k2b = b * sm, b * cm
        y1, y3 = c1 + 0.5 * h * k2a, c3 + 0.5 * h * k2b
        b = -0.5 * (sm * y1 + cm * y3)
        k3a, k3b = b * sm, b * cm
        y1, y3 = c1 + h * k3a, c3 + h * k3b
        b = -0.5 * (s1 * y1 + c1_ * y3)
        k4a, k4b = b * s1, b * c1_

        c1 = c1 + h / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        c3 = c3 + h / 6.0 * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        new = c1 * c1 + c3 * c3
        if not np.isfinite(new):
            state[0] = c1
            state[1] = c3
            return k, max_inc
        if new - norm > max_inc:
            max_inc = new - norm
        norm = new
    state[0] = c1
    state[1] = c3
    return -1, max_inc


@njit(cache=True)
def rk4_adiabatic(u, h, state, rec, out):
    y = state[0]
    x = state[1]
    n = (u.shape[0] - 1) // 2
    r = 0
    max_inc = 0.0
    norm = y * y + x * x
    for k in range(n):
        if r < rec.shape[0] and rec[r] == k:
            out[r, 0] = y
            out[r, 1] = x
            r += 1
        u0, um, u1 = u[2 * k], u[2 * k + 1], u[2 * k + 2]

        k1y, k1x = -u0 * x, u0 * y - 0.5 * x
        ty, tx = y + 0.5 * h * k1y, x + 0.5 * h * k1x
        k2y, k2x = -um * tx, um * ty - 0.5 * tx
        ty, tx = y + 0.5 * h * k2y, x + 0.5 * h * k2x
        k3y, k3x = -um * tx, um * ty - 0.5 * tx
        ty, tx = y + h * k3y, x + h * k3x
        k4y, k4x = -u1 * tx, u1 * ty - 0.5 * tx

        y = y + h / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y)
        x = x + h / 6.0 * (k1x + 2.0 * k2x + 2.0 * k3x + k4x)
        new = y * y + x * x
        if not np.isfinite(new):
            state[0] = y
            state[1] = x
            return k, max_inc
        if new - norm > max_inc:
            max_inc = new - norm
        norm = new
    state[0] = y
    state[1] = x
    return -1, max_inc


@njit(cache=True)
def _full_rhs(p, q, g, a1, a2, a3):
    d1 = -0.5j * p * a2
    d2 = -0.5j * (p * a1 + q * a3) - 0.5 * g * a2
    d3 = -0.5j * q * a2
    return d1, d2, d3


@njit(cache=True)
def rk4_full(p, q, gamma, h, state, rec, out):
    a1 = state[0]
    a2 = state[1]
    a3 = state[2]
    n = (p.shape[0] - 1) // 2
    r = 0
    max_inc = 0.0
    norm = (a1 * a1.conjugate() + a2 * a2.conjugate() + a3 * a3.conjugate()).real
    for k in range(n):
        if r < rec.shape[0] and rec[r] == k:
            out[r, 0] = a1
            out[r, 1] = a2
            out[r, 2] = a3
            r += 1
        p0, pm, p1 = p[2 * k], p[2 * k + 1], p[2 * k + 2]
        q0, qm, q1 = q[2 * k], q[2 * k + 1], q[2 * k + 2]

        k11, k12, k13 = _full_rhs(p0, q0, gamma, a1, a2, a3)
        k21, k22, k23 = _full_rhs(pm, qm, gamma, a1 + 0.5 * h * k11, a2 + 0.5 * h * k12, a3 + 0.5 * h * k13)
        k31, k32, k33 = _full_rhs(pm, qm, gamma, a1 + 0.5 * h * k21, a2 + 0.5 * h * k22, a3 + 0.5 * h * k23)
        k41, k42, k43 = _full_rhs(p1, q1, gamma, a1 + h * k31, a2 + h * k32, a3 + h * k33)

        a1 = a1 + h / 6.0 * (k11 + 2.0 * k21 + 2.0 * k31 + k41)
        a2 = a2 + h / 6.0 * (k12 + 2.0 * k22 + 2.0 * k32 + k42)
        a3 = a3 + h / 6.0 * (k13 + 2.0 * k23 + 2.0 * k33 + k43)
        new = (a1 * a1.conjugate() + a2 * a2.conjugate() + a3 * a3.conjugate()).real
        if not np.isfinite(new):
            state[0] = a1
            state[1] = a2
            state[2] = a3
            return k, max_inc
        if new - norm > max_inc:
            max_inc = new - norm
        norm = new
    state[0] = a1
    state[1] = a2
    state[2] = a3
    return -1, max_inc
