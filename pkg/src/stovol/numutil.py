"""Small numerical helpers shared across modules."""

from __future__ import annotations

import numpy as np

_RULES = {}


def gl_rule(n: int):
    """Cached Gauss-Legendre nodes/weights on [-1, 1]."""
    if n not in _RULES:
        _RULES[n] = np.polynomial.legendre.leggauss(n)
    return _RULES[n]


def gl_panel(f, a, b, n=15):
    """n-point Gauss-Legendre approximation of int_a^b f."""
    xi, w = gl_rule(n)
    half = 0.5 * (b - a)
    return half * float(w @ f(a + half * (xi + 1.0)))


def adaptive_gauss(f, a: float, b: float, tol: float = 1e-9,
                   max_depth: int = 48) -> float:
    """Adaptive Gauss-Legendre with interval bisection, absolute tolerance.

    f must map a node array to a value array.  The per-interval error is
    estimated by comparing one 15-point panel against its two halves; the
    tolerance is allocated proportionally to interval length.
    """
    total = 0.0
    stack = [(a, b, gl_panel(f, a, b), 0)]
    length = b - a
    while stack:
        lo, hi, coarse, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left = gl_panel(f, lo, mid)
        right = gl_panel(f, mid, hi)
        fine = left + right
        local_tol = tol * max((hi - lo) / length, 1e-15)
        if abs(fine - coarse) <= local_tol or depth >= max_depth:
            total += fine
        else:
            stack.append((lo, mid, left, depth + 1))
            stack.append((mid, hi, right, depth + 1))
    return total


def kahan_sum(values) -> float:
    """Compensated sum of a 1-d array in its given order."""
    s = 0.0
    c = 0.0
    for v in np.asarray(values, dtype=float):
        y = v - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


def log_log_slope(x, y):
    """Least-squares slope, intercept and R^2 of log y against log x."""
    lx = np.log(np.asarray(x, dtype=float))
    ly = np.log(np.asarray(y, dtype=float))
    slope, intercept = np.polyfit(lx, ly, 1)
    fitted = slope * lx + intercept
    ss_res = float(np.sum((ly - fitted) ** 2))
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0
    return float(slope), float(intercept), r2
