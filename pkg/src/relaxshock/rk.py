"""Dormand-Prince 5(4) integrator for scalar autonomous ODEs.

Only what the profile solver needs: a scalar right-hand side, integration
until an event predicate fires, local error control and an optional fixed
step mode used for self-convergence checks.
"""
from __future__ import annotations

import numpy as np

_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)
_E = tuple(b5 - b4 for b5, b4 in zip(_B5, _B4))


def dp_step(f, y, h):
    """One Dormand-Prince step. Returns ``(y5, err_estimate)``."""
    k = [0.0] * 7
    k[0] = f(y)
    for s in range(1, 7):
        acc = y
        for j, a in enumerate(_A[s]):
            acc = acc + h * a * k[j]
        k[s] = f(acc)
    y5 = y
    err = 0.0
    for j in range(7):
        y5 = y5 + h * _B5[j] * k[j]
        err = err + h * _E[j] * k[j]
    return y5, err


def integrate(f, y0, direction, stop, tol, h0, h_max, h_min, max_steps=2_000_000):
    """Integrate ``y' = f(y)`` from ``t=0`` in ``direction`` (+1/-1) until ``stop(y)``.

    Steps are accepted when ``|err| <= tol * max(1, |y|)``. ``h_min`` is a floor:
    at the floor a step is accepted regardless of the error estimate.
    Returns arrays ``(t, y)`` including the starting point.
    """
    ts = [0.0]
    ys = [y0]
    t, y, h = 0.0, y0, min(h0, h_max)
    for _ in range(max_steps):
        if stop(y):
            break
        y_new, err = dp_step(f, y, direction * h)
        scale = tol * max(1.0, abs(y))
        ratio = abs(err) / scale
        if ratio <= 1.0 or h <= h_min:
            t += direction * h
            y = y_new
            ts.append(t)
            ys.append(y)
        fac = 5.0 if ratio == 0.0 else min(5.0, max(0.2, 0.9 * ratio ** (-0.2)))
        h = min(max(h * fac, h_min), h_max)
    else:
        raise RuntimeError("step limit reached before stop condition")
    return np.array(ts), np.array(ys)


def integrate_fixed(f, y0, h, n_steps):
    """Fixed-step 5th-order propagation, ``n_steps`` of size ``h`` (sign gives direction)."""
    ys = np.empty(n_steps + 1)
    ys[0] = y = y0
    for n in range(n_steps):
        y, _ = dp_step(f, y, h)
        ys[n + 1] = y
    return ys
