"""Weight function, shift ODE and the shift gain constant."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gas import dpressure, pressure
from .profile import ProfileTable, eval_profile


@dataclass
class ShiftState:
    """Shift ``X(t)`` with its rate, weight amplitude ``nu`` and gain ``M``."""

    profile: ProfileTable
    nu: float
    M: float
    sigma_minus: float
    alpha_minus: float
    X: float = 0.0
    Xdot: float = 0.0
    t: float = 0.0
    xdot_max: float = 0.0

    @property
    def delta(self) -> float:
        return self.profile.shock.delta


def shift_constants(profile: ProfileTable):
    """``(sigma_minus, alpha_minus, M)`` for the left state of ``profile``."""
    model = profile.model
    g = model.gamma
    vm = profile.shock.v_minus
    pm = float(pressure(vm, model))
    sm = math.sqrt(-float(dpressure(vm, model)))
    alpha = (g + 1.0) / (2.0 * g * sm * pm)
    M = 9.0 * (g + 1.0) * sm ** 3 * vm * vm / (16.0 * g * pm)
    return sm, alpha, M


def make_shift_state(profile: ProfileTable, nu=None) -> ShiftState:
    """Fresh state with ``X = 0``. ``nu`` defaults to ``sqrt(delta)`` and must
    satisfy ``delta < nu <= sqrt(delta)``."""
    delta = profile.shock.delta
    if nu is None:
        nu = math.sqrt(delta)
    if not (delta < nu <= math.sqrt(delta) * (1.0 + 1e-15)):
        raise ValueError(f"nu={nu!r} must satisfy delta < nu <= sqrt(delta) (delta={delta!r})")
    sm, alpha, M = shift_constants(profile)
    return ShiftState(profile=profile, nu=float(nu), M=M, sigma_minus=sm, alpha_minus=alpha)


def weight(xi1, state: ShiftState):
    """Unshifted weight ``a(xi1) = 1 + nu (p(v_-) - p(v^s(xi1))) / delta``."""
    shock = state.profile.shock
    model = state.profile.model
    vs = state.profile.volume(np.asarray(xi1, dtype=float))
    return 1.0 + state.nu * (pressure(shock.v_minus, model) - pressure(vs, model)) / shock.delta


def weight_slope(xi1, state: ShiftState):
    """``a'(xi1) = -(nu/delta) p(v^s)'``; nonnegative."""
    prof = state.profile
    xi1 = np.asarray(xi1, dtype=float)
    vs = prof.volume(xi1)
    return -(state.nu / prof.shock.delta) * dpressure(vs, prof.model) * prof.slope(xi1)


@dataclass(frozen=True)
class ShiftedProfile:
    """Profile quantities sampled at ``xi1 - X`` on a 1-D coordinate array."""

    v: np.ndarray
    u1: np.ndarray
    pi11: np.ndarray
    pi2: np.ndarray
    dv: np.ndarray
    a: np.ndarray
    da: np.ndarray
    p: np.ndarray
    dp: np.ndarray


def shifted_profile(state: ShiftState, xi1, X=None) -> ShiftedProfile:
    X = state.X if X is None else X
    prof = state.profile
    z = np.asarray(xi1, dtype=float) - X
    v, u1, pi11, pi2 = eval_profile(prof, z)
    dv = prof.slope(z)
    p = pressure(v, prof.model)
    dp = dpressure(v, prof.model) * dv
    shock = prof.shock
    a = 1.0 + state.nu * (pressure(shock.v_minus, prof.model) - p) / shock.delta
    da = -(state.nu / shock.delta) * dp
    return ShiftedProfile(v, u1, pi11, pi2, dv, a, da, p, dp)


def _col(x):
    return x[:, None, None]


def shift_rate(fields, state: ShiftState, X=None) -> float:
    """``-(M/delta) (I1 - I2)`` by trapezoid quadrature on the solver grid."""
    grid = fields.grid
    prof = state.profile
    sp = shifted_profile(state, grid.xi1, X)
    v = fields.q[0]
    rho = 1.0 / v
    sig_star = prof.shock.sigma_star
    du1 = -sig_star * sp.dv
    pv = v ** (-prof.model.gamma)
    i1 = _col(sp.a * du1 / sig_star) * rho * (pv - _col(sp.p))
    i2 = _col(sp.a * sp.dp) * rho * (v - _col(sp.v))
    return -(state.M / prof.shock.delta) * grid.integrate(i1 - i2)


def advance_shift(state: ShiftState, Xdot: float, dt: float) -> ShiftState:
    """Forward Euler update of ``X`` (in place); records the running max of ``|Xdot|``."""
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    state.X = state.X + dt * Xdot
    state.Xdot = Xdot
    state.t = state.t + dt
    state.xdot_max = max(state.xdot_max, abs(Xdot))
    return state
