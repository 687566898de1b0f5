"""Traveling-wave profile of the relaxed system and its certificates.

The volume ``v^s`` solves the autonomous ODE

    v' = h(v) / (sigma_* K + tau sigma_* h'(v)),   K = 4 mu / 3 + lambda,

pinned at the midpoint of ``(v_-, v_+)`` at ``xi1 = 0``. Velocity and the two
stress components follow algebraically from the integrated balance laws.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.special import gammainc

from . import rk
from .errors import AdmissibilityError, StiffnessError
from .gas import GasModel, ShockData, check_tau, d2pressure, hugoniot_dh, hugoniot_h, pressure

DEFAULT_TOL = 1e-10
DEFAULT_TAIL_EPS = 1e-6


def characteristic_width(shock: ShockData, model: GasModel) -> float:
    return model.visc_long / (shock.sigma_star * shock.delta)


def profile_rhs(v, shock: ShockData, model: GasModel):
    """Right-hand side ``h(v) / den(v)`` of the profile ODE (vectorised)."""
    return hugoniot_h(v, shock, model) / _denominator(v, shock, model)


def _denominator(v, shock, model):
    s = shock.sigma_star
    return s * model.visc_long + model.tau * s * hugoniot_dh(v, shock, model)


def tail_rates_linear(shock: ShockData, model: GasModel) -> tuple[float, float]:
    """Exponential approach rates at -inf and +inf from the linearised ODE."""
    rm = hugoniot_dh(shock.v_minus, shock, model) / _denominator(shock.v_minus, shock, model)
    rp = -hugoniot_dh(shock.v_plus, shock, model) / _denominator(shock.v_plus, shock, model)
    return float(rm), float(rp)


def recover_fields(v, shock: ShockData, model: GasModel):
    """Velocity and stresses carried by the profile at volume ``v``.

    Both stress components obey the same linear relaxation ODE with a source
    proportional to ``(u1^s)'`` and decay at infinity, so they split their
    sum ``-h(v)`` in the ratio ``4 mu / 3 : lambda``.
    """
    u1 = shock.u1_minus - shock.sigma_star * (v - shock.v_minus)
    total = -hugoniot_h(v, shock, model)
    k = model.visc_long
    pi11 = (4.0 * model.mu / 3.0) / k * total
    pi2 = model.lam / k * total
    return u1, pi11, pi2


def monotone_slopes(x, y, m):
    """Limit node slopes ``m`` so the cubic Hermite interpolant of increasing
    ``y`` stays monotone (Fritsch-Carlson circle condition)."""
    m = np.array(m, dtype=float)
    d = np.diff(y) / np.diff(x)
    for i, di in enumerate(d):
        if di <= 0.0:
            m[i] = m[i + 1] = 0.0
            continue
        a, b = m[i] / di, m[i + 1] / di
        r = a * a + b * b
        if r > 9.0:
            t = 3.0 / math.sqrt(r)
            m[i], m[i + 1] = t * a * di, t * b * di
    return np.maximum(m, 0.0)


def fd_weights(x, x0, m):
    """Fornberg finite-difference weights for derivatives 0..m at ``x0``."""
    n = len(x)
    c = np.zeros((n, m + 1))
    c1 = 1.0
    c4 = x[0] - x0
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - x0
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[i, k] = c1 * (k * c[i - 1, k - 1] - c5 * c[i - 1, k]) / c2
                c[i, 0] = -c1 * c5 * c[i - 1, 0] / c2
            for k in range(mn, 0, -1):
                c[j, k] = (c4 * c[j, k] - k * c[j, k - 1]) / c3
            c[j, 0] = c4 * c[j, 0] / c3
        c1 = c2
    return c


def fd_derivative(x, y, width=7):
    """First derivative of samples on a non-uniform grid, ``width``-point stencils."""
    n = len(x)
    half = width // 2
    out = np.empty(n)
    for i in range(n):
        lo = min(max(i - half, 0), n - width)
        w = fd_weights(x[lo:lo + width], x[i], 1)[:, 1]
        out[i] = w @ y[lo:lo + width]
    return out


@dataclass(frozen=True, eq=False)
class ProfileTable:
    xi: np.ndarray
    v_s: np.ndarray
    u1_s: np.ndarray
    pi11_s: np.ndarray
    pi2_s: np.ndarray
    tail_eps: float
    shock: ShockData
    model: GasModel
    ode_residual: float = field(default=float("nan"))

    @cached_property
    def _interp(self):
        sh, md = self.shock, self.model
        rm, rp = tail_rates_linear(sh, md)
        # one extra node per side, one e-fold out, holding the far-field value
        lo = self.xi[0] - 1.0 / max(rm, 1e-300)
        hi = self.xi[-1] + 1.0 / max(rp, 1e-300)
        x = np.concatenate(([lo], self.xi, [hi]))
        y = np.concatenate(([sh.v_minus], self.v_s, [sh.v_plus]))
        m = np.concatenate(([0.0], profile_rhs(self.v_s, sh, md), [0.0]))
        return CubicHermiteSpline(x, y, monotone_slopes(x, y, m), extrapolate=False), lo, hi

    @property
    def pi22_s(self):
        return -0.5 * self.pi11_s

    @property
    def pi33_s(self):
        return -0.5 * self.pi11_s

    def volume(self, xi1):
        """Interpolated ``v^s`` with constant far-field extension."""
        interp, lo, hi = self._interp
        xi1 = np.asarray(xi1, dtype=float)
        v = interp(np.clip(xi1, lo, hi))
        v = np.where(xi1 <= lo, self.shock.v_minus, v)
        return np.where(xi1 >= hi, self.shock.v_plus, v)

    def slope(self, xi1):
        """``v^s_{xi1}`` from the ODE applied to the interpolated volume."""
        interp, lo, hi = self._interp
        xi1 = np.asarray(xi1, dtype=float)
        s = profile_rhs(self.volume(xi1), self.shock, self.model)
        return np.where((xi1 <= lo) | (xi1 >= hi), 0.0, s)


def eval_profile(profile: ProfileTable, xi1):
    """Return ``(v^s, u1^s, Pi11^s, Pi2^s)`` at ``xi1``.

    Monotone cubic interpolation of the volume inside the table; velocity and
    stresses are recovered from the interpolated volume so that the algebraic
    relations hold exactly. Far outside the table the far-field states are
    returned.
    """
    xi1 = np.asarray(xi1, dtype=float)
    v = profile.volume(xi1)
    u1, pi11, pi2 = recover_fields(v, profile.shock, profile.model)
    _, lo, hi = profile._interp
    outside = (xi1 <= lo) | (xi1 >= hi)
    if np.any(outside):
        u1 = np.where(xi1 <= lo, profile.shock.u1_minus, u1)
        u1 = np.where(xi1 >= hi, profile.shock.u1_plus, u1)
        pi11 = np.where(outside, 0.0, pi11)
        pi2 = np.where(outside, 0.0, pi2)
    return v, u1, pi11, pi2


def solve_profile(shock: ShockData, model: GasModel, tol: float = DEFAULT_TOL,
                  tail_eps: float = DEFAULT_TAIL_EPS) -> ProfileTable:
    """Integrate the profile ODE from the midpoint out to both tails."""
    if not shock.v_plus > shock.v_minus or not shock.delta > 0.0:
        raise AdmissibilityError("zero-strength shock has no profile")
    if not tol > 0.0:
        raise ValueError("tol must be positive")
    if not 0.0 < tail_eps < 0.1:
        raise ValueError("tail_eps must lie in (0, 0.1)")
    check_tau(shock, model)

    dv = shock.dv
    den_floor = 0.25 * shock.sigma_star * model.visc_long
    w = characteristic_width(shock, model)

    g, vm, s = model.gamma, shock.v_minus, shock.sigma_star
    s2, pm, k, tau = s * s, vm ** -g, model.visc_long, model.tau

    def f(v):
        # scalar fast path of profile_rhs
        h = s2 * (vm - v) + pm - v ** -g
        den = s * k + tau * s * (-s2 + g * v ** (-g - 1.0))
        if den < den_floor:
            raise StiffnessError(f"profile ODE denominator {den:.3e} below {den_floor:.3e} at v={v:.6g}")
        return h / den

    vmid = 0.5 * (shock.v_minus + shock.v_plus)
    opts = dict(tol=tol, h0=w * 1e-3, h_max=w / 64.0, h_min=1e-12 * w)
    tl, vl = rk.integrate(f, vmid, -1, lambda v: abs(v - shock.v_minus) < tail_eps * dv, **opts)
    tr, vr = rk.integrate(f, vmid, +1, lambda v: abs(v - shock.v_plus) < tail_eps * dv, **opts)
    xi = np.concatenate((tl[::-1], tr[1:]))
    v = np.concatenate((vl[::-1], vr[1:]))
    u1, pi11, pi2 = recover_fields(v, shock, model)
    resid = float(np.max(np.abs(fd_derivative(xi, v) - profile_rhs(v, shock, model))))
    return ProfileTable(xi, v, u1, pi11, pi2, tail_eps, shock, model, resid)


def profile_fixed_step(shock: ShockData, model: GasModel, h: float, n_steps: int):
    """Fixed-step profile samples at ``xi = k h``, ``k = -n..n`` (self-convergence tool)."""
    vmid = 0.5 * (shock.v_minus + shock.v_plus)

    def f(v):
        return float(profile_rhs(v, shock, model))

    left = rk.integrate_fixed(f, vmid, -h, n_steps)
    right = rk.integrate_fixed(f, vmid, h, n_steps)
    xi = h * np.arange(-n_steps, n_steps + 1)
    return xi, np.concatenate((left[::-1], right[1:]))


def _velocity_slope(v, shock, model):
    """``(u1^s)'`` and its derivative along the profile, both from the ODE."""
    s = shock.sigma_star
    f = profile_rhs(v, shock, model)
    den = _denominator(v, shock, model)
    dh = hugoniot_dh(v, shock, model)
    dden = -model.tau * s * d2pressure(v, model)
    df = (dh * den - hugoniot_h(v, shock, model) * dden) / (den * den)
    return -s * f, -s * df * f


def relaxed_stress_quadrature(profile: ProfileTable, coeff: float):
    """Decaying solution of ``-tau sigma_* P' + P = coeff (u1^s)'`` on the table nodes.

    Independent of the algebraic split: the source is Hermite-interpolated
    between nodes and the exponential kernel is integrated exactly, marching
    in from the right tail where ``P`` matches the linearised decay.
    """
    shock, model = profile.shock, profile.model
    kap = model.tau * shock.sigma_star
    g, dg = _velocity_slope(profile.v_s, shock, model)
    if kap == 0.0:
        return coeff * g
    _, rp = tail_rates_linear(shock, model)
    xi = profile.xi
    h = np.diff(xi)
    g0, g1, d0, d1 = g[:-1], g[1:], dg[:-1], dg[1:]
    slope = (g1 - g0) / h
    beta = (g0, d0, (3.0 * slope - 2.0 * d0 - d1) / h, (d0 + d1 - 2.0 * slope) / (h * h))
    r = h / kap
    # int_0^h exp(-s/kap) s^k ds = kap^(k+1) k! P(k+1, h/kap)
    incr = sum(b * kap ** (k + 1) * math.factorial(k) * gammainc(k + 1, r) for k, b in enumerate(beta))
    incr *= coeff / kap
    decay = np.exp(-r)
    P = np.empty_like(xi)
    P[-1] = coeff * g[-1] / (1.0 + kap * rp)
    for i in range(len(xi) - 2, -1, -1):
        P[i] = decay[i] * P[i + 1] + incr[i]
    return P


def split_identity_residual(profile: ProfileTable) -> float:
    """Max deviation of the stored stresses from their quadrature solutions."""
    m = profile.model
    p11 = relaxed_stress_quadrature(profile, 4.0 * m.mu / 3.0)
    p2 = relaxed_stress_quadrature(profile, m.lam)
    return float(max(np.max(np.abs(p11 - profile.pi11_s)), np.max(np.abs(p2 - profile.pi2_s))))


@dataclass
class ProfileReport:
    v_increasing: bool
    u1_decreasing: bool
    in_bounds: bool
    tails_reached: bool
    rate_minus: float
    rate_plus: float
    rate_minus_over_delta: float
    rate_plus_over_delta: float
    pi_over_slope_max: float
    trace_residual: float
    ode_residual: float

    @property
    def ok(self) -> bool:
        return (self.v_increasing and self.u1_decreasing and self.in_bounds
                and self.tails_reached and self.rate_minus > 0 and self.rate_plus > 0
                and math.isfinite(self.pi_over_slope_max))

    def as_dict(self) -> dict:
        d = dict(self.__dict__)
        d["ok"] = self.ok
        return d


def _tail_rate(xi, dist):
    keep = dist > 1e-13
    xi, dist = xi[keep], dist[keep]
    if len(xi) < 2:
        return float("nan")
    slope = np.polyfit(xi, np.log(dist), 1)[0]
    return float(abs(slope))


def validate_profile(profile: ProfileTable) -> ProfileReport:
    """Numerically certify monotonicity, tail decay and stress bounds."""
    sh, md = profile.shock, profile.model
    xi, v = profile.xi, profile.v_s
    dv = sh.dv
    eps = profile.tail_eps

    left = np.flatnonzero(xi < 0.0)
    right = np.flatnonzero(xi > 0.0)
    nl, nr = max(2, len(left) // 4), max(2, len(right) // 4)
    outer_l = left[:nl]
    outer_r = right[-nr:]
    rm = _tail_rate(xi[outer_l], np.abs(v[outer_l] - sh.v_minus))
    rp = _tail_rate(xi[outer_r], np.abs(v[outer_r] - sh.v_plus))

    slope = profile_rhs(v, sh, md)
    pos = slope > 0
    ratio = np.abs(profile.pi11_s[pos]) / slope[pos] if np.any(pos) else np.array([np.inf])
    trace = profile.pi11_s + profile.pi22_s + profile.pi33_s

    return ProfileReport(
        v_increasing=bool(np.all(np.diff(v) > 0)),
        u1_decreasing=bool(np.all(np.diff(profile.u1_s) < 0)),
        in_bounds=bool(np.all((v > sh.v_minus) & (v < sh.v_plus))),
        tails_reached=bool(abs(v[0] - sh.v_minus) <= eps * dv and abs(v[-1] - sh.v_plus) <= eps * dv),
        rate_minus=rm,
        rate_plus=rp,
        rate_minus_over_delta=rm / sh.delta,
        rate_plus_over_delta=rp / sh.delta,
        pi_over_slope_max=float(np.max(ratio)),
        trace_residual=float(np.max(np.abs(trace))),
        ode_residual=profile.ode_residual,
    )


def profile_width(profile: ProfileTable) -> float:
    """Shock thickness ``(v_+ - v_-) / max v^s_{xi1}``."""
    return profile.shock.dv / float(np.max(profile_rhs(profile.v_s, profile.shock, profile.model)))


PROFILE_COLUMNS = ("xi1", "v", "u1", "pi11", "pi2")


def write_profile(path, profile: ProfileTable):
    """Columnar little-endian float64 dump with a two-line UTF-8 header."""
    sh, md = profile.shock, profile.model
    meta = {
        "gamma": md.gamma, "mu": md.mu, "lambda": md.lam, "tau": md.tau,
        "v_minus": sh.v_minus, "u1_minus": sh.u1_minus, "v_plus": sh.v_plus,
        "u1_plus": sh.u1_plus, "sigma": sh.sigma, "sigma_star": sh.sigma_star,
        "delta": sh.delta, "tail_eps": profile.tail_eps, "n": len(profile.xi),
    }
    data = np.stack([profile.xi, profile.v_s, profile.u1_s, profile.pi11_s, profile.pi2_s])
    with open(path, "wb") as fh:
        fh.write((" ".join(PROFILE_COLUMNS) + "\n").encode("utf-8"))
        fh.write((" ".join(f"{k}={val!r}" if isinstance(val, int) else f"{k}={val:.17g}"
                           for k, val in meta.items()) + "\n").encode("utf-8"))
        fh.write(data.astype("<f8").tobytes(order="C"))


def read_profile(path):
    """Inverse of :func:`write_profile`; returns ``(columns, meta, data)``."""
    with open(path, "rb") as fh:
        cols = fh.readline().decode("utf-8").split()
        meta = {}
        for item in fh.readline().decode("utf-8").split():
            k, val = item.split("=")
            meta[k] = int(val) if k == "n" else float(val)
        data = np.frombuffer(fh.read(), dtype="<f8").reshape(len(cols), -1)
    return cols, meta, data


def pressure_profile(profile: ProfileTable, xi1):
    return pressure(profile.volume(xi1), profile.model)
