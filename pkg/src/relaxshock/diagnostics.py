"""Relative entropy, good-term functionals, sup norms, flux mismatch and the
Poincare-type inequality check, all evaluated on solver snapshots."""
from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .gas import GasModel
from .profile import ProfileTable, eval_profile
from .shift import ShiftState, shifted_profile

_SERIES_CUTOFF = 1e-2


def entropy(v, model: GasModel):
    g = model.gamma
    return np.asarray(v, dtype=float) ** (1.0 - g) / (g - 1.0)


def H_rel(v, w, model: GasModel):
    """Bregman divergence ``H(v) - H(w) - H'(w)(v - w)`` with ``H' = -p``.

    Evaluated as ``w^(1-g)/(g-1) * ((1+x)^(1-g) - 1 - (1-g) x)``, ``x = (v-w)/w``,
    with a Taylor series for small ``|x|`` so tiny perturbations keep full
    relative accuracy.
    """
    v = np.asarray(v, dtype=float)
    w = np.asarray(w, dtype=float)
    g = model.gamma
    a = 1.0 - g
    x = (v - w) / w
    small = np.abs(x) < _SERIES_CUTOFF
    xs = np.where(small, x, 0.0)
    # sum_{k>=2} binom(a, k) x^k, truncated at k = 9
    series = np.zeros_like(xs)
    coef = a
    xk = xs.copy()
    for k in range(2, 10):
        coef *= (a - k + 1) / k
        xk = xk * xs
        series = series + coef * xk
    xl = np.where(small, 0.0, x)
    direct = np.expm1(a * np.log1p(xl)) - a * xl
    phi = np.where(small, series, direct)
    return w ** a / (g - 1.0) * phi


def relative_entropy_field(fields, profile: ProfileTable, X: float, model: GasModel):
    """Pointwise relative entropy against the profile shifted by ``X``."""
    q = fields.q
    xi1 = fields.grid.xi1 - X
    vs, u1s, pi11s, pi2s = (x[:, None, None] for x in eval_profile(profile, xi1))
    eta = H_rel(q[0], vs, model)
    eta = eta + 0.5 * ((q[1] - u1s) ** 2 + q[2] ** 2 + q[3] ** 2)
    if model.tau > 0.0:
        d11 = q[4] - pi11s
        d22 = q[5] + 0.5 * pi11s
        d33 = q[6] + 0.5 * pi11s
        frob = d11 ** 2 + d22 ** 2 + d33 ** 2 + 2.0 * (q[7] ** 2 + q[8] ** 2 + q[9] ** 2)
        eta = eta + model.tau * frob / (4.0 * model.mu) + model.tau * (q[10] - pi2s) ** 2 / (2.0 * model.lam)
    return eta


def weighted_entropy_total(fields, profile: ProfileTable, shift: ShiftState, model: GasModel) -> float:
    """Trapezoid quadrature of ``a(xi1 - X) rho eta``."""
    eta = relative_entropy_field(fields, profile, shift.X, model)
    sp = shifted_profile(shift, fields.grid.xi1)
    return fields.grid.integrate(sp.a[:, None, None] * eta / fields.q[0])


def _gradient(f, grid):
    g1 = np.gradient(f, grid.dx1, axis=0, edge_order=2)
    if grid.N2 == 1:
        z = np.zeros_like(f)
        return g1, z, z.copy()
    g2 = (np.roll(f, -1, axis=1) - np.roll(f, 1, axis=1)) * (0.5 / grid.dx2)
    g3 = (np.roll(f, -1, axis=2) - np.roll(f, 1, axis=2)) * (0.5 / grid.dx3)
    return g1, g2, g3


def good_terms(fields, profile: ProfileTable, shift: ShiftState, model: GasModel):
    """``(Gs, G2, G3, D)``; all nonnegative."""
    grid = fields.grid
    q = fields.q
    sp = shifted_profile(shift, grid.xi1)
    c = lambda x: x[:, None, None]  # noqa: E731
    sig_star = profile.shock.sigma_star
    pv = q[0] ** (-model.gamma)
    dp = pv - c(sp.p)
    Gs = grid.integrate(c(sp.dv) * dp * dp)
    G2 = sig_star * grid.integrate(c(sp.da) * 0.5 * (q[2] ** 2 + q[3] ** 2))
    w = q[1] - c(sp.u1) - dp / sig_star
    G3 = 0.5 * sig_star * grid.integrate(c(sp.da) * w * w)
    g1, g2, g3 = _gradient(dp, grid)
    dens = model.gamma * pv ** (1.0 + 1.0 / model.gamma)
    D = model.visc_long * grid.integrate(c(sp.a) * (g1 * g1 + g2 * g2 + g3 * g3) / dens)
    return Gs, G2, G3, D


def flux_mismatch_F(fields, profile: ProfileTable, X: float, form: int = 3):
    """Mass-flux mismatch against the shifted profile.

    ``form=3``: ``(sigma*/v)(v - v^s) + (u1 - u1^s)/v``.
    ``form=1``: ``-sigma (rho - rho^s) + rho u1 - rho^s u1^s``.
    """
    q = fields.q
    vs, u1s, _, _ = (x[:, None, None] for x in eval_profile(profile, fields.grid.xi1 - X))
    shock = profile.shock
    v, u1 = q[0], q[1]
    if form == 3:
        return (shock.sigma_star / v) * (v - vs) + (u1 - u1s) / v
    if form == 1:
        return -shock.sigma * (1.0 / v - 1.0 / vs) + u1 / v - u1s / vs
    raise ValueError("form must be 1 or 3")


def sup_norms(fields, profile: ProfileTable, X: float):
    """``(sup_v, sup_u, sup_pi)`` of the perturbation from the shifted profile."""
    q = fields.q
    vs, u1s, pi11s, pi2s = (x[:, None, None] for x in eval_profile(profile, fields.grid.xi1 - X))
    sup_v = float(np.max(np.abs(q[0] - vs)))
    sup_u = float(np.max(np.sqrt((q[1] - u1s) ** 2 + q[2] ** 2 + q[3] ** 2)))
    frob = ((q[4] - pi11s) ** 2 + (q[5] + 0.5 * pi11s) ** 2 + (q[6] + 0.5 * pi11s) ** 2
            + 2.0 * (q[7] ** 2 + q[8] ** 2 + q[9] ** 2))
    sup_pi = float(np.max(np.sqrt(frob + (q[10] - pi2s) ** 2)))
    return sup_v, sup_u, sup_pi


@dataclass
class EntropyReport:
    t: float
    eta_total: float
    Gs: float
    G2: float
    G3: float
    D: float
    sup_v: float
    sup_u: float
    sup_pi: float
    Xdot_abs: float

    def as_dict(self):
        return asdict(self)


def entropy_report(fields, profile: ProfileTable, shift: ShiftState, model: GasModel) -> EntropyReport:
    eta = weighted_entropy_total(fields, profile, shift, model)
    Gs, G2, G3, D = good_terms(fields, profile, shift, model)
    sv, su, sp = sup_norms(fields, profile, shift.X)
    return EntropyReport(fields.t, eta, Gs, G2, G3, D, sv, su, sp, abs(shift.Xdot))


# ---- Poincare-type inequality on (0,1) x T^2 ------------------------------------

def poincare_grid(n1, n2, n3):
    """Midpoint nodes in ``y1`` and periodic nodes ``j/n`` transversally."""
    y1 = (np.arange(n1) + 0.5) / n1
    y2 = np.arange(n2) / n2
    y3 = np.arange(n3) / n3
    return y1, y2, y3


def _spectral_derivative(f, axis):
    n = f.shape[axis]
    k = 2j * np.pi * np.fft.fftfreq(n, d=1.0 / n)
    shape = [1, 1, 1]
    shape[axis] = n
    return np.real(np.fft.ifft(np.fft.fft(f, axis=axis) * k.reshape(shape), axis=axis))


def poincare_check(f):
    """Return ``(lhs, rhs, holds)`` for samples ``f`` on :func:`poincare_grid`.

    lhs = int |f - mean f|^2, rhs = 1/2 int y(1-y) |d1 f|^2
    + 1/(16 pi^2) int |grad' f|^2 / (y(1-y)).
    """
    f = np.asarray(f, dtype=float)
    if f.ndim == 1:
        f = f[:, None, None]
    n1, n2, n3 = f.shape
    y = (np.arange(n1) + 0.5) / n1
    wy = (y * (1.0 - y))[:, None, None]
    cell = 1.0 / (n1 * n2 * n3)
    lhs = float(np.sum((f - f.mean()) ** 2)) * cell
    d1 = np.gradient(f, 1.0 / n1, axis=0, edge_order=2)
    rhs = 0.5 * float(np.sum(wy * d1 * d1)) * cell
    if n2 > 1 or n3 > 1:
        trans = np.zeros_like(f)
        if n2 > 1:
            trans += _spectral_derivative(f, 1) ** 2
        if n3 > 1:
            trans += _spectral_derivative(f, 2) ** 2
        rhs += float(np.sum(trans / wy)) * cell / (16.0 * np.pi ** 2)
    holds = lhs <= rhs * (1.0 + 1e-6) + 1e-12
    return lhs, rhs, bool(holds)


def random_bandlimited(rng, n1, n2, n3, kmax=(4, 3, 3)):
    """Seeded random smooth function: cosine series in ``y1`` times Fourier modes in ``y'``."""
    y1, y2, y3 = poincare_grid(n1, n2, n3)
    Y1, Y2, Y3 = np.meshgrid(y1, y2, y3, indexing="ij")
    f = np.zeros_like(Y1)
    for k1 in range(kmax[0] + 1):
        for k2 in range(-kmax[1], kmax[1] + 1):
            for k3 in range(-kmax[2], kmax[2] + 1):
                c = rng.normal() / (1.0 + k1 * k1 + k2 * k2 + k3 * k3)
                ph = rng.uniform(0.0, 2.0 * np.pi)
                f += c * np.cos(np.pi * k1 * Y1) * np.cos(2.0 * np.pi * (k2 * Y2 + k3 * Y3) + ph)
    return f
