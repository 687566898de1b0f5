"""Time stepping of the relaxed system in the shock frame.

A macro-step is Strang split: half a step of the exact pointwise stress
relaxation, a full SSP-RK2 step of everything else (central differences
plus fourth-order hyperdissipation), another half relaxation step, and
finally the sponge. The Newtonian reference uses the same spatial operator
with the stresses replaced by their instantaneous closure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import BlowUpError, DomainError
from ..gas import GasModel
from ..profile import ProfileTable, eval_profile
from .backend import get_kernels
from .grid import NCOMP, FieldState, Grid

HYPER_COEFF = 0.02
SPONGE_CELLS = 8
DEFAULT_CFL = 0.4


def profile_columns(profile: ProfileTable, xi1, X: float = 0.0):
    """Packed profile state ``(11, len(xi1))`` evaluated at ``xi1 - X``."""
    v, u1, pi11, pi2 = eval_profile(profile, np.asarray(xi1) - X)
    cols = np.zeros((NCOMP, len(v)))
    cols[0] = v
    cols[1] = u1
    cols[4] = pi11
    cols[5] = -0.5 * pi11
    cols[6] = -0.5 * pi11
    cols[10] = pi2
    return cols


@dataclass(frozen=True)
class BumpSpec:
    """Smooth compactly supported perturbation ``A exp(1 - 1/(1 - (r/w)^2))``.

    ``amplitude`` is absolute. With ``transverse_mode = m > 0`` the bump is
    multiplied by ``cos(2 pi m xi_axis)``.
    """

    component: str = "v"
    amplitude: float = 0.0
    width: float = 2.0
    center: float = 0.0
    transverse_mode: int = 0
    transverse_axis: int = 3

    _COMPONENTS = {"v": 0, "u1": 1, "u2": 2, "u3": 3}

    def shape(self, grid: Grid):
        r = np.abs(grid.xi1 - self.center) / self.width
        inside = r < 1.0
        b = np.zeros_like(r)
        b[inside] = np.exp(1.0 - 1.0 / (1.0 - r[inside] ** 2))
        out = np.broadcast_to(b[:, None, None], grid.shape).copy()
        if self.transverse_mode:
            if self.transverse_axis == 2:
                mod = np.cos(2 * np.pi * self.transverse_mode * grid.xi2)[None, :, None]
            else:
                mod = np.cos(2 * np.pi * self.transverse_mode * grid.xi3)[None, None, :]
            out = out * mod
        return self.amplitude * out


def init_perturbed_shock(profile: ProfileTable, grid: Grid, bump: BumpSpec | None = None) -> FieldState:
    """Unshifted profile plus ``bump`` on one component; stresses from the profile."""
    fields = FieldState.zeros(grid)
    fields.q[:] = profile_columns(profile, grid.xi1)[:, :, None, None]
    if bump is not None and bump.amplitude != 0.0:
        if bump.component not in BumpSpec._COMPONENTS:
            raise ValueError(f"unknown bump component {bump.component!r}")
        if bump.center - bump.width <= -grid.L / 2 or bump.center + bump.width >= grid.L / 2:
            raise ValueError("bump support must lie inside (-L/2, L/2)")
        fields.q[BumpSpec._COMPONENTS[bump.component]] += bump.shape(grid)
        if np.any(fields.v <= 0.0):
            raise DomainError("bump amplitude drives v <= 0")
    return fields


class SlabSolver:
    """Integrator for one model on one grid in the frame moving with ``sigma``.

    Parameters
    ----------
    sponge_target : array (11, N1) or None
        State the xi1 sponge relaxes toward; ``None`` disables the sponge
        (plain clamped ghost cells).
    backend : {"numba", "numpy"} or None
        Kernel implementation; ``None`` follows ``RELAXSHOCK_NUMBA``.
    """

    def __init__(self, model: GasModel, grid: Grid, sigma: float, sponge_target=None,
                 cfl: float = DEFAULT_CFL, backend=None):
        self.model = model
        self.grid = grid
        self.sigma = float(sigma)
        self.cfl = cfl
        self.kernels = get_kernels(backend)
        self.target = None if sponge_target is None else np.asarray(sponge_target, dtype=float)
        n = min(SPONGE_CELLS, grid.N1 // 2)
        self.sponge_w = 0.5 * (1.0 + np.cos(np.pi * np.arange(n) / SPONGE_CELLS))
        self._S = np.empty((7,) + grid.shape)
        self._dx = (grid.dx1, grid.dx2, grid.dx3)
        # time integral of the mass inflow into the non-sponge interior
        self.boundary_inflow = 0.0

    # ---- speeds and time steps -------------------------------------------------
    def _advective_speed(self, q):
        return np.abs(q[1] - self.sigma) + np.abs(q[2]) + np.abs(q[3])

    def frozen_speed(self, q):
        if self.model.tau <= 0.0:
            raise DomainError("tau = 0 has unbounded frozen speed; use newtonian_step")
        g = self.model.gamma
        v = q[0]
        # rho = 1/v: gamma rho^(gamma-1) + K / (tau rho^2)
        c2 = g * v ** (1.0 - g) + self.model.visc_long * v * v / self.model.tau
        return self._advective_speed(q) + np.sqrt(c2)

    def cfl_dt(self, fields: FieldState) -> float:
        """Largest stable macro-step for the relaxed scheme."""
        smax = float(np.max(self.frozen_speed(fields.q)))
        return self.cfl * min(self._dx_active()) / smax

    def newtonian_dt(self, fields: FieldState) -> float:
        q = fields.q
        g = self.model.gamma
        s = float(np.max(self._advective_speed(q) + np.sqrt(g * q[0] ** (1.0 - g))))
        dxm = min(self._dx_active())
        rho_min = float(np.min(1.0 / q[0]))
        return min(self.cfl * dxm / s, 0.25 * dxm * dxm * rho_min / self.model.visc_long)

    def _dx_active(self):
        g = self.grid
        return (g.dx1,) if g.N2 == 1 else (g.dx1, g.dx2, g.dx3)

    # ---- operators --------------------------------------------------------------
    def _rhs(self, q, hyp, out=None):
        if out is None:
            out = np.empty_like(q)
        pv = q[0] ** (-self.model.gamma)
        self.kernels.nonstiff_rhs(q, pv, out, self.sigma, *self._dx, hyp)
        return out

    def strain(self, q):
        """Newtonian closure ``(S11, S22, S33, S12, S13, S23, S2)`` of the velocity in ``q``."""
        S = np.empty((7,) + q.shape[1:])
        self.kernels.strain_source(q, S, self.model.mu, self.model.lam, *self._dx)
        return S

    def relax_substep(self, q, h):
        """Exact update of ``tau rho Pi_t = -Pi + S`` with ``u`` frozen (in place)."""
        self.kernels.strain_source(q, self._S, self.model.mu, self.model.lam, *self._dx)
        self.kernels.relax(q, self._S, self.model.tau, h)

    def time_derivative(self, fields: FieldState):
        """Semi-discrete ``dq/dt`` including the relaxation source (no sponge)."""
        q = fields.q
        hyp = HYPER_COEFF * float(np.max(self.frozen_speed(q)))
        out = self._rhs(q, hyp)
        S = self.strain(q)
        out[4:11] += (S - q[4:11]) * (q[0] / self.model.tau)
        return out

    def step(self, fields: FieldState, dt: float) -> FieldState:
        """One Strang-split macro-step; returns a new FieldState."""
        q = fields.q.copy()
        hyp = HYPER_COEFF * float(np.max(self.frozen_speed(q)))
        self.relax_substep(q, 0.5 * dt)
        k0 = self._rhs(q, hyp)
        q1 = q + dt * k0
        k1 = self._rhs(q1, hyp)
        self.boundary_inflow += 0.5 * dt * (self.face_inflow(q, hyp) + self.face_inflow(q1, hyp))
        q = 0.5 * q + 0.5 * (q1 + dt * k1)
        self.relax_substep(q, 0.5 * dt)
        out = FieldState(q, fields.t + dt, self.grid)
        self.apply_boundaries(out)
        self._check(out)
        return out

    def _newton_rhs(self, q, hyp):
        qq = q.copy()
        self.kernels.strain_source(q, qq[4:11], self.model.mu, self.model.lam, *self._dx)
        out = self._rhs(qq, hyp)
        out[4:11] = 0.0
        return out

    def newtonian_step(self, fields: FieldState, dt: float) -> FieldState:
        """Explicit SSP-RK2 step of classical Navier-Stokes; stress slots hold the closure."""
        q = fields.q.copy()
        g = self.model.gamma
        hyp = HYPER_COEFF * float(np.max(self._advective_speed(q) + np.sqrt(g * q[0] ** (1.0 - g))))
        q1 = q + dt * self._newton_rhs(q, hyp)
        self.boundary_inflow += 0.5 * dt * (self.face_inflow(q, hyp) + self.face_inflow(q1, hyp))
        q = 0.5 * q + 0.5 * (q1 + dt * self._newton_rhs(q1, hyp))
        out = FieldState(q, fields.t + dt, self.grid)
        self.apply_boundaries(out)
        self.kernels.strain_source(out.q, out.q[4:11], self.model.mu, self.model.lam, *self._dx)
        self._check(out)
        return out

    def apply_boundaries(self, fields: FieldState) -> FieldState:
        """Cosine-ramp sponge at both xi1 ends (in place). Transverse periodicity
        lives in the stencils."""
        if self.target is None:
            return fields
        q = fields.q
        n1 = self.grid.N1
        for i, w in enumerate(self.sponge_w):
            for idx in (i, n1 - 1 - i):
                q[:, idx] = w * self.target[:, idx, None, None] + (1.0 - w) * q[:, idx]
        return fields

    def _check(self, fields: FieldState):
        q = fields.q
        if not np.all(np.isfinite(q)):
            bad = np.argwhere(~np.isfinite(q))[0]
            raise BlowUpError(f"non-finite value at component/cell {tuple(bad)} t={fields.t:.6g}",
                              cell=tuple(int(b) for b in bad[1:]), time=fields.t)
        if np.any(q[0] <= 0.0):
            bad = np.argwhere(q[0] <= 0.0)[0]
            raise BlowUpError(f"v <= 0 at cell {tuple(bad)} t={fields.t:.6g}",
                              cell=tuple(int(b) for b in bad), time=fields.t)

    # ---- mass bookkeeping ---------------------------------------------------------
    def _interior(self):
        n = min(SPONGE_CELLS, self.grid.N1 // 4)
        return n, self.grid.N1 - n

    def interior_mass(self, fields: FieldState) -> float:
        """``sum(rho) dV`` over cells outside both sponges."""
        lo, hi = self._interior()
        g = self.grid
        return float(np.sum(1.0 / fields.q[0, lo:hi])) * g.dx1 * g.dx2 * g.dx3

    def face_inflow(self, q, hyp: float) -> float:
        """Net mass inflow rate through the two interior faces bounding the sponges.

        Uses the scheme's own face flux: the central average of ``rho (u1 - sigma)``
        plus the part of the hyperdissipation carried across the face.
        """
        lo, hi = self._interior()
        g = self.grid
        v = q[0]
        f = (q[1] - self.sigma) / v
        area = g.dx2 * g.dx3

        def face(i):
            # flux through the face between cells i and i+1
            t3 = v[i + 2] - 3.0 * v[i + 1] + 3.0 * v[i] - v[i - 1]
            vf = 0.5 * (v[i] + v[i + 1])
            return float(np.sum(0.5 * (f[i] + f[i + 1]) - hyp * t3 / (vf * vf))) * area

        return face(lo - 1) - face(hi - 1)

    def reset_mass_ledger(self):
        self.boundary_inflow = 0.0


def frozen_jacobian_1d(state, model: GasModel, sigma: float):
    """Principal-part matrix of the relaxed system along xi1 at one state.

    ``state`` is the packed 11-vector. Used as an eigenvalue oracle for the
    frozen speed bound.
    """
    v, u1 = state[0], state[1]
    rho = 1.0 / v
    mu, lam, tau = model.mu, model.lam, model.tau
    A = np.eye(NCOMP) * (u1 - sigma)
    A[0, 1] = -v
    A[1, 0] = v * (-model.gamma * v ** (-model.gamma - 1.0))
    # momentum: -v d1(Pi_{a1} + Pi2 delta_a1)
    A[1, 4] -= v
    A[1, 10] -= v
    A[2, 7] -= v
    A[3, 8] -= v
    c = 1.0 / (tau * rho)
    A[4, 1] -= c * 4.0 * mu / 3.0
    A[5, 1] -= c * (-2.0 * mu / 3.0)
    A[6, 1] -= c * (-2.0 * mu / 3.0)
    A[7, 2] -= c * mu
    A[8, 3] -= c * mu
    A[10, 1] -= c * lam
    return A


def max_jacobian_speed(state, model, sigma):
    ev = np.linalg.eigvals(frozen_jacobian_1d(state, model, sigma))
    return float(np.max(np.abs(ev)))


def frozen_speed_point(state, model: GasModel, sigma: float) -> float:
    v = state[0]
    adv = abs(state[1] - sigma) + abs(state[2]) + abs(state[3])
    return adv + math.sqrt(model.gamma * v ** (1.0 - model.gamma) + model.visc_long * v * v / model.tau)
