"""Gamma-law closure, 2-shock end states and the relaxation-time bound.

Pressure is written in specific-volume form ``p(v) = v**(-gamma)`` (unit
constant). All functions are pure.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AdmissibilityError, ConsistencyError, DomainError

# dense sample count for the inner minimisation of tau_admissible_max
TAU_SAMPLES = 4096


@dataclass(frozen=True)
class GasModel:
    """Physical parameters of the relaxed Navier-Stokes system.

    Parameters
    ----------
    gamma : float
        Adiabatic index, > 1.
    mu : float
        Shear viscosity, > 0.
    lam : float
        Bulk viscosity, > 0.
    tau : float
        Stress relaxation time, >= 0 (0 is the Newtonian limit).
    """

    gamma: float
    mu: float
    lam: float
    tau: float = 0.0

    def __post_init__(self):
        if not self.gamma > 1.0:
            raise DomainError(f"gamma must exceed 1, got {self.gamma}")
        if not self.mu > 0.0:
            raise DomainError(f"mu must be positive, got {self.mu}")
        if not self.lam > 0.0:
            raise DomainError(f"lambda must be positive, got {self.lam}")
        if not self.tau >= 0.0:
            raise DomainError(f"tau must be non-negative, got {self.tau}")

    @property
    def visc_long(self) -> float:
        """Longitudinal viscosity 4*mu/3 + lambda."""
        return 4.0 * self.mu / 3.0 + self.lam

    def with_tau(self, tau: float) -> "GasModel":
        return GasModel(self.gamma, self.mu, self.lam, tau)


def _check_volume(v):
    if np.any(np.asarray(v) <= 0.0) or np.any(~np.isfinite(v)):
        raise DomainError("specific volume must be positive and finite")


def pressure(v, model: GasModel):
    """Return ``v**(-gamma)``; raises DomainError for v <= 0."""
    _check_volume(v)
    return np.power(v, -model.gamma)


def dpressure(v, model: GasModel):
    """Derivative ``-gamma * v**(-gamma-1)``."""
    _check_volume(v)
    return -model.gamma * np.power(v, -model.gamma - 1.0)


def d2pressure(v, model: GasModel):
    _check_volume(v)
    g = model.gamma
    return g * (g + 1.0) * np.power(v, -g - 2.0)


@dataclass(frozen=True)
class ShockData:
    """End states and speeds of a 2-shock.

    ``sigma`` is the Eulerian shock speed, ``sigma_star`` the mass flux
    through the shock and ``delta = p(v_minus) - p(v_plus)`` its strength.
    """

    v_minus: float
    u1_minus: float
    v_plus: float
    u1_plus: float
    sigma: float
    sigma_star: float
    delta: float

    @property
    def dv(self) -> float:
        return self.v_plus - self.v_minus

    def rh_residuals(self, model: GasModel) -> tuple[float, float]:
        """Relative residuals of the two Rankine-Hugoniot relations (density form)."""
        rm, rp = 1.0 / self.v_minus, 1.0 / self.v_plus
        um, up = self.u1_minus, self.u1_plus
        pm, pp = float(pressure(self.v_minus, model)), float(pressure(self.v_plus, model))
        s = self.sigma
        r1 = -s * (rp - rm) + (rp * up - rm * um)
        r2 = -s * (rp * up - rm * um) + (rp * up**2 - rm * um**2) + (pp - pm)
        scale1 = max(1.0, abs(s * rp), abs(s * rm), abs(rp * up), abs(rm * um))
        scale2 = max(1.0, abs(s * rp * up), abs(s * rm * um), rp * up**2, rm * um**2, pp, pm)
        return abs(r1) / scale1, abs(r2) / scale2


def make_shock(v_minus: float, u1_minus: float, v_plus: float, model: GasModel) -> ShockData:
    """Build the 2-shock connecting ``(v_minus, u1_minus)`` to ``v_plus``."""
    if not v_minus > 0.0:
        raise DomainError(f"v_minus must be positive, got {v_minus}")
    if not v_plus > v_minus:
        raise AdmissibilityError(
            f"not a 2-shock: need v_plus > v_minus, got v_minus={v_minus}, v_plus={v_plus}"
        )
    pm = float(pressure(v_minus, model))
    pp = float(pressure(v_plus, model))
    delta = pm - pp
    sigma_star = math.sqrt(delta / (v_plus - v_minus))
    u1_plus = u1_minus - sigma_star * (v_plus - v_minus)
    if not u1_plus < u1_minus:
        raise ConsistencyError("constructed u1_plus does not satisfy the Lax condition")
    sigma = u1_minus + sigma_star * v_minus
    return ShockData(v_minus, u1_minus, v_plus, u1_plus, sigma, sigma_star, delta)


def hugoniot_h(v, shock: ShockData, model: GasModel):
    """``h(v) = sigma_*^2 (v_- - v) + p(v_-) - p(v)``; vanishes at both end states."""
    s2 = shock.sigma_star**2
    return s2 * (shock.v_minus - v) + (pressure(shock.v_minus, model) - pressure(v, model))


def hugoniot_dh(v, shock: ShockData, model: GasModel):
    return -shock.sigma_star**2 - dpressure(v, model)


def tau_admissible_max(shock: ShockData, model: GasModel, samples: int = TAU_SAMPLES):
    """Largest relaxation time allowed for this shock.

    Returns ``(tau_max, z_min)`` where ``z_min`` is the sampled volume at
    which the quotient ``K / (2 |sigma_*^2 + p'(z)|)`` is smallest.
    """
    if shock.v_plus <= shock.v_minus:
        return 1.0, shock.v_minus
    z = np.linspace(shock.v_minus, shock.v_plus, samples + 2)
    denom = 2.0 * np.abs(shock.sigma_star**2 + dpressure(z, model))
    with np.errstate(divide="ignore"):
        quot = np.where(denom > 0.0, model.visc_long / denom, np.inf)
    k = int(np.argmin(quot))
    return min(float(quot[k]), 1.0), float(z[k])


def check_tau(shock: ShockData, model: GasModel) -> float:
    """Raise AdmissibilityError if ``model.tau`` exceeds the bound; return the bound."""
    tmax, z = tau_admissible_max(shock, model)
    if model.tau > tmax:
        raise AdmissibilityError(
            f"tau={model.tau} exceeds admissible bound {tmax:.6g} "
            f"(min over [v_-, v_+] attained at z={z:.6g})"
        )
    return tmax
