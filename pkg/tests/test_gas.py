import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaxshock.errors import AdmissibilityError, DomainError
from relaxshock.gas import (GasModel, check_tau, dpressure, hugoniot_dh, hugoniot_h, make_shock,
                            pressure, tau_admissible_max)


def test_pressure_examples():
    assert pressure(1.0, GasModel(1.4, 1, 1)) == 1.0
    assert pressure(2.0, GasModel(2.0, 1, 1)) == 0.25
    assert dpressure(1.0, GasModel(5 / 3, 1, 1)) == pytest.approx(-5 / 3, rel=1e-15)


@pytest.mark.parametrize("v", [0.0, -1.0, np.nan, np.inf])
def test_pressure_rejects_bad_volume(v):
    with pytest.raises(DomainError):
        pressure(v, GasModel(1.4, 1, 1))


@pytest.mark.parametrize("kw", [dict(gamma=1.0), dict(mu=0.0), dict(lam=-1.0), dict(tau=-0.1)])
def test_gas_model_validation(kw):
    base = dict(gamma=1.4, mu=1.0, lam=1.0, tau=0.0)
    base.update(kw)
    with pytest.raises(DomainError):
        GasModel(**base)


def test_make_shock_rh_residuals(model):
    sh = make_shock(1.0, 0.0, 1.2, model)
    # oracle: substitute into both jump relations directly
    pm, pp = 1.0 ** -model.gamma, 1.2 ** -model.gamma
    rm, rp = 1.0 / sh.v_minus, 1.0 / sh.v_plus
    mass = -sh.sigma * (rp - rm) + (rp * sh.u1_plus - rm * sh.u1_minus)
    mom = -sh.sigma * (rp * sh.u1_plus - rm * sh.u1_minus) + (rp * sh.u1_plus ** 2 + pp - rm * sh.u1_minus ** 2 - pm)
    assert abs(mass) < 1e-12 and abs(mom) < 1e-12
    assert max(sh.rh_residuals(model)) < 1e-12
    assert sh.sigma_star ** 2 == pytest.approx((pm - pp) / 0.2, rel=1e-15)
    assert sh.sigma == pytest.approx(sh.u1_minus + sh.sigma_star * sh.v_minus, rel=1e-15)
    assert sh.v_minus < sh.v_plus and sh.u1_minus > sh.u1_plus


def test_make_shock_rejects_one_shock(model):
    with pytest.raises(AdmissibilityError, match="not a 2-shock"):
        make_shock(1.0, 0.0, 0.9, model)
    with pytest.raises(AdmissibilityError):
        make_shock(1.0, 0.0, 1.0, model)


def test_weak_shock_limit(model):
    sh = make_shock(1.0, 0.0, 1.0 + 1e-7, model)
    assert sh.sigma_star == pytest.approx(math.sqrt(-dpressure(1.0, model)), rel=1e-6)


@settings(max_examples=60, deadline=None)
@given(vm=st.floats(0.3, 3.0), ratio=st.floats(1.01, 2.5), u=st.floats(-2, 2), g=st.floats(1.1, 3.0))
def test_shock_invariants(vm, ratio, u, g):
    model = GasModel(g, 1.0, 1.0)
    sh = make_shock(vm, u, vm * ratio, model)
    assert max(sh.rh_residuals(model)) < 1e-12
    scale = abs(pressure(vm, model))
    assert abs(hugoniot_h(sh.v_minus, sh, model)) <= 1e-12 * max(1.0, scale)
    assert abs(hugoniot_h(sh.v_plus, sh, model)) <= 1e-12 * max(1.0, scale)
    z = np.linspace(sh.v_minus, sh.v_plus, 202)[1:-1]
    assert np.all(hugoniot_h(z, sh, model) > 0)
    again = make_shock(sh.v_minus, sh.u1_minus, sh.v_plus, model)
    assert again.sigma == sh.sigma and again.sigma_star == sh.sigma_star


def test_tau_bound_brute_force():
    model = GasModel(5 / 3, 1.0, 1.0)
    sh = make_shock(1.0, 0.0, 1.5, model)
    z = np.linspace(1.0, 1.5, 1_000_001)
    q = model.visc_long / (2 * np.abs(sh.sigma_star ** 2 + dpressure(z, model)))
    oracle = min(q.min(), 1.0)
    tmax, zmin = tau_admissible_max(sh, model)
    assert tmax == pytest.approx(oracle, rel=1e-6)
    assert 1.0 <= zmin <= 1.5


def test_tau_bound_cap_and_denominator():
    model = GasModel(5 / 3, 1.0, 1.0)
    tmax, _ = tau_admissible_max(make_shock(1.0, 0.0, 1.0 + 1e-9, model), model)
    assert tmax == 1.0
    small = GasModel(5 / 3, 0.01, 0.01)
    sh = make_shock(1.0, 0.0, 3.0, small)
    tmax, _ = tau_admissible_max(sh, small)
    assert tmax < 1.0
    z = np.linspace(sh.v_minus, sh.v_plus, 5001)
    den = sh.sigma_star * small.visc_long + tmax * sh.sigma_star * hugoniot_dh(z, sh, small)
    assert np.all(den >= 0.5 * sh.sigma_star * small.visc_long * (1 - 1e-9))
    with pytest.raises(AdmissibilityError, match="tau"):
        check_tau(sh, small.with_tau(2 * tmax))
