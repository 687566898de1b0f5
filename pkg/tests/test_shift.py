import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import simpson

from relaxshock.gas import dpressure, pressure
from relaxshock.profile import eval_profile, profile_rhs
from relaxshock.shift import (advance_shift, make_shift_state, shift_constants, shift_rate, weight,
                              weight_slope)
from relaxshock.solver import BumpSpec, FieldState, Grid, init_perturbed_shock, profile_columns


@pytest.fixture(scope="module")
def state(profile):
    return make_shift_state(profile)


def test_defaults_and_constants(state, profile):
    d = profile.shock.delta
    assert state.X == 0.0 and state.nu == math.sqrt(d)
    sm, alpha, M = shift_constants(profile)
    g, vm = profile.model.gamma, profile.shock.v_minus
    assert sm == pytest.approx(math.sqrt(g * vm ** (-g - 1)), rel=1e-15)
    assert M == pytest.approx(9 / 8 * alpha * sm ** 4 * vm ** 2, rel=1e-14)


def test_nu_range(profile):
    d = profile.shock.delta
    with pytest.raises(ValueError):
        make_shift_state(profile, nu=0.5 * d)
    with pytest.raises(ValueError):
        make_shift_state(profile, nu=2 * math.sqrt(d))
    nu = 0.5 * (d + math.sqrt(d))
    assert make_shift_state(profile, nu=nu).nu == nu


def test_weight_limits_and_bounds(state):
    assert weight(-1e9, state) == 1.0
    assert weight(1e9, state) == pytest.approx(1.0 + state.nu, rel=1e-15)
    x = np.linspace(-300, 300, 20001)
    a = weight(x, state)
    assert a.min() >= 1.0 and a.max() <= 1.0 + state.nu
    assert np.all(np.diff(a) >= 0.0)
    assert np.all(weight_slope(x, state) >= 0.0)


@settings(max_examples=100, deadline=None)
@given(st.floats(-60.0, 60.0))
def test_weight_slope_finite_difference(state, x):
    # slope comes from the ODE at the interpolated volume, so it matches the
    # derivative of the interpolant only to table accuracy
    h = 1e-4
    fd = (weight(x + h, state) - weight(x - h, state)) / (2 * h)
    assert float(weight_slope(x, state)) == pytest.approx(float(fd), rel=1e-4, abs=1e-10)


def _shifted_fields(profile, grid, X, bump=None):
    f = FieldState.zeros(grid)
    f.q[:] = profile_columns(profile, grid.xi1, X)[:, :, None, None]
    if bump is not None:
        f.q[0] += bump
    return f


def test_rate_vanishes_on_shifted_profile(profile):
    grid = Grid(60.0, 1024)
    for X in (0.0, 0.37, -2.5):
        st_ = make_shift_state(profile)
        st_.X = X
        f = _shifted_fields(profile, grid, X)
        assert shift_rate(f, st_) == 0.0


def test_rate_transverse_constant_matches_1d(profile, state):
    bump = BumpSpec("v", 1e-3, 2.0, 1.0)
    f1 = init_perturbed_shock(profile, Grid(60.0, 512), bump)
    f3 = init_perturbed_shock(profile, Grid(60.0, 512, 4, 4), bump)
    assert shift_rate(f3, state) == pytest.approx(shift_rate(f1, state), rel=1e-13)


def test_rate_against_simpson_oracle(profile, state):
    grid = Grid(60.0, 2400)
    bump = BumpSpec("v", 1e-3, 2.0, 1.0)
    f = init_perturbed_shock(profile, grid, bump)
    xdot = shift_rate(f, state)
    # oracle: same integrand written out, Simpson on a 4x finer grid
    x = np.linspace(-60.0, 60.0, 4 * 2400 + 1)
    b = BumpSpec("v", 1e-3, 2.0, 1.0)
    r = np.abs(x - b.center) / b.width
    bx = np.where(r < 1, b.amplitude * np.exp(1 - 1 / np.maximum(1 - r ** 2, 1e-300)), 0.0)
    sh, md = profile.shock, profile.model
    vs, _, _, _ = eval_profile(profile, x)
    v = vs + bx
    dvs = profile_rhs(vs, sh, md) * (np.abs(x) < 1e8)
    a = 1 + state.nu * (pressure(sh.v_minus, md) - pressure(vs, md)) / sh.delta
    i1 = a / sh.sigma_star * (1 / v) * (-sh.sigma_star * dvs) * (pressure(v, md) - pressure(vs, md))
    i2 = a * (1 / v) * dpressure(vs, md) * dvs * (v - vs)
    oracle = -(state.M / sh.delta) * simpson(i1 - i2, x=x)
    assert xdot == pytest.approx(oracle, rel=1e-6)


def test_rate_translation_invariant(profile):
    grid = Grid(60.0, 1200)
    c = 10 * grid.dx1
    vals = []
    for X in (0.0, c):
        st_ = make_shift_state(profile)
        st_.X = X
        bump = BumpSpec("v", 1e-3, 2.0, 1.0 + X).shape(grid)[:, 0, 0][:, None, None]
        vals.append(shift_rate(_shifted_fields(profile, grid, X, bump), st_))
    assert vals[1] == pytest.approx(vals[0], rel=1e-8)


def test_advance_shift(profile):
    s = make_shift_state(profile)
    advance_shift(s, 0.0, 0.1)
    assert s.X == 0.0
    a, b = make_shift_state(profile), make_shift_state(profile)
    advance_shift(a, 0.3, 0.25)
    advance_shift(b, 0.3, 0.125)
    advance_shift(b, 0.3, 0.125)
    assert a.X == b.X and a.Xdot == 0.3 and a.xdot_max == 0.3
    with pytest.raises(ValueError):
        advance_shift(a, 0.3, 0.0)
