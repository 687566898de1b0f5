import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from relaxshock.errors import AdmissibilityError
from relaxshock.gas import GasModel, make_shock, pressure
from relaxshock.profile import (eval_profile, fd_derivative, profile_fixed_step, profile_rhs,
                                read_profile, relaxed_stress_quadrature, solve_profile,
                                split_identity_residual, tail_rates_linear, validate_profile,
                                write_profile)


def test_pinning_and_tails(profile, shock):
    i0 = int(np.argmin(np.abs(profile.xi)))
    assert profile.xi[i0] == 0.0
    assert profile.v_s[i0] == 0.5 * (shock.v_minus + shock.v_plus)
    eps = profile.tail_eps * shock.dv
    assert abs(profile.v_s[0] - shock.v_minus) < eps
    assert abs(profile.v_s[-1] - shock.v_plus) < eps
    assert np.all((profile.v_s > shock.v_minus) & (profile.v_s < shock.v_plus))


def test_ode_residual_independent_fd(profile, shock, model):
    # oracle: 9-point finite differences on the returned grid
    d = fd_derivative(profile.xi, profile.v_s, width=9)
    assert np.max(np.abs(d - profile_rhs(profile.v_s, shock, model))) < 1e-8
    assert profile.ode_residual < 1e-8


def test_recovery_relations(profile, shock, model):
    u1 = shock.u1_minus - shock.sigma_star * (profile.v_s - shock.v_minus)
    np.testing.assert_allclose(profile.u1_s, u1, rtol=0, atol=1e-15)
    total = -shock.sigma_star * (profile.u1_s - shock.u1_minus) + (pressure(profile.v_s, model)
                                                                   - pressure(shock.v_minus, model))
    np.testing.assert_allclose(profile.pi11_s + profile.pi2_s, total, rtol=0, atol=1e-14)
    nz = np.abs(profile.pi2_s) > 1e-12
    np.testing.assert_allclose(profile.pi11_s[nz] / profile.pi2_s[nz], (4 / 3) / 1.0, rtol=1e-12)
    np.testing.assert_array_equal(profile.pi22_s, -0.5 * profile.pi11_s)
    np.testing.assert_array_equal(profile.pi33_s, profile.pi22_s)


def test_split_identity(profile):
    assert split_identity_residual(profile) < 1e-8


def test_split_identity_detects_corruption(profile):
    bad = type(profile)(profile.xi, profile.v_s, profile.u1_s, profile.pi11_s * 1.01, profile.pi2_s,
                        profile.tail_eps, profile.shock, profile.model)
    assert split_identity_residual(bad) > 1e-6


def test_quadrature_exact_for_exponential_source():
    # for tau = 0 the quadrature returns the source itself
    model = GasModel(5 / 3, 1.0, 1.0, 0.0)
    prof = solve_profile(make_shock(1.0, 0.0, 1.2, model), model)
    P = relaxed_stress_quadrature(prof, 4.0 / 3.0)
    np.testing.assert_allclose(P, prof.pi11_s, atol=1e-14)


def test_rejections(model):
    sh = make_shock(1.0, 0.0, 1.2, model)
    with pytest.raises(ValueError):
        solve_profile(sh, model, tol=0.0)
    with pytest.raises(ValueError):
        solve_profile(sh, model, tail_eps=0.2)
    with pytest.raises(AdmissibilityError):
        solve_profile(sh, model.with_tau(1.5))


def test_validate_profile_all_true(profile):
    rep = validate_profile(profile)
    assert rep.ok
    assert rep.v_increasing and rep.u1_decreasing and rep.in_bounds and rep.tails_reached
    assert rep.rate_minus > 0 and rep.rate_plus > 0
    assert math.isfinite(rep.pi_over_slope_max)
    assert rep.trace_residual == 0.0


def test_fitted_rates_match_linearisation(profile, shock, model):
    rep = validate_profile(profile)
    rm, rp = tail_rates_linear(shock, model)
    assert rep.rate_minus == pytest.approx(rm, rel=0.05)
    assert rep.rate_plus == pytest.approx(rp, rel=0.05)


def test_rate_scaling_with_strength(model):
    # pick v_plus so that delta halves
    sh1 = make_shock(1.0, 0.0, 1.2, model)
    from scipy.optimize import brentq
    vp2 = brentq(lambda vp: (1.0 - vp ** -model.gamma) - 0.5 * sh1.delta, 1.0 + 1e-9, 1.2)
    r1 = validate_profile(solve_profile(sh1, model))
    r2 = validate_profile(solve_profile(make_shock(1.0, 0.0, vp2, model), model))
    assert r2.rate_minus / r1.rate_minus == pytest.approx(0.5, rel=0.25)
    assert r2.rate_plus / r1.rate_plus == pytest.approx(0.5, rel=0.25)


def test_eval_profile_far_field_and_nodes(profile, shock):
    v, u1, p11, p2 = eval_profile(profile, np.array([-1e9, 1e9]))
    assert (v[0], u1[0], p11[0], p2[0]) == (shock.v_minus, shock.u1_minus, 0.0, 0.0)
    assert (v[1], u1[1], p11[1], p2[1]) == (shock.v_plus, shock.u1_plus, 0.0, 0.0)
    idx = np.arange(0, len(profile.xi), 37)
    v, u1, p11, p2 = eval_profile(profile, profile.xi[idx])
    np.testing.assert_allclose(v, profile.v_s[idx], rtol=0, atol=1e-15)
    np.testing.assert_allclose(u1, profile.u1_s[idx], rtol=0, atol=1e-15)
    np.testing.assert_allclose(p11, profile.pi11_s[idx], rtol=0, atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.floats(0.0, 1.0))
def test_eval_profile_monotone_between_nodes(profile, frac):
    n = len(profile.xi) - 1
    i = min(int(frac * n), n - 1)
    x = profile.xi[i] + (frac * n - i) * (profile.xi[i + 1] - profile.xi[i])
    v = float(profile.volume(x))
    assert profile.v_s[i] - 1e-15 <= v <= profile.v_s[i + 1] + 1e-15


def test_eval_profile_continuous_at_table_ends(profile):
    for x in (profile.xi[0], profile.xi[-1]):
        a = profile.volume(np.array([x - 1e-9, x, x + 1e-9]))
        assert np.ptp(a) < 1e-9


def test_self_convergence_order(shock, model):
    # ten probes on nodes shared by all three step sizes
    probes = np.arange(-18.0, 18.1, 4.0)
    sols = []
    for h in (0.4, 0.2, 0.1):
        n = int(round(20 / h))
        xi, v = profile_fixed_step(shock, model, h, n)
        sols.append(v[np.rint(probes / h).astype(int) + n])
    e1 = np.max(np.abs(sols[0] - sols[1]))
    e2 = np.max(np.abs(sols[1] - sols[2]))
    assert math.log2(e1 / e2) >= 4.0


def test_tau_continuity():
    base = GasModel(5 / 3, 1.0, 1.0, 0.0)
    sh = make_shock(1.0, 0.0, 1.2, base)
    ref = solve_profile(sh, base)
    x = np.linspace(-30, 30, 601)
    diffs = []
    for tau in (1e-1, 1e-2, 1e-3):
        m = base.with_tau(tau)
        diffs.append(np.max(np.abs(solve_profile(sh, m).volume(x) - ref.volume(x))))
    assert diffs[0] > diffs[1] > diffs[2]


def test_profile_file_roundtrip(tmp_path, profile):
    path = tmp_path / "profile.bin"
    write_profile(path, profile)
    cols, meta, data = read_profile(path)
    assert cols == ["xi1", "v", "u1", "pi11", "pi2"]
    np.testing.assert_array_equal(data[0], profile.xi)
    np.testing.assert_array_equal(data[1], profile.v_s)
    np.testing.assert_array_equal(data[4], profile.pi2_s)
    assert meta["sigma_star"] == profile.shock.sigma_star and meta["tau"] == profile.model.tau
    assert meta["n"] == len(profile.xi)
    header = path.read_bytes().split(b"\n", 2)
    assert header[0].decode().split() == ["xi1", "v", "u1", "pi11", "pi2"]
    assert b"gamma=" in header[1] and b"v_minus=" in header[1]
