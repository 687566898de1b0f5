"""Acceptance gate: one PASS/FAIL line per criterion, at the stated tolerances."""
import filecmp
import math
import time
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import brentq

from relaxshock.cli import main
from relaxshock.config import load_config
from relaxshock.diagnostics import poincare_check, poincare_grid, random_bandlimited
from relaxshock.experiments import EXIT_OK, run_relax_limit, run_stability, steady_residual_orders
from relaxshock.gas import GasModel, make_shock
from relaxshock.profile import (fd_derivative, profile_rhs, solve_profile, split_identity_residual,
                                validate_profile)

CONFIGS = Path(__file__).resolve().parent.parent / "configs"


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\ncriterion {n}: {'PASS' if ok else 'FAIL'} {detail}")
        return ok
    return emit


@pytest.fixture(scope="module")
def run4():
    return run_stability(load_config(CONFIGS / "stability_1d.cfg"))


def test_criterion_1_riemann_and_profile(report):
    t0 = time.perf_counter()
    model = GasModel(5 / 3, 1.0, 1.0, 0.01)
    shock = make_shock(1.0, 0.0, 1.2, model)
    rh = max(shock.rh_residuals(model))
    prof = solve_profile(shock, model, tol=1e-10)
    split = split_identity_residual(prof)
    elapsed = time.perf_counter() - t0
    ode = float(np.max(np.abs(fd_derivative(prof.xi, prof.v_s, width=9) - profile_rhs(prof.v_s, shock, model))))
    ok = rh < 1e-12 and ode < 1e-8 and split < 1e-8 and elapsed < 1.0
    assert report(1, ok, f"rh={rh:.2e} ode={ode:.2e} split={split:.2e} time={elapsed:.2f}s")


def test_criterion_2_profile_certificates(report):
    t0 = time.perf_counter()
    model = GasModel(5 / 3, 1.0, 1.0, 0.01)
    s1 = make_shock(1.0, 0.0, 1.2, model)
    vp2 = brentq(lambda vp: (1.0 - vp ** -model.gamma) - 0.5 * s1.delta, 1.0 + 1e-12, 1.2, xtol=1e-15)
    s2 = make_shock(1.0, 0.0, vp2, model)
    r1 = validate_profile(solve_profile(s1, model))
    r2 = validate_profile(solve_profile(s2, model))
    elapsed = time.perf_counter() - t0
    q_minus = r2.rate_minus / r1.rate_minus
    q_plus = r2.rate_plus / r1.rate_plus
    mono = r1.v_increasing and r1.u1_decreasing and r2.v_increasing and r2.u1_decreasing
    scale = abs(q_minus / 0.5 - 1) <= 0.25 and abs(q_plus / 0.5 - 1) <= 0.25
    ok = mono and scale and elapsed < 5.0
    assert report(2, ok, f"monotone={mono} rate ratios {q_minus:.3f} {q_plus:.3f} time={elapsed:.2f}s")


def test_criterion_3_steady_residual(report, profile):
    t0 = time.perf_counter()
    norms, orders = steady_residual_orders(profile, L=60.0, sizes=(512, 1024, 2048))
    elapsed = time.perf_counter() - t0
    ok = min(orders) >= 1.9 and elapsed < 120.0
    assert report(3, ok, f"norms={[f'{n:.3e}' for n in norms]} orders={[round(o, 3) for o in orders]} "
                         f"time={elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_4_stability_decay(report, run4):
    s = run4.summary
    ok = (s["eta_ratio"] < 0.2 and s["sup_v_ratio"] < 0.5 and s["sup_u_ratio"] < 0.5
          and s["xdot_ratio"] < 0.2 and s["xdot_supv_max_over_median"] < 50.0 and run4.runtime < 300.0)
    assert report(4, ok, f"eta={s['eta_ratio']:.3f} sup_v={s['sup_v_ratio']:.3f} sup_u={s['sup_u_ratio']:.3f} "
                         f"xdot={s['xdot_ratio']:.3f} xdot/sup_v max/median={s['xdot_supv_max_over_median']:.2f} "
                         f"time={run4.runtime:.0f}s")


@pytest.mark.slow
def test_criterion_5_transverse_decay(report):
    res = run_stability(load_config(CONFIGS / "stability_3d.cfg"))
    s = res.summary
    ok = s["G2_ratio"] <= 0.2 and res.max_trace_residual < 1e-10 and res.runtime < 900.0
    assert report(5, ok, f"G2(T)/G2(10)={s['G2_ratio']:.3e} trace={res.max_trace_residual:.2e} "
                         f"time={res.runtime:.0f}s")


@pytest.mark.slow
def test_criterion_6_relaxation_limit(report):
    res = run_relax_limit(load_config(CONFIGS / "relax_limit.cfg"))
    E, S, c = res.E, res.S, res.control
    dec = all(E[i] > E[i + 1] for i in range(len(E) - 1)) and all(S[i] > S[i + 1] for i in range(len(S) - 1))
    ok = dec and E[-1] < 0.25 * E[0] and c["E_change"] < c["min_gap"] and res.runtime < 600.0
    assert report(6, ok, f"E={[f'{e:.3e}' for e in E]} S={[f'{x:.3e}' for x in S]} "
                         f"control {c['E_change']:.2e} < {c['min_gap']:.2e} time={res.runtime:.0f}s")


def test_criterion_7_poincare(report):
    t0 = time.perf_counter()
    y1, _, _ = poincare_grid(512, 64, 64)
    f = np.broadcast_to(y1[:, None, None], (512, 64, 64))
    lhs, rhs, _ = poincare_check(f)
    eq = abs(lhs - 1 / 12) < 1e-4 and abs(rhs - 1 / 12) < 1e-4
    rng = np.random.default_rng(2024)
    holds = [poincare_check(random_bandlimited(rng, 128, 32, 32))[2] for _ in range(50)]
    elapsed = time.perf_counter() - t0
    ok = eq and all(holds) and elapsed < 120.0
    assert report(7, ok, f"lhs={lhs:.8f} rhs={rhs:.8f} random {sum(holds)}/50 time={elapsed:.1f}s")


@pytest.mark.slow
def test_criterion_8_conservation_and_determinism(report, run4, tmp_path):
    drift = run4.summary["mass_residual_max"]
    cfg = tmp_path / "short.cfg"
    cfg.write_text((CONFIGS / "stability_1d.cfg").read_text() + "N1 = 512\nT = 20\n")
    outs = []
    for k in range(2):
        out = tmp_path / f"run{k}"
        assert main(["stability", "--config", str(cfg), "--out", str(out)]) == EXIT_OK
        outs.append(out / "timeseries.csv")
    same = filecmp.cmp(outs[0], outs[1], shallow=False)
    ok = drift < 1e-6 and same and math.isfinite(drift)
    assert report(8, ok, f"mass drift={drift:.2e} byte-identical={same}")
