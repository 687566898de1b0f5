"""Experiment drivers behind the command line: profile, stability, relaxation
limit and the invariant suite."""
from __future__ import annotations

import logging
import math
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .config import RunConfig
from .diagnostics import entropy_report, poincare_check, poincare_grid, random_bandlimited
from .errors import BlowUpError
from .gas import GasModel, make_shock
from .profile import (ProfileTable, profile_width, solve_profile, split_identity_residual,
                      validate_profile, write_profile)
from .shift import advance_shift, make_shift_state, shift_rate, weight, weight_slope
from .solver import BumpSpec, FieldState, Grid, SlabSolver, init_perturbed_shock, profile_columns
from .solver.snapshot import write_snapshot

log = logging.getLogger(__name__)

TIMESERIES_COLUMNS = ("t", "eta_total", "Gs", "G2", "G3", "D", "sup_v", "sup_u", "sup_pi",
                      "X", "Xdot", "mass_residual")

EXIT_OK, EXIT_CONFIG, EXIT_BLOWUP, EXIT_VALIDATION = 0, 2, 3, 4


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_keyvalue(path, items):
    with open(path, "w", encoding="utf-8") as fh:
        for k, v in items:
            fh.write(f"{k}={fmt(v)}\n")


def write_csv(path, columns, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(columns) + "\n")
        for row in rows:
            fh.write(",".join(fmt(row[c]) for c in columns) + "\n")


def build_grid(cfg: RunConfig) -> Grid:
    return Grid(cfg.L, cfg.N1, cfg.N2, cfg.N3)


def build_profile(cfg: RunConfig, model: GasModel | None = None) -> ProfileTable:
    model = cfg.model if model is None else model
    shock = make_shock(cfg.v_minus, cfg.u1_minus, cfg.v_plus, model)
    return solve_profile(shock, model, tol=cfg.profile_tol, tail_eps=cfg.tail_eps)


def bump_from_config(cfg: RunConfig, shock) -> BumpSpec:
    return BumpSpec(cfg.bump_component, cfg.bump_amplitude * shock.dv, cfg.bump_width,
                    cfg.bump_center, cfg.bump_mode, cfg.bump_axis)


def _check_domain_length(cfg, profile):
    w = profile_width(profile)
    if cfg.L <= 20.0 * w:
        log.warning("L=%g is not above 20 profile widths (width %.3g)", cfg.L, w)


# ---- profile ---------------------------------------------------------------------

def cmd_profile(cfg: RunConfig, out_dir) -> int:
    os.makedirs(out_dir, exist_ok=True)
    profile = build_profile(cfg)
    report = validate_profile(profile)
    write_profile(os.path.join(out_dir, "profile.bin"), profile)
    items = [("command", "profile"), ("ok", report.ok), ("nodes", len(profile.xi)),
             ("xi_min", profile.xi[0]), ("xi_max", profile.xi[-1]),
             ("width", profile_width(profile)), ("split_residual", split_identity_residual(profile))]
    items += list(report.as_dict().items())
    write_keyvalue(os.path.join(out_dir, "report.txt"), items)
    return EXIT_OK if report.ok else EXIT_VALIDATION


# ---- stability -------------------------------------------------------------------

@dataclass
class StabilityResult:
    rows: list
    fields: FieldState
    shift: object
    profile: ProfileTable
    max_trace_residual: float
    initial_norms: dict
    steps: int
    runtime: float
    summary: dict = field(default_factory=dict)


def _row(fields, profile, shift, model, mass_res):
    r = entropy_report(fields, profile, shift, model)
    row = r.as_dict()
    del row["Xdot_abs"]
    row.update(X=shift.X, Xdot=shift.Xdot, mass_residual=mass_res)
    return row


def run_stability(cfg: RunConfig, out_dir=None, sponge: bool = True, backend=None) -> StabilityResult:
    """Evolve the perturbed profile to ``T_final`` with shift tracking.

    Time-series rows land exactly on multiples of ``output_dt``. The shift
    rate is evaluated once per macro-step on the state at the start of the
    step and used for the forward Euler update of ``X``.
    """
    t_start = time.perf_counter()
    model = cfg.model
    profile = build_profile(cfg)
    shock = profile.shock
    _check_domain_length(cfg, profile)
    grid = build_grid(cfg)
    fields = init_perturbed_shock(profile, grid, bump_from_config(cfg, shock))
    target = profile_columns(profile, grid.xi1) if sponge else None
    solver = SlabSolver(model, grid, shock.sigma, sponge_target=target, cfl=cfg.cfl, backend=backend)
    shift = make_shift_state(profile, cfg.nu or None)

    base = profile_columns(profile, grid.xi1)[:, :, None, None]
    pert = fields.q - base
    initial_norms = {"sup_v0": float(np.max(np.abs(pert[0]))),
                     "sup_u0": float(np.max(np.sqrt(np.sum(pert[1:4] ** 2, axis=0)))),
                     "l2_v0": math.sqrt(grid.integrate(pert[0] ** 2))}

    m0 = solver.interior_mass(fields)

    def mass_res():
        return (solver.interior_mass(fields) - m0 - solver.boundary_inflow) / m0

    xdot = shift_rate(fields, shift)
    shift.Xdot = xdot
    rows = [_row(fields, profile, shift, model, mass_res())]
    max_trace = fields.trace_residual()
    k_out, k_snap, steps = 1, 1, 0
    n_out = int(round(cfg.T_final / cfg.output_dt))
    while True:
        t_next = min(k_out * cfg.output_dt, cfg.T_final)
        if cfg.snapshot_dt > 0:
            t_next = min(t_next, k_snap * cfg.snapshot_dt)
        dt = solver.cfl_dt(fields)
        last = fields.t + dt >= t_next - 1e-12 * max(1.0, t_next)
        if last:
            dt = t_next - fields.t
        fields = solver.step(fields, dt)
        advance_shift(shift, xdot, dt)
        steps += 1
        if last:
            fields.t = t_next
            shift.t = t_next
        xdot = shift_rate(fields, shift)
        if last and cfg.snapshot_dt > 0 and abs(t_next - k_snap * cfg.snapshot_dt) <= 1e-12 * max(1.0, t_next):
            if out_dir is not None:
                write_snapshot(os.path.join(out_dir, f"run_{t_next:g}.bin"), fields, shift.X, xdot)
            k_snap += 1
        if last and (abs(t_next - k_out * cfg.output_dt) <= 1e-12 * max(1.0, t_next) or t_next == cfg.T_final):
            shift.Xdot = xdot
            rows.append(_row(fields, profile, shift, model, mass_res()))
            max_trace = max(max_trace, fields.trace_residual())
            k_out += 1
        if fields.t >= cfg.T_final or k_out > n_out + 1:
            break
    shift.Xdot = xdot
    res = StabilityResult(rows, fields, shift, profile, max_trace, initial_norms, steps,
                          time.perf_counter() - t_start)
    res.summary = stability_summary(res)
    return res


def _row_at(rows, t):
    return min(rows, key=lambda r: abs(r["t"] - t))


def stability_summary(res: StabilityResult, t_ref: float = 10.0) -> dict:
    rows = res.rows
    first, last = _row_at(rows, t_ref), rows[-1]
    mid = _row_at(rows, 0.5 * last["t"])

    def ratio(a, b):
        return a / b if b > 0 else (0.0 if a == 0 else math.inf)

    xdots = np.array([abs(r["Xdot"]) for r in rows])
    supv = np.array([r["sup_v"] for r in rows])
    mask = supv > 0
    xr = xdots[mask] / supv[mask]
    med = float(np.median(xr)) if xr.size else 0.0
    return {
        "eta_ratio": ratio(last["eta_total"], first["eta_total"]),
        "sup_v_ratio": ratio(last["sup_v"], first["sup_v"]),
        "sup_u_ratio": ratio(last["sup_u"], first["sup_u"]),
        "sup_v_half_ratio": ratio(last["sup_v"], mid["sup_v"]),
        "sup_u_half_ratio": ratio(last["sup_u"], mid["sup_u"]),
        "xdot_ratio": ratio(abs(last["Xdot"]), max(res.shift.xdot_max, float(xdots.max()))),
        "xdot_supv_max_over_median": ratio(float(xr.max()) if xr.size else 0.0, med),
        "G2_ratio": ratio(last["G2"], first["G2"]),
        "mass_residual_max": float(max(abs(r["mass_residual"]) for r in rows)),
        "max_trace_residual": res.max_trace_residual,
        "X_final": res.shift.X,
        "X_bound_ok": abs(res.shift.X) <= res.shift.xdot_max * res.fields.t * (1 + 1e-12) + 1e-300,
        "steps": res.steps,
        "runtime_s": res.runtime,
    }


def cmd_stability(cfg: RunConfig, out_dir) -> int:
    os.makedirs(out_dir, exist_ok=True)
    try:
        res = run_stability(cfg, out_dir)
    except BlowUpError as exc:
        write_keyvalue(os.path.join(out_dir, "report.txt"),
                       [("command", "stability"), ("error", "blow-up"), ("time", exc.time),
                        ("cell", exc.cell)])
        raise
    write_csv(os.path.join(out_dir, "timeseries.csv"), TIMESERIES_COLUMNS, res.rows)
    items = [("command", "stability")] + list(res.initial_norms.items())
    items += [(k, v) for k, v in res.summary.items() if k != "runtime_s"]
    write_keyvalue(os.path.join(out_dir, "report.txt"), items)
    return EXIT_OK


# ---- relaxation limit -------------------------------------------------------------

@dataclass
class RelaxLimitResult:
    taus: list
    E: list
    S: list
    control: dict
    runtime: float


def _newtonian_initial(cfg: RunConfig, grid: Grid, solver_kw):
    """Newtonian profile plus bump with stresses set to the discrete closure."""
    model0 = cfg.model.with_tau(0.0)
    profile0 = build_profile(cfg, model0)
    fields = init_perturbed_shock(profile0, grid, bump_from_config(cfg, profile0.shock))
    probe = SlabSolver(model0, grid, profile0.shock.sigma, **solver_kw)
    fields.q[4:11] = probe.strain(fields.q)
    return profile0, fields


def _run_to(solver, fields, T, newtonian):
    while fields.t < T:
        dt = solver.newtonian_dt(fields) if newtonian else solver.cfl_dt(fields)
        if fields.t + dt >= T - 1e-12 * T:
            dt = T - fields.t
            fields = solver.newtonian_step(fields, dt) if newtonian else solver.step(fields, dt)
            fields.t = T
            break
        fields = solver.newtonian_step(fields, dt) if newtonian else solver.step(fields, dt)
    return fields


def relax_limit_errors(cfg: RunConfig, taus, N1=None, backend=None):
    """``(E, S)`` lists for each ``tau`` at ``T_final`` on ``N1`` cells."""
    grid = Grid(cfg.L, cfg.N1 if N1 is None else N1, cfg.N2, cfg.N3)
    profile0, init = _newtonian_initial(cfg, grid, {"backend": backend})
    target = profile_columns(profile0, grid.xi1)
    sigma = profile0.shock.sigma
    newton = SlabSolver(cfg.model.with_tau(0.0), grid, sigma, sponge_target=target, cfl=cfg.cfl, backend=backend)
    ref = _run_to(newton, init.copy(), cfg.T_final, True)
    E, S = [], []
    for tau in taus:
        solver = SlabSolver(cfg.model.with_tau(tau), grid, sigma, sponge_target=target, cfl=cfg.cfl,
                            backend=backend)
        out = _run_to(solver, init.copy(), cfg.T_final, False)
        d = out.q[0:4] - ref.q[0:4]
        E.append(math.sqrt(grid.integrate(np.sum(d * d, axis=0))))
        clo = solver.strain(out.q)
        dp = out.q[4:10] - clo[0:6]
        frob = dp[0] ** 2 + dp[1] ** 2 + dp[2] ** 2 + 2.0 * (dp[3] ** 2 + dp[4] ** 2 + dp[5] ** 2)
        S.append(math.sqrt(grid.integrate(frob)))
    return E, S


def run_relax_limit(cfg: RunConfig, taus=None, control: bool = True, backend=None) -> RelaxLimitResult:
    """Tau sweep against the Newtonian solution, plus a refined-grid control at the smallest tau."""
    t0 = time.perf_counter()
    taus = list(cfg.tau_list if taus is None else taus)
    E, S = relax_limit_errors(cfg, taus, backend=backend)
    ctrl = {}
    if control:
        Ef, _ = relax_limit_errors(cfg, taus[-1:], N1=2 * cfg.N1, backend=backend)
        gaps = [E[i] - E[i + 1] for i in range(len(E) - 1)]
        ctrl = {"control_tau": taus[-1], "control_N1": 2 * cfg.N1, "E_refined": Ef[0],
                "E_change": abs(Ef[0] - E[-1]), "min_gap": min(gaps) if gaps else math.inf}
    return RelaxLimitResult(taus, E, S, ctrl, time.perf_counter() - t0)


def cmd_relax_limit(cfg: RunConfig, out_dir, taus=None) -> int:
    os.makedirs(out_dir, exist_ok=True)
    res = run_relax_limit(cfg, taus, control=len(taus or cfg.tau_list) > 1)
    rows = [{"tau": t, "E": e, "S": s} for t, e, s in zip(res.taus, res.E, res.S)]
    write_csv(os.path.join(out_dir, "relax_limit.csv"), ("tau", "E", "S"), rows)
    items = [("command", "relax-limit")] + [(f"E[{fmt(t)}]", e) for t, e in zip(res.taus, res.E)]
    items += [(f"S[{fmt(t)}]", s) for t, s in zip(res.taus, res.S)]
    items += list(res.control.items())
    write_keyvalue(os.path.join(out_dir, "report.txt"), items)
    return EXIT_OK


# ---- steady residual and the invariant suite ---------------------------------------

def steady_residual_norm(profile: ProfileTable, L: float, N1: int, margin: float, backend=None) -> float:
    """Discrete L2 norm of ``dq/dt`` at the exact profile over ``|xi1| <= L - margin``."""
    grid = Grid(L, N1)
    fields = init_perturbed_shock(profile, grid, None)
    solver = SlabSolver(profile.model, grid, profile.shock.sigma, backend=backend)
    r = solver.time_derivative(fields)[:, :, 0, 0]
    mask = np.abs(grid.xi1) <= L - margin
    return math.sqrt(float(np.sum(r[:, mask] ** 2)) * grid.dx1)


def steady_residual_orders(profile, L=60.0, sizes=(512, 1024, 2048), backend=None):
    margin = 10.0 * 2.0 * L / sizes[0]
    norms = [steady_residual_norm(profile, L, n, margin, backend) for n in sizes]
    orders = [math.log2(norms[i] / norms[i + 1]) for i in range(len(norms) - 1)]
    return norms, orders


def frame_consistency(profile: ProfileTable, steps: int = 10, backend=None) -> float:
    """Max difference between a 1-D run and a transverse-constant 3-D run."""
    g1, g3 = Grid(40.0, 128), Grid(40.0, 128, 4, 4)
    bump = BumpSpec("v", 0.01 * profile.shock.dv, 2.0, 0.0)
    f1 = init_perturbed_shock(profile, g1, bump)
    f3 = init_perturbed_shock(profile, g3, bump)
    s1 = SlabSolver(profile.model, g1, profile.shock.sigma, profile_columns(profile, g1.xi1), backend=backend)
    s3 = SlabSolver(profile.model, g3, profile.shock.sigma, profile_columns(profile, g3.xi1), backend=backend)
    dt = s1.cfl_dt(f1)
    worst = 0.0
    for _ in range(steps):
        f1, f3 = s1.step(f1, dt), s3.step(f3, dt)
        worst = max(worst, float(np.max(np.abs(f3.q - f1.q))))
    return worst


def traceless_run(profile: ProfileTable, steps: int = 40, backend=None) -> float:
    grid = Grid(20.0, 64, 8, 8)
    f = init_perturbed_shock(profile, grid, BumpSpec("u2", 0.01, 2.0, 0.0, 1, 3))
    f.q[3] += BumpSpec("u3", 0.01, 2.0, 1.0, 1, 2).shape(grid)
    s = SlabSolver(profile.model, grid, profile.shock.sigma, profile_columns(profile, grid.xi1), backend=backend)
    worst = f.trace_residual()
    for _ in range(steps):
        f = s.step(f, s.cfl_dt(f))
        worst = max(worst, f.trace_residual())
    return worst


def run_validate(cfg: RunConfig, profile: ProfileTable | None = None, backend=None):
    """Return a list of ``(name, ok, value)`` invariant checks."""
    results = []
    model = cfg.model
    shock = make_shock(cfg.v_minus, cfg.u1_minus, cfg.v_plus, model)
    rh = max(shock.rh_residuals(model))
    results.append(("rh_residual", rh < 1e-12, rh))
    if profile is None:
        profile = solve_profile(shock, model, cfg.profile_tol, cfg.tail_eps)
    rep = validate_profile(profile)
    results.append(("profile_certificate", rep.ok, rep.ode_residual))
    split = split_identity_residual(profile)
    results.append(("split_identity", split < 1e-8, split))

    shift = make_shift_state(profile, cfg.nu or None)
    xs = np.linspace(profile.xi[0] - 10.0, profile.xi[-1] + 10.0, 4001)
    a = weight(xs, shift)
    da = weight_slope(xs, shift)
    wb = (a.min() >= 1.0 - 1e-14) and (a.max() <= 1.0 + shift.nu + 1e-14) and bool(np.all(np.diff(a) >= -1e-15)) \
        and bool(np.all(da >= 0.0))
    results.append(("weight_bounds", wb, float(a.max() - 1.0)))

    rng = np.random.default_rng(cfg.seed)
    y1, _, _ = poincare_grid(128, 1, 1)
    lhs, rhs, _ = poincare_check(y1)
    eq_err = max(abs(lhs - 1.0 / 12.0), abs(rhs - 1.0 / 12.0))
    results.append(("poincare_equality", eq_err < 1e-4, eq_err))
    ok = True
    worst_gap = math.inf
    for _ in range(10):
        lhs, rhs, holds = poincare_check(random_bandlimited(rng, 128, 16, 16))
        ok &= holds
        worst_gap = min(worst_gap, rhs - lhs)
    results.append(("poincare_random", ok, worst_gap))

    tr = traceless_run(profile, backend=backend)
    results.append(("traceless", tr < 1e-10, tr))
    fc = frame_consistency(profile, backend=backend)
    results.append(("frame_consistency", fc < 1e-12, fc))
    _, orders = steady_residual_orders(profile, L=60.0, sizes=(256, 512, 1024), backend=backend)
    results.append(("steady_order", min(orders) >= 1.9, min(orders)))
    return results


def cmd_validate(cfg: RunConfig, out_dir=None) -> int:
    results = run_validate(cfg)
    failed = [name for name, ok, _ in results if not ok]
    items = [("command", "validate")]
    for name, ok, value in results:
        items += [(f"{name}.pass", ok), (f"{name}.value", value)]
    items += [("failed", ",".join(failed) or "none")]
    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        write_keyvalue(os.path.join(out_dir, "report.txt"), items)
    for name, ok, value in results:
        print(f"{'PASS' if ok else 'FAIL'} {name} {fmt(value)}")
    return EXIT_OK if not failed else EXIT_VALIDATION
