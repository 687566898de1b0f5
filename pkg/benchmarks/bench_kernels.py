"""Time the stencil kernels and a full macro-step on both backends.

    python benchmarks/bench_kernels.py [--shape 256 16 16] [--repeat 20]

Prints per-call wall time and the max difference between the backends.
"""
import argparse
import time

import numpy as np

from relaxshock.gas import GasModel, make_shock
from relaxshock.profile import solve_profile
from relaxshock.solver import BumpSpec, Grid, SlabSolver, init_perturbed_shock, profile_columns
from relaxshock.solver import kernels_numpy
from relaxshock.solver.backend import get_kernels


def _time(fn, repeat):
    fn()  # warm-up (JIT compile for numba)
    t0 = time.perf_counter()
    for _ in range(repeat):
        fn()
    return (time.perf_counter() - t0) / repeat


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--shape", type=int, nargs=3, default=(256, 16, 16))
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args(argv)
    n1, n2, n3 = args.shape

    model = GasModel(5 / 3, 1.0, 1.0, 0.01)
    prof = solve_profile(make_shock(1.0, 0.0, 1.1, model), model)
    grid = Grid(50.0, n1, n2, n3)
    f = init_perturbed_shock(prof, grid, BumpSpec("u2", 1e-3, 4.0, 0.0, 1, 3) if n2 > 1 else BumpSpec("v", 1e-3))
    q = f.q
    pv = q[0] ** (-model.gamma)
    dx = (grid.dx1, grid.dx2, grid.dx3)
    sigma = prof.shock.sigma

    nb = get_kernels("numba")
    if nb is kernels_numpy:
        print("numba unavailable; only the numpy backend can be timed")
        return 1
    print(f"grid {n1}x{n2}x{n3}, {args.repeat} repeats")
    print(f"{'kernel':<14}{'numba ms':>12}{'numpy ms':>12}{'speedup':>10}{'max diff':>12}")
    results = {}
    for name, mod in (("numba", nb), ("numpy", kernels_numpy)):
        out = np.empty_like(q)
        S = np.empty((7,) + grid.shape)
        qr = q.copy()
        t_rhs = _time(lambda: mod.nonstiff_rhs(q, pv, out, sigma, *dx, 0.01), args.repeat)
        t_str = _time(lambda: mod.strain_source(q, S, model.mu, model.lam, *dx), args.repeat)
        t_rel = _time(lambda: mod.relax(qr, S, model.tau, 1e-4), args.repeat)
        solver = SlabSolver(model, grid, sigma, sponge_target=profile_columns(prof, grid.xi1), backend=name)
        dt = solver.cfl_dt(f)
        t_step = _time(lambda: solver.step(f, dt), max(1, args.repeat // 4))
        results[name] = {"rhs": (t_rhs, out.copy()), "strain": (t_str, S.copy()),
                         "relax": (t_rel, qr.copy()), "step": (t_step, solver.step(f, dt).q)}
    for key in ("rhs", "strain", "relax", "step"):
        tn, an = results["numba"][key]
        tp, ap_ = results["numpy"][key]
        diff = float(np.max(np.abs(an - ap_)))
        print(f"{key:<14}{1e3 * tn:>12.3f}{1e3 * tp:>12.3f}{tp / tn:>10.1f}{diff:>12.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
