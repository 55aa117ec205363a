"""Batch command-line front end: `simulate`, `converge`, `check`.

Exit codes: 0 success, 1 failed verification check, 2 config/usage error,
3 solver failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from .grid import make_grid, sample
from .scheme import NewtonError, SchemeParams, dt_restriction_satisfied, run
from .verify import (
    ManufacturedSolution,
    convergence_study,
    lemma_suite,
    random_smooth_field,
    stability_suite,
)
from . import io as chio

EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chfd4",
        description="Fourth-order finite difference Cahn-Hilliard solver and verifier",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run the time loop from a config file")
    sim.add_argument("config", help="path to a key = value config file")
    sim.add_argument("--vtk", action="store_true", help="also write VTK snapshots")
    # every config knob is also overridable by flag
    for key in chio._FIELD_MAP:
        sim.add_argument(f"--{key}", dest=f"override_{key}", default=None)

    conv = sub.add_parser("converge", help="manufactured-solution convergence study")
    conv.add_argument("--resolutions", default="16,32,48,64",
                      help="comma-separated N values (default 16,32,48,64)")
    conv.add_argument("--eps", type=float, default=1.0)
    conv.add_argument("--T", type=float, default=0.16)
    conv.add_argument("--newton-tol", type=float, default=1e-11)
    conv.add_argument("--output", default="errors.csv")

    chk = sub.add_parser("check", help="run the verification suites")
    chk.add_argument("--suite", choices=["lemmas", "stability", "all"], default="all")
    chk.add_argument("--seed", type=int, default=0)
    chk.add_argument("--trials", type=int, default=100)
    chk.add_argument("--output", default="report.json")
    return parser


def _apply_overrides(cfg, args):
    for key, (attr, conv) in chio._FIELD_MAP.items():
        raw = getattr(args, f"override_{key}", None)
        if raw is not None:
            setattr(cfg, attr, conv(raw))
    chio.validate_config(cfg)
    return cfg


def _initial_field(cfg):
    grid = make_grid(cfg.N, cfg.L)
    if cfg.init_kind == "manufactured":
        ms = ManufacturedSolution(L=cfg.L)
        return sample(grid, lambda x, y, z: ms.value(x, y, z, 0.0))
    if cfg.init_kind == "random":
        rng = np.random.default_rng(cfg.init_seed)
        return random_smooth_field(grid, rng, amplitude=cfg.init_amplitude,
                                   mean_value=cfg.init_mean)
    f = chio.read_snapshot(cfg.init_path)
    if f.grid != grid:
        raise chio.ConfigError(
            f"snapshot grid (N={f.grid.N}, L={f.grid.L}) does not match config")
    return f


def cmd_simulate(args) -> int:
    try:
        cfg = chio.parse_config(args.config)
        cfg = _apply_overrides(cfg, args)
        phi0 = _initial_field(cfg)
    except (chio.ConfigError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    ms = ManufacturedSolution(L=cfg.L)
    forcing = None
    if cfg.forcing == "manufactured":
        forcing = lambda x, y, z, t: ms.forcing(x, y, z, t, cfg.eps)
    p = SchemeParams(eps=cfg.eps, dt=cfg.dt, A=cfg.A, T=cfg.T,
                     newton_tol=cfg.newton_tol, newton_max=cfg.newton_max,
                     forcing=forcing)
    if cfg.A < 1.0 / 16.0:
        print(f"warning: A = {cfg.A} < 1/16; modified-energy decay is not guaranteed",
              file=sys.stderr)
    if not dt_restriction_satisfied(p):
        print("warning: dt exceeds the analysis-level restriction "
              "eps / (2 sqrt(2) sqrt(A)); run proceeds", file=sys.stderr)

    outdir = Path(cfg.output_dir)
    try:
        outdir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    rows = []
    failures = []

    def observer(state, report):
        if cfg.energy_every > 0 and state.step % cfg.energy_every == 0:
            rows.append((state.step, state.time, report.mass, report.E,
                         report.modE, report.newton_iters, report.residual))
        if cfg.snapshot_every > 0 and state.step % cfg.snapshot_every == 0:
            snap = outdir / f"phi_{state.step:06d}.chf4"
            try:
                chio.write_snapshot(snap, state.phi_n)
                if args.vtk:
                    chio.write_vtk(snap.with_suffix(".vtk"), state.phi_n)
            except OSError as exc:
                failures.append(str(exc))

    try:
        final, reports = run(phi0, p, observer)
    except NewtonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER

    try:
        chio.write_energy_csv(outdir / "energy.csv", rows)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    if failures:
        print("error: " + "; ".join(failures), file=sys.stderr)
        return EXIT_IO

    if reports:
        last = reports[-1]
        print(f"final step {final.step} t={final.time:.6g}  mass={last.mass:.12e}  "
              f"E_h={last.E:.12e}  modified_E={last.modE:.12e}  "
              f"newton_iters={last.newton_iters}  residual={last.residual:.3e}")
    else:
        print("no steps taken (T/dt rounds to 0); initial state unchanged")
    return 0


def cmd_converge(args) -> int:
    try:
        resolutions = [int(s) for s in args.resolutions.split(",") if s.strip()]
    except ValueError as exc:
        print(f"error: bad --resolutions: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    L = 3.2
    for N in resolutions:
        dt = (L / N) ** 2
        steps = args.T / dt
        if abs(steps - round(steps)) > 1e-9:
            print(f"error: T/dt = {steps} is not an integer for N = {N}", file=sys.stderr)
            return EXIT_CONFIG
    try:
        table = convergence_study(resolutions, eps=args.eps, T=args.T,
                                  newton_tol=args.newton_tol)
    except NewtonError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    try:
        chio.write_errors_csv(args.output, table)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for r in table.rows:
        print(f"N={r.N:4d}  h={r.h:.6g}  dt={r.dt:.6g}  steps={r.steps:4d}  "
              f"l2={r.l2_error:.6e}  linf={r.linf_error:.6e}")
    if table.l2_slope is None:
        print("slope: n/a (need at least two resolutions)")
    else:
        print(f"l2 slope:   {table.l2_slope:.4f}")
        print(f"linf slope: {table.linf_slope:.4f}")
    return 0


def cmd_check(args) -> int:
    checks = []
    if args.suite in ("lemmas", "all"):
        checks.extend(lemma_suite(trials=args.trials, seed=args.seed))
    if args.suite in ("stability", "all"):
        checks.extend(stability_suite(seed=args.seed)["checks"])
    try:
        chio.write_report_json(args.output, checks)
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    n_fail = sum(not c.passed for c in checks)
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        print(f"[{status}] N={c.N:3d} margin={c.margin:+.3e}  {c.name}")
    print(f"{len(checks) - n_fail}/{len(checks)} checks passed")
    return 0 if n_fail == 0 else EXIT_CHECK_FAILED


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "simulate":
        return cmd_simulate(args)
    if args.command == "converge":
        return cmd_converge(args)
    return cmd_check(args)


if __name__ == "__main__":
    sys.exit(main())
