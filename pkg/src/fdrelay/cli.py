"""Command-line front end.

Subcommands: capacity, benchmarks, distribution, sweep, validate.
Exit codes: 0 success, 1 solver non-convergence or failed validation rows,
2 configuration errors.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from .config import ConfigError, load_config
from .linkbudget import rate_to_bps
from .mcoracle import McConfig
from .relay_opt import SolverError
from .report import (
    point_record,
    render_distribution_figure,
    render_sweep_figure,
    write_distribution_csv,
    write_json,
    write_sweep_csv,
)
from .sweeps import evaluate_point, sweep_rows
from .validation import run_validation

EXIT_OK = 0
EXIT_SOLVER = 1
EXIT_CONFIG = 2


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--config", required=True, help="scenario config file (TOML or JSON)")
    p.add_argument("--out", default=None, help="output file path")
    p.add_argument("--format", choices=("csv", "json"), default=None, help="output format")
    p.add_argument("--seed", type=int, default=None, help="seed for Monte Carlo checks")
    p.add_argument(
        "--no-figure",
        action="store_true",
        help="skip rendering the matplotlib figure next to the delimited output",
    )


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fdrelay",
        description="Capacity of the Gaussian two-hop full-duplex relay channel "
        "with residual self-interference.",
    )
    sub = ap.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("capacity", "solve one scenario and report capacity, policy and benchmarks"),
        ("benchmarks", "report the four benchmark rates for one scenario"),
        ("distribution", "emit the optimal relay input distribution"),
        ("sweep", "sweep a scenario variable and emit per-point rates"),
        ("validate", "run the Monte Carlo oracle suite against the quadrature paths"),
    ):
        _add_common(sub.add_parser(name, help=doc))
    return ap


def _figure_path(out: Path) -> Path:
    return out.with_suffix(".png")


def cmd_capacity(args, run) -> int:
    rep = evaluate_point(run.scenario, run.solver)
    record = point_record(rep)
    res = rep.result
    bw = run.scenario.bandwidth
    print(f"regime            : {res.regime}")
    print(f"capacity          : {res.capacity:.6f} bits/symbol "
          f"({rate_to_bps(res.capacity, bw) / 1e6:.4f} Mbps)")
    xth = f"{res.x_th:.6f}" if math.isfinite(res.x_th) else "inf"
    print(f"x_th              : {xth}")
    print(f"mi SR / RD        : {res.mi_sr:.6f} / {res.mi_rd:.6f} bits/symbol")
    print(f"source transmits  : {res.p_transmit:.4f} of the time")
    if rep.lower_bound is not None:
        print(f"BG lower bound    : {rep.lower_bound.rate:.6f} bits/symbol "
              f"(q={rep.lower_bound.q:.4f}, p_R={rep.lower_bound.p_r_used:.4g})")
    b = rep.benchmarks
    print(f"benchmarks        : ideal FD {b.c_fd_ideal:.6f} | conv FD {b.r_fd_conv:.6f} | "
          f"optimal HD {b.c_hd:.6f} | conv HD {b.r_hd_conv:.6f}")
    if args.out:
        out = Path(args.out)
        write_json(record, out)
        print(f"wrote {out}")
    if not res.converged:
        print("warning: solver did not fully converge", file=sys.stderr)
        return EXIT_SOLVER
    return EXIT_OK


def cmd_benchmarks(args, run) -> int:
    rep = evaluate_point(run.scenario, run.solver, with_lower_bound=False)
    b = rep.benchmarks
    bw = run.scenario.bandwidth
    rows = [
        ("c_fd", rep.result.capacity),
        ("c_fd_ideal", b.c_fd_ideal),
        ("r_fd_conv", b.r_fd_conv),
        ("c_hd", b.c_hd),
        ("r_hd_conv", b.r_hd_conv),
    ]
    print(f"{'scheme':<12} {'bits/symbol':>14} {'Mbps':>10}")
    for name, v in rows:
        print(f"{name:<12} {v:>14.6f} {rate_to_bps(v, bw) / 1e6:>10.4f}")
    print(f"t_opt={b.t_opt:.6f}  p_r_opt_conv={b.p_r_opt_conv:.6g}")
    if args.out:
        write_json(point_record(rep), Path(args.out))
        print(f"wrote {args.out}")
    return EXIT_OK if rep.result.converged else EXIT_SOLVER


def cmd_distribution(args, run) -> int:
    rep = evaluate_point(run.scenario, run.solver, with_lower_bound=False)
    out = Path(args.out) if args.out else Path("distribution.csv")
    write_distribution_csv(rep.result, out)
    print(f"wrote {out}")
    if not args.no_figure:
        fig = _figure_path(out)
        render_distribution_figure(rep.result, fig)
        print(f"wrote {fig}")
    return EXIT_OK if rep.result.converged else EXIT_SOLVER


def cmd_sweep(args, run) -> int:
    if run.sweep is None:
        raise ConfigError("config is missing required block 'sweep'")
    rows, failed = sweep_rows(run.scenario, run.sweep, run.solver)
    out = Path(args.out) if args.out else Path("sweep.csv")
    write_sweep_csv(rows, out)
    print(f"wrote {out} ({len(rows)} rows, {failed} failed)")
    if not args.no_figure:
        fig = _figure_path(out)
        render_sweep_figure(rows, run.sweep.variable, fig)
        print(f"wrote {fig}")
    return EXIT_SOLVER if failed else EXIT_OK


def cmd_validate(args, run) -> int:
    from .linkbudget import normalize_scenario

    mc = McConfig(seed=args.seed) if args.seed is not None else McConfig()
    rows = run_validation(normalize_scenario(run.scenario), mc)
    print(f"{'check':<38} {'reference':>12} {'monte carlo':>12} {'stderr':>10} "
          f"{'z':>6} {'ok':>4}")
    n_fail = 0
    for r in rows:
        ok = "pass" if r.passed else "FAIL"
        n_fail += 0 if r.passed else 1
        print(f"{r.name:<38} {r.reference:>12.6f} {r.mc_value:>12.6f} "
              f"{r.stderr:>10.2e} {r.n_sigma:>6.2f} {ok:>4}")
    print(f"{len(rows) - n_fail}/{len(rows)} checks passed")
    return EXIT_OK if n_fail == 0 else EXIT_SOLVER


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = load_config(args.config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    handler = {
        "capacity": cmd_capacity,
        "benchmarks": cmd_benchmarks,
        "distribution": cmd_distribution,
        "sweep": cmd_sweep,
        "validate": cmd_validate,
    }[args.command]
    try:
        return handler(args, run)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except SolverError as e:
        print(f"solver error: {e}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
