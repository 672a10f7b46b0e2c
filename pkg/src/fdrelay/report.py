"""Delimited output and figure rendering for the CLI report paths.

CSV emission is locale-independent (repr-style floats, '.' decimal point,
fixed column order). Figures are rendered with matplotlib next to the
delimited output; matplotlib is imported lazily so library users who never
render pay nothing for it.
"""

from __future__ import annotations

import csv
import dataclasses
import json
import math
from pathlib import Path

from .distributions import DiscreteDistribution, GaussianInput
from .linkbudget import rate_to_bps
from .relay_opt import CapacityResult
from .sweeps import SWEEP_COLUMNS, PointReport


def _fmt(v) -> str:
    if isinstance(v, float):
        if math.isinf(v):
            return "inf"
        return repr(v)
    return str(v)


def write_sweep_csv(rows: list[dict], path: str | Path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow([_fmt(row.get(c, "")) for c in SWEEP_COLUMNS])


def write_distribution_csv(result: CapacityResult, path: str | Path) -> None:
    """(x_r, prob, kind) rows; symmetric pairs emitted explicitly.

    In the Gaussian regime a sentinel row carries the input variance in the
    x_r column with kind="gaussian". Probabilities always sum to one.
    """
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x_r", "prob", "kind"])
        if isinstance(result.dist, GaussianInput):
            w.writerow([_fmt(result.dist.variance), _fmt(1.0), "gaussian"])
        elif isinstance(result.dist, DiscreteDistribution):
            for x, p in result.dist.signed_points():
                w.writerow([_fmt(x), _fmt(p), "mass"])
        else:
            raise TypeError(f"no CSV form for {type(result.dist)!r}")
        w.writerow([_fmt(result.x_th if math.isfinite(result.x_th) else math.inf), "", "x_th"])


def point_record(rep: PointReport) -> dict:
    """JSON-ready single-scenario report."""
    res = rep.result
    bw = rep.scenario.bandwidth
    dist: dict
    if isinstance(res.dist, GaussianInput):
        dist = {"kind": "gaussian", "variance": res.dist.variance}
    elif isinstance(res.dist, DiscreteDistribution):
        dist = {
            "kind": "discrete",
            "points": [{"x_r": x, "prob": p} for x, p in res.dist.signed_points()],
        }
    else:
        dist = {"kind": type(res.dist).__name__}
    record = {
        "scenario": dataclasses.asdict(rep.scenario),
        "channel": dataclasses.asdict(rep.channel),
        "capacity_bits_per_symbol": res.capacity,
        "capacity_mbps": rate_to_bps(res.capacity, bw) / 1e6,
        "regime": res.regime,
        "x_th": res.x_th if math.isfinite(res.x_th) else "inf",
        "mi_source_relay": res.mi_sr,
        "mi_relay_destination": res.mi_rd,
        "p_transmit": res.p_transmit,
        "distribution": dist,
        "benchmarks": {
            "c_fd_ideal": rep.benchmarks.c_fd_ideal,
            "r_fd_conv": rep.benchmarks.r_fd_conv,
            "c_hd": rep.benchmarks.c_hd,
            "r_hd_conv": rep.benchmarks.r_hd_conv,
            "t_opt": rep.benchmarks.t_opt,
            "p_r_opt_conv": rep.benchmarks.p_r_opt_conv,
            "c_fd_ideal_mbps": rate_to_bps(rep.benchmarks.c_fd_ideal, bw) / 1e6,
            "c_hd_mbps": rate_to_bps(rep.benchmarks.c_hd, bw) / 1e6,
        },
        "solver": {
            "iterations": res.iterations,
            "converged": res.converged,
            "kkt": None
            if res.kkt is None
            else {
                "xi": res.kkt.xi,
                "lambda1": res.kkt.lambda1,
                "lambda2": res.kkt.lambda2,
                "nu": res.kkt.nu,
                "stationarity_residual": res.kkt.stationarity_residual,
                "stationarity_on_support": res.kkt.stationarity_on_support,
                "complementary_slackness": res.kkt.complementary_slackness,
            },
        },
    }
    if rep.lower_bound is not None:
        record["lower_bound"] = {
            "rate": rep.lower_bound.rate,
            "rate_mbps": rate_to_bps(rep.lower_bound.rate, bw) / 1e6,
            "q": rep.lower_bound.q,
            "p_r_used": rep.lower_bound.p_r_used,
            "x_th": rep.lower_bound.x_th,
        }
    return record


def write_json(obj, path: str | Path) -> None:
    Path(path).write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def render_sweep_figure(rows: list[dict], spec_variable: str, path: str | Path) -> None:
    """Rate curves (Mbps) against the sweep variable."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    series = [
        ("c_fd_mbps", "capacity (FD, residual SI)", "-"),
        ("r_fd_b_mbps", "Bernoulli-Gaussian bound", "--"),
        ("c_fd_ideal_mbps", "ideal FD capacity", ":"),
        ("r_fd_conv_mbps", "conventional FD", "-."),
        ("c_hd_mbps", "optimal HD capacity", "-"),
        ("r_hd_conv_mbps", "conventional HD", "--"),
    ]
    fig, ax = plt.subplots(figsize=(7.0, 4.5))
    xs = [row["sweep_value"] for row in rows]
    for key, label, style in series:
        ys = [row[key] if row[key] != "" else math.nan for row in rows]
        if all(isinstance(y, float) and math.isnan(y) for y in ys):
            continue
        ax.plot(xs, ys, style, label=label, linewidth=1.4)
    ax.set_xlabel(spec_variable)
    ax.set_ylabel("rate [Mbps]")
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)


def render_distribution_figure(result: CapacityResult, path: str | Path) -> None:
    """Stem plot of the relay mass points with the source threshold marked."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(6.5, 4.0))
    if isinstance(result.dist, DiscreteDistribution):
        pts = result.dist.signed_points()
        xs = [p[0] for p in pts]
        ys = [p[1] for p in pts]
        ml, sl, bl = ax.stem(xs, ys)
        plt.setp(ml, markersize=4)
        ax.set_ylabel("probability")
    elif isinstance(result.dist, GaussianInput):
        import numpy as np

        v = result.dist.variance
        xs = np.linspace(-4 * math.sqrt(v), 4 * math.sqrt(v), 401)
        ax.plot(xs, np.exp(-xs * xs / (2 * v)) / math.sqrt(2 * math.pi * v), "-")
        ax.set_ylabel("density")
    if math.isfinite(result.x_th) and result.x_th > 0:
        for s in (-1.0, 1.0):
            ax.axvline(s * result.x_th, color="tab:red", linestyle="--", linewidth=1.0)
        ax.text(result.x_th, ax.get_ylim()[1] * 0.95, " x_th", color="tab:red", fontsize=8)
    ax.set_xlabel("relay transmit amplitude")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=160)
    plt.close(fig)
