"""Single-point reports and parameter sweeps over scenario variables.

Each sweep row carries the capacity, the Bernoulli-Gaussian bound and all
four benchmark rates in bits/symbol, the regime tag, threshold and the two
headline distribution features, plus Mbps conversions of every rate.
Failed rows keep their slot (empty cells) so the output stays aligned.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass

from .benchmarks import BenchmarkSuite, run_benchmarks
from .config import SweepSpec
from .distributions import DiscreteDistribution, GaussianInput
from .linkbudget import LinkScenario, NormalizedChannel, normalize_scenario, rate_to_bps
from .lowerbound import LowerBoundResult, solve_lowerbound
from .relay_opt import CapacityResult, SolverConfig, capacity

SWEEP_COLUMNS = [
    "sweep_value",
    "c_fd",
    "r_fd_b",
    "c_fd_ideal",
    "r_fd_conv",
    "c_hd",
    "r_hd_conv",
    "regime",
    "x_th",
    "p0",
    "p_T",
    "c_fd_mbps",
    "r_fd_b_mbps",
    "c_fd_ideal_mbps",
    "r_fd_conv_mbps",
    "c_hd_mbps",
    "r_hd_conv_mbps",
]


@dataclass(frozen=True)
class PointReport:
    scenario: LinkScenario
    channel: NormalizedChannel
    result: CapacityResult
    benchmarks: BenchmarkSuite
    lower_bound: LowerBoundResult | None


def apply_sweep_value(scenario: LinkScenario, spec: SweepSpec, value: float) -> LinkScenario:
    changes = {spec.variable: value}
    if spec.linked and spec.variable in ("p_s_dbm", "p_r_dbm"):
        changes = {"p_s_dbm": value, "p_r_dbm": value}
    return dataclasses.replace(scenario, **changes)


def evaluate_point(
    scenario: LinkScenario,
    cfg: SolverConfig | None = None,
    with_lower_bound: bool = True,
) -> PointReport:
    """Capacity, benchmarks, and (when alpha > 0) the analytic lower bound."""
    cfg = cfg or SolverConfig()
    ch = normalize_scenario(scenario)
    result = capacity(ch, cfg)
    bench = run_benchmarks(ch, cfg)
    lb = None
    if with_lower_bound and ch.alpha > 0 and ch.p_s > 0 and ch.p_r > 0:
        lb = solve_lowerbound(ch, cfg.quadrature())
    return PointReport(scenario, ch, result, bench, lb)


def _dist_p0(result: CapacityResult) -> float | None:
    if isinstance(result.dist, DiscreteDistribution):
        return result.dist.prob_zero
    if isinstance(result.dist, GaussianInput):
        return 0.0
    return None


def sweep_rows(
    scenario: LinkScenario,
    spec: SweepSpec,
    cfg: SolverConfig | None = None,
) -> tuple[list[dict], int]:
    """One row per sweep value, in sweep order. Returns (rows, n_failed)."""
    cfg = cfg or SolverConfig()
    rows: list[dict] = []
    failed = 0
    for value in spec.values():
        row: dict = {c: "" for c in SWEEP_COLUMNS}
        row["sweep_value"] = value
        s = apply_sweep_value(scenario, spec, value)
        try:
            rep = evaluate_point(s, cfg)
        except Exception:
            failed += 1
            rows.append(row)
            continue
        bw = s.bandwidth
        rates = {
            "c_fd": rep.result.capacity,
            "r_fd_b": rep.lower_bound.rate if rep.lower_bound else math.nan,
            "c_fd_ideal": rep.benchmarks.c_fd_ideal,
            "r_fd_conv": rep.benchmarks.r_fd_conv,
            "c_hd": rep.benchmarks.c_hd,
            "r_hd_conv": rep.benchmarks.r_hd_conv,
        }
        for k, v in rates.items():
            if math.isnan(v):
                row[k] = ""
                row[f"{k}_mbps"] = ""
            else:
                row[k] = v
                row[f"{k}_mbps"] = rate_to_bps(v, bw) / 1e6
        row["regime"] = rep.result.regime
        row["x_th"] = rep.result.x_th if math.isfinite(rep.result.x_th) else "inf"
        p0 = _dist_p0(rep.result)
        row["p0"] = p0 if p0 is not None else ""
        row["p_T"] = rep.result.p_transmit
        rows.append(row)
    return rows, failed
