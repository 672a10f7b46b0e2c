"""Benchmark relaying schemes: ideal FD, conventional FD with a Gaussian
relay input and optimized power backoff, and conventional codeword-by-
codeword HD with an optimized time split. The optimal-HD benchmark is the
infinite-self-interference solve in relay_opt.hd_capacity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linkbudget import NormalizedChannel
from .numerics import QuadratureSpec, gauss_expectation, golden_section_max
from .relay_opt import CapacityResult, SolverConfig, hd_capacity


@dataclass(frozen=True)
class BenchmarkSuite:
    c_fd_ideal: float
    r_fd_conv: float
    c_hd: float
    r_hd_conv: float
    t_opt: float
    p_r_opt_conv: float

    def __post_init__(self):
        for name in ("c_fd_ideal", "r_fd_conv", "c_hd", "r_hd_conv"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be nonnegative")
        if not (0.0 < self.t_opt < 1.0):
            raise ValueError("t_opt must lie strictly inside (0, 1)")


def ideal_fd_capacity(ch: NormalizedChannel) -> float:
    """Two-hop capacity without self-interference: min of the hop capacities."""
    sr = 0.5 * math.log2(1.0 + ch.p_s / ch.sigma_r_sq)
    rd = 0.5 * math.log2(1.0 + ch.p_r / ch.sigma_d_sq)
    return min(sr, rd)


def conventional_fd_rate(
    ch: NormalizedChannel, q: QuadratureSpec | None = None
) -> tuple[float, float]:
    """Gaussian inputs at both nodes; only the relay power is tuned.

    Returns (rate, optimized relay power). The source-relay branch averages
    0.5 log2(1 + P_S/(sigma_R^2 + alpha x^2)) over the relay's Gaussian
    symbol; the branch is smooth, so plain Gauss-Hermite integrates it.
    """

    def sr_rate(p_r):
        if ch.alpha == 0.0 or p_r == 0.0:
            return 0.5 * math.log2(1.0 + ch.p_s / ch.sigma_r_sq)
        return gauss_expectation(
            lambda x: 0.5 * np.log2(1.0 + ch.p_s / (ch.sigma_r_sq + ch.alpha * x * x)),
            p_r,
            q,
        )

    def rate(p_r):
        rd = 0.5 * math.log2(1.0 + p_r / ch.sigma_d_sq)
        return min(sr_rate(p_r), rd)

    if ch.p_s <= 0 or ch.p_r <= 0:
        return 0.0, 0.0
    p_opt, best = golden_section_max(rate, 0.0, ch.p_r, tol=1e-10 * max(ch.p_r, 1.0))
    full = rate(ch.p_r)
    if full >= best:
        return full, ch.p_r
    return best, p_opt


def conventional_hd_rate(ch: NormalizedChannel) -> tuple[float, float]:
    """Codeword-by-codeword HD: the relay listens a (1-t) fraction and talks
    a t fraction, powers rescaled so the long-run averages meet the budgets.

    Returns (rate, t_opt). The listening branch falls and the talking branch
    grows in t, so the min is unimodal and the optimum balances both.
    """
    if ch.p_s <= 0 or ch.p_r <= 0:
        return 0.0, 0.5

    def rate(t):
        sr = 0.5 * (1.0 - t) * math.log2(1.0 + ch.p_s / ((1.0 - t) * ch.sigma_r_sq))
        rd = 0.5 * t * math.log2(1.0 + ch.p_r / (t * ch.sigma_d_sq))
        return min(sr, rd)

    t_opt, best = golden_section_max(rate, 1e-6, 1.0 - 1e-6, tol=1e-10)
    return best, t_opt


def run_benchmarks(
    ch: NormalizedChannel,
    cfg: SolverConfig | None = None,
    hd_result: CapacityResult | None = None,
) -> BenchmarkSuite:
    """Evaluate all four benchmark schemes for one normalized channel."""
    cfg = cfg or SolverConfig()
    quad = cfg.quadrature()
    r_fd, p_r_opt = conventional_fd_rate(ch, quad)
    r_hd, t_opt = conventional_hd_rate(ch)
    hd = hd_result if hd_result is not None else hd_capacity(ch, cfg)
    return BenchmarkSuite(
        c_fd_ideal=ideal_fd_capacity(ch),
        r_fd_conv=r_fd,
        c_hd=hd.capacity,
        r_hd_conv=r_hd,
        t_opt=t_opt,
        p_r_opt_conv=p_r_opt,
    )
