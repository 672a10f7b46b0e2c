"""Oracle validation suite: quadrature/closed-form quantities versus their
Monte Carlo estimates at 3-sigma, driven by the `validate` CLI subcommand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .distributions import BernoulliGaussian, DiscreteDistribution, GaussianInput
from .linkbudget import NormalizedChannel
from .mcoracle import McConfig, mc_entropy, mc_mi_relay_destination, mc_mi_source_relay
from .numerics import GaussianMixture, QuadratureSpec, gaussian_entropy_bits, mixture_entropy
from .relay_opt import mi_relay_destination
from .source_policy import mi_source_relay, solve_xth


@dataclass(frozen=True)
class CheckRow:
    name: str
    reference: float
    mc_value: float
    stderr: float
    n_sigma: float
    passed: bool


def _row(name, reference, est, n_sigma=3.0) -> CheckRow:
    z = abs(est.value - reference) / est.stderr if est.stderr > 0 else math.inf
    return CheckRow(name, reference, est.value, est.stderr, z, z <= n_sigma)


def run_validation(ch: NormalizedChannel, cfg: McConfig | None = None) -> list[CheckRow]:
    """Compare every analytic rate/entropy path against its MC oracle.

    The fixture set covers the entropy kernel, the source-relay rate for
    discrete / Gaussian / Bernoulli-Gaussian relay inputs, and the
    relay-destination mutual information.
    """
    cfg = cfg or McConfig()
    quad = QuadratureSpec()
    rows: list[CheckRow] = []

    unit = GaussianMixture([(1.0, 0.0, 1.0)])
    rows.append(_row("entropy: unit gaussian", gaussian_entropy_bits(1.0), mc_entropy(unit, cfg)))

    mix = GaussianMixture([(0.6, 0.0, 1.0), (0.4, 0.0, 4.0)])
    rows.append(_row("entropy: two-component mixture", mixture_entropy(mix, quad), mc_entropy(mix, cfg)))

    bg = BernoulliGaussian(q=0.5, p_r_used=ch.p_r / 2.0)
    out = bg.output_mixture(ch.sigma_d_sq)
    rows.append(_row("entropy: bernoulli-gaussian output", mixture_entropy(out, quad), mc_entropy(out, cfg)))

    alpha = ch.alpha if ch.alpha > 0 else 1.0
    dist = DiscreteDistribution([0.0, 1.0], [0.5, 0.5])
    t = solve_xth(dist, alpha, ch.p_s)
    rows.append(
        _row(
            "mi_sr: 3-point discrete (state mode)",
            mi_source_relay(dist, t, alpha, ch.sigma_r_sq, quad),
            mc_mi_source_relay(dist, t, alpha, ch.sigma_r_sq, cfg, mode="state"),
        )
    )
    rows.append(
        _row(
            "mi_sr: 3-point discrete (llr mode)",
            mi_source_relay(dist, t, alpha, ch.sigma_r_sq, quad),
            mc_mi_source_relay(dist, t, alpha, ch.sigma_r_sq, cfg, mode="llr"),
        )
    )

    gin = GaussianInput(ch.p_r)
    tg = solve_xth(gin, alpha, ch.p_s)
    rows.append(
        _row(
            "mi_sr: gaussian relay input",
            mi_source_relay(gin, tg, alpha, ch.sigma_r_sq, quad),
            mc_mi_source_relay(gin, tg, alpha, ch.sigma_r_sq, cfg, mode="state"),
        )
    )

    tb = solve_xth(bg, alpha, ch.p_s)
    rows.append(
        _row(
            "mi_sr: bernoulli-gaussian input",
            mi_source_relay(bg, tb, alpha, ch.sigma_r_sq, quad),
            mc_mi_source_relay(bg, tb, alpha, ch.sigma_r_sq, cfg, mode="state"),
        )
    )

    sep = 2.0 * math.sqrt(ch.sigma_d_sq)
    d3 = DiscreteDistribution([0.0, sep, 2.0 * sep], [0.4, 0.35, 0.25])
    rows.append(
        _row(
            "mi_rd: discrete relay input",
            mi_relay_destination(d3, ch.sigma_d_sq, quad),
            mc_mi_relay_destination(d3, ch.sigma_d_sq, cfg),
        )
    )
    rows.append(
        _row(
            "mi_rd: bernoulli-gaussian input",
            mi_relay_destination(bg, ch.sigma_d_sq, quad),
            mc_mi_relay_destination(bg, ch.sigma_d_sq, cfg),
        )
    )
    return rows
