"""Monte Carlo estimators used as independent oracles for the quadrature
and closed-form rate computations.

Sampling runs on counter-based Philox streams spawned per batch from one
seed, so estimates are reproducible regardless of batch scheduling, and
standard errors come from batch means.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distributions import (
    BernoulliGaussian,
    DiscreteDistribution,
    GaussianInput,
    RelayInputDistribution,
)
from .numerics import GaussianMixture

LN2 = math.log(2.0)


@dataclass(frozen=True)
class McConfig:
    samples: int = 1_000_000
    seed: int = 20240801
    batches: int = 20

    def __post_init__(self):
        if self.samples < 10_000:
            raise ValueError("samples must be >= 1e4")
        if self.batches < 10:
            raise ValueError("batches must be >= 10")


@dataclass(frozen=True)
class McEstimate:
    value: float
    stderr: float

    def within(self, reference: float, n_sigma: float = 3.0) -> bool:
        return abs(self.value - reference) <= n_sigma * self.stderr


def _batch_rngs(cfg: McConfig) -> list[np.random.Generator]:
    seqs = np.random.SeedSequence(cfg.seed).spawn(cfg.batches)
    return [np.random.Generator(np.random.Philox(s)) for s in seqs]


def _combine(batch_means: np.ndarray) -> McEstimate:
    m = float(batch_means.mean())
    se = float(batch_means.std(ddof=1) / math.sqrt(batch_means.size))
    return McEstimate(m, se)


def _sample_mixture(m: GaussianMixture, rng: np.random.Generator, n: int) -> np.ndarray:
    idx = rng.choice(m.weights.size, size=n, p=m.weights)
    return m.means[idx] + np.sqrt(m.variances[idx]) * rng.standard_normal(n)


def mc_entropy(m: GaussianMixture, cfg: McConfig | None = None) -> McEstimate:
    """Estimate h(Y) = -E[log2 p(Y)] by sampling the mixture."""
    cfg = cfg or McConfig()
    per = cfg.samples // cfg.batches
    means = []
    for rng in _batch_rngs(cfg):
        y = _sample_mixture(m, rng, per)
        means.append(-float(m.logpdf(y).mean()) / LN2)
    return _combine(np.asarray(means))


def _sample_relay(dist: RelayInputDistribution, rng: np.random.Generator, n: int) -> np.ndarray:
    if isinstance(dist, DiscreteDistribution):
        pts = dist.signed_points()
        xs = np.asarray([p[0] for p in pts])
        ws = np.asarray([p[1] for p in pts])
        ws = ws / ws.sum()
        return xs[rng.choice(xs.size, size=n, p=ws)]
    if isinstance(dist, GaussianInput):
        return math.sqrt(dist.variance) * rng.standard_normal(n)
    if isinstance(dist, BernoulliGaussian):
        on = rng.random(n) < dist.q
        x = np.zeros(n)
        x[on] = math.sqrt(dist.conditional_variance) * rng.standard_normal(int(on.sum()))
        return x
    raise TypeError(f"unsupported relay input distribution {type(dist)!r}")


def mc_mi_source_relay(
    dist: RelayInputDistribution,
    x_th: float,
    alpha: float,
    sigma_r_sq: float,
    cfg: McConfig | None = None,
    mode: str = "state",
) -> McEstimate:
    """Monte Carlo I(X_S; Y_R | X_R) under the threshold power policy.

    mode="state" samples only the relay state and averages the per-state
    AWGN rate; mode="llr" additionally simulates the channel and averages
    the Gaussian log-likelihood ratio, exercising the full conditional
    decomposition.
    """
    cfg = cfg or McConfig()
    if mode not in ("state", "llr"):
        raise ValueError("mode must be 'state' or 'llr'")
    per = cfg.samples // cfg.batches
    means = []
    for rng in _batch_rngs(cfg):
        x_r = _sample_relay(dist, rng, per)
        p_s_state = alpha * np.maximum(0.0, x_th**2 - x_r**2)
        noise_var = sigma_r_sq + alpha * x_r**2
        if mode == "state":
            vals = 0.5 * np.log2(1.0 + p_s_state / noise_var)
        else:
            x_s = np.sqrt(p_s_state) * rng.standard_normal(per)
            y = x_s + np.sqrt(noise_var) * rng.standard_normal(per)
            # log N(y; x_s, n) - log N(y; 0, P + n), in bits
            tot = p_s_state + noise_var
            vals = (
                -((y - x_s) ** 2) / (2.0 * noise_var)
                + y * y / (2.0 * tot)
                + 0.5 * np.log(tot / noise_var)
            ) / LN2
        means.append(float(vals.mean()))
    return _combine(np.asarray(means))


def mc_mi_relay_destination(
    dist: RelayInputDistribution,
    sigma_d_sq: float,
    cfg: McConfig | None = None,
) -> McEstimate:
    """Monte Carlo I(X_R; Y_D) via the log-likelihood ratio against the
    exact output mixture density."""
    cfg = cfg or McConfig()
    per = cfg.samples // cfg.batches
    if isinstance(dist, GaussianInput):
        mix = GaussianMixture([(1.0, 0.0, dist.variance + sigma_d_sq)])
    else:
        mix = dist.output_mixture(sigma_d_sq)
    means = []
    for rng in _batch_rngs(cfg):
        x_r = _sample_relay(dist, rng, per)
        y = x_r + math.sqrt(sigma_d_sq) * rng.standard_normal(per)
        log_cond = -((y - x_r) ** 2) / (2.0 * sigma_d_sq) - 0.5 * math.log(
            2.0 * math.pi * sigma_d_sq
        )
        vals = (log_cond - mix.logpdf(y)) / LN2
        means.append(float(vals.mean()))
    return _combine(np.asarray(means))
