"""Relay input distributions: discrete symmetric, Gaussian, Bernoulli-Gaussian.

The discrete family stores one row per amplitude: the zero symbol plus
positive amplitudes x_j, where each positive x_j stands for the symmetric
pair +-x_j and p_j is the total pair probability (p_j/2 on each sign).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .numerics import GaussianMixture

PROB_ATOL = 1e-12


@dataclass(frozen=True)
class DiscreteDistribution:
    """Symmetric discrete relay input. amplitudes[0] == 0 always (possibly
    with zero probability); amplitudes strictly increasing."""

    amplitudes: np.ndarray
    probs: np.ndarray

    def __init__(self, amplitudes, probs):
        x = np.asarray(amplitudes, dtype=float)
        p = np.asarray(probs, dtype=float)
        if x.ndim != 1 or x.shape != p.shape:
            raise ValueError("amplitudes and probs must be 1-D and congruent")
        if x.size == 0 or x[0] != 0.0:
            raise ValueError("the zero symbol must be present as amplitudes[0]")
        if np.any(np.diff(x) <= 0):
            raise ValueError("amplitudes must be strictly increasing")
        if np.any(p < -PROB_ATOL):
            raise ValueError("probabilities must be nonnegative")
        p = np.maximum(p, 0.0)
        if abs(p.sum() - 1.0) > PROB_ATOL:
            raise ValueError(f"probabilities sum to {p.sum()!r}, expected 1")
        object.__setattr__(self, "amplitudes", x)
        object.__setattr__(self, "probs", p)

    @property
    def prob_zero(self) -> float:
        return float(self.probs[0])

    def second_moment(self) -> float:
        return float(self.probs @ self.amplitudes**2)

    def transmit_prob(self, x_th: float) -> float:
        """Pr{|X_R| < x_th}: the fraction of symbols during which the
        source transmits under the threshold policy."""
        return float(self.probs[self.amplitudes < x_th].sum())

    def pruned(self, eps: float = 1e-8) -> "DiscreteDistribution":
        keep = self.probs > eps
        keep[0] = True
        p = self.probs[keep]
        return DiscreteDistribution(self.amplitudes[keep], p / p.sum())

    def signed_points(self) -> list[tuple[float, float]]:
        """Explicit (+-x_j, mass) rows, negative amplitudes first."""
        rows = []
        for x, p in zip(self.amplitudes[::-1], self.probs[::-1]):
            if x > 0.0:
                rows.append((-x, p / 2.0))
        for x, p in zip(self.amplitudes, self.probs):
            rows.append((x, p if x == 0.0 else p / 2.0))
        return rows

    def output_mixture(self, noise_variance: float) -> GaussianMixture:
        """Distribution of X_R + N(0, noise_variance) as a Gaussian mixture."""
        comps = [(p, x, noise_variance) for x, p in self.signed_points() if p > 0.0]
        if not comps:
            comps = [(1.0, 0.0, noise_variance)]
        w = sum(c[0] for c in comps)
        comps = [(c[0] / w, c[1], c[2]) for c in comps]
        return GaussianMixture(comps)


@dataclass(frozen=True)
class GaussianInput:
    """Zero-mean Gaussian relay input with the given variance."""

    variance: float

    def __post_init__(self):
        if self.variance < 0:
            raise ValueError("variance must be nonnegative")


@dataclass(frozen=True)
class BernoulliGaussian:
    """Mixture of a point mass at zero (prob 1-q) and N(0, p_r_used/q).

    p_r_used is the average transmit power; the conditional variance while
    transmitting is p_r_used/q so the long-run average stays p_r_used.
    """

    q: float
    p_r_used: float

    def __post_init__(self):
        if not (0.0 < self.q <= 1.0):
            raise ValueError("q must be in (0, 1]")
        if self.p_r_used < 0:
            raise ValueError("p_r_used must be nonnegative")

    @property
    def conditional_variance(self) -> float:
        return self.p_r_used / self.q

    def output_mixture(self, noise_variance: float) -> GaussianMixture:
        comps = [(self.q, 0.0, self.conditional_variance + noise_variance)]
        if self.q < 1.0:
            comps.append((1.0 - self.q, 0.0, noise_variance))
        return GaussianMixture(comps)


RelayInputDistribution = Union[DiscreteDistribution, GaussianInput, BernoulliGaussian]
