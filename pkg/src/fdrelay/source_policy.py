"""Symbol-dependent source power policy and the source-relay mutual
information it induces.

The source transmits Gaussian symbols whose variance depends on the relay's
current transmit amplitude: P_S(x_R) = alpha * max(0, x_th^2 - x_R^2). The
threshold x_th is pinned by requiring the average allocated power to equal
the source power budget; for every relay input family that average has the
same water-filling form, so one monotone root solve covers all of them.
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
from .numerics import QuadratureSpec, bisect_root, erf, gauss_expectation

LN2 = math.log(2.0)


@dataclass(frozen=True)
class SourcePolicy:
    """Threshold policy: amplitude threshold, SI amplification factor, and
    the resulting probability that the source transmits."""

    x_th: float
    alpha: float
    p_t: float

    def __post_init__(self):
        if self.x_th < 0:
            raise ValueError("x_th must be >= 0")
        if not (0.0 <= self.p_t <= 1.0):
            raise ValueError("p_t must be a probability")


def source_power(x_r: float, policy: SourcePolicy) -> float:
    """Average source power while the relay transmits amplitude x_r."""
    return policy.alpha * max(0.0, policy.x_th**2 - x_r**2)


def _gaussian_clipped_mean(x_th: float, variance: float, alpha: float) -> float:
    """E[alpha * max(0, x_th^2 - X^2)] for X ~ N(0, variance), closed form."""
    if x_th <= 0.0:
        return 0.0
    if variance == 0.0:
        return alpha * x_th * x_th
    s = math.sqrt(2.0 * variance)
    return (
        math.sqrt(2.0 * variance / math.pi) * alpha * x_th * math.exp(-(x_th**2) / (2.0 * variance))
        + alpha * (x_th**2 - variance) * erf(x_th / s)
    )


def expected_source_power(dist: RelayInputDistribution, x_th: float, alpha: float) -> float:
    """Average power the policy allocates: E[alpha * max(0, x_th^2 - X_R^2)]."""
    if isinstance(dist, DiscreteDistribution):
        gap = np.maximum(0.0, x_th**2 - dist.amplitudes**2)
        return float(alpha * (gap @ dist.probs))
    if isinstance(dist, GaussianInput):
        return _gaussian_clipped_mean(x_th, dist.variance, alpha)
    if isinstance(dist, BernoulliGaussian):
        on = _gaussian_clipped_mean(x_th, dist.conditional_variance, alpha)
        return dist.q * on + (1.0 - dist.q) * alpha * x_th**2
    raise TypeError(f"unsupported relay input distribution {type(dist)!r}")


def _transmit_prob(dist: RelayInputDistribution, x_th: float) -> float:
    if isinstance(dist, DiscreteDistribution):
        return dist.transmit_prob(x_th)
    if isinstance(dist, GaussianInput):
        if dist.variance == 0.0:
            return 1.0
        return erf(x_th / math.sqrt(2.0 * dist.variance))
    if isinstance(dist, BernoulliGaussian):
        v = dist.conditional_variance
        on = 1.0 if v == 0.0 else erf(x_th / math.sqrt(2.0 * v))
        return dist.q * on + (1.0 - dist.q)
    raise TypeError(f"unsupported relay input distribution {type(dist)!r}")


def _support_radius(dist: RelayInputDistribution) -> float:
    if isinstance(dist, DiscreteDistribution):
        return float(dist.amplitudes[-1])
    if isinstance(dist, GaussianInput):
        return 10.0 * math.sqrt(dist.variance)
    return 10.0 * math.sqrt(dist.conditional_variance)


def solve_xth(
    dist: RelayInputDistribution,
    alpha: float,
    p_s: float,
    rel_tol: float = 1e-12,
) -> float:
    """Threshold making the allocated power meet the budget exactly.

    The allocated power is continuous, strictly increasing in x_th and grows
    without bound, so the root exists and is unique. Bisection brackets it
    on [0, sqrt(p_s/alpha) + support radius]; a few Newton steps polish the
    bisection output (d/dt of the constraint is 2 alpha t Pr{|X| < t}).
    """
    if alpha <= 0:
        raise ValueError("solve_xth requires alpha > 0; alpha = 0 is the ideal-FD branch")
    if p_s < 0:
        raise ValueError("p_s must be nonnegative")
    if p_s == 0.0:
        return 0.0

    def f(t):
        return expected_source_power(dist, t, alpha) - p_s

    hi = math.sqrt(p_s / alpha) + _support_radius(dist)
    for _ in range(80):
        if f(hi) > 0.0:
            break
        hi = hi * 1.5 + 1e-300
    t = bisect_root(f, 0.0, hi, tol=1e-9 * (1.0 + hi))
    for _ in range(40):
        deriv = 2.0 * alpha * t * _transmit_prob(dist, t)
        if deriv <= 0.0:
            break
        step = f(t) / deriv
        t_new = t - step
        if t_new <= 0.0:
            break
        t = t_new
        if abs(step) <= rel_tol * (1.0 + t):
            break
    return t


def solve_xth_discrete(dist: DiscreteDistribution, alpha: float, p_s: float) -> float:
    return solve_xth(dist, alpha, p_s)


def solve_xth_gaussian(p_r: float, alpha: float, p_s: float) -> float:
    return solve_xth(GaussianInput(p_r), alpha, p_s)


def power_residual(dist: RelayInputDistribution, x_th: float, alpha: float, p_s: float) -> float:
    """Absolute defect of the power-budget identity at x_th."""
    return abs(expected_source_power(dist, x_th, alpha) - p_s)


def snr_term(x: np.ndarray, x_th: float, alpha: float, sigma_r_sq: float) -> np.ndarray:
    """Per-state rate 0.5 log2(1 + P_S(x)/(sigma_R^2 + alpha x^2)) in bits."""
    x = np.asarray(x, dtype=float)
    num = alpha * np.maximum(0.0, x_th**2 - x * x)
    return 0.5 * np.log2(1.0 + num / (sigma_r_sq + alpha * x * x))


def mi_source_relay(
    dist: RelayInputDistribution,
    x_th: float,
    alpha: float,
    sigma_r_sq: float,
    q: QuadratureSpec | None = None,
) -> float:
    """I(X_S; Y_R | X_R) in bits/symbol under the threshold policy.

    Discrete inputs average the per-state rate over the mass points; the
    Gaussian and Bernoulli-Gaussian variants integrate it against the
    continuous component (the integrand kinks at +-x_th, handled by the
    split quadrature).
    """
    if isinstance(dist, DiscreteDistribution):
        return float(snr_term(dist.amplitudes, x_th, alpha, sigma_r_sq) @ dist.probs)
    if isinstance(dist, GaussianInput):
        if dist.variance == 0.0:
            return float(snr_term(np.zeros(1), x_th, alpha, sigma_r_sq)[0])
        return gauss_expectation(
            lambda x: snr_term(x, x_th, alpha, sigma_r_sq),
            dist.variance,
            q,
            kinks=(-x_th, x_th),
        )
    if isinstance(dist, BernoulliGaussian):
        on = mi_source_relay(GaussianInput(dist.conditional_variance), x_th, alpha, sigma_r_sq, q)
        silent = 0.5 * math.log2(1.0 + alpha * x_th**2 / sigma_r_sq)
        return dist.q * on + (1.0 - dist.q) * silent
    raise TypeError(f"unsupported relay input distribution {type(dist)!r}")
