"""Shared numerical kernels: quadrature, special functions, root finding,
and Gaussian-mixture differential entropy.

Everything here is pure and reentrant. Entropies and expectations are in
bits unless noted otherwise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp, roots_hermite

LN2 = math.log(2.0)


class NonConvergenceError(RuntimeError):
    """Adaptive refinement exceeded its depth budget."""


class BracketError(ValueError):
    """Root bracket endpoints do not straddle a sign change."""


def erf(x: float) -> float:
    """Error function, |error| <= 1e-14 on [-6, 6], exactly +-1 beyond."""
    return math.erf(x)


def dbm_to_watts(p_dbm: float) -> float:
    return 10.0 ** ((p_dbm - 30.0) / 10.0)


def watts_to_dbm(p_w: float) -> float:
    if p_w <= 0.0:
        raise ValueError("power must be positive to express in dBm")
    return 10.0 * math.log10(p_w) + 30.0


def db_to_linear(v_db: float) -> float:
    return 10.0 ** (v_db / 10.0)


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature controls shared by the entropy and expectation kernels.

    method: "gauss-hermite" (default) or "adaptive".
    order: Gauss-Hermite node count, >= 16.
    abs_tol: absolute tolerance in bits for adaptive refinement.
    max_depth: recursion budget for adaptive Simpson.
    """

    method: str = "gauss-hermite"
    order: int = 96
    abs_tol: float = 1e-9
    max_depth: int = 48

    def __post_init__(self):
        if self.method not in ("gauss-hermite", "adaptive"):
            raise ValueError(f"unknown quadrature method {self.method!r}")
        if self.order < 16:
            raise ValueError("gauss-hermite order must be >= 16")
        if self.abs_tol <= 0:
            raise ValueError("abs_tol must be positive")


@lru_cache(maxsize=8)
def _hermite_nodes(order: int):
    t, w = roots_hermite(order)
    return t, w


@lru_cache(maxsize=8)
def _legendre_nodes(order: int):
    t, w = np.polynomial.legendre.leggauss(order)
    return t, w


def _gl_segment(f: Callable, a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    """Gauss-Legendre over a batch of segments [a_k, b_k], vectorized in k."""
    t, w = _legendre_nodes(order)
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = mid[:, None] + half[:, None] * t[None, :]
    vals = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    return half * (vals @ w)


def _gl_adaptive(
    f: Callable,
    a: float,
    b: float,
    tol: float,
    order: int,
    max_splits: int = 24,
    seeds: Sequence[float] = (),
) -> float:
    """Adaptive segment-splitting Gauss-Legendre with a half-order error probe.

    Segments whose high/low order estimates disagree beyond their share of
    the tolerance are halved; work stays vectorized across segments. Seed
    points force initial segment boundaries so that features much narrower
    than the full interval cannot slip between the probe nodes undetected.
    """
    edges = [a] + sorted(s for s in set(float(v) for v in seeds) if a < s < b) + [b]
    segs = np.array([[lo, hi] for lo, hi in zip(edges[:-1], edges[1:]) if hi - lo > 1e-300])
    if segs.size == 0:
        return 0.0
    low = max(order // 2, 8)
    total = 0.0
    for _ in range(max_splits):
        hi = _gl_segment(f, segs[:, 0], segs[:, 1], order)
        lo = _gl_segment(f, segs[:, 0], segs[:, 1], low)
        err = np.abs(hi - lo)
        share = tol * (segs[:, 1] - segs[:, 0]) / max(b - a, 1e-300)
        ok = err <= np.maximum(share, 1e-18)
        total += float(hi[ok].sum())
        bad = segs[~ok]
        if bad.size == 0:
            return total
        mids = 0.5 * (bad[:, 0] + bad[:, 1])
        segs = np.concatenate(
            [np.stack([bad[:, 0], mids], axis=1), np.stack([mids, bad[:, 1]], axis=1)]
        )
    raise NonConvergenceError(f"Gauss-Legendre refinement exceeded split budget on [{a:g},{b:g}]")


@dataclass(frozen=True)
class GaussianMixture:
    """Finite Gaussian mixture sum_i w_i N(mu_i, var_i).

    Zero-variance components are allowed in the container only as explicit
    point masses (relay input side); entropy evaluation requires var > 0.
    """

    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __init__(self, components: Sequence[tuple[float, float, float]]):
        w = np.asarray([c[0] for c in components], dtype=float)
        mu = np.asarray([c[1] for c in components], dtype=float)
        var = np.asarray([c[2] for c in components], dtype=float)
        if w.size == 0:
            raise ValueError("mixture needs at least one component")
        if np.any(w < 0) or np.any(var < 0):
            raise ValueError("weights and variances must be nonnegative")
        if abs(w.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights sum to {w.sum()!r}, expected 1 within 1e-12")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "means", mu)
        object.__setattr__(self, "variances", var)

    @property
    def components(self) -> list[tuple[float, float, float]]:
        return list(zip(self.weights, self.means, self.variances))

    def logpdf(self, y) -> np.ndarray:
        """Natural-log density, evaluated stably via logsumexp."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        if np.any(self.variances == 0):
            raise ValueError("logpdf undefined for zero-variance components")
        z = (y[:, None] - self.means[None, :]) ** 2 / (2.0 * self.variances[None, :])
        logcomp = -z - 0.5 * np.log(2.0 * np.pi * self.variances[None, :])
        return logsumexp(logcomp, axis=1, b=self.weights[None, :])

    def pdf(self, y) -> np.ndarray:
        return np.exp(self.logpdf(y))

    def reflected(self) -> "GaussianMixture":
        return GaussianMixture(list(zip(self.weights, -self.means, self.variances)))

    def overall_variance(self) -> float:
        m = float(self.weights @ self.means)
        return float(self.weights @ (self.variances + self.means**2) - m * m)


def gaussian_entropy_bits(variance: float) -> float:
    """Differential entropy of N(mu, variance) in bits."""
    if variance <= 0:
        raise ValueError("variance must be positive")
    return 0.5 * math.log2(2.0 * math.pi * math.e * variance)


def mixture_entropy(m: GaussianMixture, q: QuadratureSpec | None = None) -> float:
    """Differential entropy h(Y) = -int p log2 p of a Gaussian mixture, in bits.

    Gauss-Hermite integrates -E_i[log2 p] per component; the adaptive path
    runs Simpson over [min mean - 10 max std, max mean + 10 max std].
    """
    q = q or QuadratureSpec()
    if np.any(m.variances <= 0):
        raise ValueError("mixture_entropy requires every component variance > 0")
    spread = float(m.variances.max() / m.variances.min())
    if q.method == "gauss-hermite" and spread <= 30.0:
        h = _mixture_entropy_gh(m, q.order)
        # escalate the order until two consecutive estimates agree within
        # tolerance; strongly heterogeneous mixtures go straight to the
        # seeded adaptive rule, whose nodes track each component's scale
        order = q.order
        for _ in range(3):
            higher = _mixture_entropy_gh(m, order * 2)
            if abs(higher - h) <= 0.5 * q.abs_tol:
                return higher
            h, order = higher, order * 2
    return _mixture_entropy_adaptive(m, q)


def _mixture_entropy_gh(m: GaussianMixture, order: int) -> float:
    t, w = _hermite_nodes(order)
    h_nats = 0.0
    for wi, mui, vari in zip(m.weights, m.means, m.variances):
        if wi == 0.0:
            continue
        y = mui + math.sqrt(2.0 * vari) * t
        h_nats += -wi * float(w @ m.logpdf(y)) / math.sqrt(math.pi)
    return h_nats / LN2


def _mixture_entropy_adaptive(m: GaussianMixture, q: QuadratureSpec) -> float:
    sig = float(np.sqrt(m.variances.max()))
    lo = float(m.means.min()) - 10.0 * sig
    hi = float(m.means.max()) + 10.0 * sig
    # anchor each component so the splitter cannot overlook narrow spikes
    stds = np.sqrt(m.variances)
    seeds = []
    for mu, s in zip(m.means, stds):
        seeds.extend((mu - 6.0 * s, mu - 2.0 * s, mu, mu + 2.0 * s, mu + 6.0 * s))

    def integrand(y):
        lp = m.logpdf(y)
        return -np.exp(lp) * lp

    return (
        _gl_adaptive(integrand, lo, hi, q.abs_tol * LN2, q.order, max_splits=q.max_depth, seeds=seeds)
        / LN2
    )


def gauss_expectation(
    f: Callable,
    variance: float,
    q: QuadratureSpec | None = None,
    kinks: Sequence[float] = (),
) -> float:
    """E[f(X)] for X ~ N(0, variance).

    Smooth integrands go through Gauss-Hermite; when kink points are given
    the integral is split there and each piece handled by adaptive Simpson
    (the tails beyond max(|kink|, 10 sigma) are integrated as one GH-style
    segment each, split at the outermost kinks).
    """
    q = q or QuadratureSpec()
    if variance <= 0:
        raise ValueError("variance must be positive")
    sig = math.sqrt(variance)

    if not kinks and q.method == "gauss-hermite":
        t, w = _hermite_nodes(q.order)
        x = math.sqrt(2.0 * variance) * t
        vals = np.asarray(f(x), dtype=float)
        return float(w @ vals) / math.sqrt(math.pi)

    pts = sorted(set(float(k) for k in kinks))
    lo, hi = -10.0 * sig, 10.0 * sig
    edges = [lo] + [p for p in pts if lo < p < hi] + [hi]

    def weighted(x):
        x = np.asarray(x, dtype=float)
        pdf = np.exp(-x * x / (2.0 * variance)) / math.sqrt(2.0 * math.pi * variance)
        return np.asarray(f(x), dtype=float) * pdf

    total = 0.0
    budget = q.abs_tol / max(len(edges) - 1, 1)
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a < 1e-300:
            continue
        total += _gl_adaptive(weighted, a, b, budget, q.order)
    return total


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Bracketed bisection for a continuous f with f(lo) * f(hi) <= 0."""
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if flo * fhi > 0.0:
        raise BracketError(f"f({lo:g})={flo:g} and f({hi:g})={fhi:g} have the same sign")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if flo * fm < 0.0:
            hi, fhi = mid, fm
        else:
            lo, flo = mid, fm
        if hi - lo <= tol:
            break
    return 0.5 * (lo + hi)


def golden_section_max(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> tuple[float, float]:
    """Golden-section maximization of a unimodal f on [lo, hi].

    Returns (argmax, max). tol is absolute on the argument.
    """
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    c = b - invphi * (b - a)
    d = a + invphi * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a <= tol:
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - invphi * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + invphi * (b - a)
            fd = f(d)
    x = c if fc >= fd else d
    return x, max(fc, fd)
