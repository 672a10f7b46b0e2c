import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fdrelay import numerics as nm

# frozen independent oracles (40-digit series / adaptive quadrature)
ERF_1 = 0.84270079294971487
ERFINV_HALF = 0.47693627620446987
CLIP_PARABOLA_MEAN = 0.4839414490382867  # E[max(0, 1 - X^2)], X ~ N(0,1)
H_UNIT_GAUSSIAN = 2.0470955851806411  # 0.5 log2(2 pi e)
H_MIX_06_04 = 2.58224660988474  # h(0.6 N(0,1) + 0.4 N(0,4))


def _erf_quadrature(x: float) -> float:
    # evaluate the defining integral 2/sqrt(pi) int_0^x e^{-t^2} dt with
    # high-order Gauss-Legendre; independent of math.erf
    t, w = np.polynomial.legendre.leggauss(120)
    half = 0.5 * x
    nodes = half + half * t
    return 2.0 / math.sqrt(math.pi) * float(half * (w @ np.exp(-nodes * nodes)))


def test_erf_basics():
    assert nm.erf(0.0) == 0.0
    assert nm.erf(6.0) == pytest.approx(1.0, abs=1e-15)
    assert nm.erf(-7.0) == pytest.approx(-1.0, abs=1e-15)
    assert nm.erf(1.0) == pytest.approx(ERF_1, abs=1e-15)


def test_erf_against_quadrature_oracle():
    for x in np.linspace(-6.0, 6.0, 61):
        assert abs(nm.erf(float(x)) - _erf_quadrature(float(x))) <= 1e-14
        assert -1.0 <= nm.erf(float(x)) <= 1.0


def test_bisect_root_linear():
    assert nm.bisect_root(lambda x: x - 2.0, 0.0, 5.0, tol=1e-14) == pytest.approx(2.0, abs=1e-12)


def test_bisect_root_erf():
    r = nm.bisect_root(lambda x: nm.erf(x) - 0.5, 0.0, 2.0, tol=1e-14)
    assert r == pytest.approx(ERFINV_HALF, abs=1e-12)


def test_bisect_root_bracket_error():
    with pytest.raises(nm.BracketError):
        nm.bisect_root(lambda x: x * x + 1.0, -1.0, 1.0)


def test_golden_section_max():
    # value-based search cannot localize the argmax of a flat-topped
    # quadratic beyond sqrt(eps); the value itself is machine-exact
    x, v = nm.golden_section_max(lambda t: -(t - 0.3) ** 2 + 2.0, 0.0, 1.0, tol=1e-12)
    assert x == pytest.approx(0.3, abs=5e-8)
    assert v == pytest.approx(2.0, abs=1e-14)


def test_gauss_expectation_normalization_and_moment():
    q = nm.QuadratureSpec()
    assert nm.gauss_expectation(lambda x: np.ones_like(x), 2.0, q) == pytest.approx(1.0, abs=1e-12)
    assert nm.gauss_expectation(lambda x: x * x, 3.0, q) == pytest.approx(3.0, rel=1e-12)


def test_gauss_expectation_kinked():
    q = nm.QuadratureSpec()
    val = nm.gauss_expectation(lambda x: np.maximum(0.0, 1.0 - x * x), 1.0, q, kinks=(-1.0, 1.0))
    assert val == pytest.approx(CLIP_PARABOLA_MEAN, abs=1e-11)


@given(scale=st.floats(0.1, 4.0))
@settings(max_examples=20, deadline=None)
def test_gauss_expectation_odd_function(scale):
    q = nm.QuadratureSpec()
    v = nm.gauss_expectation(lambda x: x**3 + np.sin(x), scale, q, kinks=(-0.5, 0.5))
    assert abs(v) <= 1e-9


def test_gauss_expectation_nonconvergence():
    q = nm.QuadratureSpec(abs_tol=1e-14)
    with pytest.raises(nm.NonConvergenceError):
        nm.gauss_expectation(lambda x: np.sign(np.sin(503.0 * x)), 1.0, q, kinks=(0.3,))


def test_mixture_validation():
    with pytest.raises(ValueError):
        nm.GaussianMixture([(0.6, 0.0, 1.0), (0.5, 0.0, 1.0)])
    with pytest.raises(ValueError):
        nm.GaussianMixture([(-0.1, 0.0, 1.0), (1.1, 0.0, 1.0)])
    with pytest.raises(ValueError):
        nm.mixture_entropy(nm.GaussianMixture([(1.0, 0.0, 0.0)]))


def test_mixture_entropy_single_gaussian():
    for var in (0.25, 1.0, 7.5):
        m = nm.GaussianMixture([(1.0, 1.3, var)])
        assert nm.mixture_entropy(m) == pytest.approx(nm.gaussian_entropy_bits(var), abs=1e-12)
    assert nm.gaussian_entropy_bits(1.0) == pytest.approx(H_UNIT_GAUSSIAN, abs=1e-14)


def test_mixture_entropy_merging_limit():
    m = nm.GaussianMixture([(0.5, 1e-9, 1.0), (0.5, -1e-9, 1.0)])
    assert nm.mixture_entropy(m) == pytest.approx(H_UNIT_GAUSSIAN, abs=1e-10)


def test_mixture_entropy_frozen_two_component():
    m = nm.GaussianMixture([(0.6, 0.0, 1.0), (0.4, 0.0, 4.0)])
    assert nm.mixture_entropy(m) == pytest.approx(H_MIX_06_04, abs=1e-9)


def test_mixture_entropy_adaptive_matches_gauss_hermite():
    m = nm.GaussianMixture([(0.3, -1.0, 0.5), (0.45, 0.2, 1.5), (0.25, 2.0, 0.8)])
    gh = nm.mixture_entropy(m, nm.QuadratureSpec())
    ad = nm.mixture_entropy(m, nm.QuadratureSpec(method="adaptive", abs_tol=1e-10))
    assert gh == pytest.approx(ad, abs=1e-9)


@given(
    w=st.floats(0.05, 0.95),
    mu=st.floats(-3.0, 3.0),
    v1=st.floats(0.05, 5.0),
    v2=st.floats(0.05, 5.0),
)
@settings(max_examples=25, deadline=None)
def test_mixture_entropy_reflection_and_bounds(w, mu, v1, v2):
    m = nm.GaussianMixture([(w, mu, v1), (1.0 - w, -0.7 * mu, v2)])
    h = nm.mixture_entropy(m)
    assert nm.mixture_entropy(m.reflected()) == pytest.approx(h, abs=1e-9)
    assert h >= nm.gaussian_entropy_bits(min(v1, v2)) - 1e-9
    assert h <= nm.gaussian_entropy_bits(m.overall_variance()) + 1e-9


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        nm.QuadratureSpec(method="monte-carlo")
    with pytest.raises(ValueError):
        nm.QuadratureSpec(order=8)
    with pytest.raises(ValueError):
        nm.QuadratureSpec(abs_tol=0.0)
