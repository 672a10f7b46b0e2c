import numpy as np
import pytest

from fdrelay import BernoulliGaussian, DiscreteDistribution, GaussianInput


def test_discrete_requires_zero_symbol():
    with pytest.raises(ValueError):
        DiscreteDistribution([0.5, 1.0], [0.5, 0.5])


def test_discrete_validation():
    with pytest.raises(ValueError):
        DiscreteDistribution([0.0, 1.0, 1.0], [0.4, 0.3, 0.3])
    with pytest.raises(ValueError):
        DiscreteDistribution([0.0, 1.0], [0.6, 0.6])
    with pytest.raises(ValueError):
        DiscreteDistribution([0.0, 1.0], [1.2, -0.2])


def test_discrete_moments_and_probs():
    d = DiscreteDistribution([0.0, 1.0, 2.0], [0.5, 0.3, 0.2])
    assert d.prob_zero == 0.5
    assert d.second_moment() == pytest.approx(0.3 + 0.8)
    assert d.transmit_prob(1.5) == pytest.approx(0.8)
    assert d.transmit_prob(0.0) == 0.0


def test_signed_points_split_pairs():
    d = DiscreteDistribution([0.0, 1.0], [0.4, 0.6])
    pts = dict(d.signed_points())
    assert pts[0.0] == pytest.approx(0.4)
    assert pts[1.0] == pytest.approx(0.3)
    assert pts[-1.0] == pytest.approx(0.3)
    assert sum(p for _, p in d.signed_points()) == pytest.approx(1.0)


def test_pruned_keeps_zero():
    d = DiscreteDistribution([0.0, 1.0, 2.0], [1e-12, 0.5, 0.5 - 1e-12])
    p = d.pruned(1e-9)
    assert p.amplitudes[0] == 0.0
    assert p.probs.sum() == pytest.approx(1.0)
    assert p.amplitudes.size == 3 - 0  # zero survives, tiny positive point dropped
    assert 2.0 in p.amplitudes and 1.0 in p.amplitudes


def test_output_mixture_variances():
    d = DiscreteDistribution([0.0, 1.0], [0.4, 0.6])
    m = d.output_mixture(0.01)
    assert np.all(m.variances == 0.01)
    assert m.weights.sum() == pytest.approx(1.0)
    assert set(np.round(m.means, 9)) == {-1.0, 0.0, 1.0}


def test_bernoulli_gaussian():
    bg = BernoulliGaussian(q=0.25, p_r_used=0.5)
    assert bg.conditional_variance == pytest.approx(2.0)
    m = bg.output_mixture(0.1)
    assert m.weights.tolist() == pytest.approx([0.25, 0.75])
    assert m.variances.tolist() == pytest.approx([2.1, 0.1])
    with pytest.raises(ValueError):
        BernoulliGaussian(q=0.0, p_r_used=0.5)
    with pytest.raises(ValueError):
        BernoulliGaussian(q=1.2, p_r_used=0.5)


def test_gaussian_input():
    assert GaussianInput(2.0).variance == 2.0
    with pytest.raises(ValueError):
        GaussianInput(-1.0)
