import math

import pytest

from fdrelay import (
    DiscreteDistribution,
    GaussianInput,
    GaussianMixture,
    McConfig,
    mc_entropy,
    mc_mi_relay_destination,
    mc_mi_source_relay,
    mi_relay_destination,
    mi_source_relay,
    mixture_entropy,
    solve_xth_discrete,
)
from fdrelay.numerics import gaussian_entropy_bits
from fdrelay.validation import run_validation

FAST = McConfig(samples=100_000, seed=11, batches=10)


def test_mc_config_validation():
    with pytest.raises(ValueError):
        McConfig(samples=100)
    with pytest.raises(ValueError):
        McConfig(batches=2)


def test_mc_entropy_unit_gaussian():
    est = mc_entropy(GaussianMixture([(1.0, 0.0, 1.0)]), FAST)
    assert est.within(gaussian_entropy_bits(1.0))
    assert est.stderr < 0.01


def test_mc_entropy_matches_quadrature():
    m = GaussianMixture([(0.6, 0.0, 1.0), (0.4, 0.0, 4.0)])
    est = mc_entropy(m, FAST)
    assert est.within(mixture_entropy(m))


def test_mc_determinism():
    m = GaussianMixture([(0.5, -1.0, 1.0), (0.5, 1.0, 1.0)])
    a = mc_entropy(m, McConfig(samples=50_000, seed=42, batches=10))
    b = mc_entropy(m, McConfig(samples=50_000, seed=42, batches=10))
    assert a.value == b.value and a.stderr == b.stderr
    c = mc_entropy(m, McConfig(samples=50_000, seed=43, batches=10))
    assert c.value != a.value


def test_mc_stderr_scaling():
    m = GaussianMixture([(0.5, -1.0, 1.0), (0.5, 1.0, 1.0)])
    small = mc_entropy(m, McConfig(samples=10_000, seed=5, batches=10))
    big = mc_entropy(m, McConfig(samples=1_000_000, seed=5, batches=10))
    ratio = small.stderr / big.stderr
    assert 5.0 <= ratio <= 20.0  # ~sqrt(100) = 10 within a factor-of-two band


def test_mc_mi_sr_vanishing_interference_state_mode_is_exact():
    # as alpha -> 0 with the matching threshold, every sampled state sees
    # the same AWGN rate, so the estimate is deterministic
    p_s, sr2, alpha = 1.0, 0.5, 1e-12
    x_th = math.sqrt(p_s / alpha)
    est = mc_mi_source_relay(GaussianInput(1.0), x_th, alpha, sr2, FAST, mode="state")
    assert est.value == pytest.approx(0.5 * math.log2(1.0 + p_s / sr2), rel=1e-9)
    assert est.stderr <= 1e-9


def test_mc_mi_sr_zero_threshold():
    d = DiscreteDistribution([0.0, 1.0], [0.5, 0.5])
    est = mc_mi_source_relay(d, 0.0, 1.0, 1.0, FAST, mode="state")
    assert est.value == 0.0


def test_mc_mi_sr_matches_quadrature_three_point():
    d = DiscreteDistribution([0.0, 1.0], [0.5, 0.5])
    t = solve_xth_discrete(d, 1.0, 1.0)
    ref = mi_source_relay(d, t, 1.0, 1.0)
    state = mc_mi_source_relay(d, t, 1.0, 1.0, FAST, mode="state")
    llr = mc_mi_source_relay(d, t, 1.0, 1.0, McConfig(samples=400_000, seed=3, batches=16), mode="llr")
    assert state.within(ref)
    assert llr.within(ref)


def test_mc_mi_rd_matches_quadrature():
    d = DiscreteDistribution([0.0, 0.1, 0.2], [0.4, 0.35, 0.25])
    est = mc_mi_relay_destination(d, 0.0025, FAST)
    assert est.within(mi_relay_destination(d, 0.0025))


def test_validation_suite_passes(fig2_channel):
    rows = run_validation(fig2_channel, McConfig(samples=200_000, seed=7, batches=10))
    assert len(rows) >= 8
    for row in rows:
        assert row.passed, f"{row.name}: z={row.n_sigma:.2f}"
