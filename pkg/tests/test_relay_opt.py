import dataclasses
import math

import numpy as np
import pytest

from fdrelay import (
    DiscreteDistribution,
    GaussianInput,
    NormalizedChannel,
    QuadratureSpec,
    SolverConfig,
    capacity,
    capacity_gaussian_regime,
    check_gaussian_regime,
    hd_capacity,
    ideal_fd_capacity,
    kkt_certificate,
    mi_relay_destination,
    mi_source_relay,
    normalize_scenario,
    solve_discrete_capacity,
    solve_xth_discrete,
)
from fdrelay.relay_opt import amplitude_grid
from tests.conftest import reference_scenario, rng

HALF_LOG2_589 = 4.60106191192  # 0.5 log2(589), frozen


def test_mi_rd_point_mass_is_zero():
    d = DiscreteDistribution([0.0], [1.0])
    assert mi_relay_destination(d, 0.5) == pytest.approx(0.0, abs=1e-9)


def test_mi_rd_gaussian_closed_form():
    assert mi_relay_destination(GaussianInput(2.0), 0.5) == pytest.approx(
        0.5 * math.log2(5.0), rel=1e-12
    )


def test_mi_rd_antipodal_saturates_at_one_bit():
    d = DiscreteDistribution([0.0, 100.0], [0.0, 1.0])
    assert mi_relay_destination(d, 1.0) == pytest.approx(1.0, abs=1e-6)


def test_mi_rd_matches_solver_kernel(fig2_channel, fig2_result):
    from fdrelay.relay_opt import _RdKernel

    dist = fig2_result.dist
    kernel = _RdKernel(dist.amplitudes, fig2_channel.sigma_d_sq, 0.25)
    assert kernel.mi(dist.probs) == pytest.approx(
        mi_relay_destination(dist, fig2_channel.sigma_d_sq), abs=1e-7
    )


def test_regime_test_weak_rd_link():
    ch = NormalizedChannel(p_s=1.0, p_r=1.0, sigma_r_sq=0.01, sigma_d_sq=1e6, alpha=0.1)
    t = check_gaussian_regime(ch)
    assert t.is_gaussian
    assert t.lhs <= t.rhs


def test_regime_test_weak_sr_link():
    ch = NormalizedChannel(p_s=1.0, p_r=1.0, sigma_r_sq=1e6, sigma_d_sq=0.01, alpha=0.1)
    t = check_gaussian_regime(ch)
    assert not t.is_gaussian


def test_regime_test_low_power_relay_scenario():
    # relay power pinned at 25 dBm with a 300 m destination hop: the
    # relay-destination link becomes the bottleneck once the source is
    # strong enough, and stays source-limited when the source is weak
    strong = normalize_scenario(reference_scenario(d_rd=300.0, p_s_dbm=50.0))
    weak = normalize_scenario(reference_scenario(d_rd=300.0, p_s_dbm=20.0))
    assert check_gaussian_regime(strong).is_gaussian
    assert not check_gaussian_regime(weak).is_gaussian


def test_capacity_gaussian_regime_values():
    assert capacity_gaussian_regime(0.0, 1.0) == 0.0
    assert capacity_gaussian_regime(1.0, 1.0) == pytest.approx(0.5)
    assert capacity_gaussian_regime(588.0, 1.0) == pytest.approx(HALF_LOG2_589, rel=1e-10)


def test_capacity_ideal_fd_equal_hops():
    ch = NormalizedChannel(p_s=1.0, p_r=1.0, sigma_r_sq=1.0, sigma_d_sq=1.0, alpha=0.0)
    res = capacity(ch)
    assert res.regime == "ideal_fd"
    assert res.capacity == pytest.approx(0.5)
    assert res.p_transmit == 1.0


def test_capacity_degenerate_powers():
    ch = NormalizedChannel(p_s=0.0, p_r=1.0, sigma_r_sq=1.0, sigma_d_sq=1.0, alpha=0.1)
    assert capacity(ch).capacity == 0.0
    ch = NormalizedChannel(p_s=1.0, p_r=0.0, sigma_r_sq=1.0, sigma_d_sq=1.0, alpha=0.1)
    assert capacity(ch).capacity == 0.0


def test_fig2_solution_structure(fig2_channel, fig2_result):
    res = fig2_result
    assert res.regime == "discrete"
    assert res.converged
    # rates balance and the capacity is their common value
    assert abs(res.mi_sr - res.mi_rd) <= 1e-4
    assert res.capacity == pytest.approx(min(res.mi_sr, res.mi_rd), abs=1e-9)
    # power identity holds at the returned threshold
    t = solve_xth_discrete(res.dist, fig2_channel.alpha, fig2_channel.p_s)
    assert t == pytest.approx(res.x_th, rel=1e-9)
    # second moment within budget
    assert res.dist.second_moment() <= fig2_channel.p_r + 1e-9
    # distribution is a valid symmetric family including the zero symbol
    assert res.dist.amplitudes[0] == 0.0
    assert res.dist.probs.sum() == pytest.approx(1.0, abs=1e-12)


def test_fig2_kkt_certificate(fig2_channel, fig2_result):
    kkt = fig2_result.kkt
    assert kkt is not None
    assert 0.0 < kkt.xi < 1.0
    assert kkt.lambda2 >= 0.0
    assert kkt.stationarity_on_support <= 1e-4
    assert kkt.stationarity_residual <= 1e-4
    rebuilt = kkt_certificate(fig2_result, fig2_channel)
    assert rebuilt.xi == pytest.approx(kkt.xi, abs=1e-9)


def test_gaussian_regime_certificate_is_xi_zero():
    ch = NormalizedChannel(p_s=1.0, p_r=1.0, sigma_r_sq=0.01, sigma_d_sq=100.0, alpha=0.1)
    res = capacity(ch)
    assert res.regime == "gaussian_bottleneck"
    assert kkt_certificate(res, ch).xi == 0.0
    assert res.capacity == pytest.approx(capacity_gaussian_regime(ch.p_r, ch.sigma_d_sq))
    assert res.mi_sr >= res.mi_rd - 1e-9


def test_perturbation_degrades_optimum(fig2_channel, fig2_result):
    res = fig2_result
    dist = res.dist
    # shift 10% of one interior mass point onto its neighbor
    probs = dist.probs.copy()
    j = int(np.argmax(probs[1:])) + 1
    moved = 0.1 * probs[j]
    probs[j] -= moved
    probs[j - 1] += moved
    pert = DiscreteDistribution(dist.amplitudes, probs / probs.sum())
    t = solve_xth_discrete(pert, fig2_channel.alpha, fig2_channel.p_s)
    v = min(
        mi_source_relay(pert, t, fig2_channel.alpha, fig2_channel.sigma_r_sq),
        mi_relay_destination(pert, fig2_channel.sigma_d_sq),
    )
    assert v < res.capacity - 1e-7


def test_random_feasible_dominance(fig2_channel, fig2_result):
    res = fig2_result
    grid = res.diagnostics["grid"]
    quad = QuadratureSpec()
    g = rng(7)
    for _ in range(200):
        k = g.integers(2, 6)
        idx = np.unique(np.concatenate([[0], g.integers(1, grid.size, size=k)]))
        probs = g.dirichlet(np.ones(idx.size))
        second = float(probs @ grid[idx] ** 2)
        if second > fig2_channel.p_r:
            scale = 0.999 * fig2_channel.p_r / second
            probs = probs * scale
            probs[0] += 1.0 - probs.sum()
        dist = DiscreteDistribution(grid[idx], probs)
        t = solve_xth_discrete(dist, fig2_channel.alpha, fig2_channel.p_s)
        v = min(
            mi_source_relay(dist, t, fig2_channel.alpha, fig2_channel.sigma_r_sq, quad),
            mi_relay_destination(dist, fig2_channel.sigma_d_sq, quad),
        )
        assert v <= res.capacity + 1e-6


def test_hd_capacity_basics(fig2_channel):
    hd = hd_capacity(fig2_channel)
    assert hd.converged
    assert abs(hd.mi_sr - hd.mi_rd) <= 1e-4
    assert hd.dist.prob_zero > 0.3
    assert hd.x_th == 0.0
    assert hd.p_transmit == pytest.approx(hd.dist.prob_zero)
    # strictly below the ideal-FD capacity on symmetric strong links
    assert hd.capacity < ideal_fd_capacity(fig2_channel)


def test_large_alpha_matches_hd(fig2_channel):
    ch = normalize_scenario(reference_scenario(si_suppression_db=40.0))
    fd = capacity(ch)
    hd = hd_capacity(ch)
    assert fd.capacity == pytest.approx(hd.capacity, abs=1e-3)


def test_tiny_alpha_matches_ideal():
    ch = normalize_scenario(reference_scenario(si_suppression_db=200.0))
    res = capacity(ch)
    assert res.capacity == pytest.approx(ideal_fd_capacity(ch), abs=1e-3)


def test_capacity_monotone_in_alpha(fig2_channel):
    caps = []
    for supp in (115.0, 130.0, 145.0, 160.0):
        ch = normalize_scenario(reference_scenario(si_suppression_db=supp))
        caps.append(capacity(ch).capacity)
    for lo, hi in zip(caps[:-1], caps[1:]):
        assert hi >= lo - 1e-6


def test_amplitude_grid_rules(fig2_channel):
    cfg = SolverConfig()
    g = amplitude_grid(fig2_channel, cfg)
    assert g[0] == 0.0
    assert g[-1] == pytest.approx(5.0 * math.sqrt(fig2_channel.p_r))
    spacing = g[1] - g[0]
    assert spacing == pytest.approx(3.0 * math.sqrt(fig2_channel.sigma_d_sq), rel=0.1)
    fixed = amplitude_grid(fig2_channel, dataclasses.replace(cfg, grid_points=41))
    assert fixed.size == 41
    fine = amplitude_grid(fig2_channel, cfg, regime_margin=0.01)
    assert fine.size > g.size


def test_explicit_grid_config(fig2_channel):
    res = solve_discrete_capacity(fig2_channel, SolverConfig(grid_points=31))
    assert res.converged
    assert res.diagnostics["grid"].size == 31
