import math

import pytest
from hypothesis import given, strategies as st

from fdrelay import linkbudget as lb
from tests.conftest import reference_scenario

# frozen against a 40-digit evaluation of the path-loss formula
PL_1M = 9.88096121032e-5
PL_300M = 3.65961526308e-12
PL_500M = 7.90476896825e-13
ALPHA_130DB_500M = 0.126505911054


def test_path_loss_free_space_constant():
    assert lb.path_loss_gain(2.4e9, 1.0, 3.0) == pytest.approx(PL_1M, rel=1e-9)
    # the published figure rounds the speed of light; stay within its "~"
    assert lb.path_loss_gain(2.4e9, 1.0, 3.0) == pytest.approx(9.894e-5, rel=2e-3)


def test_path_loss_reference_distances():
    assert lb.path_loss_gain(2.4e9, 300.0, 3.0) == pytest.approx(PL_300M, rel=1e-9)
    assert lb.path_loss_gain(2.4e9, 500.0, 3.0) == pytest.approx(PL_500M, rel=1e-9)


def test_path_loss_domain_errors():
    with pytest.raises(ValueError):
        lb.path_loss_gain(0.0, 1.0, 3.0)
    with pytest.raises(ValueError):
        lb.path_loss_gain(2.4e9, -1.0, 3.0)


@given(
    d=st.floats(1.0, 1e5),
    f=st.floats(1e8, 1e11),
    gamma=st.floats(2.0, 5.0),
)
def test_path_loss_monotone_and_scaling(d, f, gamma):
    g = lb.path_loss_gain(f, d, gamma)
    assert lb.path_loss_gain(f, 2.0 * d, gamma) < g
    assert lb.path_loss_gain(2.0 * f, d, gamma) < g
    assert lb.path_loss_gain(f, 10.0 * d, gamma) == pytest.approx(g * 10.0 ** (-gamma), rel=1e-12)


def test_normalize_reference_scenario():
    s = reference_scenario()
    ch = lb.normalize_scenario(s)
    assert lb.total_noise_watts(s) == pytest.approx(2e-15, rel=1e-12)
    assert ch.p_s == pytest.approx(10 ** ((25 - 30) / 10))
    assert ch.sigma_r_sq == pytest.approx(2e-15 / PL_500M, rel=1e-9)
    assert ch.sigma_d_sq == ch.sigma_r_sq
    assert ch.alpha == pytest.approx(ALPHA_130DB_500M, rel=1e-9)
    assert ch.alpha == pytest.approx(0.1263, rel=2e-3)


def test_normalize_ideal_fd():
    ch = lb.normalize_scenario(reference_scenario(si_suppression_db=math.inf))
    assert ch.alpha == 0.0


def test_normalize_scale_consistency():
    s = reference_scenario()
    # moving the relay so h_SR^2 doubles must halve sigma_r_sq and alpha
    import dataclasses

    d_half = s.d_sr * 2.0 ** (-1.0 / s.gamma)
    s2 = dataclasses.replace(s, d_sr=d_half)
    ch, ch2 = lb.normalize_scenario(s), lb.normalize_scenario(s2)
    assert ch2.sigma_r_sq == pytest.approx(ch.sigma_r_sq / 2.0, rel=1e-12)
    assert ch2.alpha == pytest.approx(ch.alpha / 2.0, rel=1e-12)
    assert ch2.sigma_d_sq == pytest.approx(ch.sigma_d_sq, rel=1e-12)


def test_noise_psd_override():
    import dataclasses

    s = dataclasses.replace(reference_scenario(), noise_psd_rd_dbm_hz=-160.0)
    ch = lb.normalize_scenario(s)
    assert ch.sigma_d_sq == pytest.approx(10.0 * 2e-15 / PL_500M, rel=1e-9)


@given(p=st.floats(-80.0, 60.0))
def test_dbm_round_trip(p):
    assert lb.watts_to_dbm(lb.dbm_to_watts(p)) == pytest.approx(p, abs=1e-12)


def test_rate_to_bps():
    assert lb.rate_to_bps(0.0, 200e3) == 0.0
    assert lb.rate_to_bps(1.0, 200e3) == pytest.approx(400e3)
    with pytest.raises(ValueError):
        lb.rate_to_bps(-1.0, 200e3)


def test_rd_link_ceiling_mbps():
    # relay at 25 dBm, destination 300 m away: the relay-destination link
    # tops out around 1.84 Mbps
    s = reference_scenario(d_rd=300.0)
    ch = lb.normalize_scenario(s)
    c = 0.5 * math.log2(1.0 + ch.p_r / ch.sigma_d_sq)
    mbps = lb.rate_to_bps(c, s.bandwidth) / 1e6
    assert mbps == pytest.approx(1.835800668, rel=1e-8)
    assert abs(mbps - 1.84) <= 0.02


def test_scenario_validation():
    with pytest.raises(ValueError):
        reference_scenario(p_dbm=25.0).__class__(
            d_sr=-1, d_rd=1, f_c=1, gamma=3, bandwidth=1,
            noise_psd_dbm_hz=-170, p_s_dbm=0, p_r_dbm=0, si_suppression_db=100,
        )
    with pytest.raises(ValueError):
        reference_scenario().__class__(
            d_sr=1, d_rd=1, f_c=1, gamma=1.5, bandwidth=1,
            noise_psd_dbm_hz=-170, p_s_dbm=0, p_r_dbm=0, si_suppression_db=100,
        )
