import numpy as np
import pytest

from fdrelay import LinkScenario, SolverConfig, capacity, normalize_scenario


def reference_scenario(
    si_suppression_db=130.0,
    p_dbm=25.0,
    d_rd=500.0,
    p_s_dbm=None,
) -> LinkScenario:
    """Deployment used throughout the numerical experiments: 2.4 GHz,
    200 kHz, -170 dBm/Hz noise, path-loss exponent 3, 500 m source-relay
    hop."""
    return LinkScenario(
        d_sr=500.0,
        d_rd=d_rd,
        f_c=2.4e9,
        gamma=3.0,
        bandwidth=200e3,
        noise_psd_dbm_hz=-170.0,
        p_s_dbm=p_s_dbm if p_s_dbm is not None else p_dbm,
        p_r_dbm=p_dbm,
        si_suppression_db=si_suppression_db,
    )


@pytest.fixture(scope="session")
def fig2_scenario():
    return reference_scenario()


@pytest.fixture(scope="session")
def fig2_channel(fig2_scenario):
    return normalize_scenario(fig2_scenario)


@pytest.fixture(scope="session")
def fig2_result(fig2_channel):
    return capacity(fig2_channel, SolverConfig())


def rng(seed=0):
    return np.random.Generator(np.random.Philox(seed))
