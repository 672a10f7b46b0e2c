"""Link-budget layer: physical scenarios -> normalized channel parameters.

Distances, carrier frequency, transmit powers and the self-interference
suppression factor are converted into the normalized source power, relay
power, per-hop noise variances and the self-interference amplification
factor used by the capacity solvers. Per-symbol rates are converted to
bit/s assuming 2 * bandwidth real symbols per second (this convention
reproduces the 1.84 Mbps relay-destination ceiling of the reference
scenario exactly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .numerics import db_to_linear, dbm_to_watts, watts_to_dbm  # noqa: F401 (re-export)

SPEED_OF_LIGHT = 299_792_458.0  # m/s, CODATA


@dataclass(frozen=True)
class LinkScenario:
    """Physical-layer description of the two-hop relay deployment.

    All dB/dBm quantities carry the unit in the field name. si_suppression_db
    may be math.inf for an ideal full-duplex relay. noise_psd_rd_dbm_hz
    optionally overrides the destination-side noise density; by default both
    receivers see the same density.
    """

    d_sr: float
    d_rd: float
    f_c: float
    gamma: float
    bandwidth: float
    noise_psd_dbm_hz: float
    p_s_dbm: float
    p_r_dbm: float
    si_suppression_db: float
    noise_psd_rd_dbm_hz: float | None = None

    def __post_init__(self):
        for name in ("d_sr", "d_rd", "f_c", "bandwidth"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")
        if self.gamma < 2.0:
            raise ValueError("path-loss exponent gamma must be >= 2")
        if math.isnan(self.si_suppression_db):
            raise ValueError("si_suppression_db must be finite or +inf")


@dataclass(frozen=True)
class NormalizedChannel:
    """Normalized model: powers in watts, noise variances normalized by the
    squared link gains, and the self-interference amplification factor
    alpha (alpha = 0 is the ideal FD limit)."""

    p_s: float
    p_r: float
    sigma_r_sq: float
    sigma_d_sq: float
    alpha: float

    def __post_init__(self):
        for name in ("p_s", "p_r", "sigma_r_sq", "sigma_d_sq", "alpha"):
            v = getattr(self, name)
            if v < 0 or math.isnan(v):
                raise ValueError(f"{name} must be >= 0")


def path_loss_gain(f_c: float, d: float, gamma: float) -> float:
    """Linear power gain h^2 = (c / (4 pi f_c))^2 * d^-gamma."""
    if f_c <= 0 or d <= 0:
        raise ValueError("carrier frequency and distance must be positive")
    return (SPEED_OF_LIGHT / (4.0 * math.pi * f_c)) ** 2 * d ** (-gamma)


def normalize_scenario(s: LinkScenario) -> NormalizedChannel:
    """Fold link gains into noise variances and the SI amplification factor."""
    h_sr_sq = path_loss_gain(s.f_c, s.d_sr, s.gamma)
    h_rd_sq = path_loss_gain(s.f_c, s.d_rd, s.gamma)
    noise_r = dbm_to_watts(s.noise_psd_dbm_hz) * s.bandwidth
    psd_rd = s.noise_psd_rd_dbm_hz if s.noise_psd_rd_dbm_hz is not None else s.noise_psd_dbm_hz
    noise_d = dbm_to_watts(psd_rd) * s.bandwidth
    if math.isinf(s.si_suppression_db):
        alpha = 0.0
    else:
        alpha = db_to_linear(-s.si_suppression_db) / h_sr_sq
    return NormalizedChannel(
        p_s=dbm_to_watts(s.p_s_dbm),
        p_r=dbm_to_watts(s.p_r_dbm),
        sigma_r_sq=noise_r / h_sr_sq,
        sigma_d_sq=noise_d / h_rd_sq,
        alpha=alpha,
    )


def total_noise_watts(s: LinkScenario) -> float:
    """Unnormalized receiver noise power over the transmit bandwidth."""
    return dbm_to_watts(s.noise_psd_dbm_hz) * s.bandwidth


def rate_to_bps(c: float, bandwidth: float) -> float:
    """Bits per real symbol -> bits per second at 2 * bandwidth symbols/s."""
    if c < 0:
        raise ValueError("rate must be nonnegative")
    return 2.0 * bandwidth * c
