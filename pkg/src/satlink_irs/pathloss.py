"""Link budgets for the satellite hop, terrestrial hops and the IRS-to-user hop."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .specfun import bessel_j_over_power

BOLTZMANN = 1.38e-23
SPEED_OF_LIGHT = 299_792_458.0


def db_to_linear(db):
    return np.power(10.0, np.asarray(db, dtype=float) / 10.0) if np.ndim(db) else 10.0 ** (db / 10.0)


def linear_to_db(lin):
    if np.any(np.asarray(lin) <= 0):
        raise ValueError("linear power must be positive to convert to dB")
    return 10.0 * np.log10(lin) if np.ndim(lin) else 10.0 * math.log10(lin)


def dbm_to_watt(dbm):
    return db_to_linear(np.asarray(dbm, dtype=float) - 30.0) if np.ndim(dbm) else 10.0 ** ((dbm - 30.0) / 10.0)


def watt_to_dbm(w):
    return linear_to_db(w) + 30.0


def wavelength(f_hz: float) -> float:
    return SPEED_OF_LIGHT / f_hz


@dataclass(frozen=True)
class SatHapLink:
    """Satellite to HAP hop.

    Attributes
    ----------
    wavelength_m : float
        Carrier wavelength.
    g_max : float
        Peak satellite antenna gain (linear).
    phi_sh_deg, phi_3db_deg : float
        Off-boresight angle of the HAP and the 3-dB beam angle.
    g_hap : float
        HAP antenna gain (linear).
    d_sh_m : float
        Slant distance.
    """

    wavelength_m: float
    g_max: float
    phi_sh_deg: float
    phi_3db_deg: float
    g_hap: float
    d_sh_m: float
    k_b: float = BOLTZMANN
    t_noise_k: float = 300.0
    b_noise_hz: float = 20e6

    def __post_init__(self):
        for name in ("wavelength_m", "g_max", "phi_3db_deg", "g_hap", "d_sh_m",
                     "k_b", "t_noise_k", "b_noise_hz"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not 0 <= self.phi_sh_deg < 90:
            raise ValueError("phi_sh_deg must lie in [0, 90)")

    @property
    def noise_power_w(self) -> float:
        return self.k_b * self.t_noise_k * self.b_noise_hz


@dataclass(frozen=True)
class TerrestrialLink:
    """dB-additive link: antenna gains minus free-space, rain, gas and other losses."""

    g_tx_db: float
    g_rx_db: float
    f_ghz: float
    d_km: float
    l_rain_db_per_km: float = 0.0
    l_atm_db_per_km: float = 0.0
    l_other_db: float = 0.0

    def __post_init__(self):
        if not self.d_km > 0 or not self.f_ghz > 0:
            raise ValueError("distance and frequency must be positive")
        if min(self.l_rain_db_per_km, self.l_atm_db_per_km, self.l_other_db) < 0:
            raise ValueError("losses must be >= 0")


@dataclass(frozen=True)
class IrsUserLink:
    """Two-ray style IRS-to-user hop from a surface mounted at height ``h_t``."""

    d_m: float
    gt_irs: float
    gr_user: float
    h_t_m: float
    h_r_m: float

    def __post_init__(self):
        for name in ("d_m", "gt_irs", "gr_user", "h_t_m", "h_r_m"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")


def beam_u(phi_sh_deg: float, phi_3db_deg: float) -> float:
    return 2.07123 * math.sin(math.radians(phi_sh_deg)) / math.sin(math.radians(phi_3db_deg))


def satellite_beam_gain(link: SatHapLink) -> float:
    """G_max (J1(u)/(2u) + 36 J3(u)/u^3)^2, equal to G_max at boresight."""
    u = beam_u(link.phi_sh_deg, link.phi_3db_deg)
    pattern = 0.5 * bessel_j_over_power(1, u) + 36.0 * bessel_j_over_power(3, u)
    return link.g_max * pattern * pattern


def pl_sat_hap(link: SatHapLink) -> float:
    """Amplitude factor lambda sqrt(G_S G_H) / (4 pi d sqrt(k T B)).

    Its square is the received SNR per watt of transmit power.
    """
    gs = satellite_beam_gain(link)
    return (link.wavelength_m * math.sqrt(gs * link.g_hap)
            / (4.0 * math.pi * link.d_sh_m * math.sqrt(link.noise_power_w)))


def fspl_db(f_ghz, d_km):
    return 92.45 + 20.0 * np.log10(f_ghz) + 20.0 * np.log10(d_km)


def pl_terrestrial_db(link: TerrestrialLink) -> float:
    """Net link gain in dB (negative when losses dominate)."""
    d = link.d_km
    return float(link.g_tx_db + link.g_rx_db - fspl_db(link.f_ghz, d)
                 - link.l_rain_db_per_km * d - link.l_atm_db_per_km * d - link.l_other_db)


def pl_irs_user_db(link: IrsUserLink) -> float:
    """Net IRS-to-user gain in dB.

    The loss 40 log d - 10 log Gt - 10 log Gr - 20 log h_t - 20 log h_r is
    returned with its sign flipped, so a lossy link gives a negative number.
    """
    loss = (40.0 * math.log10(link.d_m) - 10.0 * math.log10(link.gt_irs)
            - 10.0 * math.log10(link.gr_user) - 20.0 * math.log10(link.h_t_m)
            - 20.0 * math.log10(link.h_r_m))
    return -loss


def average_snr(transmit_power_dbm, link_gain: float = 1.0, noise_power_w: float = 1e-3):
    """Mean SNR P_t * link_gain / noise_power.

    ``link_gain`` is the product of the linear power factors of the hop(s)
    and scales the mean channel power; the fading laws stay normalised.
    """
    if link_gain <= 0 or noise_power_w <= 0:
        raise ValueError("link gain and noise power must be positive linear values")
    return dbm_to_watt(transmit_power_dbm) * link_gain / noise_power_w
