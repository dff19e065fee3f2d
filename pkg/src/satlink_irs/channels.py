"""Fading statistics: Rician, shadowed-Rician (SR) and Nakagami-m.

Densities and CDFs are for the quantities named in each function: the
Rician routines work on the SNR ``g = gbar*|h|^2``, the SR routines on the
power ``x = |g|^2``, the Nakagami routines on the amplitude.  Moments are
always amplitude moments E[|h|^k].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import specfun as sf


class DegenerateDistributionError(ValueError):
    """The element-product variance vanished, so the Gaussian model is undefined."""


@dataclass(frozen=True)
class RicianParams:
    """Rician fading with factor ``K`` and mean power ``mean_power = E|h|^2``."""

    K: float
    mean_power: float = 1.0

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("Rician K must be >= 0")
        if not self.mean_power > 0:
            raise ValueError("mean_power must be positive")

    @property
    def los_amplitude(self) -> float:
        """LoS amplitude S with S^2 = K/(K+1) * mean_power."""
        return math.sqrt(self.K / (self.K + 1.0) * self.mean_power)

    @property
    def scatter_sigma2(self) -> float:
        """Per-dimension scatter variance, mean_power/(2(K+1))."""
        return self.mean_power / (2.0 * (self.K + 1.0))


@dataclass(frozen=True)
class ShadowedRicianParams:
    """Shadowed-Rician fading, LoS Nakagami(m, omega) plus Rayleigh scatter of power 2b."""

    b: float
    m: float
    omega: float

    def __post_init__(self):
        if not self.b > 0:
            raise ValueError("b must be positive")
        if not self.m > 0:
            raise ValueError("m must be positive")
        if self.omega < 0:
            raise ValueError("omega must be >= 0")

    @property
    def alpha(self) -> float:
        return (2 * self.b * self.m / (2 * self.b * self.m + self.omega)) ** self.m / (2 * self.b)

    @property
    def beta(self) -> float:
        return 1.0 / (2 * self.b)

    @property
    def delta(self) -> float:
        return self.omega / (2 * self.b * (2 * self.b * self.m + self.omega))

    @property
    def K(self) -> float:
        return self.omega / (2 * self.b)

    @property
    def mean_power(self) -> float:
        return 2 * self.b + self.omega


@dataclass(frozen=True)
class NakagamiParams:
    """Nakagami-m amplitude with shape ``m_g`` and spread ``sigma2_g = E|x|^2``."""

    m_g: float
    sigma2_g: float = 1.0

    def __post_init__(self):
        if self.m_g < 0.5:
            raise ValueError("Nakagami m must be >= 0.5")
        if not self.sigma2_g > 0:
            raise ValueError("sigma2_g must be positive")

    @property
    def zeta(self) -> float:
        return self.sigma2_g / self.m_g


@dataclass(frozen=True)
class CltMoments:
    """Mean and standard deviation of a sum of N iid element amplitudes."""

    mu: float
    sigma: float
    n_elements: int

    def __post_init__(self):
        if not self.sigma > 0:
            raise DegenerateDistributionError("sum standard deviation must be positive")
        if self.mu < 0:
            raise ValueError("mean amplitude sum must be >= 0")

    @property
    def ratio(self) -> float:
        """mu / sigma, the noncentrality of the normalised sum."""
        return self.mu / self.sigma


# ---------------------------------------------------------------------------
# Rician


def rician_pdf(g, p: RicianParams, gamma_bar: float | None = None):
    """Density of the SNR ``g`` of a Rician link with mean SNR ``gamma_bar``.

    ``gamma_bar`` defaults to ``p.mean_power``.
    """
    gb = p.mean_power if gamma_bar is None else gamma_bar
    g = np.asarray(g, dtype=float)
    K = p.K
    z = 2.0 * np.sqrt(K * (K + 1.0) * np.maximum(g, 0) / gb)
    # e^{-K} e^{-(K+1)g/gb} I0(z) = e^{z - K - (K+1)g/gb} * ive(z)
    expo = z - K - (K + 1.0) * g / gb
    out = (K + 1.0) / gb * np.exp(expo) * sf.bessel_i_scaled(0, z)
    out = np.where(g < 0, 0.0, out)
    return float(out) if out.ndim == 0 else out


def rician_cdf(g, p: RicianParams, gamma_bar: float | None = None, control=None):
    """1 - Q_1(sqrt(2K), sqrt(2(K+1) g / gamma_bar))."""
    gb = p.mean_power if gamma_bar is None else gamma_bar
    g = np.maximum(np.asarray(g, dtype=float), 0.0)
    b = np.sqrt(2.0 * (p.K + 1.0) * g / gb)
    return sf.marcum_p(1.0, math.sqrt(2.0 * p.K), b, control)


def rician_sf(g, p: RicianParams, gamma_bar: float | None = None, control=None):
    gb = p.mean_power if gamma_bar is None else gamma_bar
    g = np.maximum(np.asarray(g, dtype=float), 0.0)
    b = np.sqrt(2.0 * (p.K + 1.0) * g / gb)
    return sf.marcum_q(1.0, math.sqrt(2.0 * p.K), b, control)


def rician_moment(k: float, p: RicianParams) -> float:
    """E|h|^k = (mean/(K+1))^{k/2} Gamma(1+k/2) 1F1(-k/2; 1; -K)."""
    s2 = p.mean_power / (p.K + 1.0)
    return s2 ** (k / 2.0) * math.gamma(1.0 + k / 2.0) * sf.hyp1f1(-k / 2.0, 1.0, -p.K)


# ---------------------------------------------------------------------------
# Shadowed Rician


def sr_pdf(x, p: ShadowedRicianParams):
    """Density of the SR power ``x``: alpha e^{-beta x} 1F1(m; 1; delta x)."""
    x = np.asarray(x, dtype=float)
    xx = np.maximum(x, 0.0)
    val = p.alpha * np.exp(-p.beta * xx) * sf.hyp1f1(p.m, 1.0, p.delta * xx, max_terms=5000)
    val = np.where(x < 0, 0.0, val)
    return float(val) if val.ndim == 0 else val


def sr_sum_pdf(x, p: ShadowedRicianParams, n: int, as_printed: bool = False):
    """Density of the sum of ``n`` iid SR powers.

    The normalised form carries ``alpha**n``.  With ``as_printed=True`` the
    prefactor is a single ``alpha``, which integrates to ``alpha**(1-n)``
    rather than one for ``n > 1``; it is kept to quantify that defect.
    """
    if n < 1 or int(n) != n:
        raise ValueError("n must be a positive integer")
    n = int(n)
    x = np.asarray(x, dtype=float)
    xx = np.maximum(x, 1e-300)
    pref = math.log(p.alpha) * (1 if as_printed else n) - math.lgamma(n)
    logv = pref + (n - 1) * np.log(xx) - p.beta * xx
    val = np.exp(logv) * sf.hyp1f1(n * p.m, float(n), p.delta * xx, max_terms=20000)
    if n == 1:
        val = np.where(x == 0, p.alpha, val)
    val = np.where(x < 0, 0.0, val)
    return float(val) if val.ndim == 0 else val


def sr_sum_normalization_defect(p: ShadowedRicianParams, n: int) -> float:
    """Integral of the single-alpha sum density minus one (zero when n = 1)."""
    return p.alpha ** (1 - n) - 1.0


def sr_moment(k: float, p: ShadowedRicianParams) -> float:
    """Amplitude moment E|g|^k of the SR channel."""
    b0 = 2 * p.b * p.m / (2 * p.b * p.m + p.omega)
    b1 = p.omega / (2 * p.b * p.m + p.omega)
    return (b0 ** p.m * (2 * p.b) ** (k / 2.0) * math.gamma(k / 2.0 + 1.0)
            * sf.hyp2f1(k / 2.0 + 1.0, p.m, 1.0, b1))


def sr_cdf(x, p: ShadowedRicianParams):
    """CDF of the SR power, by quadrature of the density (reference use only)."""
    from .quadrature import quad

    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.array([quad(lambda t: sr_pdf(t, p), 0.0, xi, rtol=1e-12).value if xi > 0 else 0.0
                    for xi in x])
    return np.clip(out, 0.0, 1.0)


# ---------------------------------------------------------------------------
# Nakagami


def nakagami_pdf(x, p: NakagamiParams):
    """Amplitude density 2 x^{2m-1} / (Gamma(m) zeta^m) exp(-x^2/zeta)."""
    x = np.asarray(x, dtype=float)
    m, z = p.m_g, p.zeta
    xx = np.maximum(x, 1e-300)
    logv = math.log(2.0) + (2 * m - 1) * np.log(xx) - math.lgamma(m) - m * math.log(z) - xx * xx / z
    val = np.where(x <= 0, 0.0, np.exp(logv))
    if m == 0.5:
        val = np.where(x == 0, 2.0 / math.sqrt(math.pi * z), val)
    return float(val) if val.ndim == 0 else val


def nakagami_moment(k: float, p: NakagamiParams) -> float:
    """Gamma(m + k/2)/Gamma(m) * (sigma2/m)^{k/2}."""
    return math.exp(math.lgamma(p.m_g + k / 2.0) - math.lgamma(p.m_g)) * p.zeta ** (k / 2.0)


# ---------------------------------------------------------------------------
# Gaussian model for the coherent sum of N element amplitudes


def _clt(e1: float, e2: float, n: int) -> CltMoments:
    if n < 1:
        raise ValueError("need at least one element")
    var = e2 - e1 * e1
    if not var > 0:
        raise DegenerateDistributionError(f"element-product variance is {var:.3e}")
    return CltMoments(mu=n * e1, sigma=math.sqrt(n * var), n_elements=int(n))


def clt_moments_sm1(rician: RicianParams, sr: ShadowedRicianParams, n: int) -> CltMoments:
    """Moments of sum_i alpha_i beta_i, Rician times SR amplitudes."""
    e1 = rician_moment(1, rician) * sr_moment(1, sr)
    e2 = rician_moment(2, rician) * sr_moment(2, sr)
    return _clt(e1, e2, n)


def clt_moments_sm2(sr: ShadowedRicianParams, nak: NakagamiParams, n: int) -> CltMoments:
    """Moments of sum_i lambda_i kappa_i, SR times Nakagami amplitudes."""
    e1 = sr_moment(1, sr) * nakagami_moment(1, nak)
    e2 = sr_moment(2, sr) * nakagami_moment(2, nak)
    return _clt(e1, e2, n)


# ---------------------------------------------------------------------------
# Samplers


def sample_rician(p: RicianParams, rng: np.random.Generator, count) -> np.ndarray:
    """Rician amplitudes |S + sigma (n1 + j n2)|."""
    s = p.los_amplitude
    sig = math.sqrt(p.scatter_sigma2)
    re = s + sig * rng.standard_normal(count)
    im = sig * rng.standard_normal(count)
    return np.hypot(re, im)


def sample_nakagami(p: NakagamiParams, rng: np.random.Generator, count) -> np.ndarray:
    return np.sqrt(rng.standard_gamma(p.m_g, count) * p.zeta)


def sample_sr(p: ShadowedRicianParams, rng: np.random.Generator, count,
              los_phase: float = 0.0) -> np.ndarray:
    """SR amplitudes |Z e^{j zeta} + A e^{j psi}|.

    Z is Nakagami(m, omega), A e^{j psi} is circular Gaussian with E[A^2] = 2b
    and ``zeta`` is the deterministic LoS phase.
    """
    z = np.sqrt(rng.standard_gamma(p.m, count) * (p.omega / p.m)) if p.omega > 0 \
        else np.zeros(count)
    sb = math.sqrt(p.b)
    re = z * math.cos(los_phase) + sb * rng.standard_normal(count)
    im = z * math.sin(los_phase) + sb * rng.standard_normal(count)
    return np.hypot(re, im)
