"""Monte-Carlo estimates of outage, SER and ergodic rate.

The SNR constructions are the exact ones (sums of element amplitude
products with perfect phase alignment), not the Gaussian approximation
used by :mod:`satlink_irs.analytic`.  A ``channel="clt"`` option samples
the Gaussian model instead, which isolates approximation error from
Monte-Carlo error.

Every batch gets its own child of ``SeedSequence(seed)`` so results do not
depend on batch scheduling or thread count.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channels import (NakagamiParams, RicianParams, ShadowedRicianParams, clt_moments_sm1,
                       clt_moments_sm2, sample_nakagami, sample_rician, sample_sr)
from .modulation import ModScheme, conditional_sep, constellation_points

MODES = ("snr_only", "semi_analytic_ser", "symbol_level_ser")
CHANNELS = ("exact", "clt")


class InsufficientEventsWarning(RuntimeWarning):
    """Fewer than 100 expected events; the estimate is noisy."""


@dataclass(frozen=True)
class McConfig:
    trials: int = 1_000_000
    seed: int = 20240611
    batch_size: int = 100_000
    mode: str = "snr_only"
    channel: str = "exact"
    threads: int = 1

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.channel not in CHANNELS:
            raise ValueError(f"channel must be one of {CHANNELS}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def batches(self) -> list[int]:
        full, rem = divmod(self.trials, self.batch_size)
        return [self.batch_size] * full + ([rem] if rem else [])


@dataclass(frozen=True)
class McResult:
    estimate: float
    std_error: float
    trials_used: int
    ci_low: float = float("nan")
    ci_high: float = float("nan")

    def z_score(self, reference: float) -> float:
        """(reference - estimate) / std_error, inf when the spread is zero and they differ."""
        if self.std_error > 0:
            return (reference - self.estimate) / self.std_error
        return 0.0 if reference == self.estimate else math.inf


# ---------------------------------------------------------------------------
# channel descriptions


@dataclass(frozen=True)
class Sm1Channel:
    """Satellite -> IRS -> user, gamma = gamma_bar (sum alpha_i beta_i)^2."""

    rician: RicianParams
    sr: ShadowedRicianParams
    n_elements: int
    gamma_bar: float

    def clt(self):
        return clt_moments_sm1(self.rician, self.sr, self.n_elements)


@dataclass(frozen=True)
class Sm2Channel:
    """Rician satellite hop and SR x Nakagami cascaded hop, gamma = min of the two."""

    K: float
    gamma_bar_s: float
    sr: ShadowedRicianParams
    nakagami: NakagamiParams
    n_elements: int
    gamma_bar_u: float

    def clt(self):
        return clt_moments_sm2(self.sr, self.nakagami, self.n_elements)


def sample_amplitude_sum_sm1(ch: Sm1Channel, rng: np.random.Generator, count: int,
                             channel: str = "exact") -> np.ndarray:
    if channel == "clt":
        c = ch.clt()
        return c.mu + c.sigma * rng.standard_normal(count)
    n = ch.n_elements
    a = sample_rician(ch.rician, rng, (count, n))
    b = sample_sr(ch.sr, rng, (count, n))
    return (a * b).sum(axis=1)


def sample_amplitude_sum_sm2(ch: Sm2Channel, rng: np.random.Generator, count: int,
                             channel: str = "exact") -> np.ndarray:
    if channel == "clt":
        c = ch.clt()
        return c.mu + c.sigma * rng.standard_normal(count)
    n = ch.n_elements
    lam = sample_sr(ch.sr, rng, (count, n))
    kap = sample_nakagami(ch.nakagami, rng, (count, n))
    return (lam * kap).sum(axis=1)


def sample_snr_sm1(ch: Sm1Channel, rng: np.random.Generator, count: int = 1,
                   channel: str = "exact") -> np.ndarray:
    """gamma_bar (sum_i alpha_i beta_i)^2 for ``count`` independent channel draws."""
    z = sample_amplitude_sum_sm1(ch, rng, count, channel)
    return ch.gamma_bar * z * z


def sample_snr_sm2(ch: Sm2Channel, rng: np.random.Generator, count: int = 1,
                   channel: str = "exact"):
    """Return (gamma_s, gamma_u, min(gamma_s, gamma_u))."""
    hs = sample_rician(RicianParams(ch.K), rng, count)
    g_s = ch.gamma_bar_s * hs * hs
    z = sample_amplitude_sum_sm2(ch, rng, count, channel)
    g_u = ch.gamma_bar_u * z * z
    return g_s, g_u, np.minimum(g_s, g_u)


def sample_snr(ch, rng, count, channel="exact") -> np.ndarray:
    if isinstance(ch, Sm1Channel):
        return sample_snr_sm1(ch, rng, count, channel)
    if isinstance(ch, Sm2Channel):
        return sample_snr_sm2(ch, rng, count, channel)[2]
    raise TypeError(f"unknown channel description {type(ch).__name__}")


# ---------------------------------------------------------------------------
# batch engine


def _run(cfg: McConfig, batch_fn):
    """Apply ``batch_fn(rng, n) -> array of sums`` to each batch and merge in batch order."""
    sizes = cfg.batches()
    seeds = np.random.SeedSequence(cfg.seed).spawn(len(sizes))

    def one(i):
        return np.asarray(batch_fn(np.random.Generator(np.random.PCG64(seeds[i])), sizes[i]),
                          dtype=float)

    if cfg.threads > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(cfg.threads) as ex:
            parts = list(ex.map(one, range(len(sizes))))
    else:
        parts = [one(i) for i in range(len(sizes))]
    stacked = np.vstack([np.atleast_1d(p) for p in parts])
    # exact-rounding column sums keep 1e8-trial runs free of accumulation drift
    return np.array([math.fsum(col) for col in stacked.T]), sum(sizes)


def wilson_interval(k: float, n: int, z: float = 1.0) -> tuple[float, float, float]:
    """Wilson score centre and interval at ``z`` standard deviations."""
    p = k / n
    den = 1.0 + z * z / n
    centre = (p + z * z / (2 * n)) / den
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / den
    return centre, centre - half, centre + half


def _proportion(k: float, n: int) -> McResult:
    p = k / n
    _, lo, hi = wilson_interval(k, n)
    # Wilson half-width at z=1 doubles as the standard error; it stays positive at p = 0
    se = 0.5 * (hi - lo)
    return McResult(p, se, n, lo, hi)


def _mean(s1: float, s2: float, n: int) -> McResult:
    m = s1 / n
    var = max(s2 / n - m * m, 0.0) * n / max(n - 1, 1)
    se = math.sqrt(var / n)
    return McResult(m, se, n, m - se, m + se)


def _warn_events(expected: float, what: str):
    if expected < 100:
        warnings.warn(f"only {expected:.0f} expected {what} events", InsufficientEventsWarning,
                      stacklevel=3)


def mc_outage(ch, g_th: float, cfg: McConfig) -> McResult:
    """Fraction of channel draws with SNR below ``g_th``."""
    if g_th < 0:
        raise ValueError("threshold must be >= 0")

    def batch(rng, n):
        return [np.count_nonzero(sample_snr(ch, rng, n, cfg.channel) < g_th)]

    (k,), n = _run(cfg, batch)
    res = _proportion(k, n)
    _warn_events(k if k else res.ci_high * n, "outage")
    return res


def mc_outage_curve(ch, g_th: float, gamma_scales, cfg: McConfig) -> list[McResult]:
    """Outage at several mean-SNR multiples from one set of channel draws.

    The SNR is linear in its mean, so the draws at scale 1 serve every point
    (common random numbers); each estimate on its own is an ordinary MC
    estimate.
    """
    scales = np.asarray(gamma_scales, dtype=float)

    def batch(rng, n):
        g = sample_snr(ch, rng, n, cfg.channel)
        return [np.count_nonzero(g * s < g_th) for s in scales]

    ks, n = _run(cfg, batch)
    return [_proportion(k, n) for k in ks]


def _awgn_symbol_errors(points: np.ndarray, snr: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    from scipy.spatial import cKDTree

    idx = rng.integers(0, len(points), snr.size)
    sig = np.sqrt(0.5 / snr)
    rx = points[idx] + sig * (rng.standard_normal(snr.size) + 1j * rng.standard_normal(snr.size))
    tree = cKDTree(np.column_stack([points.real, points.imag]))
    _, det = tree.query(np.column_stack([rx.real, rx.imag]))
    return det != idx


def mc_sep_awgn(scheme: ModScheme, g: float, cfg: McConfig) -> McResult:
    """Symbol error rate of ``scheme`` at a fixed SNR by transmit/detect simulation."""
    pts = constellation_points(scheme)

    def batch(rng, n):
        return [np.count_nonzero(_awgn_symbol_errors(pts, np.full(n, float(g)), rng))]

    (k,), n = _run(cfg, batch)
    res = _proportion(k, n)
    _warn_events(k, "symbol-error")
    return res


def mc_aser(ch, scheme: ModScheme, cfg: McConfig) -> McResult:
    """Average SER over channel draws.

    ``semi_analytic_ser`` (and ``snr_only``) average the conditional SEP
    formula over the sampled SNRs; ``symbol_level_ser`` transmits one random
    symbol per draw and detects it with a nearest-point search.
    """
    if cfg.mode == "symbol_level_ser":
        pts = constellation_points(scheme)

        def batch(rng, n):
            g = sample_snr(ch, rng, n, cfg.channel)
            return [np.count_nonzero(_awgn_symbol_errors(pts, np.maximum(g, 1e-300), rng))]

        (k,), n = _run(cfg, batch)
        res = _proportion(k, n)
        _warn_events(k, "symbol-error")
        return res

    def batch(rng, n):
        p = conditional_sep(scheme, sample_snr(ch, rng, n, cfg.channel))
        return [p.sum(), (p * p).sum()]

    (s1, s2), n = _run(cfg, batch)
    return _mean(s1, s2, n)


def mc_aser_curve(ch, scheme: ModScheme, gamma_scales, cfg: McConfig) -> list[McResult]:
    """Semi-analytic ASER at several mean-SNR multiples from shared draws."""
    scales = np.asarray(gamma_scales, dtype=float)

    def batch(rng, n):
        g = sample_snr(ch, rng, n, cfg.channel)
        out = []
        for s in scales:
            p = conditional_sep(scheme, g * s)
            out += [p.sum(), (p * p).sum()]
        return out

    sums, n = _run(cfg, batch)
    return [_mean(sums[2 * i], sums[2 * i + 1], n) for i in range(len(scales))]


def mc_ergodic_rate(ch, cfg: McConfig) -> McResult:
    """Sample mean of log2(1 + gamma)/2."""

    def batch(rng, n):
        r = 0.5 * np.log2(1.0 + sample_snr(ch, rng, n, cfg.channel))
        return [r.sum(), (r * r).sum()]

    (s1, s2), n = _run(cfg, batch)
    return _mean(s1, s2, n)


def ks_distance(samples, cdf) -> float:
    """Two-sided Kolmogorov-Smirnov distance between the sample ECDF and ``cdf``."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    f = np.asarray(cdf(x), dtype=float)
    i = np.arange(1, n + 1)
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


def mc_rate_curve(ch, gamma_scales, cfg: McConfig) -> list[McResult]:
    """Ergodic rate at several mean-SNR multiples from shared draws."""
    scales = np.asarray(gamma_scales, dtype=float)

    def batch(rng, n):
        g = sample_snr(ch, rng, n, cfg.channel)
        out = []
        for s in scales:
            r = 0.5 * np.log2(1.0 + g * s)
            out += [r.sum(), (r * r).sum()]
        return out

    sums, n = _run(cfg, batch)
    return [_mean(sums[2 * i], sums[2 * i + 1], n) for i in range(len(scales))]
