"""Outage probability, average SER and ergodic rate for the two relaying models.

SM1: satellite -> IRS on a HAP -> user.  The coherent amplitude sum over N
elements is modelled as Gaussian, so gamma = gbar * Z^2 with
Z ~ N(mu, sigma^2) and

    F(g) = 1 - Q_{1/2}(mu/sigma, sqrt(g/gbar)/sigma)
         = sum_k Pois(k; a^2/2) P(1/2 + k, B g),      B = 1/(2 gbar sigma^2).

SM2: satellite -> decode-and-forward HAP -> terrestrial IRS -> user with
gamma = min(gamma_s, gamma_u); gamma_s is Rician and gamma_u follows the same
Gaussian-sum law as SM1.

Every closed form here has a quadrature twin over the same CDF; the
quadrature routines are the reference values.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import specfun as sf
from .channels import (CltMoments, NakagamiParams, RicianParams, ShadowedRicianParams,
                       clt_moments_sm1, clt_moments_sm2)
from .modulation import ModScheme, conditional_sep_derivative, derivative_kernel
from .quadrature import QuadratureError, quad

LN2 = math.log(2.0)


# ---------------------------------------------------------------------------
# statistics containers


@dataclass(frozen=True)
class Sm1Stats:
    """Gaussian amplitude-sum model and mean SNR of the single-hop IRS link."""

    clt: CltMoments
    gamma_bar: float
    series: sf.SeriesControl = field(default_factory=sf.SeriesControl)

    def __post_init__(self):
        if not self.gamma_bar > 0:
            raise ValueError("gamma_bar must be positive")

    @classmethod
    def from_channels(cls, rician: RicianParams, sr: ShadowedRicianParams, n: int,
                      gamma_bar: float, series: sf.SeriesControl | None = None):
        return cls(clt_moments_sm1(rician, sr, n), gamma_bar, series or sf.SeriesControl())

    @property
    def a(self) -> float:
        return self.clt.ratio

    @property
    def lam(self) -> float:
        return 0.5 * self.clt.ratio ** 2

    @property
    def B(self) -> float:
        return 1.0 / (2.0 * self.gamma_bar * self.clt.sigma ** 2)

    def with_gamma_bar(self, gamma_bar: float) -> "Sm1Stats":
        return Sm1Stats(self.clt, gamma_bar, self.series)


@dataclass(frozen=True)
class Sm2Stats:
    """Rician satellite hop plus Gaussian-sum cascaded hop."""

    K: float
    gamma_bar_s: float
    cascade: CltMoments
    gamma_bar_u: float
    series: sf.SeriesControl = field(default_factory=sf.SeriesControl)

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("K must be >= 0")
        if not (self.gamma_bar_s > 0 and self.gamma_bar_u > 0):
            raise ValueError("mean SNRs must be positive")

    @classmethod
    def from_channels(cls, K: float, gamma_bar_s: float, sr: ShadowedRicianParams,
                      nak: NakagamiParams, n: int, gamma_bar_u: float,
                      series: sf.SeriesControl | None = None):
        return cls(K, gamma_bar_s, clt_moments_sm2(sr, nak, n), gamma_bar_u,
                   series or sf.SeriesControl())

    @property
    def mu_s(self) -> float:
        """LoS amplitude of the unit-power satellite channel."""
        return math.sqrt(self.K / (self.K + 1.0))

    @property
    def sigma_s(self) -> float:
        return math.sqrt(1.0 / (2.0 * (self.K + 1.0)))

    @property
    def omega(self) -> float:
        return (self.K + 1.0) / self.gamma_bar_s

    @property
    def cascade_stats(self) -> Sm1Stats:
        return Sm1Stats(self.cascade, self.gamma_bar_u, self.series)

    def with_power_scale(self, factor: float) -> "Sm2Stats":
        return Sm2Stats(self.K, self.gamma_bar_s * factor, self.cascade,
                        self.gamma_bar_u * factor, self.series)


# ---------------------------------------------------------------------------
# outage / CDFs


def op_sm1(stats: Sm1Stats, g_th):
    """Outage probability 1 - Q_{1/2}(mu/sigma, sqrt(g_th/gbar)/sigma)."""
    g = np.maximum(np.asarray(g_th, dtype=float), 0.0)
    b = np.sqrt(g / stats.gamma_bar) / stats.clt.sigma
    return sf.marcum_p(0.5, stats.a, b, stats.series)


def sf_sm1(stats: Sm1Stats, g):
    g = np.maximum(np.asarray(g, dtype=float), 0.0)
    b = np.sqrt(g / stats.gamma_bar) / stats.clt.sigma
    return sf.marcum_q(0.5, stats.a, b, stats.series)


@dataclass(frozen=True)
class SeriesInfo:
    lo: int
    hi: int
    outside_mass: float
    truncated: bool


def _k_window(stats_like: Sm1Stats, literal: bool):
    ctl = stats_like.series
    lam = stats_like.lam
    if literal or not ctl.adaptive:
        lo, hi = 0, ctl.k1_max
    else:
        lo, hi = ctl.poisson_window(lam)
    k, w, outside = sf.poisson_weights(lam, lo, hi)
    return k, w, outside


def _mixture_parts(g, nu0, n, B, w):
    """sum_k w_k P(nu0+k, B g) and sum_k w_k Q(nu0+k, B g) over a contiguous window."""
    x = B * np.atleast_1d(g).ravel()
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    chunk = max(1, min(n, 2_000_000 // max(x.size, 1)))
    for s in range(0, n, chunk):
        e = min(n, s + chunk)
        p += sf.gammainc_ladder(nu0 + s, e - s, x) @ w[s:e]
        q += sf.gammaincc_ladder(nu0 + s, e - s, x) @ w[s:e]
    return p, q


def cdf_sm1_series(stats: Sm1Stats, g, literal: bool = True, return_info: bool = False):
    """Series CDF  1 - sum_{k<=k1_max} Pois(k) Gamma(1/2+k, B g)/Gamma(1/2+k).

    With ``literal=True`` the sum runs over ``0..series.k1_max`` exactly as
    written and a :class:`TruncationWarning` is issued when the dropped
    Poisson mass exceeds ``series.rel_tol``.  Otherwise the adaptive window
    of ``series`` is used.  The value is assembled as
    ``(1 - sum w) + sum w P`` which equals the truncated formula but keeps
    small CDF values accurate.
    """
    g_arr = np.maximum(np.asarray(g, dtype=float), 0.0)
    k, w, outside = _k_window(stats, literal)
    p, _ = _mixture_parts(g_arr, 0.5 + k[0], len(k), stats.B, w)
    cdf = np.clip(p + outside, 0.0, 1.0)
    truncated = outside > stats.series.rel_tol
    if truncated:
        warnings.warn(f"series CDF truncated at k={k[-1]} leaves {outside:.2e} of the Poisson mass",
                      sf.TruncationWarning, stacklevel=2)
    cdf = cdf.reshape(g_arr.shape)
    out = float(cdf) if cdf.ndim == 0 else cdf
    if return_info:
        return out, SeriesInfo(int(k[0]), int(k[-1]), outside, truncated)
    return out


def sf_sm1_series(stats: Sm1Stats, g, literal: bool = False):
    """Survival sum_k Pois(k) Q(1/2 + k, B g) over the chosen window."""
    g_arr = np.maximum(np.asarray(g, dtype=float), 0.0)
    k, w, _ = _k_window(stats, literal)
    _, q = _mixture_parts(g_arr, 0.5 + k[0], len(k), stats.B, w)
    q = np.clip(q, 0.0, 1.0).reshape(g_arr.shape)
    return float(q) if q.ndim == 0 else q


def _rician_l_terms(stats: Sm2Stats, literal: bool):
    ctl = stats.series
    if literal or not ctl.adaptive:
        hi = ctl.l_max
    else:
        hi = ctl.poisson_window(stats.K)[1]
    l, w, outside = sf.poisson_weights(stats.K, 0, hi)
    # T_n = sum_{l=n}^{hi} Pois(l; K)
    tails = np.cumsum(w[::-1])[::-1]
    return l, w, tails, outside


def _sat_survival_series(stats: Sm2Stats, g, literal: bool):
    """e^{-Omega g} sum_l Pois(l;K) sum_{n<=l} (Omega g)^n/n!  (and its complement)."""
    l, w, tails, outside = _rician_l_terms(stats, literal)
    x = stats.omega * np.atleast_1d(g).ravel()
    # Poisson(x) probabilities for n = 0..L
    with np.errstate(divide="ignore"):
        lx = np.log(x)
    lp = l[None, :] * lx[:, None] - x[:, None] - sf.lgamma(l + 1.0)[None, :]
    lp = np.where(x[:, None] == 0, np.where(l[None, :] == 0, 0.0, -np.inf), lp)
    pois = np.exp(lp)
    surv = pois @ tails
    # complement: (1 - W) + sum_l Pois(l;K) P(l+1, x)
    comp = outside + sf.gammainc_ladder(1.0, len(l), x) @ w
    return surv, comp


def op_sm2(stats: Sm2Stats, g_th):
    """1 - Q_{1/2}(mu_u/sigma_u, sqrt(g/gbar_u)/sigma_u) * Q_1(sqrt(2K), sqrt(2(K+1) g/gbar_s))."""
    g = np.maximum(np.asarray(g_th, dtype=float), 0.0)
    cu = stats.cascade_stats
    b_u = np.sqrt(g / cu.gamma_bar) / cu.clt.sigma
    q_u, p_u = sf._marcum_pair(0.5, cu.a, b_u, stats.series)
    b_s = np.sqrt(2.0 * stats.omega * g)
    q_s, p_s = sf._marcum_pair(1.0, math.sqrt(2.0 * stats.K), b_s, stats.series)
    # F = F_s + S_s F_u avoids 1 - (1 - small)
    out = np.clip(p_s + q_s * p_u, 0.0, 1.0)
    return float(out) if np.ndim(out) == 0 else out


def sf_sm2(stats: Sm2Stats, g):
    g = np.maximum(np.asarray(g, dtype=float), 0.0)
    cu = stats.cascade_stats
    q_u = sf.marcum_q(0.5, cu.a, np.sqrt(g / cu.gamma_bar) / cu.clt.sigma, stats.series)
    q_s = sf.marcum_q(1.0, math.sqrt(2.0 * stats.K), np.sqrt(2.0 * stats.omega * g), stats.series)
    return q_u * q_s


def op_sat_link(stats: Sm2Stats, g_th):
    g = np.maximum(np.asarray(g_th, dtype=float), 0.0)
    return sf.marcum_p(1.0, math.sqrt(2.0 * stats.K), np.sqrt(2.0 * stats.omega * g), stats.series)


def cdf_sm2_series(stats: Sm2Stats, g, literal: bool = True, return_info: bool = False):
    """Series CDF of min(gamma_s, gamma_u).

    ``1 - e^{-Omega g} sum_{l<=l_max} K^l e^{-K}/l! sum_{n<=l} (Omega g)^n/n!
    * sum_{k<=k1_max} Pois(k) Q(1/2+k, B g)``, evaluated as
    ``F_s + S_s F_u`` with each factor summed on its short side.
    """
    g_arr = np.maximum(np.asarray(g, dtype=float), 0.0)
    cu = stats.cascade_stats
    k, w, outside_k = _k_window(cu, literal)
    p_u, q_u = _mixture_parts(g_arr, 0.5 + k[0], len(k), cu.B, w)
    f_u = p_u + outside_k
    s_s, f_s = _sat_survival_series(stats, g_arr, literal)
    out = np.clip(f_s + s_s * f_u, 0.0, 1.0).reshape(g_arr.shape)
    _, _, _, outside_l = _rician_l_terms(stats, literal)
    truncated = max(outside_k, outside_l) > stats.series.rel_tol
    if truncated:
        warnings.warn(f"series CDF truncation leaves {outside_k:.2e} (k) and {outside_l:.2e} (l) "
                      "of Poisson mass", sf.TruncationWarning, stacklevel=2)
    res = float(out) if out.ndim == 0 else out
    if return_info:
        return res, SeriesInfo(int(k[0]), int(k[-1]), max(outside_k, outside_l), truncated)
    return res


def sf_sm2_series(stats: Sm2Stats, g, literal: bool = False):
    g_arr = np.maximum(np.asarray(g, dtype=float), 0.0)
    cu = stats.cascade_stats
    k, w, _ = _k_window(cu, literal)
    _, q_u = _mixture_parts(g_arr, 0.5 + k[0], len(k), cu.B, w)
    s_s, _ = _sat_survival_series(stats, g_arr, literal)
    out = np.clip(s_s * q_u, 0.0, 1.0).reshape(g_arr.shape)
    return float(out) if out.ndim == 0 else out


# ---------------------------------------------------------------------------
# ASER: quadrature reference


def aser_quadrature(scheme: ModScheme, cdf, rtol: float = 1e-9) -> float:
    """-int_0^inf P_s'(e|g) F(g) dg with g = t^2 removing the g^-1/2 endpoint."""
    kern = derivative_kernel(scheme)
    a_min = float(kern.root_a.min())
    t_max = math.sqrt(80.0 / a_min)

    def f(t):
        g = t * t
        safe = np.where(g > 0, g, 1e-300)
        val = -2.0 * t * conditional_sep_derivative(scheme, safe) * np.asarray(cdf(g), dtype=float)
        return np.where(t > 0, val, 0.0)

    brk = np.concatenate([[0.0], t_max * np.logspace(-8, 0, 33)])
    res = quad(f, 0.0, t_max, rtol=rtol, atol=1e-300, initial=brk, max_intervals=20000)
    return max(float(res.value), 0.0)


# ---------------------------------------------------------------------------
# ASER: closed form from the derivative kernel


def _kernel_moment(kern, n: int, shift: float, nu=None, B: float | None = None,
                   tol: float = 1e-16):
    """-int_0^inf P'(g) g^n e^{-shift g} R(g) dg for every nu.

    R is 1 when ``nu`` is None and P(nu, B g) otherwise.  The root terms use
    int g^{mu-1} e^{-beta g} P(nu, B g) dg = Gamma(mu) beta^-mu I_{B/(beta+B)}(nu, mu);
    the 1F1 terms are expanded in powers of g and each power is integrated
    the same way, with I climbing in mu by its positive-increment recurrence.
    """
    scalar = nu is None
    nu_arr = np.array([1.0]) if scalar else np.atleast_1d(np.asarray(nu, dtype=float))
    total = np.zeros(nu_arr.shape)

    # g^{-1/2} e^{-a g} terms
    mu = n + 0.5
    beta = kern.root_a + shift
    base = np.exp(math.lgamma(mu) - mu * np.log(beta))
    if scalar:
        fac = np.ones((1, beta.size))
    else:
        y = B / (beta + B)
        yc = beta / (beta + B)
        fac = sf.betainc_pair(nu_arr[:, None], mu, y[None, :], yc[None, :])[0]
    total -= (fac * (kern.root_c * base)[None, :]).sum(axis=1)

    # e^{-s g} 1F1(1; 3/2; t g) terms
    for d, s, t in zip(kern.hyp_d, kern.hyp_s, kern.hyp_t):
        beta = s + shift
        r = t / beta
        lr = math.log(r)
        # index range where the geometric-like coefficients still matter
        i_cap = 64
        while True:
            ii = np.arange(i_cap, dtype=float)
            lc = (sf.lgamma(n + ii + 1.0) - sf.lgamma(1.5 + ii) + math.lgamma(1.5)
                  + ii * math.log(t) - (n + ii + 1.0) * math.log(beta))
            peak = lc.max()
            tail_ok = lc[-1] - math.log1p(-r) < peak + math.log(tol) and lc[-1] < lc[-2]
            if tail_ok or i_cap > 200_000:
                break
            i_cap *= 2
        keep = lc > peak + math.log(tol) - 5.0
        last = int(np.flatnonzero(keep)[-1]) + 1
        ii = ii[:last]
        coef = np.exp(lc[:last])
        if scalar:
            total -= d * coef.sum()
            continue
        y = B / (beta + B)
        yc = beta / (beta + B)
        mu0 = n + 1.0
        i0 = sf.betainc_pair(nu_arr, mu0, np.full(nu_arr.shape, y), np.full(nu_arr.shape, yc))[0]
        # I_y(nu, mu+1) = I_y(nu, mu) + y^nu (1-y)^mu / (mu B(nu, mu))
        mus = mu0 + ii[:-1]
        linc = (sf.lgamma(nu_arr[None, :] + mus[:, None]) - sf.lgamma(nu_arr)[None, :]
                - sf.lgamma(mus + 1.0)[:, None] + nu_arr[None, :] * math.log(y)
                + mus[:, None] * math.log(yc)) if y > 0 else np.full((mus.size, nu_arr.size), -np.inf)
        inc = np.exp(linc)
        facs = np.vstack([i0[None, :], i0[None, :] + np.cumsum(inc, axis=0)])
        facs = np.minimum(facs, 1.0)
        total -= d * (coef @ facs)
    return float(total[0]) if scalar else total


def sep_at_zero(scheme: ModScheme) -> float:
    """-int P' dg, the value of the SEP formula at zero SNR."""
    return _kernel_moment(derivative_kernel(scheme), 0, 0.0)


def _check_family(scheme: ModScheme, allowed: tuple[str, ...]):
    if scheme.family not in allowed:
        raise ValueError(f"{scheme.name} is not one of {allowed}")


def aser_sm1(stats: Sm1Stats, scheme: ModScheme, literal: bool = False) -> float:
    """Closed-form ASER over the Gaussian-sum CDF, any QAM family."""
    kern = derivative_kernel(scheme)
    k, w, c0 = _k_window(stats, literal)
    vals = _kernel_moment(kern, 0, 0.0, nu=0.5 + k, B=stats.B)
    out = c0 * _kernel_moment(kern, 0, 0.0) + float(w @ vals)
    return max(out, 0.0)


def aser_hqam_sm1(stats: Sm1Stats, scheme: ModScheme, literal: bool = False) -> float:
    _check_family(scheme, ("HQAM",))
    return aser_sm1(stats, scheme, literal)


def aser_rqam_sm1(stats: Sm1Stats, scheme: ModScheme, literal: bool = False) -> float:
    _check_family(scheme, ("RQAM", "SQAM"))
    return aser_sm1(stats, scheme, literal)


def aser_xqam_sm1(stats: Sm1Stats, scheme: ModScheme, literal: bool = False) -> float:
    _check_family(scheme, ("XQAM",))
    return aser_sm1(stats, scheme, literal)


def aser_sm2(stats: Sm2Stats, scheme: ModScheme, literal: bool = False) -> float:
    """Closed-form ASER of the min-SNR link, any QAM family.

    Uses F = F_s + S_s F_u: the satellite term is a Poisson(K) mixture of
    P(l+1, Omega g) and the cross term carries the g^n e^{-Omega g} weights.
    """
    kern = derivative_kernel(scheme)
    p0 = _kernel_moment(kern, 0, 0.0)
    omega = stats.omega
    l, wl, tails, out_l = _rician_l_terms(stats, literal)
    sat = out_l * p0 + float(wl @ _kernel_moment(kern, 0, 0.0, nu=1.0 + l, B=omega))

    cu = stats.cascade_stats
    k, wk, c0 = _k_window(cu, literal)
    cross = 0.0
    for n in range(len(l)):
        weight = tails[n] * math.exp(n * math.log(omega) - math.lgamma(n + 1.0))
        bound = weight * _kernel_moment(_abs_kernel(kern), n, omega)
        if n > 0 and bound < 1e-17 * max(sat + cross, 1e-300):
            break
        vals = _kernel_moment(kern, n, omega, nu=0.5 + k, B=cu.B)
        cross += weight * (c0 * _kernel_moment(kern, n, omega) + float(wk @ vals))
    return max(sat + cross, 0.0)


def _abs_kernel(kern):
    # a kernel whose moments bound those of ``kern`` from above
    return type(kern)(-np.abs(kern.root_c), kern.root_a, -np.abs(kern.hyp_d), kern.hyp_s, kern.hyp_t)


def aser_hqam_sm2(stats: Sm2Stats, scheme: ModScheme, literal: bool = False) -> float:
    _check_family(scheme, ("HQAM",))
    return aser_sm2(stats, scheme, literal)


def aser_rqam_sm2(stats: Sm2Stats, scheme: ModScheme, literal: bool = False) -> float:
    _check_family(scheme, ("RQAM", "SQAM"))
    return aser_sm2(stats, scheme, literal)


def aser_xqam_sm2(stats: Sm2Stats, scheme: ModScheme, literal: bool = False) -> float:
    _check_family(scheme, ("XQAM",))
    return aser_sm2(stats, scheme, literal)


def aser_rician(K: float, gamma_bar: float, scheme: ModScheme,
                series: sf.SeriesControl | None = None) -> float:
    """Closed-form ASER of a single Rician link (satellite hop on its own)."""
    ctl = series or sf.SeriesControl()
    hi = ctl.poisson_window(K)[1]
    l, wl, out_l = sf.poisson_weights(K, 0, hi)
    kern = derivative_kernel(scheme)
    omega = (K + 1.0) / gamma_bar
    return max(out_l * _kernel_moment(kern, 0, 0.0)
               + float(wl @ _kernel_moment(kern, 0, 0.0, nu=1.0 + l, B=omega)), 0.0)


# ---------------------------------------------------------------------------
# ergodic rate


def _rate_quadrature(survival, scale: float, rtol: float = 1e-10) -> float:
    """(1/(2 ln 2)) int_0^inf S(g)/(1+g) dg in u = ln g; ``scale`` ~ typical SNR."""
    u_lo = math.log(scale) - 46.0
    u_hi = math.log(scale) + 12.0
    # push the upper limit until the survival is negligible
    while survival(np.array([math.exp(u_hi)]))[0] > 1e-30 and u_hi < 800:
        u_hi += 4.0

    def f(u):
        g = np.exp(u)
        return np.asarray(survival(g), dtype=float) * g / (1.0 + g)

    brk = np.unique(np.concatenate([np.linspace(u_lo, u_hi, 40), [0.0]]))
    brk = brk[(brk >= u_lo) & (brk <= u_hi)]
    res = quad(f, u_lo, u_hi, rtol=rtol, atol=1e-300, initial=brk, max_intervals=20000)
    return float(res.value) / (2.0 * LN2)


def _sum_power_scale(clt: CltMoments, gamma_bar: float) -> float:
    return gamma_bar * (clt.mu ** 2 + clt.sigma ** 2)


def ergodic_rate_sm1(stats: Sm1Stats, method: str = "contour", literal: bool = False) -> float:
    """Ergodic rate E[log2(1+g)]/2 as a Poisson-weighted sum of the
    G^{3,1}_{2,3} integrals  int Q(1/2+k, B g)/(1+g) dg."""
    k, w, _ = _k_window(stats, literal)
    vals = sf.meijer_g_lemma6_many(stats.B, 0.5 + k, method=method)
    return float(w @ vals) / (2.0 * LN2)


def ergodic_rate_sm1_quadrature(stats: Sm1Stats, literal: bool = False) -> float:
    """Reference rate: quadrature of (1 - F(g))/(1+g) with the series CDF."""
    return _rate_quadrature(lambda g: sf_sm1_series(stats, g, literal),
                            _sum_power_scale(stats.clt, stats.gamma_bar))


def ergodic_rate_rician(K: float, gamma_bar: float, series: sf.SeriesControl | None = None) -> float:
    ctl = series or sf.SeriesControl()
    a = math.sqrt(2.0 * K)
    om = (K + 1.0) / gamma_bar
    return _rate_quadrature(lambda g: sf.marcum_q(1.0, a, np.sqrt(2.0 * om * g), ctl), gamma_bar)


def ergodic_rate_sm2(stats: Sm2Stats, literal: bool = False) -> float:
    """Rate of the min-SNR link by quadrature of the series survival (reference)."""
    scale = min(stats.gamma_bar_s, _sum_power_scale(stats.cascade, stats.gamma_bar_u))
    return _rate_quadrature(lambda g: sf_sm2_series(stats, g, literal), scale)


def ergodic_rate_sm2_links(stats: Sm2Stats) -> tuple[float, float]:
    """Rates of the satellite hop and of the cascaded hop on their own."""
    sat = ergodic_rate_rician(stats.K, stats.gamma_bar_s, stats.series)
    casc = ergodic_rate_sm1(stats.cascade_stats)
    return sat, casc


def meijer_g_power(beta: float, alphas, rho: int, rtol: float = 1e-11):
    """int_0^inf g^{rho-1} Q(alpha, beta g)/(1+g) dg by its Mellin-Barnes contour.

    The integrand of the contour is Gamma(s+alpha) Gamma(rho-s) Gamma(1-rho+s)
    / (s Gamma(alpha)) beta^-s on Re s in (rho-1, rho).
    """
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    c = (rho - 1) + sf._contour_abscissa(beta)
    lb = math.log(beta)
    lga = sf.lgamma(alphas)
    T = 16.0

    def f(t):
        s = c + 1j * t
        common = (sf.loggamma_complex(rho - s) + sf.loggamma_complex(1.0 - rho + s)
                  - np.log(s) - s * lb)
        la = sf.loggamma_complex(s[:, None] + alphas[None, :]) - lga[None, :]
        return np.real(np.exp(common[:, None] + la))

    brk = [0.0]
    wdt = (c - (rho - 1)) / 4.0
    while wdt < T:
        brk.append(wdt)
        wdt *= 2.0
    brk.append(T)
    res = quad(f, 0.0, T, rtol=rtol, atol=0.0, initial=np.array(brk), max_intervals=20000)
    return np.atleast_1d(res.value) / math.pi


@dataclass(frozen=True)
class SeriesRateResult:
    value: float
    converged: bool
    j_terms: int
    max_term: float
    note: str = ""


def ergodic_rate_sm2_series(stats: Sm2Stats, j_max: int = 200, rel_tol: float = 1e-10) -> SeriesRateResult:
    """Best-effort closed form: expand e^{-Omega g} in powers of g.

    S_s S_u = sum_n T_n Omega^n/n! g^n e^{-Omega g} sum_k w_k Q(nu_k, B g); the
    exponential is replaced by sum_j (-Omega g)^j/j! and every power is
    integrated with :func:`meijer_g_power`.  The alternating j-series loses
    all precision once the power integrals grow faster than Omega^j/j!
    shrinks; that case is reported with ``converged=False``.
    """
    omega = stats.omega
    l, _, tails, _ = _rician_l_terms(stats, False)
    cu = stats.cascade_stats
    k, wk, _ = _k_window(cu, False)
    alphas = 0.5 + k
    total = 0.0
    max_term = 0.0
    jt = 0
    for n in range(len(l)):
        wn = tails[n] * math.exp(n * math.log(omega) - math.lgamma(n + 1.0))
        if wn < 1e-300:
            continue
        inner = 0.0
        small = 0
        for j in range(j_max):
            coef = (-1.0) ** j * math.exp(j * math.log(omega) - math.lgamma(j + 1.0))
            try:
                with np.errstate(over="raise", invalid="raise"):
                    term = coef * float(wk @ meijer_g_power(cu.B, alphas, n + j + 1))
            except (QuadratureError, FloatingPointError):
                return SeriesRateResult(float("nan"), False, jt, float("inf"),
                                        "power integral out of floating-point range")
            inner += term
            max_term = max(max_term, abs(wn * term))
            jt = max(jt, j + 1)
            if not np.isfinite(term):
                return SeriesRateResult(float("nan"), False, jt, float("inf"), "overflow in power integrals")
            if max_term > 1e20:
                return SeriesRateResult(float("nan"), False, jt, max_term,
                                        "alternating terms beyond 1e20, no digits left")
            if abs(term) <= rel_tol * abs(inner):
                small += 1
                if small >= 2:
                    break
            else:
                small = 0
        else:
            return SeriesRateResult(float("nan"), False, jt, max_term, "j-series not converged")
        total += wn * inner
    value = total / (2.0 * LN2)
    lost = max_term * 1e-16 / max(abs(total), 1e-300)
    if lost > 1e-3:
        return SeriesRateResult(value, False, jt, max_term,
                                f"cancellation: relative rounding {lost:.1e}")
    return SeriesRateResult(value, True, jt, max_term)
