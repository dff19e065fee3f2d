"""Special functions used by the fading, outage, SER and rate expressions.

Only ``math`` and ``numpy`` are used.  Every routine accepts numpy arrays for
its continuous argument and evaluates series in a vectorised loop; products
that overflow easily (Poisson weights, incomplete-gamma prefactors) are
carried in log space.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .quadrature import quad

__all__ = [
    "SeriesControl", "SpecialFunctionError", "ConvergenceError", "TruncationWarning",
    "lgamma", "loggamma_complex", "gaussian_q", "erfc",
    "bessel_i", "bessel_i_scaled", "bessel_j", "bessel_j_over_power",
    "gammainc_lower", "gammainc_upper", "gammainc_pq", "upper_gamma", "lower_gamma",
    "gammaincc_ladder", "gammainc_ladder",
    "poisson_logpmf", "poisson_weights",
    "marcum_q", "marcum_p",
    "hyp1f1", "hyp2f1", "betainc", "betainc_pair",
    "meijer_g_lemma6", "meijer_g_lemma6_many",
]

_FPMIN = 1e-300
_EPS = 1e-16


class SpecialFunctionError(ArithmeticError):
    """Base class for evaluation failures inside this module."""


class ConvergenceError(SpecialFunctionError):
    """A series, continued fraction or dual-path check failed to converge."""


class TruncationWarning(RuntimeWarning):
    """Emitted when a truncated series leaves more than ``rel_tol`` behind."""


@dataclass(frozen=True)
class SeriesControl:
    """Truncation settings shared by every series evaluator.

    Attributes
    ----------
    max_terms : int
        Hard cap on terms for the hypergeometric series.
    rel_tol : float
        Relative tolerance for series tails.
    k1_max : int
        Last index of the Poisson-weighted incomplete-gamma series in the
        cascaded-link CDF.
    l_max : int
        Last index of the Poisson(K) series of the Rician CDF.
    adaptive : bool
        When true, evaluators replace the fixed ``[0, k1_max]`` and
        ``[0, l_max]`` ranges by a window wide enough to hold all but
        ``rel_tol`` of the Poisson mass.
    window_sigmas : float
        Half-width of the adaptive window in Poisson standard deviations.
    """

    max_terms: int = 500
    rel_tol: float = 1e-12
    k1_max: int = 150
    l_max: int = 20
    adaptive: bool = True
    window_sigmas: float = 10.0

    def __post_init__(self):
        if self.max_terms < 1:
            raise ValueError("max_terms must be >= 1")
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.k1_max < 0 or self.l_max < 0:
            raise ValueError("truncation indices must be non-negative")
        if self.window_sigmas <= 0:
            raise ValueError("window_sigmas must be positive")

    def poisson_window(self, lam: float, fixed_max: int | None = None) -> tuple[int, int]:
        """Index range ``[lo, hi]`` used for a Poisson(lam) weighted series."""
        if not self.adaptive:
            return 0, int(self.k1_max if fixed_max is None else fixed_max)
        half = self.window_sigmas * math.sqrt(max(lam, 0.0)) + 2.0 * self.window_sigmas
        lo = max(0, int(math.floor(lam - half)))
        hi = int(math.ceil(lam + half))
        return lo, hi


_lgamma_vec = np.vectorize(math.lgamma, otypes=[float])
_erfc_vec = np.vectorize(math.erfc, otypes=[float])


def lgamma(x):
    """Natural log of the gamma function for real positive arguments."""
    if np.ndim(x) == 0:
        return math.lgamma(float(x))
    return _lgamma_vec(np.asarray(x, dtype=float))


def erfc(x):
    if np.ndim(x) == 0:
        return math.erfc(float(x))
    return _erfc_vec(np.asarray(x, dtype=float))


def gaussian_q(x):
    """Gaussian tail probability Q(x) = erfc(x/sqrt(2))/2."""
    if np.ndim(x) == 0:
        return 0.5 * math.erfc(float(x) / math.sqrt(2.0))
    return 0.5 * _erfc_vec(np.asarray(x, dtype=float) / math.sqrt(2.0))


# Lanczos approximation, g = 7, n = 9
_LANCZOS_G = 7.0
_LANCZOS_C = (
    0.99999999999980993, 676.5203681218851, -1259.1392167224028,
    771.32342877765313, -176.61502916214059, 12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
)


def loggamma_complex(z):
    """log Gamma(z) for complex z (branch not normalised; safe under exp)."""
    z = np.asarray(z, dtype=complex)
    refl = z.real < 0.5
    w = np.where(refl, 1.0 - z, z) - 1.0
    acc = np.full(w.shape, _LANCZOS_C[0], dtype=complex)
    for i in range(1, len(_LANCZOS_C)):
        acc = acc + _LANCZOS_C[i] / (w + i)
    t = w + _LANCZOS_G + 0.5
    lg = 0.5 * math.log(2.0 * math.pi) + (w + 0.5) * np.log(t) - t + np.log(acc)
    if np.any(refl):
        lr = math.log(math.pi) - np.log(np.sin(math.pi * z)) - lg
        lg = np.where(refl, lr, lg)
    return lg


# ----------------------------------------------------------------------------
# Bessel functions


def _check_i_order(order):
    two = 2.0 * order
    if abs(two - round(two)) > 1e-12 or order < -0.5:
        raise ValueError(f"unsupported Bessel I order {order}; need -1/2 or n/2 >= 0")


def bessel_i_scaled(order: float, x):
    """Exponentially scaled modified Bessel function exp(-x) I_order(x)."""
    _check_i_order(order)
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("bessel_i requires x >= 0")
    scalar = x.ndim == 0
    x = np.atleast_1d(x)
    out = np.empty_like(x)
    small = x <= 30.0
    if np.any(small):
        xs = x[small]
        out[small] = _bessel_i_series_scaled(order, xs)
    big = ~small
    if np.any(big):
        xb = x[big]
        mu = 4.0 * order * order
        term = np.ones_like(xb)
        s = np.ones_like(xb)
        prev = np.full_like(xb, np.inf)
        done = np.zeros(xb.shape, dtype=bool)
        for k in range(1, 200):
            term = term * -(mu - (2 * k - 1) ** 2) / (k * 8.0 * xb)
            grow = np.abs(term) > prev
            done |= grow | (term == 0)
            s = np.where(done, s, s + term)
            prev = np.abs(term)
            if np.all(done | (np.abs(term) < _EPS * np.abs(s))):
                break
        out[big] = s / np.sqrt(2.0 * math.pi * xb)
    return float(out[0]) if scalar else out


def _bessel_i_series_scaled(order, x):
    half = 0.5 * x
    with np.errstate(divide="ignore", invalid="ignore"):
        lh = np.log(half)
        # log of the k = 0 term, scaled by exp(-x)
        l0 = order * lh - math.lgamma(order + 1.0) - x
        t = np.exp(l0)
    s = t.copy()
    q = half * half
    for k in range(1, 400):
        t = t * q / (k * (k + order))
        s = s + t
        if np.all(t <= _EPS * s):
            break
    if order == 0:
        s = np.where(x == 0, 1.0, s)
    elif order > 0:
        s = np.where(x == 0, 0.0, s)
    else:
        s = np.where(x == 0, np.inf, s)
    return s


def bessel_i(order: float, x):
    """Modified Bessel function of the first kind I_order(x).

    Parameters
    ----------
    order : float
        -1/2 or any non-negative multiple of 1/2.
    x : array_like
        Non-negative argument.  Values beyond ~713 overflow to ``inf``.
    """
    xs = np.asarray(x, dtype=float)
    sc = bessel_i_scaled(order, xs)
    with np.errstate(over="ignore"):
        val = np.exp(xs) * sc
    return float(val) if np.ndim(val) == 0 else val


def _bessel_j_series(n, x):
    q = -0.25 * x * x
    t = (0.5 * x) ** n / math.factorial(n)
    s = t
    for k in range(1, 200):
        t *= q / (k * (k + n))
        s += t
        if abs(t) <= _EPS * abs(s) and k > 2:
            break
    return s


def _bessel_j_miller(n, x):
    ax = abs(x)
    top = 2 * ((max(n, int(ax)) + 20 + int(math.sqrt(40.0 * max(n, ax)))) // 2)
    vals = np.zeros(top + 2)
    vals[top] = 1e-30
    for j in range(top, 0, -1):
        vals[j - 1] = 2.0 * j / ax * vals[j] - vals[j + 1]
        if abs(vals[j - 1]) > 1e250:
            vals[j - 1:] *= 1e-250
    norm = vals[0] + 2.0 * vals[2:top + 1:2].sum()
    r = vals[n] / norm
    return -r if (x < 0 and n % 2) else r


def _bessel_j_scalar(n, x):
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    if abs(x) <= 12.0:
        return _bessel_j_series(n, x)
    return _bessel_j_miller(n, x)


_bessel_j_vec = np.vectorize(_bessel_j_scalar, otypes=[float])


def bessel_j(order: int, x):
    """Bessel function of the first kind J_order(x) for integer order >= 0."""
    if order < 0 or int(order) != order:
        raise ValueError("bessel_j requires a non-negative integer order")
    n = int(order)
    if np.ndim(x) == 0:
        return _bessel_j_scalar(n, float(x))
    return _bessel_j_vec(n, np.asarray(x, dtype=float))


def bessel_j_over_power(order: int, u):
    """J_order(u) / u**order, finite at u = 0 (limit 1/(2**n n!))."""
    n = int(order)

    def one(v):
        if abs(v) < 1.0:
            q = -0.25 * v * v
            t = 1.0 / (2.0 ** n * math.factorial(n))
            s = t
            for k in range(1, 60):
                t *= q / (k * (k + n))
                s += t
                if abs(t) < _EPS * abs(s):
                    break
            return s
        return _bessel_j_scalar(n, v) / v ** n

    if np.ndim(u) == 0:
        return one(float(u))
    return np.vectorize(one, otypes=[float])(np.asarray(u, dtype=float))


# ----------------------------------------------------------------------------
# Incomplete gamma


def gammainc_pq(a, x, tol: float = 1e-15, max_iter: int = 100_000):
    """Regularised incomplete gamma pair (P(a,x), Q(a,x)).

    Series for the lower function when x < a + 1, Lentz continued fraction
    for the upper function otherwise.  The function computed directly is the
    one that is not close to 1, so both returned values keep full relative
    accuracy.
    """
    a, x = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(x, dtype=float))
    shape = a.shape
    a = a.ravel()
    x = x.ravel()
    if np.any(a <= 0):
        raise ValueError("incomplete gamma requires a > 0")
    if np.any(x < 0):
        raise ValueError("incomplete gamma requires x >= 0")
    P = np.zeros(a.shape)
    Q = np.ones(a.shape)
    inf = np.isinf(x)
    P[inf] = 1.0
    Q[inf] = 0.0
    work = (x > 0) & ~inf
    ser = work & (x < a + 1.0)
    cf = work & ~ser
    if np.any(ser):
        aa, xx = a[ser], x[ser]
        lp = aa * np.log(xx) - xx - lgamma(aa)
        ap = aa.copy()
        d = 1.0 / aa
        s = d.copy()
        for _ in range(max_iter):
            ap += 1.0
            d = d * xx / ap
            s += d
            if np.all(d <= s * tol):
                break
        else:
            raise ConvergenceError("incomplete gamma series did not converge")
        p = np.minimum(np.exp(lp) * s, 1.0)
        P[ser] = p
        Q[ser] = 1.0 - p
    if np.any(cf):
        aa, xx = a[cf], x[cf]
        lp = aa * np.log(xx) - xx - lgamma(aa)
        b = xx + 1.0 - aa
        c = np.full_like(xx, 1.0 / _FPMIN)
        d = 1.0 / b
        h = d.copy()
        for i in range(1, max_iter):
            an = -i * (i - aa)
            b = b + 2.0
            d = an * d + b
            d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
            c = b + an / c
            c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
            d = 1.0 / d
            delta = d * c
            h = h * delta
            if np.all(np.abs(delta - 1.0) <= tol):
                break
        else:
            raise ConvergenceError("incomplete gamma continued fraction did not converge")
        q = np.minimum(np.exp(lp) * h, 1.0)
        Q[cf] = q
        P[cf] = 1.0 - q
    P = P.reshape(shape)
    Q = Q.reshape(shape)
    if shape == ():
        return float(P), float(Q)
    return P, Q


def gammainc_lower(a, x):
    """Regularised lower incomplete gamma P(a, x)."""
    return gammainc_pq(a, x)[0]


def gammainc_upper(a, x):
    """Regularised upper incomplete gamma Q(a, x) = Gamma(a, x)/Gamma(a)."""
    return gammainc_pq(a, x)[1]


def upper_gamma(a, x, regularized: bool = False):
    """Upper incomplete gamma Gamma(a, x), or Q(a, x) if ``regularized``."""
    q = gammainc_upper(a, x)
    if regularized:
        return q
    with np.errstate(over="ignore"):
        return q * np.exp(lgamma(a))


def lower_gamma(a, x, regularized: bool = False):
    """Lower incomplete gamma gamma(a, x), or P(a, x) if ``regularized``."""
    p = gammainc_lower(a, x)
    if regularized:
        return p
    with np.errstate(over="ignore"):
        return p * np.exp(lgamma(a))


def _log_step(s, x):
    # log of x**s e**-x / Gamma(s+1), the increment between consecutive orders
    with np.errstate(divide="ignore"):
        lx = np.log(x)
    return s * lx - x - math.lgamma(s + 1.0)


def gammaincc_ladder(a0: float, n: int, x):
    """Q(a0 + j, x) for j = 0..n-1, shape ``(len(x), n)``.

    Built by the upward recurrence Q(s+1,x) = Q(s,x) + x^s e^-x / Gamma(s+1),
    which only adds positive terms.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((x.size, n))
    q = np.atleast_1d(gammainc_upper(a0, x)).astype(float)
    out[:, 0] = q
    pos = x > 0
    for j in range(1, n):
        s = a0 + j - 1
        inc = np.zeros_like(x)
        inc[pos] = np.exp(_log_step(s, x[pos]))
        q = q + inc
        out[:, j] = q
    return np.minimum(out, 1.0)


def gammainc_ladder(a0: float, n: int, x):
    """P(a0 + j, x) for j = 0..n-1 by downward recurrence from the top order."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty((x.size, n))
    p = np.atleast_1d(gammainc_lower(a0 + n - 1, x)).astype(float)
    out[:, n - 1] = p
    pos = x > 0
    for j in range(n - 2, -1, -1):
        s = a0 + j
        inc = np.zeros_like(x)
        inc[pos] = np.exp(_log_step(s, x[pos]))
        p = p + inc
        out[:, j] = p
    return np.minimum(out, 1.0)


# ----------------------------------------------------------------------------
# Poisson weights and Marcum Q


def poisson_logpmf(k, lam: float):
    k = np.asarray(k, dtype=float)
    if lam == 0.0:
        return np.where(k == 0, 0.0, -np.inf)
    return -lam + k * math.log(lam) - lgamma(k + 1.0)


def poisson_weights(lam: float, lo: int, hi: int):
    """Poisson(lam) probabilities for k = lo..hi and the mass left outside."""
    k = np.arange(lo, hi + 1)
    w = np.exp(poisson_logpmf(k, lam))
    if lam == 0.0:
        outside = 0.0
    else:
        # P(K > hi) = P(hi+1, lam) and P(K < lo) = Q(lo, lam)
        above = gammainc_lower(hi + 1.0, lam)
        below = gammainc_upper(float(lo), lam) if lo > 0 else 0.0
        outside = float(above + below)
    return k, w, outside


def _check_marcum_order(m):
    if m <= 0 or abs(2 * m - round(2 * m)) > 1e-12:
        raise ValueError(f"Marcum Q order must be a positive multiple of 1/2, got {m}")


def _marcum_scalar_a(m, a, x, control):
    lam = 0.5 * a * a
    lo, hi = control.poisson_window(lam)
    k, w, outside = poisson_weights(lam, lo, hi)
    n = hi - lo + 1
    # accumulate without materialising (len(x), n) for long windows
    q_acc = np.zeros_like(x)
    p_acc = np.zeros_like(x)
    chunk = max(1, min(n, 4_000_000 // max(x.size, 1)))
    start = 0
    while start < n:
        stop = min(n, start + chunk)
        qs = gammaincc_ladder(m + lo + start, stop - start, x)
        ps = gammainc_ladder(m + lo + start, stop - start, x)
        q_acc += qs @ w[start:stop]
        p_acc += ps @ w[start:stop]
        start = stop
    if outside > control.rel_tol:
        warnings.warn(f"Marcum-Q window leaves {outside:.2e} of Poisson mass", TruncationWarning,
                      stacklevel=3)
    return q_acc, p_acc


def _marcum_pair(m, a, b, control):
    _check_marcum_order(m)
    control = control or SeriesControl()
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if np.any(a < 0) or np.any(b < 0):
        raise ValueError("Marcum Q requires a, b >= 0")
    shape = np.broadcast(a, b).shape
    if a.ndim == 0:
        x = 0.5 * np.atleast_1d(b).ravel() ** 2
        q, p = _marcum_scalar_a(m, float(a), x, control)
        q = q.reshape(shape)
        p = p.reshape(shape)
    else:
        aa, bb = np.broadcast_arrays(a, b)
        q = np.empty(shape)
        p = np.empty(shape)
        for idx in np.ndindex(shape):
            qq, pp = _marcum_scalar_a(m, float(aa[idx]), np.array([0.5 * bb[idx] ** 2]), control)
            q[idx] = qq[0]
            p[idx] = pp[0]
    # each side is accurate where it is small; take the other as its complement
    q, p = np.where(p < 0.5, 1.0 - p, q), np.where(q < 0.5, 1.0 - q, p)
    q = np.clip(q, 0.0, 1.0)
    p = np.clip(p, 0.0, 1.0)
    if shape == ():
        return float(q), float(p)
    return q, p


def marcum_q(m: float, a, b, control: SeriesControl | None = None):
    """Generalised Marcum Q-function Q_m(a, b).

    Evaluated as the Poisson mixture
    ``sum_k e^{-a^2/2} (a^2/2)^k / k! * Q(m + k, b^2/2)`` over a window that
    holds all but ``control.rel_tol`` of the Poisson mass.
    """
    return _marcum_pair(m, a, b, control)[0]


def marcum_p(m: float, a, b, control: SeriesControl | None = None):
    """Complement 1 - Q_m(a, b), summed directly so small values stay accurate."""
    return _marcum_pair(m, a, b, control)[1]


# ----------------------------------------------------------------------------
# Hypergeometric functions


def _is_nonpos_int(v):
    return v <= 0 and float(v).is_integer()


def _hyp1f1_series(a, b, z, tol, max_terms):
    t = np.ones_like(z)
    s = np.ones_like(z)
    if _is_nonpos_int(a):
        for k in range(int(-a)):
            t = t * (a + k) / (b + k) * z / (k + 1)
            s = s + t
        return s
    for k in range(max_terms):
        ratio = (a + k) / (b + k) * z / (k + 1)
        t = t * ratio
        s = s + t
        if np.all((np.abs(t) <= tol * np.abs(s)) & (np.abs(ratio) < 0.5)):
            return s
    raise ConvergenceError(f"1F1({a};{b};z) did not converge in {max_terms} terms")


def hyp1f1(a: float, b: float, z, max_terms: int | None = None, tol: float = 1e-16):
    """Confluent hypergeometric function 1F1(a; b; z).

    Negative arguments go through Kummer's transformation
    ``1F1(a;b;z) = e^z 1F1(b-a;b;-z)`` so the summed series has no sign
    alternation; terminating series (non-positive integer ``a``) are summed
    directly.
    """
    if _is_nonpos_int(b):
        raise ValueError("1F1 undefined for non-positive integer b")
    max_terms = max_terms or SeriesControl().max_terms
    z = np.asarray(z, dtype=float)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    out = np.empty_like(z)
    neg = z < 0
    if _is_nonpos_int(a):
        out = _hyp1f1_series(a, b, z, tol, max_terms)
    else:
        if np.any(~neg):
            out[~neg] = _hyp1f1_series(a, b, z[~neg], tol, max_terms)
        if np.any(neg):
            zn = z[neg]
            out[neg] = np.exp(zn) * _hyp1f1_series(b - a, b, -zn, tol, max_terms)
    return float(out[0]) if scalar else out


def hyp2f1(a: float, b: float, c: float, z, max_terms: int = 20_000, tol: float = 1e-16):
    """Gauss hypergeometric function 2F1(a, b; c; z) for |z| < 1 by series."""
    if _is_nonpos_int(c):
        raise ValueError("2F1 undefined for non-positive integer c")
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) >= 1):
        raise ValueError("2F1 series requires |z| < 1")
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    t = np.ones_like(z)
    s = np.ones_like(z)
    for k in range(max_terms):
        ratio = (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        t = t * ratio
        s = s + t
        if np.all(t == 0):
            break
        if np.all((np.abs(t) <= tol * np.abs(s)) & (np.abs(ratio) < 1)):
            break
    else:
        raise ConvergenceError(f"2F1 series did not converge in {max_terms} terms (|z| too close to 1)")
    return float(s[0]) if scalar else s


# ----------------------------------------------------------------------------
# Regularised incomplete beta


def _betacf(a, b, x, tol=1e-15, max_iter=100_000):
    qab = a + b
    qap = a + 1.0
    qam = a - 1.0
    c = np.ones_like(x)
    d = 1.0 - qab * x / qap
    d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
    d = 1.0 / d
    h = d.copy()
    for m in range(1, max_iter):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        h = h * d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = np.where(np.abs(d) < _FPMIN, _FPMIN, d)
        c = 1.0 + aa / c
        c = np.where(np.abs(c) < _FPMIN, _FPMIN, c)
        d = 1.0 / d
        delta = d * c
        h = h * delta
        if np.all(np.abs(delta - 1.0) <= tol):
            return h
    raise ConvergenceError("incomplete beta continued fraction did not converge")


def betainc_pair(a, b, x, xc=None):
    """Regularised incomplete beta I_x(a, b) and its complement 1 - I_x(a, b).

    ``xc`` may carry ``1 - x`` computed without cancellation.  Whichever of
    the two values is evaluated by continued fraction is the one on the short
    side of the distribution, so both outputs keep relative accuracy.
    """
    a, b, x = np.broadcast_arrays(*(np.asarray(v, dtype=float) for v in (a, b, x)))
    xc = 1.0 - x if xc is None else np.broadcast_to(np.asarray(xc, dtype=float), x.shape)
    shape = x.shape
    a, b, x, xc = (np.array(v, dtype=float).ravel() for v in (a, b, x, xc))
    if np.any(a <= 0) or np.any(b <= 0):
        raise ValueError("incomplete beta requires a, b > 0")
    if np.any((x < 0) | (x > 1)):
        raise ValueError("incomplete beta requires 0 <= x <= 1")
    I = np.zeros_like(x)
    Ic = np.ones_like(x)
    top = xc <= 0
    I[top] = 1.0
    Ic[top] = 0.0
    mid = (x > 0) & (xc > 0)
    if np.any(mid):
        aa, bb, xx, cc = a[mid], b[mid], x[mid], xc[mid]
        lbt = lgamma(aa + bb) - lgamma(aa) - lgamma(bb) + aa * np.log(xx) + bb * np.log(cc)
        direct = xx < (aa + 1.0) / (aa + bb + 2.0)
        val = np.empty_like(xx)
        comp = np.empty_like(xx)
        if np.any(direct):
            v = np.exp(lbt[direct]) * _betacf(aa[direct], bb[direct], xx[direct]) / aa[direct]
            val[direct] = v
            comp[direct] = 1.0 - v
        sw = ~direct
        if np.any(sw):
            v = np.exp(lbt[sw]) * _betacf(bb[sw], aa[sw], cc[sw]) / bb[sw]
            comp[sw] = v
            val[sw] = 1.0 - v
        I[mid] = np.clip(val, 0.0, 1.0)
        Ic[mid] = np.clip(comp, 0.0, 1.0)
    I = I.reshape(shape)
    Ic = Ic.reshape(shape)
    if shape == ():
        return float(I), float(Ic)
    return I, Ic


def betainc(a, b, x, xc=None):
    """Regularised incomplete beta I_x(a, b)."""
    return betainc_pair(a, b, x, xc)[0]


# ----------------------------------------------------------------------------
# The integral  int_0^inf Gamma(alpha, beta*g) / (1 + g) dg


def _contour_abscissa(beta):
    # keep |beta^{-s}| and the poles at s = 0, 1 balanced on Re s = c
    L = math.log(beta)
    if L < -4.0:
        return min(0.5, 2.0 / -L)
    if L > 2.0:
        return max(0.5, 1.0 - 1.0 / L)
    return 0.5


def _g31_mellin_barnes(beta, alphas, rtol):
    """Regularised integral by the Mellin-Barnes contour of G^{3,1}_{2,3}."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    c = _contour_abscissa(beta)
    lb = math.log(beta)
    lga = lgamma(alphas)
    T = 16.0

    def f(t):
        s = c + 1j * t
        common = (2.0 * loggamma_complex(s) + loggamma_complex(1.0 - s)
                  - loggamma_complex(1.0 + s) - s * lb)
        la = loggamma_complex(s[:, None] + alphas[None, :]) - lga[None, :]
        return np.real(np.exp(common[:, None] + la))

    brk = [0.0]
    w = c / 4.0
    while w < T:
        brk.append(w)
        w *= 2.0
    brk.append(T)
    res = quad(f, 0.0, T, rtol=rtol, atol=0.0, initial=np.array(brk), max_intervals=20000)
    return np.atleast_1d(res.value) / math.pi


def _g31_quadrature(beta, alphas, rtol):
    """Regularised integral by direct quadrature in u = ln(beta*g)."""
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    amax = float(alphas.max())
    amin = float(alphas.min())
    x_hi = amax + 12.0 * math.sqrt(amax) + 60.0
    u_hi = math.log(x_hi)
    u_lo = min(math.log(beta), math.log(max(amin, 1e-3))) - 46.0
    a0 = float(alphas[0])
    ladder = np.allclose(np.diff(alphas), 1.0) if alphas.size > 1 else True

    def f(u):
        x = np.exp(u)
        if ladder:
            q = gammaincc_ladder(a0, alphas.size, x)
        else:
            q = gammainc_upper(alphas[None, :], x[:, None])
        wgt = x / (beta + x)
        return q * wgt[:, None]

    marks = [u_lo, math.log(beta) if u_lo < math.log(beta) < u_hi else u_lo,
             math.log(max(amin, 1e-3)), math.log(amax + 1.0), u_hi]
    brk = np.unique(np.concatenate([np.linspace(u_lo, u_hi, 24), marks]))
    res = quad(f, u_lo, u_hi, rtol=rtol, atol=0.0, initial=brk, max_intervals=20000)
    return np.atleast_1d(res.value)


def meijer_g_lemma6_many(beta: float, alphas, method: str = "both", rtol: float = 1e-11,
                         check_tol: float = 1e-6):
    """Regularised values R(alpha) = int_0^inf Q(alpha, beta g)/(1+g) dg.

    Parameters
    ----------
    beta : float
        Positive scale.
    alphas : array_like
        Orders; evenly spaced unit steps are evaluated by recurrence.
    method : {"both", "contour", "quadrature"}
        ``"both"`` returns the quadrature value after checking that the
        contour integral agrees to ``check_tol``.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    alphas = np.atleast_1d(np.asarray(alphas, dtype=float))
    if np.any(alphas <= 0):
        raise ValueError("alpha must be positive")
    if method == "contour":
        return _g31_mellin_barnes(beta, alphas, rtol)
    if method == "quadrature":
        return _g31_quadrature(beta, alphas, rtol)
    if method != "both":
        raise ValueError(f"unknown method {method!r}")
    ref = _g31_quadrature(beta, alphas, rtol)
    mb = _g31_mellin_barnes(beta, alphas, rtol)
    rel = np.abs(mb - ref) / np.maximum(np.abs(ref), 1e-300)
    if np.any(rel > check_tol):
        i = int(np.argmax(rel))
        raise ConvergenceError(
            f"contour and quadrature disagree for beta={beta:.6g}, alpha={alphas[i]:.6g}: "
            f"{mb[i]:.15g} vs {ref[i]:.15g} (rel {rel[i]:.2e})")
    return ref


def meijer_g_lemma6(beta: float, alpha: float, regularized: bool = False,
                    method: str = "both"):
    """int_0^inf Gamma(alpha, beta*g) / (1 + g) dg.

    Equal to G^{3,1}_{2,3}(beta | 0, 1; 0, 0, alpha).  Both the Mellin-Barnes
    contour and a direct quadrature are evaluated by default; the quadrature
    value is returned and a :class:`ConvergenceError` is raised if the two
    disagree by more than 1e-6.
    """
    r = float(meijer_g_lemma6_many(beta, [alpha], method=method)[0])
    if regularized:
        return r
    return r * math.exp(math.lgamma(alpha))
