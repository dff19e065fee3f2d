"""QAM families over AWGN: parameters, conditional SEP, its derivative, constellations.

Every conditional SEP is a combination of

* single terms   ``c * Q(sqrt(p g))``
* product terms  ``c * Q(sqrt(p g)) * Q(sqrt(q g))``

and every derivative is a combination of the two kernels

* ``c * g**-0.5 * exp(-a g)``
* ``d * exp(-s g) * 1F1(1; 3/2; t g)``

which is the form consumed by the closed-form averaging in :mod:`analytic`.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .specfun import gaussian_q

FAMILIES = ("HQAM", "RQAM", "SQAM", "XQAM")
SUPPORTED = {
    "HQAM": (4, 8, 16, 32, 64, 256, 1024),
    "SQAM": (4, 16, 64, 256, 1024),
    "XQAM": (32, 128, 512),
}

_SQ2PI = math.sqrt(2.0 * math.pi)
_erf_vec = np.vectorize(math.erf, otypes=[float])


class UnsupportedSchemeError(ValueError):
    pass


@dataclass(frozen=True)
class SepTerms:
    singles: tuple[tuple[float, float], ...]
    products: tuple[tuple[float, float, float], ...]


@dataclass(frozen=True)
class DerivativeKernel:
    """P'(g) = sum c g^-1/2 e^{-a g} + sum d e^{-s g} 1F1(1; 3/2; t g)."""

    root_c: np.ndarray
    root_a: np.ndarray
    hyp_d: np.ndarray
    hyp_s: np.ndarray
    hyp_t: np.ndarray


@dataclass(frozen=True)
class ModScheme:
    """A QAM scheme.  Build with :func:`hqam`, :func:`sqam`, :func:`rqam`, :func:`xqam`
    or :func:`parse_scheme`; derived parameters are recomputed from the fields."""

    family: str
    order: int
    # HQAM
    h_a: float = 0.0
    h_b: float = 0.0
    h_c: float = 0.0
    alpha_h: float = 0.0
    # RQAM / SQAM
    m_i: int = 0
    m_q: int = 0
    d_r: float = 1.0
    # XQAM
    m_x: int = 0
    n_x: int = 0
    label: str = field(default="", compare=False)

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise UnsupportedSchemeError(f"unknown family {self.family!r}")

    @property
    def name(self) -> str:
        if self.label:
            return self.label
        if self.family == "RQAM":
            return f"RQAM-{self.m_i}x{self.m_q}"
        return f"{self.family}-{self.order}"

    # RQAM quantities
    @property
    def r1(self) -> float:
        return 1.0 - 1.0 / self.m_i

    @property
    def r2(self) -> float:
        return 1.0 - 1.0 / self.m_q

    @property
    def a_r(self) -> float:
        return math.sqrt(6.0 / ((self.m_i ** 2 - 1) + (self.m_q ** 2 - 1) * self.d_r ** 2))

    @property
    def b_r(self) -> float:
        return self.d_r * self.a_r

    # XQAM quantities
    @property
    def alpha_x(self) -> float:
        return 2.0 / 3.0 * (31.0 * self.m_x * self.n_x / 32.0 - 1.0)

    @property
    def a_n(self) -> float:
        return 4.0 - 2.0 * (self.m_x + self.n_x) / (self.m_x * self.n_x)

    @property
    def k_x(self) -> float:
        mn = self.m_x * self.n_x
        return 4.0 - 4.0 * (self.m_x + self.n_x) / mn + 8.0 / mn

    @property
    def a_x1(self) -> float:
        return (self.m_x - self.n_x) / 2.0

    @property
    def a_x2(self) -> float:
        return (self.m_x - self.n_x) / (self.m_x * self.n_x)

    def a_x3(self, l: int) -> float:
        return (4.0 * l * l + 1.0) / self.alpha_x

    @property
    def l_max(self) -> int:
        """Upper limit of the XQAM l-sum; zero means empty."""
        return (self.m_x - self.n_x) // 4 - 1


# ---------------------------------------------------------------------------
# constructors


def rqam(m_i: int, m_q: int, d_r: float = 1.0) -> ModScheme:
    if m_i < 2 or m_q < 2:
        raise UnsupportedSchemeError("RQAM needs at least two levels per dimension")
    return ModScheme("RQAM", m_i * m_q, m_i=int(m_i), m_q=int(m_q), d_r=float(d_r))


def sqam(order: int) -> ModScheme:
    r = int(round(math.sqrt(order)))
    if r * r != order or order not in SUPPORTED["SQAM"]:
        raise UnsupportedSchemeError(f"unsupported SQAM order {order}")
    return ModScheme("SQAM", order, m_i=r, m_q=r, d_r=1.0)


def xqam(order: int) -> ModScheme:
    if order not in SUPPORTED["XQAM"]:
        raise UnsupportedSchemeError(f"unsupported XQAM order {order}")
    n = int(round(math.log2(order)))
    n_x = 2 ** ((n - 1) // 2)
    return ModScheme("XQAM", order, m_x=2 * n_x, n_x=n_x)


def hqam(order: int) -> ModScheme:
    if order not in SUPPORTED["HQAM"]:
        raise UnsupportedSchemeError(f"unsupported HQAM order {order}")
    h_a, h_b, alpha = _hqam_geometry(order)[1:]
    # the Q^2 corner term counts the same equilateral triangles as H_b
    return ModScheme("HQAM", order, h_a=h_a, h_b=h_b, h_c=h_b, alpha_h=alpha)


_SCHEME_RE = re.compile(r"^\s*(HQAM|SQAM|XQAM|RQAM)[-_ ]?(\d+)(?:x(\d+))?\s*$", re.IGNORECASE)


def parse_scheme(text: str) -> ModScheme:
    """Parse names such as ``HQAM-16``, ``SQAM-64``, ``XQAM-32`` or ``RQAM-8x4``."""
    m = _SCHEME_RE.match(text)
    if not m:
        raise UnsupportedSchemeError(f"cannot parse scheme {text!r}")
    fam = m.group(1).upper()
    if fam == "RQAM":
        if m.group(3) is None:
            raise UnsupportedSchemeError("RQAM needs the form RQAM-<MI>x<MQ>")
        return rqam(int(m.group(2)), int(m.group(3)))
    if m.group(3) is not None:
        raise UnsupportedSchemeError(f"{fam} takes a single order")
    order = int(m.group(2))
    return {"HQAM": hqam, "SQAM": sqam, "XQAM": xqam}[fam](order)


def make_scheme(family: str, order: int) -> ModScheme:
    return parse_scheme(f"{family}-{order}")


# ---------------------------------------------------------------------------
# constellations


@lru_cache(maxsize=None)
def _hqam_geometry(order: int):
    """Minimum-energy M-point subset of the unit-spacing hexagonal lattice.

    Returns the points and (H_a, H_b, alpha_h), where H_a is the mean number
    of nearest neighbours and H_b the mean number of unit equilateral
    triangles a point belongs to.
    """
    r = int(math.sqrt(order)) + 4
    ii, jj = np.meshgrid(np.arange(-2 * r, 2 * r), np.arange(-2 * r, 2 * r), indexing="ij")
    lat = np.column_stack([(ii + 0.5 * jj).ravel(), (jj * math.sqrt(3) / 2).ravel()])
    best = None
    for c in ((0.0, 0.0), (0.5, 0.0), (0.5, math.sqrt(3) / 6)):
        dx = lat[:, 0] - c[0]
        dy = lat[:, 1] - c[1]
        idx = np.lexsort((np.arctan2(dy, dx), np.round(np.hypot(dx, dy), 9)))[:order]
        pts = lat[idx] - lat[idx].mean(axis=0)
        e = float((pts ** 2).sum(axis=1).mean())
        if best is None or e < best[0] - 1e-9:
            best = (e, pts)
    e, pts = best
    diff = pts[:, None, :] - pts[None, :, :]
    adj = (np.abs(np.hypot(diff[..., 0], diff[..., 1]) - 1.0) < 1e-6).astype(np.int64)
    h_a = adj.sum() / order
    tri = np.einsum("ij,jk,ki->i", adj, adj, adj) / 2
    h_b = tri.sum() / order
    return pts, float(h_a), float(h_b), 1.0 / (2.0 * e)


def _xqam_points(m_x: int, n_x: int) -> np.ndarray:
    side = n_x + (m_x - n_x) // 2
    corner = (m_x - n_x) // 4
    pts = []
    for i in range(side):
        for j in range(side):
            if min(i, side - 1 - i) < corner and min(j, side - 1 - j) < corner:
                continue
            pts.append((2 * i - (side - 1), 2 * j - (side - 1)))
    return np.asarray(pts, dtype=float)


def constellation_points(scheme: ModScheme) -> np.ndarray:
    """Complex constellation normalised to unit average energy."""
    if scheme.family == "HQAM":
        p = _hqam_geometry(scheme.order)[0]
        z = p[:, 0] + 1j * p[:, 1]
    elif scheme.family in ("RQAM", "SQAM"):
        i = 2.0 * np.arange(scheme.m_i) - (scheme.m_i - 1)
        q = scheme.d_r * (2.0 * np.arange(scheme.m_q) - (scheme.m_q - 1))
        z = (i[:, None] + 1j * q[None, :]).ravel()
    else:
        p = _xqam_points(scheme.m_x, scheme.n_x)
        z = p[:, 0] + 1j * p[:, 1]
    z = z - z.mean()
    return z / math.sqrt(float(np.mean(np.abs(z) ** 2)))


# ---------------------------------------------------------------------------
# conditional SEP


def sep_terms(scheme: ModScheme) -> SepTerms:
    f = scheme.family
    if f == "HQAM":
        a = scheme.alpha_h
        return SepTerms(
            singles=((scheme.h_a, a),),
            products=((2.0 / 3.0 * scheme.h_c, 2 * a / 3, 2 * a / 3),
                      (-2.0 * scheme.h_b, a, a / 3)),
        )
    if f in ("RQAM", "SQAM"):
        pa, pb = scheme.a_r ** 2, scheme.b_r ** 2
        return SepTerms(
            singles=((2 * scheme.r1, pa), (2 * scheme.r2, pb)),
            products=((-4 * scheme.r1 * scheme.r2, pa, pb),),
        )
    # XQAM with x = sqrt(2 g / alpha_x)
    p0 = 2.0 / scheme.alpha_x
    c = 8.0 / (scheme.m_x * scheme.n_x)
    a1 = scheme.a_x1
    singles = [(scheme.a_n, p0), (c, a1 * a1 * p0)]
    products = [(-c, p0, a1 * a1 * p0), (-scheme.k_x, p0, p0)]
    for l in range(1, scheme.l_max + 1):
        singles.append((c, 4 * l * l * p0))
        products.append((-2 * c, 4 * l * l * p0, p0))
    return SepTerms(tuple(singles), tuple(products))


def conditional_sep(scheme: ModScheme, g):
    """Symbol error probability over AWGN at SNR ``g`` (linear)."""
    g = np.asarray(g, dtype=float)
    if np.any(g < 0):
        raise ValueError("SNR must be >= 0")
    terms = sep_terms(scheme)
    out = np.zeros_like(g)
    for c, p in terms.singles:
        out = out + c * gaussian_q(np.sqrt(p * g))
    for c, p, q in terms.products:
        out = out + c * gaussian_q(np.sqrt(p * g)) * gaussian_q(np.sqrt(q * g))
    out = np.clip(out, 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def derivative_kernel(scheme: ModScheme) -> DerivativeKernel:
    terms = sep_terms(scheme)
    rc, ra, hd, hs, ht = [], [], [], [], []
    for c, p in terms.singles:
        rc.append(-c * math.sqrt(p) / (2 * _SQ2PI))
        ra.append(p / 2)
    for c, p, q in terms.products:
        for u, v in ((p, q), (q, p)):
            rc.append(-c * math.sqrt(u) / (4 * _SQ2PI))
            ra.append(u / 2)
            hd.append(c * math.sqrt(p * q) / (4 * math.pi))
            hs.append((p + q) / 2)
            ht.append(v / 2)
    return DerivativeKernel(*(np.asarray(v, dtype=float) for v in (rc, ra, hd, hs, ht)))


def hyp1f1_erf_scaled(x):
    """exp(-x) 1F1(1; 3/2; x) = sqrt(pi) erf(sqrt(x)) / (2 sqrt(x))."""
    x = np.asarray(x, dtype=float)
    r = np.sqrt(np.maximum(x, 0.0))
    with np.errstate(invalid="ignore", divide="ignore"):
        val = math.sqrt(math.pi) * _erf_vec(r) / (2.0 * r)
    return np.where(r < 1e-8, 1.0 - 2.0 * x / 3.0, val)


def conditional_sep_derivative(scheme: ModScheme, g):
    """dP_s(e|g)/dg for g > 0 (diverges like g^-1/2 at the origin).

    Evaluated term by term with the chain rule and erfc tails, so the result
    keeps full relative accuracy deep in the waterfall. The kernel form from
    ``derivative_kernel`` writes Q as 1/2 - erf/2 and cancels there.
    """
    g = np.asarray(g, dtype=float)
    if np.any(g <= 0):
        raise ValueError("derivative is singular at g = 0; use g > 0")
    terms = sep_terms(scheme)
    inv = 1.0 / (2.0 * _SQ2PI * np.sqrt(g))
    out = np.zeros_like(g)
    for c, p in terms.singles:
        out = out - c * math.sqrt(p) * inv * np.exp(-p * g / 2)
    for c, p, q in terms.products:
        for u, v in ((p, q), (q, p)):
            out = out - c * math.sqrt(u) * inv * np.exp(-u * g / 2) * gaussian_q(np.sqrt(v * g))
    return float(out) if out.ndim == 0 else out
