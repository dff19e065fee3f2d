"""Scenario description, INI config parsing and mean-SNR composition.

Two ways of turning transmit power into mean SNR are provided:

``normalized`` (default, used by the figure presets)
    Noise power is ``noise_dbm`` (0 dBm) and the fading laws carry unit
    mean power.  SM1 applies the HAP gain G_H = N on the receive side of
    the satellite hop and on the transmit side of the HAP -> user hop, so
    gamma_bar = P_t G_H^2 / N0.  SM2 gives the satellite hop
    ``sat_gain_db`` only and the cascaded hop the HAP gain on both of its
    antenna ends, gamma_bar_u = P_t G_H^2 / N0.

``physical``
    Mean SNRs built from the link-budget blocks: the satellite-hop factor
    |PL_SH|^2 (beam pattern, free space and thermal noise) and the
    terrestrial / IRS-user gains in dB.
"""

from __future__ import annotations

import configparser
import dataclasses
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import pathloss as pl
from .analytic import Sm1Stats, Sm2Stats
from .channels import NakagamiParams, RicianParams, ShadowedRicianParams
from .modulation import ModScheme, parse_scheme
from .simulate import McConfig, Sm1Channel, Sm2Channel
from .specfun import SeriesControl

SHADOWING_PRESETS = {
    "HS": ShadowedRicianParams(b=0.063, m=1, omega=0.0007),
    "AS": ShadowedRicianParams(b=0.251, m=5, omega=0.279),
    "LS": ShadowedRicianParams(b=0.158, m=19, omega=1.29),
}
MODELS = ("SM1", "SM2")
COMPOSITIONS = ("normalized", "physical")


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


@dataclass(frozen=True)
class PowerSweep:
    start_dbm: float
    stop_dbm: float
    step_db: float

    def __post_init__(self):
        if not self.step_db > 0:
            raise ConfigError("p_t_dbm_step must be positive")
        if self.stop_dbm < self.start_dbm:
            raise ConfigError("empty sweep: p_t_dbm_stop is below p_t_dbm_start")

    def values(self) -> np.ndarray:
        n = int(math.floor((self.stop_dbm - self.start_dbm) / self.step_db + 1e-9)) + 1
        return self.start_dbm + self.step_db * np.arange(n)


@dataclass(frozen=True)
class Scenario:
    model: str = "SM1"
    shadowing: tuple[str, ...] = ("HS",)
    sr_explicit: ShadowedRicianParams | None = None
    rician_k: tuple[float, ...] = (5.0,)
    n_irs: tuple[int, ...] = (30,)
    nakagami: NakagamiParams = NakagamiParams(1.0, 1.0)
    hap_gain_db: tuple[float, ...] = (105.0,)
    sat_gain_db: float = 0.0
    noise_dbm: float = 0.0
    composition: str = "normalized"
    sweep: PowerSweep = PowerSweep(0.0, 30.0, 5.0)
    gamma_th_db: float = 0.0
    schemes: tuple[ModScheme, ...] = ()
    sat_hap: pl.SatHapLink | None = None
    terrestrial: pl.TerrestrialLink | None = None
    irs_user: pl.IrsUserLink | None = None
    series: SeriesControl = field(default_factory=SeriesControl)
    mc: McConfig = field(default_factory=McConfig)

    def __post_init__(self):
        if self.model not in MODELS:
            raise ConfigError(f"model must be one of {MODELS}")
        if self.composition not in COMPOSITIONS:
            raise ConfigError(f"composition must be one of {COMPOSITIONS}")
        if self.composition == "physical":
            need = ("sat_hap", "irs_user") + (("terrestrial",) if self.model == "SM2" else ())
            missing = [n for n in need if getattr(self, n) is None]
            if missing:
                raise ConfigError(f"physical composition needs [pathloss.*] blocks: {missing}")
        if any(n < 1 for n in self.n_irs):
            raise ConfigError("n_irs must be >= 1")

    @property
    def gamma_th(self) -> float:
        return pl.db_to_linear(self.gamma_th_db)

    def sr_params(self, label: str) -> ShadowedRicianParams:
        if label == "custom":
            return self.sr_explicit
        return SHADOWING_PRESETS[label]

    def cases(self):
        """Every (shadowing, K, N, hap gain) combination of the sweep, in a fixed order."""
        labels = ("custom",) if self.sr_explicit is not None else self.shadowing
        hap = self.hap_gain_db if self.model == "SM2" else (None,)
        return list(itertools.product(labels, self.rician_k, self.n_irs, hap))

    # -- mean SNR composition ----------------------------------------------

    def gains_sm1(self, n: int) -> float:
        """Linear factor g with gamma_bar = P_t[W] * g."""
        if self.composition == "normalized":
            return n * n / pl.dbm_to_watt(self.noise_dbm)
        link = dataclasses.replace(self.sat_hap, g_hap=float(n))
        return pl.pl_sat_hap(link) ** 2 * n * pl.db_to_linear(pl.pl_irs_user_db(self.irs_user))

    def gains_sm2(self, hap_gain_db: float) -> tuple[float, float]:
        n0 = pl.dbm_to_watt(self.noise_dbm)
        if self.composition == "normalized":
            g_h = pl.db_to_linear(hap_gain_db)
            return pl.db_to_linear(self.sat_gain_db) / n0, g_h * g_h / n0
        link = dataclasses.replace(self.sat_hap, g_hap=pl.db_to_linear(hap_gain_db))
        g_s = pl.pl_sat_hap(link) ** 2
        terr = dataclasses.replace(self.terrestrial, g_tx_db=hap_gain_db)
        g_u = pl.db_to_linear(pl.pl_terrestrial_db(terr) + pl.pl_irs_user_db(self.irs_user))
        return g_s, g_u / self.sat_hap.noise_power_w

    # -- model objects ---------------------------------------------------------

    def sm1_stats(self, label: str, K: float, n: int, p_t_dbm: float) -> Sm1Stats:
        gb = pl.dbm_to_watt(p_t_dbm) * self.gains_sm1(n)
        return Sm1Stats.from_channels(RicianParams(K), self.sr_params(label), n, gb, self.series)

    def sm1_channel(self, label: str, K: float, n: int, p_t_dbm: float) -> Sm1Channel:
        gb = pl.dbm_to_watt(p_t_dbm) * self.gains_sm1(n)
        return Sm1Channel(RicianParams(K), self.sr_params(label), n, gb)

    def sm2_stats(self, label: str, K: float, n: int, hap_db: float, p_t_dbm: float) -> Sm2Stats:
        gs, gu = self.gains_sm2(hap_db)
        p = pl.dbm_to_watt(p_t_dbm)
        return Sm2Stats.from_channels(K, p * gs, self.sr_params(label), self.nakagami, n, p * gu,
                                      self.series)

    def sm2_channel(self, label: str, K: float, n: int, hap_db: float, p_t_dbm: float) -> Sm2Channel:
        gs, gu = self.gains_sm2(hap_db)
        p = pl.dbm_to_watt(p_t_dbm)
        return Sm2Channel(K, p * gs, self.sr_params(label), self.nakagami, n, p * gu)

    def stats(self, case, p_t_dbm: float):
        label, K, n, hap = case
        if self.model == "SM1":
            return self.sm1_stats(label, K, n, p_t_dbm)
        return self.sm2_stats(label, K, n, hap, p_t_dbm)

    def channel(self, case, p_t_dbm: float):
        label, K, n, hap = case
        if self.model == "SM1":
            return self.sm1_channel(label, K, n, p_t_dbm)
        return self.sm2_channel(label, K, n, hap, p_t_dbm)


# ---------------------------------------------------------------------------
# INI parsing

_SCHEMA = {
    "scenario": {"model", "n_irs", "rician_k", "p_t_dbm_start", "p_t_dbm_stop", "p_t_dbm_step",
                 "gamma_th_db", "schemes", "composition", "hap_gain_db", "sat_gain_db", "noise_dbm"},
    "fading": {"preset", "b", "m", "omega", "nakagami_m", "nakagami_sigma2"},
    "pathloss.sat_hap": {"f_ghz", "g_max_dbi", "phi_sh_deg", "phi_3db_deg", "d_sh_km",
                         "t_noise_k", "b_noise_hz"},
    "pathloss.terrestrial": {"g_tx_db", "g_rx_db", "f_ghz", "d_km", "l_rain_db_per_km",
                             "l_atm_db_per_km", "l_other_db"},
    "pathloss.irs_user": {"d_m", "gt_irs_db", "gr_user_db", "h_t_m", "h_r_m"},
    "series": {"k1_max", "l_max", "rel_tol", "adaptive", "max_terms", "window_sigmas"},
    "mc": {"trials", "seed", "batch_size", "mode", "channel", "threads"},
}


def _line_of(text: str, section: str, key: str | None = None) -> int | None:
    cur = None
    for i, raw in enumerate(text.splitlines(), 1):
        s = raw.strip()
        if s.startswith("[") and s.endswith("]"):
            cur = s[1:-1].strip()
            if key is None and cur == section:
                return i
        elif cur == section and key is not None and s.split("=", 1)[0].strip().lower() == key:
            return i
    return None


def _err(text, path, section, key, msg):
    line = _line_of(text, section, key)
    where = f"{path}:{line}" if line else str(path)
    return ConfigError(f"{where}: [{section}]{' ' + key if key else ''}: {msg}")


def _floats(s: str) -> tuple[float, ...]:
    return tuple(float(v) for v in s.replace(";", ",").split(",") if v.strip())


def _ints(s: str) -> tuple[int, ...]:
    out = []
    for v in s.replace(";", ",").split(","):
        v = v.strip()
        if not v:
            continue
        f = float(v)
        if f != int(f):
            raise ValueError(f"{v} is not an integer")
        out.append(int(f))
    return tuple(out)


def load_scenario(path, overrides: dict | None = None) -> Scenario:
    """Parse an INI scenario file.  Unknown sections or keys are errors."""
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from exc
    return parse_scenario(text, str(path), overrides)


def parse_scenario(text: str, source: str = "<string>", overrides: dict | None = None) -> Scenario:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from exc

    for sec in cp.sections():
        if sec not in _SCHEMA:
            raise _err(text, source, sec, None, "unknown section")
        for key in cp[sec]:
            if key not in _SCHEMA[sec]:
                raise _err(text, source, sec, key, "unknown key")
    if "scenario" not in cp:
        raise ConfigError(f"{source}: missing [scenario] section")

    def get(sec, key, conv, default=None):
        if sec not in cp or key not in cp[sec]:
            return default
        try:
            return conv(cp[sec][key])
        except (ValueError, KeyError) as exc:
            raise _err(text, source, sec, key, str(exc)) from exc

    sc = cp["scenario"]
    kw = {}
    kw["model"] = get("scenario", "model", lambda s: s.strip().upper(), "SM1")
    kw["n_irs"] = get("scenario", "n_irs", _ints, (30,))
    kw["rician_k"] = get("scenario", "rician_k", _floats, (5.0,))
    kw["hap_gain_db"] = get("scenario", "hap_gain_db", _floats, (105.0,))
    kw["sat_gain_db"] = get("scenario", "sat_gain_db", float, 0.0)
    kw["noise_dbm"] = get("scenario", "noise_dbm", float, 0.0)
    kw["composition"] = get("scenario", "composition", lambda s: s.strip().lower(), "normalized")
    kw["gamma_th_db"] = get("scenario", "gamma_th_db", float, 0.0)
    try:
        kw["sweep"] = PowerSweep(get("scenario", "p_t_dbm_start", float, 0.0),
                                 get("scenario", "p_t_dbm_stop", float, 30.0),
                                 get("scenario", "p_t_dbm_step", float, 5.0))
    except ConfigError as exc:
        raise _err(text, source, "scenario", "p_t_dbm_stop", str(exc)) from exc
    if "schemes" in sc:
        try:
            kw["schemes"] = tuple(parse_scheme(s.strip()) for s in sc["schemes"].split(",") if s.strip())
        except ValueError as exc:
            raise _err(text, source, "scenario", "schemes", str(exc)) from exc

    if "fading" in cp:
        f = cp["fading"]
        explicit = [k for k in ("b", "m", "omega") if k in f]
        if explicit and len(explicit) != 3:
            raise _err(text, source, "fading", explicit[0], "b, m and omega must be given together")
        if explicit and "preset" in f:
            raise _err(text, source, "fading", "preset", "give either preset or b/m/omega, not both")
        if explicit:
            try:
                kw["sr_explicit"] = ShadowedRicianParams(float(f["b"]), float(f["m"]), float(f["omega"]))
            except ValueError as exc:
                raise _err(text, source, "fading", "b", str(exc)) from exc
        if "preset" in f:
            labels = tuple(s.strip().upper() for s in f["preset"].split(",") if s.strip())
            bad = [s for s in labels if s not in SHADOWING_PRESETS]
            if bad or not labels:
                raise _err(text, source, "fading", "preset",
                           f"unknown preset {bad}; use {sorted(SHADOWING_PRESETS)}")
            kw["shadowing"] = labels
        try:
            kw["nakagami"] = NakagamiParams(get("fading", "nakagami_m", float, 1.0),
                                            get("fading", "nakagami_sigma2", float, 1.0))
        except ValueError as exc:
            raise _err(text, source, "fading", "nakagami_m", str(exc)) from exc

    if "pathloss.sat_hap" in cp:
        try:
            kw["sat_hap"] = pl.SatHapLink(
                wavelength_m=pl.wavelength(get("pathloss.sat_hap", "f_ghz", float, 5.0) * 1e9),
                g_max=pl.db_to_linear(get("pathloss.sat_hap", "g_max_dbi", float, 56.0)),
                phi_sh_deg=get("pathloss.sat_hap", "phi_sh_deg", float, 0.4),
                phi_3db_deg=get("pathloss.sat_hap", "phi_3db_deg", float, 0.8),
                g_hap=1.0,
                d_sh_m=get("pathloss.sat_hap", "d_sh_km", float, 35766.0) * 1e3,
                t_noise_k=get("pathloss.sat_hap", "t_noise_k", float, 300.0),
                b_noise_hz=get("pathloss.sat_hap", "b_noise_hz", float, 20e6))
        except ValueError as exc:
            raise _err(text, source, "pathloss.sat_hap", None, str(exc)) from exc
    if "pathloss.terrestrial" in cp:
        g = lambda k, d: get("pathloss.terrestrial", k, float, d)  # noqa: E731
        try:
            kw["terrestrial"] = pl.TerrestrialLink(g("g_tx_db", 0.0), g("g_rx_db", 0.0), g("f_ghz", 5.0),
                                                   g("d_km", 20.0), g("l_rain_db_per_km", 0.01),
                                                   g("l_atm_db_per_km", 5.4e-3), g("l_other_db", 2.0))
        except ValueError as exc:
            raise _err(text, source, "pathloss.terrestrial", None, str(exc)) from exc
    if "pathloss.irs_user" in cp:
        g = lambda k, d: get("pathloss.irs_user", k, float, d)  # noqa: E731
        try:
            kw["irs_user"] = pl.IrsUserLink(g("d_m", 300.0), pl.db_to_linear(g("gt_irs_db", 0.0)),
                                            pl.db_to_linear(g("gr_user_db", 3.0103)),
                                            g("h_t_m", 50.0), g("h_r_m", 5.0))
        except ValueError as exc:
            raise _err(text, source, "pathloss.irs_user", None, str(exc)) from exc

    if "series" in cp:
        try:
            kw["series"] = SeriesControl(
                max_terms=get("series", "max_terms", int, 500),
                rel_tol=get("series", "rel_tol", float, 1e-12),
                k1_max=get("series", "k1_max", int, 150),
                l_max=get("series", "l_max", int, 20),
                adaptive=get("series", "adaptive", _bool, True),
                window_sigmas=get("series", "window_sigmas", float, 10.0))
        except ValueError as exc:
            raise _err(text, source, "series", None, str(exc)) from exc

    mc = {}
    if "mc" in cp:
        mc = {"trials": get("mc", "trials", lambda s: int(float(s)), None),
              "seed": get("mc", "seed", int, None),
              "batch_size": get("mc", "batch_size", lambda s: int(float(s)), None),
              "mode": get("mc", "mode", str.strip, None),
              "channel": get("mc", "channel", str.strip, None),
              "threads": get("mc", "threads", int, None)}
        mc = {k: v for k, v in mc.items() if v is not None}
    if overrides:
        mc.update({k: v for k, v in overrides.items() if v is not None})
    try:
        kw["mc"] = McConfig(**mc)
    except ValueError as exc:
        raise _err(text, source, "mc", None, str(exc)) from exc

    try:
        return Scenario(**kw)
    except ValueError as exc:
        raise ConfigError(f"{source}: {exc}") from exc


def _bool(s: str) -> bool:
    v = s.strip().lower()
    if v in ("1", "true", "yes", "on"):
        return True
    if v in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def crossing_power_dbm(metric, target: float, lo: float, hi: float, step: float = 5.0,
                       increasing: bool = False, xtol: float = 1e-6) -> float:
    """Transmit power (dBm) at which ``metric(p)`` crosses ``target``.

    ``metric`` must be monotone in ``p``; the bracket ``[lo, hi]`` is scanned
    on a ``step`` grid and refined with Brent's method in log-metric.
    """
    from scipy.optimize import brentq

    def h(p):
        v = float(metric(p))
        if v <= 0:
            return -np.inf if not increasing else np.inf
        d = math.log(v) - math.log(target)
        return -d if increasing else d

    grid = np.arange(lo, hi + 0.5 * step, step)
    prev_p, prev_h = grid[0], h(grid[0])
    if prev_h <= 0:
        raise ValueError(f"metric already below target at {lo} dBm")
    for p in grid[1:]:
        hp = h(p)
        if hp <= 0:
            if not np.isfinite(hp):
                # bisect into the finite region first
                a, b = prev_p, p
                for _ in range(60):
                    m = 0.5 * (a + b)
                    hm = h(m)
                    if np.isfinite(hm) and hm <= 0:
                        b = m
                        break
                    if hm > 0:
                        a = m
                    else:
                        b = m
                return brentq(h, a, b, xtol=xtol)
            return brentq(h, prev_p, p, xtol=xtol)
        prev_p, prev_h = p, hp
    raise ValueError(f"metric does not reach {target:g} below {hi} dBm")
