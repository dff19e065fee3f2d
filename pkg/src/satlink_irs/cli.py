"""Command-line scenario runner.

    satlink-irs <command> --config <path> [--out <dir>] [--seed <u64>] [--trials <n>] [--threads <n>]

Commands: ``outage``, ``aser``, ``rate``, ``figure <id>`` and ``validate``.
Each run writes one CSV per command into ``--out`` (default ``.``).
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io
import math
import sys
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analytic as an
from . import pathloss as pl
from . import simulate as sim
from .modulation import sqam
from .scenario import ConfigError, Scenario, load_scenario
from .specfun import TruncationWarning

EXIT_OK, EXIT_BREACH, EXIT_USAGE = 0, 1, 2

COLUMNS = ("model", "shadowing", "rician_k", "n_irs", "hap_gain_db", "p_t_dbm", "metric", "scheme",
           "analytic", "oracle", "mc", "mc_std_error", "rel_delta_oracle", "mc_z")

FIGURES = ("op_sm1_elements", "op_sm1_shadowing", "op_sm2_hap_gain", "rate_sm1_elements",
           "rate_sm1_shadowing", "rate_sm2_rician", "aser_sm1_families", "aser_sm1_orders",
           "aser_sm1_hqam", "aser_sm2_hqam")
FIGURE_METRIC = {"op": "outage", "rate": "rate", "aser": "aser"}


@dataclass
class SweepRow:
    model: str
    shadowing: str
    rician_k: float
    n_irs: int
    hap_gain_db: float | None
    p_t_dbm: float
    metric: str
    scheme: str
    analytic: float
    oracle: float | None = None
    mc: float | None = None
    mc_std_error: float | None = None

    @property
    def rel_delta_oracle(self):
        if self.oracle is None or self.analytic is None:
            return None
        if self.oracle == 0:
            return 0.0 if self.analytic == 0 else math.inf
        return abs(self.analytic - self.oracle) / abs(self.oracle)

    @property
    def mc_z(self):
        if self.mc is None or self.mc_std_error is None:
            return None
        if self.mc_std_error == 0:
            return 0.0 if self.mc == self.analytic else math.inf
        return (self.analytic - self.mc) / self.mc_std_error


def fmt(v) -> str:
    """Deterministic CSV number formatting; scientific below 1e-3."""
    if v is None:
        return ""
    if isinstance(v, str):
        return v
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    if v == 0:
        return "0"
    if abs(v) < 1e-3:
        return f"{v:.6e}"
    return f"{v:.10g}"


def write_csv(rows: list[SweepRow], path: Path | None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in rows:
        w.writerow([fmt(getattr(r, c)) for c in COLUMNS])
    text = buf.getvalue()
    if path is not None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text)
    return text


# ---------------------------------------------------------------------------
# sweeps


def _pmap(fn, items, threads):
    if threads > 1:
        with ThreadPoolExecutor(threads) as ex:
            return list(ex.map(fn, items))
    return [fn(x) for x in items]


def _base_row(sc: Scenario, case, p, metric, scheme=""):
    label, K, n, hap = case
    return dict(model=sc.model, shadowing=label, rician_k=K, n_irs=n, hap_gain_db=hap, p_t_dbm=p,
                metric=metric, scheme=scheme)


def _scales(powers):
    # mean SNR is linear in P_t; MC draws at the first point are rescaled to the rest
    return pl.db_to_linear(np.asarray(powers) - powers[0])


def sweep_outage(sc: Scenario, with_mc: bool, threads: int = 1) -> list[SweepRow]:
    powers = sc.sweep.values()
    rows = []
    for case in sc.cases():
        def point(p, case=case):
            st = sc.stats(case, p)
            if sc.model == "SM1":
                return an.op_sm1(st, sc.gamma_th), an.cdf_sm1_series(st, sc.gamma_th, literal=False)
            return an.op_sm2(st, sc.gamma_th), an.cdf_sm2_series(st, sc.gamma_th, literal=False)

        vals = _pmap(point, powers, threads)
        mc = [None] * len(powers)
        if with_mc:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", sim.InsufficientEventsWarning)
                mc = sim.mc_outage_curve(sc.channel(case, powers[0]), sc.gamma_th, _scales(powers), sc.mc)
        for p, (a, o), m in zip(powers, vals, mc):
            rows.append(SweepRow(**_base_row(sc, case, p, "outage"), analytic=a, oracle=o,
                                 mc=None if m is None else m.estimate,
                                 mc_std_error=None if m is None else m.std_error))
    return rows


def sweep_aser(sc: Scenario, with_mc: bool, threads: int = 1) -> list[SweepRow]:
    powers = sc.sweep.values()
    schemes = sc.schemes or (sqam(4),)
    rows = []
    for case in sc.cases():
        for scheme in schemes:
            def point(p, case=case, scheme=scheme):
                st = sc.stats(case, p)
                if sc.model == "SM1":
                    closed = an.aser_sm1(st, scheme)
                    oracle = an.aser_quadrature(scheme, lambda g: an.cdf_sm1_series(st, g, literal=False))
                else:
                    closed = an.aser_sm2(st, scheme)
                    oracle = an.aser_quadrature(scheme, lambda g: an.cdf_sm2_series(st, g, literal=False))
                return closed, oracle

            vals = _pmap(point, powers, threads)
            mc = [None] * len(powers)
            if with_mc:
                mc = sim.mc_aser_curve(sc.channel(case, powers[0]), scheme, _scales(powers), sc.mc)
            for p, (a, o), m in zip(powers, vals, mc):
                rows.append(SweepRow(**_base_row(sc, case, p, "aser", scheme.name), analytic=a,
                                     oracle=o, mc=None if m is None else m.estimate,
                                     mc_std_error=None if m is None else m.std_error))
    return rows


def sweep_rate(sc: Scenario, with_mc: bool, threads: int = 1) -> list[SweepRow]:
    powers = sc.sweep.values()
    rows = []
    for case in sc.cases():
        def point(p, case=case):
            st = sc.stats(case, p)
            if sc.model == "SM1":
                return an.ergodic_rate_sm1(st), an.ergodic_rate_sm1_quadrature(st), None
            ref = an.ergodic_rate_sm2(st)
            series = an.ergodic_rate_sm2_series(st)
            sat, casc = an.ergodic_rate_sm2_links(st)
            return (series.value if series.converged else math.nan), ref, (sat, casc)

        vals = _pmap(point, powers, threads)
        mc = [None] * len(powers)
        if with_mc:
            mc = sim.mc_rate_curve(sc.channel(case, powers[0]), _scales(powers), sc.mc)
        for p, (a, o, links), m in zip(powers, vals, mc):
            rows.append(SweepRow(**_base_row(sc, case, p, "rate"), analytic=a, oracle=o,
                                 mc=None if m is None else m.estimate,
                                 mc_std_error=None if m is None else m.std_error))
            if links is not None:
                rows.append(SweepRow(**_base_row(sc, case, p, "rate_satellite_link"), analytic=links[0]))
                rows.append(SweepRow(**_base_row(sc, case, p, "rate_cascaded_link"), analytic=links[1]))
    return rows


SWEEPS = {"outage": sweep_outage, "aser": sweep_aser, "rate": sweep_rate}


# ---------------------------------------------------------------------------
# validation


@dataclass
class Check:
    name: str
    value: float
    limit: float
    passed: bool
    note: str = ""
    gating: bool = True

    def line(self) -> str:
        tag = ("PASS" if self.passed else "FAIL") if self.gating else "INFO"
        extra = f"  ({self.note})" if self.note else ""
        return f"{tag}  {self.name}: {fmt(self.value)} (limit {fmt(self.limit)}){extra}"


def _reference(r: SweepRow) -> float:
    # the analytic column is nan where a closed form is reported divergent
    return r.oracle if r.analytic is None or math.isnan(r.analytic) else r.analytic


def _mc_checks(rows_by_metric, label: str, gating: bool) -> list[Check]:
    out = []
    note = "" if gating else "exact channel vs Gaussian-sum model; approximation error, not a math check"
    rows = rows_by_metric["outage"]
    zmax = max((abs((r.analytic - r.mc) / r.mc_std_error) for r in rows
                if r.analytic >= 1e-5 and r.mc_std_error), default=0.0)
    out.append(Check(f"outage vs MC ({label}), max |z| over OP >= 1e-5", zmax, 3.0, zmax <= 3.0,
                     note, gating))
    rows = rows_by_metric["aser"]
    zmax = max((abs((r.analytic - r.mc) / r.mc_std_error) for r in rows if r.mc_std_error),
               default=0.0)
    out.append(Check(f"aser vs semi-analytic MC ({label}), max |z|", zmax, 3.0, zmax <= 3.0,
                     note, gating))
    rows = rows_by_metric["rate"]
    rel = max((abs(_reference(r) - r.mc) / r.mc for r in rows if r.mc), default=0.0)
    out.append(Check(f"rate vs MC mean ({label}), max rel", rel, 0.01, rel <= 0.01, note, gating))
    return out


def validate(sc: Scenario, with_mc: bool = True, threads: int = 1) -> list[Check]:
    """Closed form vs quadrature vs Monte Carlo on every point of the sweep.

    Gating MC checks sample the Gaussian-sum model that the closed forms
    describe, so they test the mathematics.  The same checks against the
    exact element-by-element channel are reported as INFO lines: they
    measure the approximation, which is not a tolerance of this code.
    """
    checks: list[Check] = []
    g_th = sc.gamma_th
    powers = sc.sweep.values()
    grid = np.concatenate([[0.0], np.logspace(-4, 2, 99)]) * g_th

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        for case in sc.cases():
            tag = "/".join(str(c) for c in case if c is not None)
            st = sc.stats(case, powers[len(powers) // 2])
            if sc.model == "SM1":
                d = np.max(np.abs(an.cdf_sm1_series(st, grid, literal=True) - an.op_sm1(st, grid)))
            else:
                d = np.max(np.abs(an.cdf_sm2_series(st, grid, literal=True) - an.op_sm2(st, grid)))
            checks.append(Check(f"series CDF at fixed truncation vs Marcum form [{tag}]", d, 1e-8,
                                d <= 1e-8))

    model_sc = dataclasses.replace(sc, mc=dataclasses.replace(sc.mc, channel="clt"))
    rows = {"outage": sweep_outage(model_sc, with_mc, threads),
            "aser": sweep_aser(model_sc, with_mc, threads),
            "rate": sweep_rate(model_sc, with_mc, threads)}
    rows["rate"] = [r for r in rows["rate"] if r.metric == "rate"]

    worst = max(abs(r.analytic - r.oracle) for r in rows["outage"])
    checks.append(Check("outage: Marcum form vs adaptive series (abs)", worst, 1e-8, worst <= 1e-8))
    worst = max((r.rel_delta_oracle for r in rows["aser"] if r.oracle > 1e-300), default=0.0)
    checks.append(Check("aser: closed form vs quadrature (rel)", worst, 1e-3, worst <= 1e-3))
    finite = [r for r in rows["rate"] if not math.isnan(r.analytic)]
    tol = 1e-3 if sc.model == "SM1" else 1e-2
    worst = max((r.rel_delta_oracle for r in finite), default=0.0)
    checks.append(Check("rate: closed form vs quadrature (rel)", worst, tol, worst <= tol))
    diverged = len(rows["rate"]) - len(finite)
    if diverged:
        checks.append(Check("rate: power-series closed form reported divergent (points)", diverged,
                            len(rows["rate"]), True, "quadrature value is normative there", False))

    if with_mc:
        checks += _mc_checks(rows, "Gaussian-sum sampler", True)
        exact_sc = dataclasses.replace(sc, mc=dataclasses.replace(sc.mc, channel="exact"))
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sim.InsufficientEventsWarning)
            exact = {"outage": sweep_outage(exact_sc, True, threads),
                     "aser": sweep_aser(exact_sc, True, threads),
                     "rate": [r for r in sweep_rate(exact_sc, True, threads) if r.metric == "rate"]}
        checks += _mc_checks(exact, "exact channel", False)
    return checks


# ---------------------------------------------------------------------------
# entry point


def preset_path(figure_id: str) -> Path:
    """Locate ``configs/<id>.ini`` in the working directory or the source checkout."""
    if figure_id not in FIGURES:
        raise ConfigError(f"unknown figure {figure_id!r}; choose from {', '.join(FIGURES)}")
    for root in (Path.cwd(), Path(__file__).resolve().parents[2]):
        cand = root / "configs" / f"{figure_id}.ini"
        if cand.is_file():
            return cand
    raise ConfigError(f"preset configs/{figure_id}.ini not found; pass --config")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="satlink-irs", description=__doc__.splitlines()[0])
    p.add_argument("command", choices=("outage", "aser", "rate", "figure", "validate"))
    p.add_argument("figure_id", nargs="?", help="figure preset id (figure command only)")
    p.add_argument("--config", type=Path, help="scenario INI file")
    p.add_argument("--out", type=Path, default=Path("."), help="output directory")
    p.add_argument("--seed", type=int, help="MC seed (unsigned 64-bit)")
    p.add_argument("--trials", type=int, help="MC trials; 0 skips Monte Carlo")
    p.add_argument("--threads", type=int, default=1)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    if args.command == "figure":
        if not args.figure_id:
            parser.error(f"figure needs an id: {', '.join(FIGURES)}")
    elif args.figure_id:
        parser.error(f"unexpected argument {args.figure_id!r}")
    try:
        if args.command == "figure":
            config = args.config or preset_path(args.figure_id)
        elif args.config is None:
            parser.error("--config is required")
        else:
            config = args.config
        with_mc = args.trials != 0
        overrides = {"seed": args.seed, "trials": args.trials if args.trials else None,
                     "threads": args.threads if args.threads > 1 else None}
        sc = load_scenario(config, overrides)
    except ConfigError as exc:
        print(f"satlink-irs: error: {exc}", file=sys.stderr)
        return EXIT_USAGE

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        if args.command == "validate":
            checks = validate(sc, with_mc, args.threads)
            report = "\n".join(c.line() for c in checks) + "\n"
            args.out.mkdir(parents=True, exist_ok=True)
            (args.out / "validate_report.txt").write_text(report)
            sys.stdout.write(report)
            return EXIT_OK if all(c.passed for c in checks if c.gating) else EXIT_BREACH

        if args.command == "figure":
            prefix = args.figure_id.split("_", 1)[0]
            metric = FIGURE_METRIC[prefix]
            name = args.figure_id
        else:
            metric = name = args.command
        rows = SWEEPS[metric](sc, with_mc, args.threads)
        write_csv(rows, args.out / f"{name}.csv")
        print(f"wrote {len(rows)} rows to {args.out / (name + '.csv')}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
