"""Experiment registry: sweeps that reproduce each figure/table as CSV plus a
JSON plot description.

Operating points without a reference value (transmit powers,
noise floors, trial counts) are fixed here per experiment and written into
every CSV header.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Sequence

import numpy as np

from irsperf import analytic, montecarlo, quantization
from irsperf.quantization import QuantizerConfig
from irsperf.scenario import ConfigError, ScenarioConfig, dbm_to_watts, link_budget, linear_to_db

ANALYTIC = "analytic"
TAYLOR = "taylor"
MONTE_CARLO = "monte-carlo"

FIG2_N_GRID = (4, 8, 16, 32, 64, 128, 256, 512, 1024)
K_GRID = (1, 2, 3, 4, 5, 6)
LOSS_N_SERIES = (256, 1024)

FIG3_BASE = {"n_elements": 256, "ps_dbm": 10.0, "sigma_u_sq_dbm": -100.0}
FIG3_SCENARIOS = ((-70.0, -100.0), (-60.0, -100.0), (-50.0, -100.0))

# rate tables: total power and array size have no reference value; this pair
# gives the closest match to the target rows at the default geometry.
TABLE_BASE = {"n_elements": 4096}
TABLE_P_TOTAL_DBM = 8.0
TABLE1_ROWS = ((-100.0, -70.0), (-100.0, -80.0), (-100.0, -90.0), (-100.0, -100.0))
TABLE2_ROWS = ((-70.0, -100.0), (-80.0, -100.0), (-90.0, -100.0))

# BER is only informative near 0 dB, so each panel gets its own receiver noise.
FIG6_NOISE_DBM = {"passive": -68.0, "active": -40.0}

DEFAULT_TRIALS = {"fig2a": 10_000, "fig2b": 10_000, "fig4": 2_000, "custom": 2_000}


class ExperimentError(ValueError):
    pass


@dataclass(frozen=True)
class Sweep:
    variable: str
    grid: tuple

    def __post_init__(self):
        if len(self.grid) == 0:
            raise ExperimentError("sweep grid is empty")

    @classmethod
    def parse(cls, text: str) -> "Sweep":
        var, sep, values = text.partition("=")
        if not sep:
            raise ExperimentError(f"sweep must look like variable=v1,v2,..., got {text!r}")
        grid = tuple(float(v) for v in values.split(",") if v.strip())
        return cls(var.strip(), grid)


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    overrides: dict = field(default_factory=dict)
    sweep: Sweep | None = None
    trials: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.name not in REGISTRY:
            raise ExperimentError(
                f"unknown experiment {self.name!r}; choose from {', '.join(REGISTRY)}"
            )
        if self.trials is not None and self.trials < 1:
            raise ExperimentError("trials must be >= 1")

    @property
    def n_trials(self) -> int:
        return self.trials if self.trials is not None else DEFAULT_TRIALS.get(self.name, 0)


@dataclass
class ResultTable:
    """Rectangular result with a units header and a provenance column."""

    name: str
    columns: list[str]
    units: list[str]
    rows: list[tuple] = field(default_factory=list)
    meta: dict[str, Any] = field(default_factory=dict)
    panel: str | None = None

    def __post_init__(self):
        if len(self.columns) != len(self.units):
            raise ValueError("one unit per column")
        if "provenance" not in self.columns:
            raise ValueError("table needs a provenance column")

    @property
    def stem(self) -> str:
        return self.name if self.panel is None else f"{self.name}_{self.panel}"

    def add(self, *row):
        if len(row) != len(self.columns):
            raise ValueError(f"row has {len(row)} values, expected {len(self.columns)}")
        self.rows.append(tuple(row))

    def column(self, name: str) -> list:
        j = self.columns.index(name)
        return [r[j] for r in self.rows]

    def select(self, **where) -> list[dict]:
        out = []
        for r in self.rows:
            d = dict(zip(self.columns, r))
            if all(d[k] == v for k, v in where.items()):
                out.append(d)
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# experiment: {self.stem}\n")
        for k, v in self.meta.items():
            buf.write(f"# {k}: {_fmt(v)}\n")
        buf.write("# units: " + ", ".join(f"{c}[{u}]" for c, u in zip(self.columns, self.units)) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(self.columns)
        for r in self.rows:
            w.writerow([_fmt(v) for v in r])
        return buf.getvalue()


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".10g")
    if isinstance(v, dict):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _db(x) -> float:
    return float(linear_to_db(x))


def _se_db(mean: float, se: float) -> float:
    return 10.0 / math.log(10.0) * se / mean


def _config_meta(cfg: ScenarioConfig, spec: ExperimentSpec, trials: int | None = None) -> dict:
    meta = {"seed": spec.seed}
    if trials is not None:
        meta["trials"] = trials
    meta["config"] = cfg.to_dict()
    return meta


# --- figures ---------------------------------------------------------------


def _fig2a(spec: ExperimentSpec, cfg: ScenarioConfig, workers: int) -> list[ResultTable]:
    trials = spec.n_trials
    t = ResultTable("fig2a", ["series", "provenance", "n_elements", "gamma0_db", "std_err_db"],
                    ["-", "-", "count", "dB", "dB"], meta=_config_meta(cfg, spec, trials))
    lb = link_budget(cfg)
    grid = spec.sweep.grid if spec.sweep else FIG2_N_GRID
    for n in grid:
        c = cfg.replace(n_elements=int(n))
        g0 = analytic.gamma0_asymptotic(c.p_s, lb.l_g, c.alpha_g_sq, c.sigma_i_sq)
        t.add("gamma0-asymptotic", ANALYTIC, int(n), _db(g0), 0.0)
    for n in grid:
        c = cfg.replace(n_elements=int(n))
        r = montecarlo.simulate_received_snr(c, None, "active", trials, spec.seed, workers=workers)
        t.add("gamma0-empirical", MONTE_CARLO, int(n), _db(r.gamma0_mean),
              _se_db(r.gamma0_mean, r.gamma0_std_err))
    return [t]


def _fig2b(spec: ExperimentSpec, cfg: ScenarioConfig, workers: int) -> list[ResultTable]:
    trials = spec.n_trials
    t = ResultTable("fig2b", ["series", "provenance", "n_elements", "snr_db", "std_err_db"],
                    ["-", "-", "count", "dB", "dB"], meta=_config_meta(cfg, spec, trials))
    grid = spec.sweep.grid if spec.sweep else FIG2_N_GRID
    sims = {}
    for n in grid:
        c = cfg.replace(n_elements=int(n))
        t.add("snr-asymptotic", ANALYTIC, int(n), _db(analytic.snr_user_noqe(c)), 0.0)
        sims[n] = montecarlo.simulate_received_snr(c, None, "active", trials, spec.seed,
                                                   workers=workers)
    for n, r in sims.items():
        t.add("snr-simulated", MONTE_CARLO, int(n), r.mean_snr_db, _se_db(r.mean_snr, r.std_err))
    # diagnostic: SNR built from the mean signal amplitude instead of the mean SNR
    for n, r in sims.items():
        t.add("snr-of-mean-amplitude", MONTE_CARLO, int(n), _db(r.snr_of_means), 0.0)
    return [t]


def _fig3(spec: ExperimentSpec, cfg: ScenarioConfig, workers: int) -> list[ResultTable]:
    t = ResultTable("fig3", ["scenario", "provenance", "p_i_dbm", "snr_db"],
                    ["-", "-", "dBm", "dB"], meta=_config_meta(cfg, spec))
    for si, su in FIG3_SCENARIOS:
        c = cfg.replace(sigma_i_sq_dbm=si, sigma_u_sq_dbm=su)
        label = f"sigma_i={si:g}dBm,sigma_u={su:g}dBm"
        opt = analytic.optimal_reflect_power(c)
        p_dbm = np.linspace(*analytic.PI_SCAN_DBM, analytic.PI_SCAN_POINTS)
        for p, s in zip(p_dbm, opt.grid_snr):
            t.add(label, ANALYTIC, float(p), _db(s))
        t.meta[f"optimum[{label}]"] = {
            "p_i_opt_dbm": round(float(linear_to_db(opt.p_i_opt) + 30), 6),
            "snr_opt_db": round(_db(opt.snr_at_opt), 6),
            "at_boundary": opt.at_boundary,
            "floor_db": round(_db(analytic.snr_limit_large_pi(c)), 6),
        }
    return [t]


def _loss_configs(cfg: ScenarioConfig, spec: ExperimentSpec):
    ns = tuple(int(n) for n in spec.sweep.grid) if spec.sweep else LOSS_N_SERIES
    return [(kind, n, cfg.replace(n_elements=n)) for kind in ("passive", "active") for n in ns]


def _fig4(spec: ExperimentSpec, cfg: ScenarioConfig, workers: int) -> list[ResultTable]:
    trials = spec.n_trials
    t = ResultTable("fig4", ["kind", "n_elements", "series", "provenance", "k", "loss_db", "std_err_db"],
                    ["-", "count", "-", "-", "bits", "dB", "dB"], meta=_config_meta(cfg, spec, trials))
    for kind, n, c in _loss_configs(cfg, spec):
        for k in K_GRID:
            q = QuantizerConfig(k)
            t.add(kind, n, "loss-exact", ANALYTIC, k, _db(quantization.loss_snr(c, q, kind, "exact")), 0.0)
            t.add(kind, n, "loss-taylor", TAYLOR, k, _db(quantization.loss_snr(c, q, kind, "taylor")), 0.0)
        base = montecarlo.simulate_received_snr(c, None, kind, trials, spec.seed, workers=workers)
        for k in K_GRID:
            loss, se = empirical_loss(base, montecarlo.simulate_received_snr(
                c, QuantizerConfig(k), kind, trials, spec.seed, workers=workers))
            t.add(kind, n, "loss-empirical", MONTE_CARLO, k, _db(loss), se)
    return [t]


def empirical_loss(no_qe: montecarlo.SimulationResult, with_qe: montecarlo.SimulationResult):
    """Loss ratio from paired simulations on the same channel draws, and its std. error in dB."""
    a, b = no_qe.snr, with_qe.snr
    ma, mb = float(np.mean(a)), float(np.mean(b))
    n = a.size
    se_ln = float(np.std(a / ma - b / mb, ddof=1) / math.sqrt(n)) if n > 1 else math.nan
    return ma / mb, 10.0 / math.log(10.0) * se_ln


def _per_k_tables(name, value_col, unit, fn, spec, cfg, noise=None) -> list[ResultTable]:
    tables = []
    for kind in ("passive", "active"):
        c0 = cfg if noise is None else cfg.replace(sigma_u_sq_dbm=noise[kind])
        t = ResultTable(name, ["kind", "n_elements", "series", "provenance", "k", value_col],
                        ["-", "count", "-", "-", "bits", unit], meta=_config_meta(c0, spec), panel=kind)
        for _, n, c in [x for x in _loss_configs(c0, spec) if x[0] == kind]:
            for k in K_GRID:
                r = quantization.loss_report(c, QuantizerConfig(k), kind)
                ex, qu, ta = fn(r)
                t.add(kind, n, f"{value_col}-no-qe", ANALYTIC, k, ex)
                t.add(kind, n, f"{value_col}-quantized", ANALYTIC, k, qu)
                t.add(kind, n, f"{value_col}-taylor", TAYLOR, k, ta)
        tables.append(t)
    return tables


def _fig5(spec, cfg, workers):
    return _per_k_tables("fig5", "rate", "bits/s/Hz",
                         lambda r: (r.ar_exact, r.ar_quantized, r.ar_taylor), spec, cfg)


def _fig6(spec, cfg, workers):
    return _per_k_tables("fig6", "ber", "probability",
                         lambda r: (r.ber_exact, r.ber_quantized, r.ber_taylor), spec, cfg,
                         noise=FIG6_NOISE_DBM)


def _table(name, rows, spec, cfg) -> list[ResultTable]:
    p_total = dbm_to_watts(TABLE_P_TOTAL_DBM)
    t = ResultTable(name, ["sigma_i_dbm", "sigma_u_dbm", "provenance", "beta_opt", "rate_gain"],
                    ["dBm", "dBm", "-", "-", "bits/s/Hz"], meta=_config_meta(cfg, spec))
    t.meta["p_total_dbm"] = TABLE_P_TOTAL_DBM
    t.meta["beta_grid"] = ",".join(_fmt(b) for b in analytic.DEFAULT_BETA_GRID)
    for si, su in rows:
        c = cfg.replace(sigma_i_sq_dbm=si, sigma_u_sq_dbm=su)
        sw = analytic.pa_sweep(c, p_total)
        t.add(si, su, ANALYTIC, sw.beta_opt, sw.gain)
    return [t]


def _table1(spec, cfg, workers):
    return _table("table1", TABLE1_ROWS, spec, cfg)


def _table2(spec, cfg, workers):
    return _table("table2", TABLE2_ROWS, spec, cfg)


def _custom(spec: ExperimentSpec, cfg: ScenarioConfig, workers: int) -> list[ResultTable]:
    sweep = spec.sweep or Sweep("n_elements", (64.0, 256.0, 1024.0))
    trials = spec.n_trials
    t = ResultTable("custom", ["series", "provenance", sweep.variable, "snr_db", "std_err_db"],
                    ["-", "-", "-", "dB", "dB"], meta=_config_meta(cfg, spec, trials))
    cfgs = [cfg.with_overrides({sweep.variable: v if sweep.variable != "n_elements" else int(v)})
            for v in sweep.grid]
    for v, c in zip(sweep.grid, cfgs):
        t.add("snr-asymptotic", ANALYTIC, v, _db(analytic.snr_user_noqe(c)), 0.0)
    for v, c in zip(sweep.grid, cfgs):
        r = montecarlo.simulate_received_snr(c, None, "active", trials, spec.seed, workers=workers)
        t.add("snr-simulated", MONTE_CARLO, v, r.mean_snr_db, _se_db(r.mean_snr, r.std_err))
    return [t]


REGISTRY: dict[str, Callable] = {
    "fig2a": _fig2a,
    "fig2b": _fig2b,
    "fig3": _fig3,
    "fig4": _fig4,
    "fig5": _fig5,
    "fig6": _fig6,
    "table1": _table1,
    "table2": _table2,
    "custom": _custom,
}

# experiments whose x-axis (or N series) can be replaced with --sweep
SWEEPABLE = ("fig2a", "fig2b", "fig4", "fig5", "fig6", "custom")

BASE_OVERRIDES = {"fig3": FIG3_BASE, "table1": TABLE_BASE, "table2": TABLE_BASE}


def run_experiment(spec: ExperimentSpec, base: ScenarioConfig | None = None,
                   workers: int = 1) -> list[ResultTable]:
    """Run one registered experiment; returns one table per figure panel."""
    cfg = base or ScenarioConfig()
    cfg = cfg.with_overrides(BASE_OVERRIDES.get(spec.name, {}))
    cfg = cfg.with_overrides(spec.overrides)
    if spec.sweep is not None and spec.name not in SWEEPABLE:
        raise ExperimentError(f"{spec.name} does not take a sweep")
    return REGISTRY[spec.name](spec, cfg, workers)


# --- plot descriptions -----------------------------------------------------


@dataclass(frozen=True)
class PlotStyle:
    x: str
    y: str
    series: tuple[str, ...]
    x_label: str
    y_label: str
    x_log: bool = False
    y_log: bool = False
    title: str = ""


PLOT_STYLES = {
    "fig2a": PlotStyle("n_elements", "gamma0_db", ("series",), "N", "SNR at IRS (dB)", x_log=True,
                       title="Average SNR at the IRS versus N"),
    "fig2b": PlotStyle("n_elements", "snr_db", ("series",), "N", "SNR at user (dB)", x_log=True,
                       title="User SNR versus N"),
    "fig3": PlotStyle("p_i_dbm", "snr_db", ("scenario",), "P_i (dBm)", "SNR (dB)",
                      title="SNR versus reflect power"),
    "fig4": PlotStyle("k", "loss_db", ("kind", "n_elements", "series"), "k (bits)", "SNR loss (dB)",
                      title="SNR loss versus quantization bits"),
    "fig5": PlotStyle("k", "rate", ("n_elements", "series"), "k (bits)", "AR (bits/s/Hz)",
                      title="Achievable rate versus quantization bits"),
    "fig6": PlotStyle("k", "ber", ("n_elements", "series"), "k (bits)", "BER", y_log=True,
                      title="BER versus quantization bits"),
    "table1": PlotStyle("sigma_u_dbm", "rate_gain", ("sigma_i_dbm",), "sigma_u^2 (dBm)",
                        "Rate gain (bit)", title="Rate gain of optimal power split"),
    "table2": PlotStyle("sigma_i_dbm", "rate_gain", ("sigma_u_dbm",), "sigma_i^2 (dBm)",
                        "Rate gain (bit)", title="Rate gain of optimal power split"),
    "custom": PlotStyle("n_elements", "snr_db", ("series",), "sweep", "SNR at user (dB)"),
}


def plot_description(table: ResultTable, style: PlotStyle | None = None) -> str:
    """Self-contained JSON line-plot description of ``table``."""
    if not table.rows:
        raise ExperimentError("cannot describe an empty table")
    style = style or PLOT_STYLES[table.name]
    x = style.x if style.x in table.columns else table.columns[2]
    groups: dict[tuple, dict] = {}
    for r in table.rows:
        d = dict(zip(table.columns, r))
        key = tuple(d[c] for c in style.series)
        g = groups.setdefault(key, {
            "name": " / ".join(_fmt(v) for v in key),
            "provenance": d["provenance"],
            "x": [],
            "y": [],
        })
        g["x"].append(_jsonable(d[x]))
        g["y"].append(_jsonable(d[style.y]))
    doc = {
        "title": style.title or table.stem,
        "source": f"{table.stem}.csv",
        "type": "line",
        "x": {"column": x, "label": style.x_label, "scale": "log" if style.x_log else "linear"},
        "y": {"column": style.y, "label": style.y_label, "scale": "log" if style.y_log else "linear"},
        "series": list(groups.values()),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _jsonable(v):
    if isinstance(v, (np.integer,)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        return float(format(float(v), ".10g"))
    return v


def emit_plot_description(table: ResultTable, path: str | Path, style: PlotStyle | None = None) -> Path:
    path = Path(path)
    path.write_text(plot_description(table, style))
    return path


def write_outputs(tables: Sequence[ResultTable], out_dir: str | Path) -> list[Path]:
    """Write every table as CSV plus its plot description. All-or-nothing on empty tables."""
    out = Path(out_dir)
    docs = [(t, t.to_csv(), plot_description(t)) for t in tables]
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for t, text, plot in docs:
        p = out / f"{t.stem}.csv"
        p.write_text(text)
        q = out / f"{t.stem}.plot.json"
        q.write_text(plot)
        written += [p, q]
    return written
