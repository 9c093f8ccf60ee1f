"""Run scenarios: CSV time series, run summaries, storage comparison.

CSV contract: a ``#``-prefixed header block carrying the package version and
the full resolved config, one column-name line, then comma-separated rows in
the fixed column order below.  Undefined values (g2 below the population
floor, C_ph/C_tot at N_ph != 2) are emitted as empty fields.  Floats are
written with ``repr`` so parsing the file back reproduces them exactly.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from . import __version__
from .errors import ConfigError, NumericBlowupError
from .model import Model, fluence, purcell_rate, effective_xi
from .observables import OscillationReport, analyze_oscillations
from .propagator import evolve
from .scenarios import KEY_SCHEMA, ScenarioConfig

CSV_COLUMNS = (
    "t_fs", "n_qd1", "n_qd2", "n_pl", "n_cav1", "n_cav2", "n_total",
    "C", "C_ph", "C_tot", "F2", "g2_11", "g2_22", "g2_12", "trace_err",
)

# concurrence onset = first sample where C exceeds the threshold and stays
# above it for the dwell window; the dwell rejects the brief sub-0.01 blip a
# strong pulse can produce while it is still on
C_ONSET_THRESHOLD = 1e-3
C_ONSET_DWELL_FS = 25.0


def concurrence_onset(times, c_values, threshold=C_ONSET_THRESHOLD,
                      dwell_fs=C_ONSET_DWELL_FS):
    """First time C rises above `threshold` and stays there for `dwell_fs`.

    A run that is still above threshold when the series ends also counts.
    """
    t = np.asarray(times, dtype=float)
    c = np.asarray(c_values, dtype=float)
    above = c > threshold
    n = len(t)
    i = 0
    while i < n:
        if not above[i]:
            i += 1
            continue
        j = i
        while j < n and above[j]:
            j += 1
        if j == n or t[j - 1] - t[i] >= dwell_fs:
            return float(t[i])
        i = j
    return float("nan")


def _fmt(x):
    if isinstance(x, float) and math.isnan(x):
        return ""
    return repr(float(x))


def write_csv_header(fh, config):
    fh.write(f"# cavdot {__version__}\n")
    fh.write(f"# scenario: {config.name}\n")
    fh.write("# config:\n")
    for key, value in config.values:
        fh.write(f"#   {yaml.safe_dump({key: value}, default_flow_style=False, width=2**30).strip()}\n")
    fh.write(",".join(CSV_COLUMNS) + "\n")


def _row_values(t, rec, diag):
    return (t, rec.n_qd1, rec.n_qd2, rec.n_pl, rec.n_cav1, rec.n_cav2,
            rec.n_total, rec.c, rec.c_ph, rec.c_tot, rec.f2,
            rec.g2_11, rec.g2_22, rec.g2_12, diag["trace_err"])


def read_csv(path):
    """Parse a scenario CSV back into (ScenarioConfig, columns dict)."""
    config_lines = []
    names = None
    rows = []
    truncated = None
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# TRUNCATED"):
                truncated = line[1:].strip()
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body and not body.startswith("cavdot") and body != "config:":
                    config_lines.append(body)
                continue
            if names is None:
                names = line.split(",")
                continue
            if line:
                rows.append([float(v) if v else float("nan") for v in line.split(",")])
    flat = {}
    for body in config_lines:
        if body.startswith("scenario:") and "scenario" in flat:
            continue
        item = yaml.safe_load(body)
        if isinstance(item, dict):
            flat.update(item)
    config = ScenarioConfig.from_flat({k: v for k, v in flat.items() if k in KEY_SCHEMA})
    data = np.array(rows) if rows else np.zeros((0, len(names)))
    columns = {name: data[:, k] for k, name in enumerate(names)}
    return config, columns, truncated


@dataclass
class RunSummary:
    """Headline statistics of one run; everything except wall time is
    recomputable from the emitted CSV."""

    scenario: str
    wall_time_s: float
    max_trace_err: float
    onset_t_fs: float  # NaN if concurrence never rises above threshold
    c_max: float
    c_max_t_fs: float
    c_oscillation: dict
    g2_12_oscillation: dict
    xi: float
    fluence_nj_cm2: float
    purcell_rate_mev: float
    n_samples: int
    version: str = __version__

    def to_dict(self):
        return {
            "scenario": self.scenario,
            "version": self.version,
            "wall_time_s": self.wall_time_s,
            "n_samples": self.n_samples,
            "max_trace_err": self.max_trace_err,
            "onset_t_fs": self.onset_t_fs,
            "c_max": self.c_max,
            "c_max_t_fs": self.c_max_t_fs,
            "c_oscillation": self.c_oscillation,
            "g2_12_oscillation": self.g2_12_oscillation,
            "xi": self.xi,
            "fluence_nj_cm2": self.fluence_nj_cm2,
            "purcell_rate_mev": self.purcell_rate_mev,
        }

    def write(self, path):
        Path(path).write_text(yaml.safe_dump(self.to_dict(), sort_keys=False))


def _osc_dict(report):
    return {
        "peak_times_fs": list(report.peak_times),
        "peak_values": list(report.peak_values),
        "mean_period_fs": report.mean_period,
        "modulation_k": report.modulation_k,
    }


def summarize(config, times, columns, wall_time_s):
    """Statistics of a finished run from its recorded series."""
    params = config.params()
    pulse = config.pulse()
    c = np.asarray(columns["C"], dtype=float)
    t = np.asarray(times, dtype=float)
    if len(t):
        onset = concurrence_onset(t, c)
        imax = int(np.argmax(c))
        c_max, c_max_t = float(c[imax]), float(t[imax])
        c_osc = analyze_oscillations(t, c) if len(t) >= 3 else OscillationReport((), (), float("nan"), 0.0)
        g2_osc = analyze_oscillations(t, columns["g2_12"]) if len(t) >= 3 else OscillationReport((), (), float("nan"), 0.0)
    else:
        onset = c_max = c_max_t = float("nan")
        c_osc = g2_osc = OscillationReport((), (), float("nan"), 0.0)
    return RunSummary(
        scenario=config.name,
        wall_time_s=wall_time_s,
        max_trace_err=float(np.max(columns["trace_err"])) if len(t) else 0.0,
        onset_t_fs=onset,
        c_max=c_max,
        c_max_t_fs=c_max_t,
        c_oscillation=_osc_dict(c_osc),
        g2_12_oscillation=_osc_dict(g2_osc),
        xi=effective_xi(params.g, params.g_s_avg(), params.gamma_pl),
        fluence_nj_cm2=fluence(pulse, params.eps_med),
        purcell_rate_mev=purcell_rate(params.g_s_avg(), params.gamma_pl) * 1e3,
        n_samples=len(t),
    )


def run(config, out_dir, keep_trajectory=False):
    """Run one scenario; write ``<name>.csv`` and ``<name>.summary.yaml``.

    On numeric blowup the partial CSV is flushed with a trailing
    ``# TRUNCATED`` marker row and the error is re-raised.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{config.name}.csv"
    summary_path = out_dir / f"{config.name}.summary.yaml"

    model = Model(config.params(), config.pulse())
    times, recs = [], []
    t0 = time.perf_counter()
    with open(csv_path, "w") as fh:
        write_csv_header(fh, config)

        def on_sample(t, rec, diag):
            times.append(t)
            recs.append((rec, diag))
            fh.write(",".join(_fmt(v) for v in _row_values(t, rec, diag)) + "\n")

        try:
            traj = evolve(model, config.integrator(), sample_callback=on_sample)
        except NumericBlowupError as exc:
            fh.write(f"# TRUNCATED at t = {exc.t_fs} fs: {exc}\n")
            raise

    wall = time.perf_counter() - t0
    columns = {
        "C": np.array([r.c for r, _ in recs]),
        "g2_12": np.array([r.g2_12 for r, _ in recs]),
        "trace_err": np.array([d["trace_err"] for _, d in recs]),
    }
    summary = summarize(config, np.array(times), columns, wall)
    summary.write(summary_path)
    if keep_trajectory:
        return summary, csv_path, summary_path, traj
    return summary, csv_path, summary_path


@dataclass
class StorageComparison:
    """Concurrence ratio between a cavity-coupled and an open-geometry run."""

    t_star_fs: float
    c_cavity: float
    c_open: float
    ratio: float
    scenario_cavity: str
    scenario_open: str


def _interp(times, values, t_star):
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if t_star < t[0] or t_star > t[-1]:
        raise ConfigError(f"t_star = {t_star} fs outside the recorded window "
                          f"[{t[0]}, {t[-1]}] fs")
    return float(np.interp(t_star, t, v))


def check_storage_pair(cfg_a, cfg_b):
    """The two configs may differ only in the QD-cavity coupling (and labels)."""
    da, db = cfg_a.as_dict(), cfg_b.as_dict()
    ignore = {"scenario", "description", "g_mev"}
    for key in set(da) | set(db):
        if key in ignore:
            continue
        if da.get(key) != db.get(key):
            raise ConfigError(
                f"storage pair must differ only in g_mev; {key} differs "
                f"({da.get(key)!r} vs {db.get(key)!r})", key=key)


def compare_storage(cfg_cavity, cfg_open, t_star_fs, out_dir=None):
    """Run both configs and report C_cavity(t*) / C_open(t*)."""
    check_storage_pair(cfg_cavity, cfg_open)
    results = {}
    for cfg in (cfg_cavity, cfg_open):
        if out_dir is not None:
            _, csv_path, _ = run(cfg, out_dir)
            _, cols, _ = read_csv(csv_path)
            t_arr = cols["t_fs"]
            c_arr = cols["C"]
        else:
            model = Model(cfg.params(), cfg.pulse())
            traj = evolve(model, cfg.integrator())
            t_arr, c_arr = traj.times, traj["C"]
        results[cfg.name] = (t_arr, c_arr)
    ta, ca = results[cfg_cavity.name]
    tb, cb = results[cfg_open.name]
    c_a = _interp(ta, ca, t_star_fs)
    c_b = _interp(tb, cb, t_star_fs)
    if c_b == 0.0:
        raise ConfigError("open-geometry concurrence is exactly zero at t*; no ratio")
    return StorageComparison(
        t_star_fs=t_star_fs,
        c_cavity=c_a,
        c_open=c_b,
        ratio=c_a / c_b,
        scenario_cavity=cfg_cavity.name,
        scenario_open=cfg_open.name,
    )
