"""Reader for the scenario CSV contract.

A file is a ``#``-prefixed header block (version line, scenario line, flat
``key: value`` config echo), one comma-separated column-name line, then data
rows.  Empty fields are undefined values and parse to NaN.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import yaml

REQUIRED_COLUMNS = (
    "t_fs", "n_qd1", "n_qd2", "n_pl", "n_cav1", "n_cav2", "n_total",
    "C", "C_ph", "C_tot", "F2", "g2_11", "g2_22", "g2_12", "trace_err",
)


class ColumnError(KeyError):
    """A required CSV column is missing."""

    def __init__(self, column, path):
        super().__init__(f"column {column!r} missing from {path}")
        self.column = column


@dataclass
class SeriesFile:
    """Parsed scenario CSV: config echo + named columns."""

    path: str
    config: dict
    columns: dict
    truncated: str | None = None

    def __getitem__(self, name):
        return self.columns[name]

    @property
    def times(self):
        return self.columns["t_fs"]

    @property
    def n_rows(self):
        return len(self.columns["t_fs"])

    def sample_interval(self):
        t = self.times
        return float(t[1] - t[0]) if len(t) > 1 else float("nan")


def read_series(path, required=REQUIRED_COLUMNS):
    config_lines = []
    names = None
    rows = []
    truncated = None
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if line.startswith("# TRUNCATED"):
                truncated = line.lstrip("# ").strip()
                continue
            if line.startswith("#"):
                body = line[1:].strip()
                if ":" in body and body != "config:":
                    config_lines.append(body)
                continue
            if names is None:
                names = line.split(",")
                continue
            if line:
                rows.append([float(v) if v else float("nan") for v in line.split(",")])
    if names is None:
        raise ColumnError(required[0], path)
    for col in required:
        if col not in names:
            raise ColumnError(col, path)
    config = {}
    for body in config_lines:
        try:
            item = yaml.safe_load(body)
        except yaml.YAMLError:
            continue
        if isinstance(item, dict):
            for k, v in item.items():
                config.setdefault(k, v)
    data = np.asarray(rows, dtype=float) if rows else np.zeros((0, len(names)))
    columns = {name: data[:, i] for i, name in enumerate(names)}
    return SeriesFile(path=str(path), config=config, columns=columns,
                      truncated=truncated)


def flat_top_envelope(config, t):
    """Reconstruct the flat-top drive envelope from the config echo."""
    t = np.asarray(t, dtype=float)
    t0 = float(config["t0_fs"])
    t1 = float(config["t1_fs"])
    d = float(config["delta_fs"])
    e_max = float(config["e_max_v_per_m"])

    def inv_term(x):
        return 0.5 * (1.0 + np.exp(np.clip(-2.0 * x, -745.0, 709.0)))

    tc = 0.5 * (t0 + t1)
    num = inv_term((tc - t0) / d) + inv_term((t1 - tc) / d)
    den = inv_term((t - t0) / d) + inv_term((t1 - t) / d)
    return e_max * num / den
