#!/usr/bin/env python3
"""Level-count and step-size convergence scan for a scenario window.

Prints the max relative change of each observable column against the most
refined member of the scan, e.g.:

    python scripts/convergence_scan.py --scenario fig2 --t-end 200 \
        --scan n_pl_levels 8 12 24
    python scripts/convergence_scan.py --scenario fig2 --t-end 150 \
        --scan dt_fs 0.04 0.02 0.01
"""

import argparse

import numpy as np

from cavdot.model import Model
from cavdot.propagator import evolve
from cavdot.scenarios import load_config

COLUMNS = ("n_qd1", "n_qd2", "n_pl", "n_cav1", "n_cav2", "C", "g2_12")


def run_one(name, overrides):
    cfg = load_config(name).with_overrides(overrides)
    model = Model(cfg.params(), cfg.pulse())
    return evolve(model, cfg.integrator())


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--scenario", default="fig2")
    ap.add_argument("--t-end", type=float, default=200.0)
    ap.add_argument("--dt", type=float, default=0.05)
    ap.add_argument("--scan", nargs="+", required=True,
                    metavar=("KEY", "VALUES"),
                    help="config key followed by the values to scan")
    args = ap.parse_args()

    key, *raw_values = args.scan
    values = [int(v) if v.isdigit() else float(v) for v in raw_values]
    base = {"t_end_fs": args.t_end, "dt_fs": args.dt}

    runs = {}
    for v in values:
        overrides = dict(base)
        overrides[key] = v
        print(f"running {args.scenario} with {key} = {v} ...", flush=True)
        runs[v] = run_one(args.scenario, overrides)

    ref = runs[values[-1]]
    print(f"\nmax relative change vs {key} = {values[-1]}:")
    for v in values[:-1]:
        deltas = {}
        for col in COLUMNS:
            a, b = runs[v][col], ref[col]
            n = min(len(a), len(b))
            a, b = a[:n], b[:n]
            ok = np.isfinite(a) & np.isfinite(b)
            scale = max(float(np.abs(b[ok]).max(initial=0.0)), 1e-12)
            deltas[col] = float(np.abs(a[ok] - b[ok]).max(initial=0.0)) / scale
        worst = max(deltas, key=deltas.get)
        print(f"  {key} = {v}: worst column {worst} -> {deltas[worst]:.3e}   "
              + "  ".join(f"{c}:{d:.1e}" for c, d in deltas.items()))


if __name__ == "__main__":
    main()
