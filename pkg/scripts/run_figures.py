#!/usr/bin/env python3
"""Regenerate every scenario CSV (and, with figkit installed, the figures).

--fast applies the same reductions the acceptance suite uses so the whole
set finishes in a few hours on a small machine; omit it for the full
reference numerics (N_pl = 24, dt = 0.02 fs everywhere).
"""

import argparse
import shutil
import subprocess
import sys
from pathlib import Path

from cavdot.runner import run
from cavdot.scenarios import load_config

FAST = {
    "fig2": {"n_pl_levels": 8},
    "fig3": {"n_pl_levels": 8, "dt_fs": 0.04},
    "fig4": {"n_pl_levels": 8},
    "fig5": {"n_pl_levels": 6, "dt_fs": 0.1},
    "fig5_open": {"n_pl_levels": 6, "dt_fs": 0.1},
    "fig5_inset": {"n_pl_levels": 6, "dt_fs": 0.2},
    "fig5_inset_open": {"n_pl_levels": 6, "dt_fs": 0.2},
    "fig6": {"n_pl_levels": 8, "dt_fs": 0.04},
    "fig7": {"n_pl_levels": 8, "dt_fs": 0.04},
}

FIGURES = {
    "fig2": ["fig2"],
    "fig3": ["fig3"],
    "fig4": ["fig4"],
    "fig5": ["fig5", "fig5_open"],
    "fig6": ["fig6"],
    "fig7": ["fig7"],
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="runs", help="output directory")
    ap.add_argument("--fast", action="store_true",
                    help="reduced N_pl / coarser dt (acceptance-suite settings)")
    ap.add_argument("--scenarios", nargs="*", default=list(FAST),
                    help="subset of scenarios to run")
    ap.add_argument("--figures", action="store_true",
                    help="also render figures via figkit")
    args = ap.parse_args()

    out = Path(args.out)
    for name in args.scenarios:
        cfg = load_config(name)
        if args.fast:
            cfg = cfg.with_overrides(FAST[name])
        print(f"== {name} (dim {cfg.params().layout().total_dim}, "
              f"dt {cfg.integrator().dt_fs} fs, t_end {cfg.integrator().t_end_fs} fs)")
        summary, csv_path, _ = run(cfg, out)
        print(f"   wall {summary.wall_time_s:.0f} s -> {csv_path}")

    if args.figures:
        if shutil.which("figkit") is None:
            print("figkit not installed; skipping figure rendering", file=sys.stderr)
            return
        for fig, inputs in FIGURES.items():
            csvs = [out / f"{n}.csv" for n in inputs]
            if not all(p.exists() for p in csvs):
                continue
            cmd = ["figkit", "render", "--figure", fig, "--out", str(out / f"{fig}.png")]
            for p in csvs:
                cmd += ["--csv", str(p)]
            subprocess.run(cmd, check=True)
            print(f"   rendered {out / (fig + '.png')}")


if __name__ == "__main__":
    main()
