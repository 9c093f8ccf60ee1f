"""Command-line front end.

Exit codes: 0 ok, 1 usage, 2 config parse/validation error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor

import yaml

from .errors import ConfigError, NumericBlowupError
from .runner import compare_storage, run
from .scenarios import builtin_description, builtin_names, load_config

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_PARSE = 2
EXIT_NUMERIC = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def _parse_overrides(pairs):
    out = {}
    for item in pairs or []:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        try:
            out[key.strip()] = yaml.safe_load(raw)
        except yaml.YAMLError:
            raise ConfigError(f"could not parse value {raw!r}", key=key)
    return out


def _load_with_overrides(name, overrides):
    return load_config(name).with_overrides(overrides)


def _run_one(args_tuple):
    name, overrides, out_dir = args_tuple
    cfg = _load_with_overrides(name, overrides)
    summary, csv_path, summary_path = run(cfg, out_dir)
    return cfg.name, summary, csv_path, summary_path


def _print_summary(summary):
    d = summary.to_dict()
    print(f"scenario {d['scenario']}: {d['n_samples']} samples, "
          f"wall {d['wall_time_s']:.1f} s")
    print(f"  max |Tr rho - 1| = {d['max_trace_err']:.3e}")
    print(f"  C onset = {d['onset_t_fs']} fs; "
          f"max C = {d['c_max']:.4g} at t = {d['c_max_t_fs']} fs")
    print(f"  xi = {d['xi']:.4g}, fluence = {d['fluence_nj_cm2']:.4g} nJ/cm^2, "
          f"Purcell rate = {d['purcell_rate_mev']:.4g} meV")


def main(argv=None):
    parser = _Parser(prog="cavdot",
                     description="Lindblad dynamics of plasmonically coupled "
                                 "quantum-dot qubits in photonic cavities")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one or more scenarios")
    p_run.add_argument("scenarios", nargs="+",
                       help="built-in scenario names or config file paths")
    p_run.add_argument("--set", dest="overrides", action="append", metavar="KEY=VALUE",
                       help="override a config key (repeatable)")
    p_run.add_argument("--out", default="runs", help="output directory")
    p_run.add_argument("--jobs", type=int, default=1,
                       help="run independent scenarios in parallel")

    sub.add_parser("list", help="list built-in scenarios")

    p_val = sub.add_parser("validate", help="validate a config file")
    p_val.add_argument("path")

    p_cmp = sub.add_parser("compare-storage",
                           help="concurrence ratio of a cavity/open scenario pair")
    p_cmp.add_argument("cavity", help="scenario with g > 0")
    p_cmp.add_argument("open", help="matching scenario with g = 0")
    p_cmp.add_argument("--t-star", type=float, required=True, metavar="FS",
                       help="comparison time t* in fs")
    p_cmp.add_argument("--set", dest="overrides", action="append", metavar="KEY=VALUE",
                       help="override a config key on both runs (repeatable)")
    p_cmp.add_argument("--out", default=None, help="also write both CSVs here")

    args = parser.parse_args(argv)
    try:
        if args.command == "list":
            for name in builtin_names():
                print(f"{name:16s} {builtin_description(name)}")
            return EXIT_OK

        if args.command == "validate":
            load_config(args.path)
            print(f"{args.path}: OK")
            return EXIT_OK

        if args.command == "run":
            overrides = _parse_overrides(args.overrides)
            tasks = [(name, overrides, args.out) for name in args.scenarios]
            if args.jobs > 1 and len(tasks) > 1:
                with ProcessPoolExecutor(max_workers=args.jobs) as pool:
                    results = list(pool.map(_run_one, tasks))
            else:
                results = [_run_one(t) for t in tasks]
            for _, summary, csv_path, summary_path in results:
                _print_summary(summary)
                print(f"  wrote {csv_path} and {summary_path}")
            return EXIT_OK

        if args.command == "compare-storage":
            overrides = _parse_overrides(args.overrides)
            cfg_a = _load_with_overrides(args.cavity, overrides)
            cfg_b = _load_with_overrides(args.open, overrides)
            cmp = compare_storage(cfg_a, cfg_b, args.t_star, out_dir=args.out)
            print(f"C_cavity({cmp.t_star_fs} fs) = {cmp.c_cavity:.6g}")
            print(f"C_open({cmp.t_star_fs} fs)   = {cmp.c_open:.6g}")
            print(f"ratio = {cmp.ratio:.4g}")
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except NumericBlowupError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
