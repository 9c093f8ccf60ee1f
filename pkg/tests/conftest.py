"""Shared fixtures: cached scenario runs and the acceptance criterion report.

Setting CAVDOT_TEST_CACHE=1 caches trajectories under tests/.cache keyed by
the exact config, which makes acceptance-test development iterations cheap.
Leave it unset for an honest cold run.
"""

import hashlib
import os
from pathlib import Path

import numpy as np
import pytest

from cavdot.model import Model
from cavdot.propagator import Trajectory, evolve
from cavdot.scenarios import config_to_yaml

CACHE_DIR = Path(__file__).parent / ".cache"

_ACCEPTANCE_RESULTS = []


def record_criterion(name, passed, detail=""):
    _ACCEPTANCE_RESULTS.append((name, bool(passed), detail))


def criterion(name, passed, detail=""):
    record_criterion(name, passed, detail)
    assert passed, f"{name}: {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, passed, detail in _ACCEPTANCE_RESULTS:
        status = "PASS" if passed else "FAIL"
        line = f"{status}  {name}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)


def run_scenario(config):
    """Evolve a scenario config, with opt-in on-disk caching for development."""
    use_cache = os.environ.get("CAVDOT_TEST_CACHE", "") == "1"
    key = hashlib.sha256(config_to_yaml(config).encode()).hexdigest()[:24]
    cache_file = CACHE_DIR / f"{key}.npz"
    if use_cache and cache_file.exists():
        data = np.load(cache_file, allow_pickle=False)
        columns = {k[4:]: data[k] for k in data.files if k.startswith("col_")}
        return Trajectory(
            times=data["times"],
            columns=columns,
            layout_dims=tuple(int(x) for x in data["layout_dims"]),
            n_ph_levels=int(data["n_ph_levels"]),
        )
    model = Model(config.params(), config.pulse())
    traj = evolve(model, config.integrator())
    if use_cache:
        CACHE_DIR.mkdir(exist_ok=True)
        np.savez_compressed(
            cache_file,
            times=traj.times,
            layout_dims=np.array(traj.layout_dims),
            n_ph_levels=traj.n_ph_levels,
            **{f"col_{k}": v for k, v in traj.columns.items()},
        )
    return traj
