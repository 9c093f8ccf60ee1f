"""Scenario configuration: flat typed key-value files, built-in scenarios.

Config files are flat YAML mappings whose keys embed their units
(``g_s1_mev``, ``dt_fs``, ...).  A ``ScenarioConfig`` keeps the flat mapping
as the source of truth (exact round-trip through files and CSV headers) and
derives the typed parameter objects from it on demand.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import yaml

from .errors import CavdotError, ConfigError
from .model import PulseSpec, SystemParams
from .propagator import IntegratorConfig

MEV_TO_EV = 1e-3

# key -> (python type, required)
KEY_SCHEMA = {
    "scenario": (str, True),
    "description": (str, False),
    "omega_qd1_ev": (float, True),
    "omega_qd2_ev": (float, True),
    "omega_pl_ev": (float, True),
    "omega_cav1_ev": (float, True),
    "omega_cav2_ev": (float, True),
    "g_s1_mev": (float, True),
    "g_s2_mev": (float, True),
    "g_mev": (float, True),
    "d_qd1_debye": (float, True),
    "d_qd2_debye": (float, True),
    "d_pl_debye": (float, True),
    "gamma_qd1_decay_mev": (float, True),
    "gamma_qd2_decay_mev": (float, True),
    "gamma_qd1_dephase_mev": (float, True),
    "gamma_qd2_dephase_mev": (float, True),
    "gamma_pl_mev": (float, True),
    "gamma_cav1_decay_mev": (float, True),
    "gamma_cav2_decay_mev": (float, True),
    "gamma_cav1_dephase_mev": (float, True),
    "gamma_cav2_dephase_mev": (float, True),
    "n_pl_levels": (int, True),
    "n_ph_levels": (int, True),
    "eps_med": (float, True),
    "pulse_shape": (str, True),
    "e_max_v_per_m": (float, True),
    "fwhm_fs": (float, True),
    "t_peak_fs": (float, True),
    "t0_fs": (float, True),
    "t1_fs": (float, True),
    "delta_fs": (float, True),
    "omega_drive_ev": (float, True),
    "dt_fs": (float, True),
    "t_end_fs": (float, True),
    "record_every_fs": (float, True),
    "renormalize_trace": (bool, True),
    "max_memory_gb": (float, False),
}


def _coerce(key, value):
    typ, _ = KEY_SCHEMA[key]
    if typ is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", key=key)
        return float(value)
    if typ is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", key=key)
        return int(value)
    if typ is bool:
        if not isinstance(value, bool):
            raise ConfigError(f"expected a boolean, got {value!r}", key=key)
        return value
    if not isinstance(value, str):
        raise ConfigError(f"expected a string, got {value!r}", key=key)
    return value


@dataclass(frozen=True)
class ScenarioConfig:
    """Validated flat configuration of one run."""

    values: tuple  # ((key, value), ...) in canonical order

    @classmethod
    def from_flat(cls, mapping):
        unknown = set(mapping) - set(KEY_SCHEMA)
        if unknown:
            raise ConfigError("unknown key", key=sorted(unknown)[0])
        missing = [k for k, (_, req) in KEY_SCHEMA.items() if req and k not in mapping]
        if missing:
            raise ConfigError("missing required key", key=missing[0])
        vals = []
        for key in KEY_SCHEMA:
            if key in mapping:
                vals.append((key, _coerce(key, mapping[key])))
        cfg = cls(values=tuple(vals))
        # building the typed objects validates cross-field invariants now
        try:
            cfg.params()
            cfg.pulse()
            cfg.integrator()
        except CavdotError as exc:
            raise ConfigError(str(exc), key="scenario") from exc
        return cfg

    def as_dict(self):
        return dict(self.values)

    @property
    def name(self):
        return self.as_dict()["scenario"]

    @property
    def description(self):
        return self.as_dict().get("description", "")

    def params(self):
        d = self.as_dict()
        return SystemParams(
            omega_qd=(d["omega_qd1_ev"], d["omega_qd2_ev"]),
            omega_pl=d["omega_pl_ev"],
            omega_cav=(d["omega_cav1_ev"], d["omega_cav2_ev"]),
            g_s=(d["g_s1_mev"] * MEV_TO_EV, d["g_s2_mev"] * MEV_TO_EV),
            g=d["g_mev"] * MEV_TO_EV,
            d_qd=(d["d_qd1_debye"], d["d_qd2_debye"]),
            d_pl=d["d_pl_debye"],
            gamma_qd_decay=(d["gamma_qd1_decay_mev"] * MEV_TO_EV,
                            d["gamma_qd2_decay_mev"] * MEV_TO_EV),
            gamma_qd_dephase=(d["gamma_qd1_dephase_mev"] * MEV_TO_EV,
                              d["gamma_qd2_dephase_mev"] * MEV_TO_EV),
            gamma_pl=d["gamma_pl_mev"] * MEV_TO_EV,
            gamma_cav_decay=(d["gamma_cav1_decay_mev"] * MEV_TO_EV,
                             d["gamma_cav2_decay_mev"] * MEV_TO_EV),
            gamma_cav_dephase=(d["gamma_cav1_dephase_mev"] * MEV_TO_EV,
                               d["gamma_cav2_dephase_mev"] * MEV_TO_EV),
            n_pl_levels=d["n_pl_levels"],
            n_ph_levels=d["n_ph_levels"],
            eps_med=d["eps_med"],
        )

    def pulse(self):
        d = self.as_dict()
        return PulseSpec(
            shape=d["pulse_shape"],
            e_max=d["e_max_v_per_m"],
            fwhm_fs=d["fwhm_fs"],
            t_peak_fs=d["t_peak_fs"],
            t0_fs=d["t0_fs"],
            t1_fs=d["t1_fs"],
            delta_fs=d["delta_fs"],
            omega_drive=d["omega_drive_ev"],
        )

    def integrator(self):
        d = self.as_dict()
        extra = {}
        if "max_memory_gb" in d:
            extra["max_memory_gb"] = d["max_memory_gb"]
        return IntegratorConfig(
            dt_fs=d["dt_fs"],
            t_end_fs=d["t_end_fs"],
            record_every_fs=d["record_every_fs"],
            renormalize_trace=d["renormalize_trace"],
            **extra,
        )

    def with_overrides(self, overrides):
        d = self.as_dict()
        for key, value in overrides.items():
            base = key.split(".")[0]
            if base not in KEY_SCHEMA:
                raise ConfigError("unknown key", key=key)
            if "." in key:
                raise ConfigError("keys are flat scalars; no nested fields", key=key)
            d[base] = value
        return ScenarioConfig.from_flat(d)


def _base_values():
    # Weak-coupling pulsed scenario: optimally asymmetric QD-plasmon
    # couplings, everything resonant at 2.05 eV, 20 fs Gaussian pulse.
    return {
        "scenario": "fig2",
        "description": (
            "weak QD-cavity coupling (xi = 0.268): concurrence forms after the "
            "pulse and photon correlations antibunch"
        ),
        "omega_qd1_ev": 2.05,
        "omega_qd2_ev": 2.05,
        "omega_pl_ev": 2.05,
        "omega_cav1_ev": 2.05,
        "omega_cav2_ev": 2.05,
        "g_s1_mev": 30.0,
        "g_s2_mev": 17.3,
        "g_mev": 1.0,
        "d_qd1_debye": 13.0,
        "d_qd2_debye": 13.0,
        "d_pl_debye": 4000.0,
        "gamma_qd1_decay_mev": 5e-5,
        "gamma_qd2_decay_mev": 5e-5,
        "gamma_qd1_dephase_mev": 8.6e-3,
        "gamma_qd2_dephase_mev": 8.6e-3,
        "gamma_pl_mev": 150.0,
        "gamma_cav1_decay_mev": 0.1,
        "gamma_cav2_decay_mev": 0.1,
        "gamma_cav1_dephase_mev": 8.6e-3,
        "gamma_cav2_dephase_mev": 8.6e-3,
        "n_pl_levels": 24,
        "n_ph_levels": 4,
        "eps_med": 2.25,
        "pulse_shape": "gaussian",
        "e_max_v_per_m": 2.5e6,
        "fwhm_fs": 20.0,
        "t_peak_fs": 36.3,
        "t0_fs": 0.0,
        "t1_fs": 0.0,
        "delta_fs": 10.0,
        "omega_drive_ev": 2.05,
        "dt_fs": 0.02,
        "t_end_fs": 1000.0,
        "record_every_fs": 1.0,
        "renormalize_trace": False,
    }


def _builtin_fig2():
    return _base_values()


def _builtin_fig3():
    v = _base_values()
    v["scenario"] = "fig3"
    v["description"] = ("strong QD-cavity coupling (xi = 2.68): synchronous "
                        "population, concurrence and g2 oscillations")
    v["g_mev"] = 10.0
    return v


def _builtin_fig4():
    v = _builtin_fig3()
    v["scenario"] = "fig4"
    v["description"] = ("strong coupling with two-level cavities (N_ph = 2): "
                        "entanglement transfer between QDs and photons")
    v["n_ph_levels"] = 2
    return v


def _builtin_fig5():
    v = _base_values()
    v["scenario"] = "fig5"
    v["description"] = ("entanglement storage, main case: QD decay 500 ueV, "
                        "Q = 1e6 cavities, g = 10 meV; pulse reused from fig2 "
                        "(the storage runs do not specify their own pulse)")
    v["g_mev"] = 10.0
    v["gamma_qd1_decay_mev"] = 0.5
    v["gamma_qd2_decay_mev"] = 0.5
    v["gamma_cav1_decay_mev"] = 2.05e-3
    v["gamma_cav2_decay_mev"] = 2.05e-3
    v["t_end_fs"] = 5000.0
    return v


def _builtin_fig5_open():
    v = _builtin_fig5()
    v["scenario"] = "fig5_open"
    v["description"] = "entanglement storage, main case, open geometry (g = 0)"
    v["g_mev"] = 0.0
    return v


def _builtin_fig5_inset():
    v = _builtin_fig5()
    v["scenario"] = "fig5_inset"
    v["description"] = ("entanglement storage, inset case: QD decay 50 ueV, "
                        "g = 3 meV; pulse reused from fig2")
    v["g_mev"] = 3.0
    v["gamma_qd1_decay_mev"] = 0.05
    v["gamma_qd2_decay_mev"] = 0.05
    v["t_end_fs"] = 9200.0
    return v


def _builtin_fig5_inset_open():
    v = _builtin_fig5_inset()
    v["scenario"] = "fig5_inset_open"
    v["description"] = "entanglement storage, inset case, open geometry (g = 0)"
    v["g_mev"] = 0.0
    return v


def _builtin_fig6():
    v = _base_values()
    v["scenario"] = "fig6"
    v["description"] = ("symmetric QD-plasmon coupling (30/30 meV): no "
                        "entanglement forms and g2_12 tends to 1")
    v["g_s2_mev"] = 30.0
    return v


def _builtin_fig7():
    v = _base_values()
    v["scenario"] = "fig7"
    v["description"] = ("CW-like flat-top pumping (720 fs, delta = 10 fs), strong "
                        "coupling: no entanglement while the pump is on; "
                        "concurrence forms after turn-off")
    v["g_mev"] = 10.0
    v["pulse_shape"] = "flat_top"
    v["t0_fs"] = 40.0
    v["t1_fs"] = 760.0
    v["delta_fs"] = 10.0
    v["t_end_fs"] = 1400.0
    return v


_BUILTIN_FACTORIES = {
    "fig2": _builtin_fig2,
    "fig3": _builtin_fig3,
    "fig4": _builtin_fig4,
    "fig5": _builtin_fig5,
    "fig5_open": _builtin_fig5_open,
    "fig5_inset": _builtin_fig5_inset,
    "fig5_inset_open": _builtin_fig5_inset_open,
    "fig6": _builtin_fig6,
    "fig7": _builtin_fig7,
}


def builtin_names():
    return list(_BUILTIN_FACTORIES)


def builtin_description(name):
    return _BUILTIN_FACTORIES[name]()["description"]


def load_config(name_or_path):
    """A built-in scenario by name, or a flat YAML config file by path."""
    if name_or_path in _BUILTIN_FACTORIES:
        return ScenarioConfig.from_flat(_BUILTIN_FACTORIES[name_or_path]())
    path = Path(name_or_path)
    if not path.exists():
        raise ConfigError(
            f"not a built-in scenario ({', '.join(builtin_names())}) "
            f"and no such file: {name_or_path}"
        )
    try:
        raw = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}")
    if not isinstance(raw, dict):
        raise ConfigError(f"config {path} must be a flat mapping")
    return ScenarioConfig.from_flat(raw)


def dump_config(config, path):
    Path(path).write_text(config_to_yaml(config))


def config_to_yaml(config):
    # one key per line, canonical order preserved
    lines = [
        yaml.safe_dump({key: value}, default_flow_style=False, width=2**30).strip()
        for key, value in config.values
    ]
    return "\n".join(lines) + "\n"
