"""Named experiment presets reproducing the reference studies, plus TOML
config loading with CLI-style overrides.

Config files use flat TOML tables: top-level experiment keys and an
optional ``[scenario]`` table. Every preset can be dumped to a starting
config with ``describe_presets``.
"""

import dataclasses
import sys

from .experiments import ExperimentConfig, ScenarioConfig

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

_SNR_GRID = tuple(float(v) for v in range(-20, 45, 5))
_SNAPSHOT_GRID = tuple(range(10, 110, 10))


def _sinr(mismatch: str, sweep: str, **scen) -> ExperimentConfig:
    scenario = ScenarioConfig(mismatch=mismatch, **scen)
    if sweep == "snr":
        return ExperimentConfig(scenario=scenario, sweep="snr", sweep_values=_SNR_GRID)
    return ExperimentConfig(scenario=dataclasses.replace(scenario, snr_db=20.0),
                            sweep="snapshots", sweep_values=_SNAPSHOT_GRID)


def _beampattern(kind: str) -> ExperimentConfig:
    values = (0.1, 0.5, 0.9) if kind == "beampattern_rho" else (0.1, 1.0, 10.0)
    return ExperimentConfig(scenario=ScenarioConfig(snr_db=-10.0),
                            sweep=kind, sweep_values=values, trials=1)


PRESETS = {
    # correlation heatmap of reconstruction vs truth at low SNR
    "fig1": ExperimentConfig(scenario=ScenarioConfig(snr_db=-20.0),
                             sweep="correlation", sweep_values=(0,), trials=10),
    "fig3": _beampattern("beampattern_rho"),
    "fig4": _beampattern("beampattern_eta"),
    "fig5": _sinr("look_direction", "snr"),
    "fig6": _sinr("look_direction", "snapshots"),
    "fig7": _sinr("random_sv", "snr"),
    "fig8": _sinr("random_sv", "snapshots"),
    "fig9": _sinr("gain_phase", "snr"),
    "fig10": _sinr("gain_phase", "snapshots"),
    "fig11": _sinr("geometry", "snr", snapshots=50),
    "fig12": _sinr("geometry", "snapshots"),
    # tracker MSE against the bound, single tracked source
    "crb": ExperimentConfig(
        scenario=ScenarioConfig(interferer_doas=(30.0,), inr_db=(30.0,)),
        sweep="crb", sweep_values=tuple(float(v) for v in range(-20, 35, 5)),
        methods=("ppbss",)),
}
PRESETS["correlation"] = PRESETS["fig1"]
PRESETS["beampattern_rho"] = PRESETS["fig3"]
PRESETS["beampattern_eta"] = PRESETS["fig4"]


def preset(name: str) -> ExperimentConfig:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(f"unknown preset {name!r}; known: {', '.join(sorted(PRESETS))}")


def describe_presets() -> str:
    lines = []
    for name, cfg in PRESETS.items():
        lines.append(f"{name:16s} sweep={cfg.sweep:16s} mismatch={cfg.scenario.mismatch}")
    return "\n".join(lines)


def load_config(path: str = None, preset_name: str = None, **overrides) -> ExperimentConfig:
    """Build a config from an optional preset, optional TOML file, and overrides.

    Precedence: overrides > file keys > preset > defaults. The file may
    itself name a ``preset`` to start from.
    """
    doc = {}
    if path is not None:
        with open(path, "rb") as fh:
            doc = _toml.load(fh)
    base_name = preset_name or doc.pop("preset", None)
    config = preset(base_name) if base_name else ExperimentConfig()

    scen_doc = doc.pop("scenario", {})
    if scen_doc:
        config = dataclasses.replace(config,
                                     scenario=_apply(config.scenario, scen_doc))
    if doc:
        config = _apply(config, doc)

    scen_over = {k: overrides.pop(k) for k in list(overrides)
                 if k in {f.name for f in dataclasses.fields(ScenarioConfig)}
                 and k not in {f.name for f in dataclasses.fields(ExperimentConfig)}}
    if scen_over:
        config = dataclasses.replace(config,
                                     scenario=_apply(config.scenario, scen_over))
    overrides = {k: v for k, v in overrides.items() if v is not None}
    if overrides:
        config = _apply(config, overrides)
    return config


def _apply(obj, updates: dict):
    names = {f.name for f in dataclasses.fields(obj)}
    unknown = set(updates) - names
    if unknown:
        raise KeyError(f"unknown config keys: {sorted(unknown)}")
    coerced = {}
    for key, val in updates.items():
        if isinstance(val, list):
            val = tuple(val)
        coerced[key] = val
    return dataclasses.replace(obj, **coerced)
