"""JSON run configuration: documented defaults, unknown keys rejected.

All times are expressed in units of the pulse width sigma_t (the internal
width is fixed to 1), so tau values and drift magnitudes are dimensionless.
"""

import json
from dataclasses import dataclass

from .channels import DeviceModel
from .montecarlo import DriftSpec, ExperimentConfig
from .pulses import PulseSpec


class ConfigError(ValueError):
    pass


DEFAULTS = {
    "mode_cutoff": 8,
    "tau_grid": [i / 6.0 for i in range(7)],
    "gammas": [0.0, 0.125, 0.25, 0.375, 0.5],
    "repetitions": 100,
    "mean_total_detections": 1e4,
    "master_seed": 0,
    "device": {"crosstalk_eps": 0.0, "efficiency": 1.0, "dark_rate": 0.0},
    "drift": None,           # or {"std": ..., "recenter_period": 10}
    "calibration": {"repetitions": None, "reuse_records": False},
}


@dataclass(frozen=True)
class RunConfig:
    experiment: ExperimentConfig
    calibration_repetitions: int | None
    reuse_records_for_calibration: bool
    raw: dict                # merged config as echoed into manifests


def _merge(defaults, data, path):
    if not isinstance(data, dict):
        raise ConfigError(f"config section {path or 'top level'} must be an object")
    unknown = set(data) - set(defaults)
    if unknown:
        key = sorted(unknown)[0]
        raise ConfigError(f"unknown config key {path}{key!r}")
    merged = {}
    for key, default in defaults.items():
        if key in data and isinstance(default, dict) and data[key] is not None:
            merged[key] = _merge(default, data[key], f"{path}{key}.")
        elif key in data:
            merged[key] = data[key]
        else:
            merged[key] = default
    return merged


def from_dict(data: dict) -> RunConfig:
    merged = _merge(DEFAULTS, data, "")
    try:
        drift = None
        if merged["drift"] is not None:
            drift_merged = _merge({"std": 0.0, "recenter_period": 10},
                                  merged["drift"], "drift.")
            drift = DriftSpec(std=float(drift_merged["std"]),
                              recenter_period=int(drift_merged["recenter_period"]))
            merged["drift"] = drift_merged
        experiment = ExperimentConfig(
            spec=PulseSpec(sigma_t=1.0, mode_cutoff=int(merged["mode_cutoff"])),
            tau_grid=tuple(float(t) for t in merged["tau_grid"]),
            gammas=tuple(float(g) for g in merged["gammas"]),
            repetitions=int(merged["repetitions"]),
            mean_total_detections=float(merged["mean_total_detections"]),
            device=DeviceModel(
                crosstalk_eps=float(merged["device"]["crosstalk_eps"]),
                efficiency=float(merged["device"]["efficiency"]),
                dark_rate=float(merged["device"]["dark_rate"])),
            drift=drift,
            master_seed=int(merged["master_seed"]),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    cal = merged["calibration"]
    cal_reps = None if cal["repetitions"] is None else int(cal["repetitions"])
    return RunConfig(experiment=experiment,
                     calibration_repetitions=cal_reps,
                     reuse_records_for_calibration=bool(cal["reuse_records"]),
                     raw=merged)


def load(path: str | None) -> RunConfig:
    """Parse a JSON config file; None loads the defaults."""
    if path is None:
        return from_dict({})
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    try:
        return from_dict(data)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
