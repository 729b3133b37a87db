"""Application configuration: one JSON file, every field optional.

Example (all values shown are the defaults)::

    {
      "inference": {"hr_low": 60, "hr_high": 180, "accel_low": 0.5, "accel_high": 8,
                    "mix": 0.7, "sleep_target": 28800, "gesture_gap_max": 21600,
                    "alcohol_low": 0, "alcohol_high": 1, "sc_low": 2, "sc_high": 20,
                    "smoothing": 0.3},
      "learning": {"learning_rate": 0.1, "epochs": 20, "l2": 0.0001, "seed": 0},
      "trigger": {"delta_threshold": 0.2, "cooldown": 3600},
      "window": {"duration": 900,
                 "channel_durations": {"sleep_interval": 86400, "feeding_gesture": 86400}},
      "sim": {"seed": 42, "n_steps": 4000, "n_tourists": 5, "temperature": 0.5,
              "reversion": 0.1, "noise": 0.1, "step_seconds": 86400,
              "start_time": 1700000000, "couple_relaxed": true, "w_true_scale": 2.0},
      "prior": null,
      "catalog_path": "catalog.json",
      "preferences_path": "preferences.json",
      "weights_path": "weights.json",
      "blend": 0.5,
      "w_max": 10
    }

``sim.w_true`` may hold a full weight-matrix object; otherwise the planted
matrix is the sign prior scaled by ``sim.w_true_scale``. ``prior`` may hold
a sign-prior object replacing the built-in one. Relative paths resolve
against the directory of the configuration file.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

from .condition_inference import InferenceParams, validate_params
from .errors import ConfigError, SchemaError
from .recommender_core import DEFAULT_BLEND, DEFAULT_W_MAX, TriggerParams
from .sensor_stream import Channel, WindowSpec, default_window_spec
from .storage import sign_prior_from_dict, weights_from_dict
from .tourist_sim import SimConfig
from .weight_learning import LearningParams, SignPrior, default_sign_prior, init_weights

CONFIG_ENV = "PHYSIO_REC_CONFIG"

_TOP_KEYS = {
    "inference", "learning", "trigger", "window", "sim", "prior",
    "catalog_path", "preferences_path", "weights_path", "blend", "w_max",
}
_SIM_KEYS = {f.name for f in fields(SimConfig)} | {"w_true_scale"}


@dataclass
class AppConfig:
    inference: InferenceParams = field(default_factory=InferenceParams)
    learning: LearningParams = field(default_factory=LearningParams)
    trigger: TriggerParams = field(default_factory=TriggerParams)
    window: WindowSpec = field(default_factory=default_window_spec)
    sim: SimConfig = field(default_factory=SimConfig)
    prior: SignPrior = field(default_factory=default_sign_prior)
    catalog_path: Path = Path("catalog.json")
    preferences_path: Path = Path("preferences.json")
    weights_path: Path = Path("weights.json")
    blend: float = DEFAULT_BLEND
    w_max: float = DEFAULT_W_MAX


def _section(data: dict, key: str) -> dict:
    value = data.get(key, {})
    if value is None:
        return {}
    if not isinstance(value, dict):
        raise SchemaError(key, "must be a JSON object")
    return value


def _reject_unknown(section: str, data: dict, allowed: set[str]) -> None:
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise SchemaError(f"{section}.{unknown[0]}" if section else unknown[0], "unknown configuration field")


def _build(section: str, factory, kwargs: dict):
    try:
        return factory(**kwargs)
    except (TypeError, ValueError) as exc:
        raise SchemaError(section, str(exc)) from None


def _path(base: Path, name: str, value: Any) -> Path:
    if not isinstance(value, str) or not value:
        raise SchemaError(name, "must be a non-empty string")
    p = Path(value)
    return p if p.is_absolute() else base / p


def config_from_dict(data: dict, base_dir: Path | str = ".") -> AppConfig:
    if not isinstance(data, dict):
        raise SchemaError("<root>", "configuration must be a JSON object")
    _reject_unknown("", data, _TOP_KEYS)
    base = Path(base_dir)

    w_max = float(data.get("w_max", DEFAULT_W_MAX))
    if not w_max > 0:
        raise SchemaError("w_max", "must be > 0")

    inf = _section(data, "inference")
    _reject_unknown("inference", inf, {f.name for f in fields(InferenceParams)})
    inference = _build("inference", InferenceParams, {k: float(v) for k, v in inf.items()})
    problems = validate_params(inference)
    if problems:
        raise SchemaError(f"inference.{problems[0].field}", problems[0].message)

    lrn = _section(data, "learning")
    _reject_unknown("learning", lrn, {"learning_rate", "epochs", "l2", "seed"})
    learning = _build("learning", LearningParams, {**lrn, "w_max": w_max})

    trg = _section(data, "trigger")
    _reject_unknown("trigger", trg, {"delta_threshold", "cooldown"})
    trigger = _build("trigger", TriggerParams, trg)

    win = _section(data, "window")
    _reject_unknown("window", win, {"duration", "channel_durations"})
    default_win = default_window_spec()
    durations = win.get("channel_durations", {k.value: v for k, v in default_win.channel_durations.items()})
    try:
        durations = {Channel(k): float(v) for k, v in durations.items()}
    except ValueError as exc:
        raise SchemaError("window.channel_durations", str(exc)) from None
    window = _build("window", WindowSpec, {"duration": float(win.get("duration", default_win.duration)), "channel_durations": durations})

    prior = default_sign_prior() if data.get("prior") is None else sign_prior_from_dict(data["prior"], "prior")

    sim_raw = dict(_section(data, "sim"))
    _reject_unknown("sim", sim_raw, _SIM_KEYS)
    scale = float(sim_raw.pop("w_true_scale", 2.0))
    if "w_true" in sim_raw:
        sim_raw["w_true"] = weights_from_dict(sim_raw["w_true"], w_max, "sim.w_true")
    else:
        sim_raw["w_true"] = init_weights(prior, scale, w_max)
    sim = _build("sim", SimConfig, sim_raw)

    blend = float(data.get("blend", DEFAULT_BLEND))
    if not 0.0 <= blend <= 1.0:
        raise SchemaError("blend", "must lie in [0, 1]")

    return AppConfig(
        inference=inference,
        learning=learning,
        trigger=trigger,
        window=window,
        sim=sim,
        prior=prior,
        catalog_path=_path(base, "catalog_path", data.get("catalog_path", "catalog.json")),
        preferences_path=_path(base, "preferences_path", data.get("preferences_path", "preferences.json")),
        weights_path=_path(base, "weights_path", data.get("weights_path", "weights.json")),
        blend=blend,
        w_max=w_max,
    )


def load_config(path: str | os.PathLike | None = None) -> AppConfig:
    """Load configuration from ``path``, ``$PHYSIO_REC_CONFIG``, or built-in defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV) or None
    if path is None:
        return config_from_dict({})
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise ConfigError(f"configuration file not found: {p}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"configuration file {p} is not valid JSON: {exc}") from None
    return config_from_dict(data, p.parent)
