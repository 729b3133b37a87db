"""Physiological condition scores from windowed wearable features.

Every score is a min-max normalization of its driving feature against
per-user anchors, clamped to [0, 1]:

========  ===============================================================
active    mix * norm(heart_rate mean) + (1 - mix) * norm(accel mean)
relaxed   1 - active
tired     1 - sleep seconds in lookback / sleep_target
drunk     norm(alcohol_proxy mean)
hungry    seconds since last feeding gesture / gesture_gap_max
stressed  norm(skin_conductance mean)
========  ===============================================================
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass, fields
from enum import Enum
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigError
from .sensor_stream import Channel, WindowedFeatures


class Condition(str, Enum):
    ACTIVE = "active"
    RELAXED = "relaxed"
    TIRED = "tired"
    DRUNK = "drunk"
    HUNGRY = "hungry"
    STRESSED = "stressed"

    @property
    def short(self) -> str:
        return _SHORT[self]


CONDITIONS: tuple[Condition, ...] = tuple(Condition)
_SHORT = dict(zip(CONDITIONS, ("a", "r", "t", "d", "h", "s")))
CONDITION_CODES: tuple[str, ...] = tuple(_SHORT.values())

# Normalized terms saturate here so opposing infinities cannot produce NaN.
_SATURATION = 1e150


def clamp01(x: float) -> float:
    if math.isnan(x):
        raise ValueError("cannot clamp NaN")
    return 0.0 if x < 0.0 else 1.0 if x > 1.0 else float(x)


@dataclass(frozen=True, slots=True)
class ConditionVector:
    """The six normalized condition scores, in canonical order."""

    active: float = 0.0
    relaxed: float = 0.0
    tired: float = 0.0
    drunk: float = 0.0
    hungry: float = 0.0
    stressed: float = 0.0

    def __post_init__(self) -> None:
        for f in fields(self):
            v = getattr(self, f.name)
            if not (math.isfinite(v) and 0.0 <= v <= 1.0):
                raise ValueError(f"{f.name} must be a finite value in [0, 1], got {v!r}")

    @classmethod
    def from_sequence(cls, values: Iterable[float]) -> ConditionVector:
        vals = [float(v) for v in values]
        if len(vals) != 6:
            raise ValueError(f"expected 6 condition values, got {len(vals)}")
        return cls(*vals)

    def __iter__(self):
        return iter(astuple(self))

    def __getitem__(self, i: int) -> float:
        return astuple(self)[i]

    def __len__(self) -> int:
        return 6

    def to_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    def to_dict(self) -> dict[str, float]:
        return {c.value: v for c, v in zip(CONDITIONS, self)}


@dataclass(frozen=True)
class InferenceParams:
    hr_low: float = 60.0
    hr_high: float = 180.0
    accel_low: float = 0.5
    accel_high: float = 8.0
    mix: float = 0.7  # weight of heart rate vs. motion in the active score
    sleep_target: float = 28800.0  # seconds per 24 h
    gesture_gap_max: float = 21600.0  # seconds without eating until fully hungry
    alcohol_low: float = 0.0
    alcohol_high: float = 1.0
    sc_low: float = 2.0
    sc_high: float = 20.0
    smoothing: float = 0.3  # weight of the fresh window against history

    @classmethod
    def from_dict(cls, data: dict) -> InferenceParams:
        names = {f.name for f in fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown inference parameter(s): {', '.join(sorted(unknown))}")
        return cls(**{k: float(v) for k, v in data.items()})

    def to_dict(self) -> dict[str, float]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True, slots=True)
class Violation:
    field: str
    message: str

    def __str__(self) -> str:
        return f"{self.field}: {self.message}"


_ANCHOR_PAIRS = (
    ("active", "hr_low", "hr_high"),
    ("active", "accel_low", "accel_high"),
    ("drunk", "alcohol_low", "alcohol_high"),
    ("stressed", "sc_low", "sc_high"),
)


def validate_params(params: InferenceParams) -> list[Violation]:
    """Return every violated invariant of ``params``; an empty list means valid."""
    out: list[Violation] = []
    for name in (f.name for f in fields(params)):
        if not math.isfinite(getattr(params, name)):
            out.append(Violation(name, "must be finite"))
    for condition, low, high in _ANCHOR_PAIRS:
        lo, hi = getattr(params, low), getattr(params, high)
        if not lo < hi:
            out.append(Violation(f"{low}/{high}", f"{condition} anchors require {low} < {high} (got {lo} >= {hi})"))
    for name in ("sleep_target", "gesture_gap_max"):
        if not getattr(params, name) > 0:
            out.append(Violation(name, "must be > 0"))
    if not 0.0 <= params.mix <= 1.0:
        out.append(Violation("mix", f"mixing weight must lie in [0, 1], got {params.mix}"))
    if not 0.0 <= params.smoothing <= 1.0:
        out.append(Violation("smoothing", f"smoothing factor must lie in [0, 1], got {params.smoothing}"))
    return out


def check_params(params: InferenceParams) -> None:
    problems = validate_params(params)
    if problems:
        raise ConfigError("invalid inference parameters: " + "; ".join(map(str, problems)))


def _norm(x: float, low: float, high: float) -> float:
    r = (x - low) / (high - low)
    return max(-_SATURATION, min(_SATURATION, r))


def _raw_scores(f: WindowedFeatures, p: InferenceParams) -> list[float | None]:
    hr = f.get(Channel.HEART_RATE)
    acc = f.get(Channel.ACCEL_MAGNITUDE)
    if hr is not None and acc is not None:
        active = clamp01(p.mix * _norm(hr.mean, p.hr_low, p.hr_high) + (1.0 - p.mix) * _norm(acc.mean, p.accel_low, p.accel_high))
    elif hr is not None:
        # weights renormalized over the channels that reported
        active = clamp01(_norm(hr.mean, p.hr_low, p.hr_high))
    elif acc is not None:
        active = clamp01(_norm(acc.mean, p.accel_low, p.accel_high))
    else:
        active = None
    relaxed = None if active is None else 1.0 - active

    sleep = f.get(Channel.SLEEP_INTERVAL)
    tired = None if sleep is None else clamp01(1.0 - max(-_SATURATION, min(_SATURATION, sleep.sum / p.sleep_target)))

    alc = f.get(Channel.ALCOHOL_PROXY)
    drunk = None if alc is None else clamp01(_norm(alc.mean, p.alcohol_low, p.alcohol_high))

    gest = f.get(Channel.FEEDING_GESTURE)
    if gest is None:
        hungry = None
    elif gest.last_event is None:
        # channel reported but no meal inside its lookback: gap is at least the lookback
        hungry = clamp01(f.duration_for(Channel.FEEDING_GESTURE) / p.gesture_gap_max)
    elif gest.last_event > f.window_end - f.duration:
        hungry = 0.0
    else:
        hungry = clamp01((f.window_end - gest.last_event) / p.gesture_gap_max)

    sc = f.get(Channel.SKIN_CONDUCTANCE)
    stressed = None if sc is None else clamp01(_norm(sc.mean, p.sc_low, p.sc_high))
    return [active, relaxed, tired, drunk, hungry, stressed]


def infer_conditions(
    features: WindowedFeatures,
    history: ConditionVector | None,
    params: InferenceParams,
) -> ConditionVector:
    """Score the six conditions for one window.

    A condition whose driving channels are all missing keeps its
    ``history`` value (0 without history). With history, fresh scores are
    blended as ``smoothing * raw + (1 - smoothing) * history``.
    """
    check_params(params)
    raw = _raw_scores(features, params)
    prev = list(history) if history is not None else [0.0] * 6
    out = []
    for r, h in zip(raw, prev):
        if r is None:
            out.append(h)
        elif history is None:
            out.append(r)
        else:
            out.append(clamp01(params.smoothing * r + (1.0 - params.smoothing) * h))
    return ConditionVector(*out)


def infer_series(
    features: Sequence[WindowedFeatures],
    params: InferenceParams,
    history: ConditionVector | None = None,
) -> list[ConditionVector]:
    """Run :func:`infer_conditions` over consecutive windows, threading the history."""
    out = []
    for f in features:
        history = infer_conditions(f, history, params)
        out.append(history)
    return out
