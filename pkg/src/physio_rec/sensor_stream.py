"""Wearable sensor logs: parsing, validation, serialization and windowed aggregation.

Logs are JSON Lines, one ``{"t": <int>, "ch": <channel>, "v": <number>}``
object per line.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import ContractError, ParseError, SensorValidationError


class Channel(str, Enum):
    HEART_RATE = "heart_rate"  # beats/min
    ACCEL_MAGNITUDE = "accel_magnitude"  # m/s^2, gravity removed
    SKIN_CONDUCTANCE = "skin_conductance"  # microsiemens
    FEEDING_GESTURE = "feeding_gesture"  # 0/1 per event
    SLEEP_INTERVAL = "sleep_interval"  # seconds of sleep ending at t
    ALCOHOL_PROXY = "alcohol_proxy"  # dimensionless 0..1


CHANNELS: tuple[Channel, ...] = tuple(Channel)

# Admissible (low, high) per channel; None means unbounded on that side.
CHANNEL_BOUNDS: dict[Channel, tuple[float | None, float | None]] = {
    Channel.HEART_RATE: (20.0, 250.0),
    Channel.ACCEL_MAGNITUDE: (0.0, None),
    Channel.SKIN_CONDUCTANCE: (0.0, None),
    Channel.FEEDING_GESTURE: (0.0, 1.0),
    Channel.SLEEP_INTERVAL: (0.0, None),
    Channel.ALCOHOL_PROXY: (0.0, 1.0),
}


@dataclass(frozen=True, slots=True)
class SensorSample:
    timestamp: int
    channel: Channel
    value: float


def validate_sample(sample: SensorSample, line: int | None = None) -> None:
    """Raise :class:`SensorValidationError` if ``sample`` is out of range."""
    ch, v = sample.channel, sample.value
    if not math.isfinite(v):
        raise SensorValidationError(ch.value, "finite", v, line)
    low, high = CHANNEL_BOUNDS[ch]
    if low is not None and v < low:
        raise SensorValidationError(ch.value, f">= {low:g}", v, line)
    if high is not None and v > high:
        raise SensorValidationError(ch.value, f"<= {high:g}", v, line)
    if ch is Channel.FEEDING_GESTURE and v not in (0.0, 1.0):
        raise SensorValidationError(ch.value, "in {0, 1}", v, line)


def _decode_line(raw: str, lineno: int) -> SensorSample:
    try:
        obj = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ParseError(lineno, f"invalid JSON ({exc.msg})") from None
    if not isinstance(obj, dict):
        raise ParseError(lineno, "record is not a JSON object")
    missing = [k for k in ("t", "ch", "v") if k not in obj]
    if missing:
        raise ParseError(lineno, f"missing key(s) {', '.join(missing)}")
    t, ch, v = obj["t"], obj["ch"], obj["v"]
    if isinstance(t, bool) or not isinstance(t, int):
        raise ParseError(lineno, f"'t' must be an integer, got {t!r}")
    try:
        channel = Channel(ch)
    except ValueError:
        raise ParseError(lineno, f"unknown channel {ch!r}") from None
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ParseError(lineno, f"'v' must be a number, got {v!r}")
    sample = SensorSample(t, channel, float(v))
    validate_sample(sample, lineno)
    return sample


def parse_sensor_log(text: str | Iterable[str]) -> list[SensorSample]:
    """Parse JSONL sensor records into samples sorted by timestamp.

    Blank lines are skipped. The sort is stable, so samples sharing a
    timestamp keep their file order.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    samples = []
    for lineno, raw in enumerate(lines, start=1):
        if not raw.strip():
            continue
        samples.append(_decode_line(raw, lineno))
    samples.sort(key=lambda s: s.timestamp)
    return samples


def dump_sample(sample: SensorSample) -> str:
    return json.dumps({"t": sample.timestamp, "ch": sample.channel.value, "v": sample.value})


def serialize_sensor_log(samples: Iterable[SensorSample]) -> str:
    return "".join(dump_sample(s) + "\n" for s in samples)


@dataclass(frozen=True)
class WindowSpec:
    """Aggregation window ending at the query time.

    ``duration`` applies to every channel unless ``channel_durations``
    overrides it; slow signals such as sleep and meal gestures need a
    longer lookback than heart rate.
    """

    duration: float
    channel_durations: Mapping[Channel, float] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.duration > 0:
            raise ContractError(f"window duration must be > 0, got {self.duration}")
        for ch, d in self.channel_durations.items():
            if not d > 0:
                raise ContractError(f"window duration for {Channel(ch).value} must be > 0, got {d}")

    def duration_for(self, channel: Channel) -> float:
        return self.channel_durations.get(channel, self.duration)


def default_window_spec() -> WindowSpec:
    return WindowSpec(
        duration=900.0,
        channel_durations={Channel.SLEEP_INTERVAL: 86400.0, Channel.FEEDING_GESTURE: 86400.0},
    )


@dataclass(frozen=True, slots=True)
class ChannelStats:
    count: int
    sum: float
    mean: float
    min: float
    max: float
    last_event: int | None  # latest timestamp with a non-zero value


@dataclass(frozen=True)
class WindowedFeatures:
    window_end: int
    duration: float
    channels: Mapping[Channel, ChannelStats]
    channel_durations: Mapping[Channel, float] = field(default_factory=dict)

    def duration_for(self, channel: Channel) -> float:
        return self.channel_durations.get(channel, self.duration)

    def get(self, channel: Channel) -> ChannelStats | None:
        return self.channels.get(channel)

    def is_missing(self, channel: Channel) -> bool:
        return channel not in self.channels

    def count(self, channel: Channel) -> int:
        stats = self.channels.get(channel)
        return 0 if stats is None else stats.count


def _aggregate(samples: Sequence[SensorSample]) -> ChannelStats:
    values = [s.value for s in samples]
    try:
        total = math.fsum(values)
    except OverflowError:
        total = sum(values)
    lo, hi = min(values), max(values)
    mean = min(max(total / len(values), lo), hi)
    events = [s.timestamp for s in samples if s.value != 0.0]
    return ChannelStats(len(values), total, mean, lo, hi, max(events) if events else None)


def window(samples: Sequence[SensorSample], spec: WindowSpec, t_now: int) -> WindowedFeatures:
    """Aggregate each channel over the half-open interval ``(t_now - d, t_now]``."""
    prev = None
    buckets: dict[Channel, list[SensorSample]] = {}
    for s in samples:
        if prev is not None and s.timestamp < prev:
            raise ContractError("samples must be sorted by timestamp")
        prev = s.timestamp
        if s.timestamp <= t_now and s.timestamp > t_now - spec.duration_for(s.channel):
            buckets.setdefault(s.channel, []).append(s)
    stats = {ch: _aggregate(buckets[ch]) for ch in CHANNELS if ch in buckets}
    return WindowedFeatures(t_now, spec.duration, stats, dict(spec.channel_durations))
