"""Synthetic tourists with a planted weight matrix.

Each tourist follows a mean-reverting, clipped Gaussian condition
trajectory, emits the sensor readings that would make the inference
module reproduce that trajectory, and picks a category by sampling a
tempered softmax over the planted ARI. Learning is then checked by
comparing the learned policy to the planted one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .condition_inference import (
    Condition,
    ConditionVector,
    InferenceParams,
    check_params,
)
from .errors import ConfigError, ContractError
from .recommender_core import CATEGORIES, ActivityCategory, WeightMatrix, compute_ari, select_category
from .sensor_stream import Channel, SensorSample, WindowSpec, default_window_spec
from .weight_learning import default_sign_prior, init_weights

_A = list(Condition).index(Condition.ACTIVE)
_R = list(Condition).index(Condition.RELAXED)


def default_w_true() -> WeightMatrix:
    return init_weights(default_sign_prior(), 2.0)


def _per_condition(value, name: str) -> tuple[float, ...]:
    if isinstance(value, (int, float)):
        return (float(value),) * 6
    vals = tuple(float(v) for v in value)
    if len(vals) != 6:
        raise ConfigError(f"{name} needs one value per condition (6), got {len(vals)}")
    return vals


@dataclass(frozen=True)
class SimConfig:
    seed: int = 42
    n_steps: int = 4000
    n_tourists: int = 5
    temperature: float = 0.5
    reversion: float | Sequence[float] = 0.1  # kappa, per condition
    noise: float | Sequence[float] = 0.1  # sigma, per condition
    w_true: WeightMatrix = field(default_factory=default_w_true)
    step_seconds: int = 86400
    start_time: int = 1_700_000_000
    # relaxed has no sensor of its own (it is inferred as 1 - active), so
    # trajectories keep that coupling to stay reproducible from sensor data
    couple_relaxed: bool = True

    def __post_init__(self) -> None:
        if self.n_steps < 1 or self.n_tourists < 1:
            raise ConfigError("n_steps and n_tourists must be positive")
        if not self.temperature > 0:
            raise ConfigError(f"temperature must be > 0, got {self.temperature}")
        for k in self.kappas:
            if not 0.0 <= k <= 1.0:
                raise ConfigError(f"reversion rates must lie in [0, 1], got {k}")
        for s in self.sigmas:
            if not s >= 0:
                raise ConfigError(f"noise scales must be >= 0, got {s}")
        if self.step_seconds < 1:
            raise ConfigError("step_seconds must be >= 1")

    @property
    def kappas(self) -> tuple[float, ...]:
        return _per_condition(self.reversion, "reversion")

    @property
    def sigmas(self) -> tuple[float, ...]:
        return _per_condition(self.noise, "noise")


def tourist_rng(seed: int, tourist_index: int, stream: int) -> np.random.Generator:
    """Independent generator per (seed, tourist, purpose)."""
    return np.random.default_rng([seed, tourist_index, stream])


_TRAJECTORY_STREAM = 0
_CHOICE_STREAM = 1


def generate_trajectory(cfg: SimConfig, tourist_index: int) -> list[ConditionVector]:
    if not 0 <= tourist_index < cfg.n_tourists:
        raise ContractError(f"tourist_index must be in [0, {cfg.n_tourists}), got {tourist_index}")
    rng = tourist_rng(cfg.seed, tourist_index, _TRAJECTORY_STREAM)
    kappa = np.array(cfg.kappas)
    sigma = np.array(cfg.sigmas)
    pc = rng.random(6)
    if cfg.couple_relaxed:
        pc[_R] = 1.0 - pc[_A]
    out = [ConditionVector(*pc.tolist())]
    for _ in range(cfg.n_steps - 1):
        xi = rng.standard_normal(6)
        pc = np.clip(pc + kappa * (0.5 - pc) + sigma * xi, 0.0, 1.0)
        if cfg.couple_relaxed:
            pc[_R] = 1.0 - pc[_A]
        out.append(ConditionVector(*pc.tolist()))
    return out


def sample_choice(pc: ConditionVector, w_true: WeightMatrix, tau: float, rng: np.random.Generator) -> ActivityCategory:
    """Draw a category from ``softmax(ARI / tau)`` by inverse CDF on one uniform."""
    if not tau > 0:
        raise ContractError(f"temperature must be > 0, got {tau}")
    z = np.array(list(compute_ari(pc, w_true))) / tau
    e = np.exp(z - z.max())
    cdf = np.cumsum(e / e.sum())
    u = rng.random()
    j = int(np.searchsorted(cdf, u, side="right"))
    return CATEGORIES[min(j, 4)]


def _check_emittable(params: InferenceParams, cfg: SimConfig, spec: WindowSpec) -> None:
    check_params(params)
    longest = max([spec.duration, *spec.channel_durations.values()])
    if cfg.step_seconds < longest:
        raise ConfigError(f"step_seconds ({cfg.step_seconds}) must cover the longest window ({longest:g} s)")
    if spec.duration_for(Channel.FEEDING_GESTURE) < params.gesture_gap_max:
        raise ConfigError("feeding_gesture lookback must be at least gesture_gap_max")


def emit_step(pc: ConditionVector, t: int, params: InferenceParams, spec: WindowSpec) -> list[SensorSample]:
    """Sensor readings ending at ``t`` whose inference reproduces ``pc``.

    Motion and heart rate share the active level, so the active mix
    recovers it regardless of weighting. Hungry is encoded as the age of
    the last feeding gesture; gaps shorter than the current window
    collapse to a gesture at ``t``.
    """
    p = params
    gap = round(pc.hungry * p.gesture_gap_max)
    gesture_t = t if gap < spec.duration else t - gap
    readings = [
        SensorSample(gesture_t, Channel.FEEDING_GESTURE, 1.0),
        SensorSample(t, Channel.HEART_RATE, p.hr_low + pc.active * (p.hr_high - p.hr_low)),
        SensorSample(t, Channel.ACCEL_MAGNITUDE, p.accel_low + pc.active * (p.accel_high - p.accel_low)),
        SensorSample(t, Channel.SKIN_CONDUCTANCE, p.sc_low + pc.stressed * (p.sc_high - p.sc_low)),
        SensorSample(t, Channel.SLEEP_INTERVAL, (1.0 - pc.tired) * p.sleep_target),
        SensorSample(t, Channel.ALCOHOL_PROXY, p.alcohol_low + pc.drunk * (p.alcohol_high - p.alcohol_low)),
    ]
    return readings


def step_times(cfg: SimConfig) -> list[int]:
    return [cfg.start_time + (k + 1) * cfg.step_seconds for k in range(cfg.n_steps)]


def emit_sensor_log(
    trajectory: Sequence[ConditionVector],
    params: InferenceParams,
    cfg: SimConfig,
    spec: WindowSpec | None = None,
) -> list[SensorSample]:
    """Concatenate :func:`emit_step` over the trajectory, one step per ``cfg.step_seconds``."""
    spec = spec or default_window_spec()
    _check_emittable(params, cfg, spec)
    out: list[SensorSample] = []
    for k, pc in enumerate(trajectory):
        out.extend(emit_step(pc, cfg.start_time + (k + 1) * cfg.step_seconds, params, spec))
    return out


@dataclass(frozen=True)
class SimStep:
    tourist: int
    t: int
    pc: ConditionVector
    chosen: ActivityCategory
    samples: tuple[SensorSample, ...]


def simulate_tourist(
    cfg: SimConfig,
    tourist_index: int,
    params: InferenceParams | None = None,
    spec: WindowSpec | None = None,
) -> list[SimStep]:
    params = params or InferenceParams()
    spec = spec or default_window_spec()
    _check_emittable(params, cfg, spec)
    traj = generate_trajectory(cfg, tourist_index)
    rng = tourist_rng(cfg.seed, tourist_index, _CHOICE_STREAM)
    steps = []
    for t, pc in zip(step_times(cfg), traj):
        chosen = sample_choice(pc, cfg.w_true, cfg.temperature, rng)
        steps.append(SimStep(tourist_index, t, pc, chosen, tuple(emit_step(pc, t, params, spec))))
    return steps


def simulate(
    cfg: SimConfig,
    params: InferenceParams | None = None,
    spec: WindowSpec | None = None,
) -> list[SimStep]:
    """All tourists in index order; each tourist is generated independently."""
    steps: list[SimStep] = []
    for i in range(cfg.n_tourists):
        steps.extend(simulate_tourist(cfg, i, params, spec))
    return steps


def evaluate_policy(w_learned: WeightMatrix, w_true: WeightMatrix, test_pcs: Sequence[ConditionVector]) -> float:
    """Fraction of ``test_pcs`` on which both matrices recommend the same category."""
    if not test_pcs:
        raise ContractError("evaluate_policy needs at least one test PC")
    hits = sum(
        select_category(compute_ari(pc, w_learned)) is select_category(compute_ari(pc, w_true))
        for pc in test_pcs
    )
    return hits / len(test_pcs)


def holdout_pcs(cfg: SimConfig, n: int, seed_offset: int = 1_000_003) -> list[ConditionVector]:
    """``n`` condition vectors from fresh tourists that share ``cfg``'s dynamics but not its seed."""
    if n < 1:
        raise ContractError("holdout size must be >= 1")
    n_tourists = math.ceil(n / cfg.n_steps)
    fresh = replace(cfg, seed=cfg.seed + seed_offset, n_tourists=n_tourists)
    pcs: list[ConditionVector] = []
    for i in range(n_tourists):
        pcs.extend(generate_trajectory(fresh, i))
    return pcs[:n]
