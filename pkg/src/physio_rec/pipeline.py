"""End-to-end wiring: ingest -> infer -> recommend, and simulate -> train -> evaluate."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .condition_inference import ConditionVector, InferenceParams, infer_conditions
from .config import AppConfig
from .recommender_core import (
    ActivityCategory,
    AriVector,
    ScoredVenue,
    UserPreferences,
    Venue,
    WeightMatrix,
    compute_ari,
    rank_items,
    select_category,
)
from .sensor_stream import SensorSample, WindowSpec, window
from .tourist_sim import SimStep, evaluate_policy
from .weight_learning import FeedbackEvent, fit


def infer_at(
    samples: Sequence[SensorSample],
    t_now: int,
    params: InferenceParams,
    spec: WindowSpec,
    history: ConditionVector | None = None,
) -> ConditionVector:
    return infer_conditions(window(samples, spec, t_now), history, params)


@dataclass(frozen=True)
class Recommendation:
    pc: ConditionVector
    ari: AriVector
    category: ActivityCategory
    items: list[ScoredVenue]

    def to_dict(self) -> dict:
        return {
            "pc": self.pc.to_dict(),
            "ari": self.ari.to_dict(),
            "category": self.category.value,
            "items": [{**sv.venue.to_dict(), "score": sv.score} for sv in self.items],
        }


def recommend(
    pc: ConditionVector,
    w: WeightMatrix,
    catalog: Sequence[Venue],
    prefs: UserPreferences,
    k: int,
    blend: float,
) -> Recommendation:
    ari = compute_ari(pc, w)
    category = select_category(ari)
    return Recommendation(pc, ari, category, rank_items(category, catalog, prefs, k, blend))


def reinfer_step(step: SimStep, cfg: AppConfig) -> ConditionVector:
    """Condition vector recovered from a trace step's own sensor samples."""
    return infer_at(sorted(step.samples, key=lambda s: s.timestamp), step.t, cfg.inference, cfg.window)


def events_from_trace(steps: Sequence[SimStep], cfg: AppConfig, reinfer: bool = False) -> list[FeedbackEvent]:
    return [
        FeedbackEvent(reinfer_step(s, cfg) if reinfer else s.pc, s.chosen, s.t)
        for s in steps
    ]


def train(steps: Sequence[SimStep], cfg: AppConfig, reinfer: bool = False) -> WeightMatrix:
    return fit(events_from_trace(steps, cfg, reinfer), cfg.prior, cfg.learning)


def evaluate(steps: Sequence[SimStep], w_learned: WeightMatrix, cfg: AppConfig) -> float:
    return evaluate_policy(w_learned, cfg.sim.w_true, [s.pc for s in steps])
