"""Activity Recommendation Index, category choice, item ranking and push timing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from .condition_inference import CONDITION_CODES, ConditionVector
from .errors import ContractError

DEFAULT_W_MAX = 10.0
DEFAULT_BLEND = 0.5
DEFAULT_AFFINITY = 0.5


class ActivityCategory(str, Enum):
    """Venue categories in canonical order; the order breaks ARI ties."""

    OUTDOORS_RECREATION = "outdoors_recreation"
    ARTS_ENTERTAINMENT = "arts_entertainment"
    FOOD = "food"
    RESIDENCE = "residence"
    NIGHTLIFE = "nightlife"

    @property
    def code(self) -> str:
        return _CODES[self]

    @property
    def index(self) -> int:
        return CATEGORIES.index(self)

    @classmethod
    def from_code(cls, code: str) -> ActivityCategory:
        for cat, c in _CODES.items():
            if c == code:
                return cat
        raise ValueError(f"unknown category code {code!r}")


CATEGORIES: tuple[ActivityCategory, ...] = tuple(ActivityCategory)
_CODES = dict(zip(CATEGORIES, ("or", "ae", "fd", "rs", "nl")))
CATEGORY_CODES: tuple[str, ...] = tuple(_CODES.values())


class WeightMatrix:
    """Condition-to-category weights, 6 rows (a, r, t, d, h, s) by 5 columns (or, ae, fd, rs, nl).

    The underlying array is a read-only copy.
    """

    __slots__ = ("_data", "w_max")

    def __init__(self, data, w_max: float = DEFAULT_W_MAX) -> None:
        arr = np.array(data, dtype=float)
        if arr.shape != (6, 5):
            raise ValueError(f"weight matrix must be 6x5, got shape {arr.shape}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("weight matrix entries must be finite")
        if not w_max > 0:
            raise ValueError(f"w_max must be > 0, got {w_max}")
        if np.any(np.abs(arr) > w_max):
            raise ValueError(f"weight matrix entries must lie in [-{w_max:g}, {w_max:g}]")
        arr.setflags(write=False)
        self._data = arr
        self.w_max = float(w_max)

    @classmethod
    def zeros(cls, w_max: float = DEFAULT_W_MAX) -> WeightMatrix:
        return cls(np.zeros((6, 5)), w_max)

    @property
    def data(self) -> np.ndarray:
        return self._data

    def __getitem__(self, idx):
        return self._data[idx]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightMatrix):
            return NotImplemented
        return np.array_equal(self._data, other._data)

    def __repr__(self) -> str:
        return f"WeightMatrix({self._data.tolist()!r}, w_max={self.w_max:g})"

    def scaled(self, factor: float) -> WeightMatrix:
        """Return ``factor * W``, widening ``w_max`` if the result needs it."""
        arr = self._data * factor
        return WeightMatrix(arr, max(self.w_max, float(np.max(np.abs(arr), initial=0.0))))

    def to_dict(self) -> dict:
        return {"rows": list(CONDITION_CODES), "cols": list(CATEGORY_CODES), "data": self._data.tolist()}


@dataclass(frozen=True)
class AriVector:
    scores: tuple[float, float, float, float, float]

    def __post_init__(self) -> None:
        if len(self.scores) != 5:
            raise ValueError(f"ARI needs 5 scores, got {len(self.scores)}")

    def __iter__(self):
        return iter(self.scores)

    def __getitem__(self, i: int) -> float:
        return self.scores[i]

    def __len__(self) -> int:
        return 5

    def to_dict(self) -> dict[str, float]:
        return {c.code: v for c, v in zip(CATEGORIES, self.scores)}


def _as_pc(pc) -> list[float]:
    vals = [float(v) for v in pc]
    if len(vals) != 6:
        raise ContractError(f"condition vector must have 6 components, got {len(vals)}")
    return vals


def compute_ari(pc: ConditionVector | Sequence[float], w: WeightMatrix) -> AriVector:
    """ARI = PC . W, accumulated over condition rows in ascending order.

    ``pc`` may be any length-6 sequence, so the linear-algebra identities
    can be exercised outside [0, 1].
    """
    vals = _as_pc(pc)
    acc = np.zeros(5)
    for i, c in enumerate(vals):
        acc = acc + c * w.data[i]
    return AriVector(tuple(float(x) for x in acc))


def select_category(ari: AriVector | Sequence[float]) -> ActivityCategory:
    """Category with the highest score; ties go to the earliest in canonical order."""
    scores = list(ari)
    if len(scores) != 5:
        raise ContractError(f"ARI needs 5 scores, got {len(scores)}")
    if any(math.isnan(s) for s in scores):
        raise ContractError("ARI contains NaN")
    best = 0
    for j in range(1, 5):
        if scores[j] > scores[best]:
            best = j
    return CATEGORIES[best]


@dataclass(frozen=True)
class Venue:
    id: str
    name: str
    category: ActivityCategory
    base_quality: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.base_quality) and 0.0 <= self.base_quality <= 1.0):
            raise ValueError(f"venue {self.id!r}: base_quality must be in [0, 1], got {self.base_quality!r}")

    def to_dict(self) -> dict:
        return {"id": self.id, "name": self.name, "category": self.category.value, "base_quality": self.base_quality}


def check_catalog(catalog: Iterable[Venue]) -> None:
    seen: set[str] = set()
    for v in catalog:
        if v.id in seen:
            raise ContractError(f"duplicate venue id {v.id!r} in catalog")
        seen.add(v.id)


@dataclass(frozen=True)
class UserPreferences:
    affinities: Mapping[str, float]

    def __post_init__(self) -> None:
        for vid, a in self.affinities.items():
            if not (math.isfinite(a) and 0.0 <= a <= 1.0):
                raise ValueError(f"affinity for {vid!r} must be in [0, 1], got {a!r}")

    @classmethod
    def empty(cls) -> UserPreferences:
        return cls({})

    def affinity(self, venue_id: str) -> float:
        return self.affinities.get(venue_id, DEFAULT_AFFINITY)


@dataclass(frozen=True)
class ScoredVenue:
    venue: Venue
    score: float


def score_venue(venue: Venue, prefs: UserPreferences, blend: float = DEFAULT_BLEND) -> float:
    return blend * venue.base_quality + (1.0 - blend) * prefs.affinity(venue.id)


def rank_items(
    category: ActivityCategory,
    catalog: Sequence[Venue],
    prefs: UserPreferences,
    k: int,
    blend: float = DEFAULT_BLEND,
) -> list[ScoredVenue]:
    """Top-``k`` venues of ``category`` by blended quality/affinity, ties by id."""
    if k < 1:
        raise ContractError(f"k must be >= 1, got {k}")
    scored = [ScoredVenue(v, score_venue(v, prefs, blend)) for v in catalog if v.category is category]
    scored.sort(key=lambda sv: (-sv.score, sv.venue.id))
    return scored[:k]


@dataclass(frozen=True)
class TriggerParams:
    delta_threshold: float = 0.2
    cooldown: float = 3600.0  # seconds

    def __post_init__(self) -> None:
        if not self.delta_threshold > 0:
            raise ValueError(f"delta_threshold must be > 0, got {self.delta_threshold}")
        if not self.cooldown >= 0:
            raise ValueError(f"cooldown must be >= 0, got {self.cooldown}")


def should_push(
    prev: ConditionVector | None,
    cur: ConditionVector,
    last_push: int | None,
    now: int,
    p: TriggerParams,
) -> bool:
    """Decide whether to push a recommendation without a user request.

    Fires on first contact, otherwise only when some condition moved by at
    least ``delta_threshold`` and the cooldown since the last push elapsed.
    """
    if prev is None:
        return True
    if last_push is not None and now < last_push:
        raise ContractError("now precedes last_push")
    delta = max(abs(a - b) for a, b in zip(cur, prev))
    cooled = last_push is None or now - last_push >= p.cooldown
    return delta >= p.delta_threshold and cooled
