"""Learning the condition-to-category weight matrix from observed choices.

The model is multinomial logistic regression without intercept: the
probability of choosing category ``j`` given conditions ``pc`` is
``softmax(pc @ W)[j]``, so the learned parameters are exactly the weight
matrix scored by :func:`~physio_rec.recommender_core.compute_ari`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .condition_inference import CONDITION_CODES, Condition, ConditionVector
from .errors import ContractError
from .recommender_core import CATEGORY_CODES, ActivityCategory, WeightMatrix, DEFAULT_W_MAX

FIT_INIT_MAGNITUDE = 0.1


class SignPrior:
    """A 6x5 matrix over {-1, 0, +1} with the row/column layout of :class:`WeightMatrix`."""

    __slots__ = ("_data",)

    def __init__(self, data) -> None:
        arr = np.array(data, dtype=float)
        if arr.shape != (6, 5):
            raise ValueError(f"sign prior must be 6x5, got shape {arr.shape}")
        if not np.all(np.isin(arr, (-1.0, 0.0, 1.0))):
            raise ValueError("sign prior entries must be -1, 0 or +1")
        arr.setflags(write=False)
        self._data = arr

    @property
    def data(self) -> np.ndarray:
        return self._data

    def __getitem__(self, idx):
        return self._data[idx]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SignPrior):
            return NotImplemented
        return np.array_equal(self._data, other._data)

    def to_dict(self) -> dict:
        return {"rows": list(CONDITION_CODES), "cols": list(CATEGORY_CODES), "data": self._data.astype(int).tolist()}


# (condition, category, sign); every unlisted pair is 0.
DEFAULT_PRIOR_EDGES: tuple[tuple[Condition, ActivityCategory, int], ...] = (
    (Condition.ACTIVE, ActivityCategory.OUTDOORS_RECREATION, +1),
    (Condition.ACTIVE, ActivityCategory.NIGHTLIFE, +1),
    (Condition.RELAXED, ActivityCategory.ARTS_ENTERTAINMENT, +1),
    (Condition.TIRED, ActivityCategory.RESIDENCE, +1),
    (Condition.TIRED, ActivityCategory.OUTDOORS_RECREATION, -1),
    (Condition.TIRED, ActivityCategory.NIGHTLIFE, -1),
    (Condition.DRUNK, ActivityCategory.RESIDENCE, +1),
    (Condition.DRUNK, ActivityCategory.OUTDOORS_RECREATION, -1),
    (Condition.HUNGRY, ActivityCategory.FOOD, +1),
    (Condition.STRESSED, ActivityCategory.RESIDENCE, +1),
    (Condition.STRESSED, ActivityCategory.OUTDOORS_RECREATION, +1),
    (Condition.STRESSED, ActivityCategory.NIGHTLIFE, -1),
)


def default_sign_prior() -> SignPrior:
    conds = list(Condition)
    cats = list(ActivityCategory)
    arr = np.zeros((6, 5))
    for cond, cat, sign in DEFAULT_PRIOR_EDGES:
        arr[conds.index(cond), cats.index(cat)] = sign
    return SignPrior(arr)


@dataclass(frozen=True)
class FeedbackEvent:
    pc: ConditionVector
    chosen: ActivityCategory
    timestamp: int = 0


@dataclass(frozen=True)
class LearningParams:
    learning_rate: float = 0.1
    epochs: int = 20
    l2: float = 1e-4
    seed: int = 0
    w_max: float = DEFAULT_W_MAX

    def __post_init__(self) -> None:
        if not self.learning_rate > 0:
            raise ValueError(f"learning_rate must be > 0, got {self.learning_rate}")
        if int(self.epochs) != self.epochs or self.epochs < 1:
            raise ValueError(f"epochs must be an integer >= 1, got {self.epochs}")
        if not self.l2 >= 0:
            raise ValueError(f"l2 must be >= 0, got {self.l2}")
        if not self.w_max > 0:
            raise ValueError(f"w_max must be > 0, got {self.w_max}")


def init_weights(prior: SignPrior, magnitude: float, w_max: float = DEFAULT_W_MAX) -> WeightMatrix:
    if not magnitude >= 0:
        raise ContractError(f"magnitude must be >= 0, got {magnitude}")
    return WeightMatrix(prior.data * magnitude, max(w_max, magnitude))


def softmax(logits: np.ndarray) -> np.ndarray:
    z = logits - np.max(logits)
    e = np.exp(z)
    return e / e.sum()


def choice_probabilities(w: WeightMatrix, pc: Sequence[float]) -> np.ndarray:
    return softmax(np.asarray(pc, dtype=float) @ w.data)


def log_likelihood(w: WeightMatrix, pc: Sequence[float], chosen: ActivityCategory) -> float:
    """Log-probability of ``chosen`` under the softmax choice model."""
    logits = np.asarray(pc, dtype=float) @ w.data
    m = np.max(logits)
    return float(logits[chosen.index] - m - np.log(np.sum(np.exp(logits - m))))


def gradient(w: WeightMatrix, pc: Sequence[float], chosen: ActivityCategory) -> np.ndarray:
    """Gradient of :func:`log_likelihood` w.r.t. W: ``outer(pc, onehot - q)``."""
    x = np.asarray(pc, dtype=float)
    resid = -softmax(x @ w.data)
    resid[chosen.index] += 1.0
    return np.outer(x, resid)


def _step(w: np.ndarray, x: np.ndarray, j: int, eta: float, lam: float, w_max: float) -> np.ndarray:
    logits = x @ w
    e = np.exp(logits - logits.max())
    resid = -e / e.sum()
    resid[j] += 1.0
    out = w + eta * np.outer(x, resid) - (eta * lam) * w
    np.clip(out, -w_max, w_max, out=out)
    return out


def update(w: WeightMatrix, e: FeedbackEvent, p: LearningParams) -> WeightMatrix:
    """One stochastic gradient ascent step on the L2-penalized log-likelihood."""
    out = _step(w.data, e.pc.to_array(), e.chosen.index, p.learning_rate, p.l2, p.w_max)
    return WeightMatrix(out, p.w_max)


def fit(events: Sequence[FeedbackEvent], prior: SignPrior, p: LearningParams) -> WeightMatrix:
    """Train W by SGD over ``events``, starting from the sign prior at magnitude 0.1.

    Events are reshuffled every epoch with a generator seeded from
    ``p.seed``; the result is a deterministic function of the inputs.
    """
    if not events:
        raise ContractError("fit requires at least one feedback event")
    xs = np.array([e.pc.to_array() for e in events])
    ys = np.array([e.chosen.index for e in events])
    w = init_weights(prior, FIT_INIT_MAGNITUDE, p.w_max).data.copy()
    rng = np.random.default_rng(p.seed)
    for _ in range(int(p.epochs)):
        for k in rng.permutation(len(events)):
            w = _step(w, xs[k], int(ys[k]), p.learning_rate, p.l2, p.w_max)
    return WeightMatrix(w, p.w_max)
