import math

import numpy as np
import pytest

from physio_rec.condition_inference import ConditionVector
from physio_rec.errors import ContractError
from physio_rec.recommender_core import CATEGORIES, ActivityCategory, WeightMatrix, compute_ari, select_category
from physio_rec.weight_learning import (
    FeedbackEvent,
    LearningParams,
    SignPrior,
    default_sign_prior,
    fit,
    gradient,
    init_weights,
    log_likelihood,
    update,
)

AC = ActivityCategory

# rows a, r, t, d, h, s; cols or, ae, fd, rs, nl
DOCUMENTED_PRIOR = [
    [+1, 0, 0, 0, +1],
    [0, +1, 0, 0, 0],
    [-1, 0, 0, +1, -1],
    [-1, 0, 0, +1, 0],
    [0, 0, +1, 0, 0],
    [+1, 0, 0, +1, -1],
]


def ll_oracle(w, pc, j):
    """Multinomial log-likelihood written out in plain floats."""
    logits = [sum(pc[i] * w[i][k] for i in range(6)) for k in range(5)]
    m = max(logits)
    return logits[j] - m - math.log(sum(math.exp(z - m) for z in logits))


def fd_gradient(w, pc, j, eps=1e-6):
    g = np.zeros((6, 5))
    for i in range(6):
        for k in range(5):
            up = w.copy()
            dn = w.copy()
            up[i, k] += eps
            dn[i, k] -= eps
            g[i, k] = (ll_oracle(up, pc, j) - ll_oracle(dn, pc, j)) / (2 * eps)
    return g


def test_default_prior_matches_documented_table():
    w = init_weights(default_sign_prior(), 1.0)
    assert w.data.tolist() == DOCUMENTED_PRIOR


def test_init_zero_magnitude():
    w = init_weights(default_sign_prior(), 0.0)
    assert not w.data.any()


def test_init_scales_prior_entry():
    assert init_weights(default_sign_prior(), 0.5)[0][0] == 0.5


def test_sign_prior_rejects_other_values():
    with pytest.raises(ValueError):
        SignPrior(np.full((6, 5), 2.0))


def test_zero_pc_update_is_pure_decay():
    w = init_weights(default_sign_prior(), 1.0)
    e = FeedbackEvent(ConditionVector(), AC.FOOD)
    assert update(w, e, LearningParams(l2=0.0)) == w
    p = LearningParams(learning_rate=0.1, l2=0.5)
    np.testing.assert_allclose(update(w, e, p).data, w.data * (1 - 0.1 * 0.5), rtol=0, atol=1e-15)


def test_uniform_weights_food_choice():
    w = WeightMatrix(np.full((6, 5), 0.3))
    pc = ConditionVector(0.2, 0.8, 0.5, 0.1, 0.9, 0.4)
    eta = 0.1
    delta = update(w, FeedbackEvent(pc, AC.FOOD), LearningParams(learning_rate=eta, l2=0.0)).data - w.data
    # q is uniform (0.2) since all logits are equal
    for i, c in enumerate(pc):
        assert delta[i, 2] == pytest.approx(eta * c * 0.8, abs=1e-15)
        for k in (0, 1, 3, 4):
            assert delta[i, k] == pytest.approx(-eta * c * 0.2, abs=1e-15)


def test_update_clamps_to_w_max():
    w = WeightMatrix(np.full((6, 5), 0.99), w_max=1.0)
    pc = ConditionVector(1, 1, 1, 1, 1, 1)
    out = update(w, FeedbackEvent(pc, AC.FOOD), LearningParams(learning_rate=5.0, l2=0.0, w_max=1.0))
    assert out.data.max() == 1.0 and out.data.min() >= -1.0


@pytest.mark.parametrize("seed", range(10))
def test_gradient_matches_finite_differences(seed):
    rng = np.random.default_rng(seed)
    w = rng.uniform(-3, 3, (6, 5))
    pc = rng.random(6)
    j = int(rng.integers(5))
    g = gradient(WeightMatrix(w), pc, CATEGORIES[j])
    assert np.max(np.abs(g - fd_gradient(w, pc, j))) <= 1e-5


def test_log_likelihood_matches_oracle():
    rng = np.random.default_rng(3)
    w = rng.uniform(-5, 5, (6, 5))
    pc = rng.random(6)
    for j, cat in enumerate(CATEGORIES):
        assert log_likelihood(WeightMatrix(w), pc, cat) == pytest.approx(ll_oracle(w, pc, j), abs=1e-12)


def test_update_is_gradient_ascent_step():
    rng = np.random.default_rng(11)
    w = WeightMatrix(rng.uniform(-2, 2, (6, 5)))
    pc = ConditionVector(*rng.random(6))
    p = LearningParams(learning_rate=0.05, l2=0.01)
    out = update(w, FeedbackEvent(pc, AC.NIGHTLIFE), p)
    expected = w.data + 0.05 * gradient(w, pc, AC.NIGHTLIFE) - 0.05 * 0.01 * w.data
    np.testing.assert_allclose(out.data, expected, rtol=0, atol=1e-14)


def test_fit_learns_repeated_choice():
    pc = ConditionVector(0.9, 0.1, 0.2, 0.0, 0.1, 0.3)
    # prior alone prefers outdoors here
    assert select_category(compute_ari(pc, init_weights(default_sign_prior(), 0.1))) is AC.OUTDOORS_RECREATION
    events = [FeedbackEvent(pc, AC.FOOD, t) for t in range(50)]
    w = fit(events, default_sign_prior(), LearningParams(epochs=5))
    assert select_category(compute_ari(pc, w)) is AC.FOOD


def test_fit_deterministic():
    rng = np.random.default_rng(0)
    events = [FeedbackEvent(ConditionVector(*rng.random(6)), CATEGORIES[int(rng.integers(5))]) for _ in range(200)]
    p = LearningParams(seed=5, epochs=3)
    a = fit(events, default_sign_prior(), p)
    b = fit(events, default_sign_prior(), p)
    assert a.data.tobytes() == b.data.tobytes()
    c = fit(events, default_sign_prior(), LearningParams(seed=6, epochs=3))
    assert c != a


def test_fit_stays_bounded():
    events = [FeedbackEvent(ConditionVector(1, 1, 1, 1, 1, 1), AC.RESIDENCE)] * 20
    w = fit(events, default_sign_prior(), LearningParams(learning_rate=50.0, l2=0.0, w_max=2.0, epochs=2))
    assert np.abs(w.data).max() <= 2.0


def test_fit_rejects_empty():
    with pytest.raises(ContractError):
        fit([], default_sign_prior(), LearningParams())


@pytest.mark.parametrize(
    "kwargs", [{"learning_rate": 0}, {"epochs": 0}, {"l2": -1}, {"epochs": 1.5}]
)
def test_learning_params_validated(kwargs):
    with pytest.raises(ValueError):
        LearningParams(**kwargs)
