import numpy as np
import pytest

from clonescope.errors import BudgetTooSmall
from clonescope.gbdt import HyperPoint, LabeledPair
from clonescope.hpo import optimize


def toy_pairs(n: int, seed: int) -> list[LabeledPair]:
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(n):
        x = rng.uniform(0, 1, size=6)
        label = int(x[0] + 0.25 * rng.standard_normal() > 0.5)
        pairs.append(LabeledPair(x, label))
    # guarantee both classes
    pairs[0] = LabeledPair(np.zeros(6), 0)
    pairs[1] = LabeledPair(np.ones(6), 1)
    return pairs


@pytest.fixture(scope="module")
def toy_split():
    return toy_pairs(120, seed=0), toy_pairs(60, seed=1)


def test_budget_must_cover_initial_sample(toy_split):
    train, val = toy_split
    with pytest.raises(BudgetTooSmall):
        optimize(train, val, budget=3, k=4, steps=4, seed=0)
    with pytest.raises(BudgetTooSmall):
        optimize(train, val, budget=8, k=1, steps=4, seed=0)


def test_degenerate_budget_returns_best_of_stage_one(toy_split):
    train, val = toy_split
    result = optimize(train, val, budget=6, k=6, steps=4, seed=0, surrogate_epochs=50)
    assert len(result.history) == 6
    assert all(record.stage == 1 for record in result.history)
    assert result.best_loss == min(record.loss for record in result.history)


def test_history_length_equals_budget(toy_split):
    train, val = toy_split
    result = optimize(train, val, budget=14, k=8, steps=4, seed=0, surrogate_epochs=50)
    assert len(result.history) == 14
    assert sum(1 for r in result.history if r.stage == 1) == 8
    assert sum(1 for r in result.history if r.stage == 2) == 6


def test_seed_set_sorted_ascending_by_loss(toy_split):
    train, val = toy_split
    result = optimize(train, val, budget=14, k=8, steps=4, seed=0, surrogate_epochs=50)
    losses = [record.loss for record in result.seeds]
    assert len(losses) == 3  # max(3, 8 // 10)
    assert losses == sorted(losses)
    assert all(record.stage == 1 for record in result.seeds)


def test_default_point_is_verified_first(toy_split):
    train, val = toy_split
    result = optimize(train, val, budget=6, k=6, steps=4, seed=0, surrogate_epochs=50)
    default_unit = HyperPoint().to_unit()
    assert np.allclose(np.asarray(result.history[0].point), default_unit)


def test_returned_point_no_worse_than_default(toy_split):
    train, val = toy_split
    result = optimize(train, val, budget=16, k=8, steps=4, seed=0, surrogate_epochs=100)
    assert result.best_loss <= result.history[0].loss


def test_candidate_points_stay_in_unit_cube(toy_split):
    train, val = toy_split
    result = optimize(train, val, budget=12, k=6, steps=4, seed=3, surrogate_epochs=50)
    for record in result.history:
        assert all(0.0 <= v <= 1.0 for v in record.point)


def test_determinism(toy_split):
    train, val = toy_split
    a = optimize(train, val, budget=10, k=6, steps=4, seed=5, surrogate_epochs=50)
    b = optimize(train, val, budget=10, k=6, steps=4, seed=5, surrogate_epochs=50)
    assert a.best == b.best
    assert [r.loss for r in a.history] == [r.loss for r in b.history]
