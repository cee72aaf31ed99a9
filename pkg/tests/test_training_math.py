from __future__ import annotations

import random

import pytest

from hopqa.errors import ContractViolation
from hopqa.metrics import answer_score
from hopqa.training_math import (
    PpoSample,
    RewardBatch,
    clip_ratio,
    ppo_objective,
    ppo_sample_objective,
    reward_model_loss,
    reward_target,
)


def test_reward_target_is_answer_f1():
    assert reward_target("Maria Bello", "Maria Bello") == 1.0
    assert reward_target("Kevin", "Kevin James") == pytest.approx(2 / 3, abs=1e-12)
    assert reward_target("apples", "oranges") == 0.0
    assert reward_target("Kevin", "Kevin James") == answer_score(
        "Kevin", "Kevin James"
    ).f1


def test_reward_model_loss_fixtures():
    assert reward_model_loss(RewardBatch([0.3, 0.9], [0.3, 0.9])) == 0.0
    assert reward_model_loss(RewardBatch([0.5], [1.0])) == 0.25
    assert reward_model_loss(RewardBatch([0.0, 1.0], [1.0, 0.0])) == 1.0


def test_reward_batch_validation():
    with pytest.raises(ContractViolation):
        RewardBatch([0.5], [1.0, 0.0])
    with pytest.raises(ContractViolation):
        RewardBatch([], [])
    with pytest.raises(ContractViolation):
        RewardBatch([0.5], [1.5])
    with pytest.raises(ContractViolation):
        RewardBatch([0.5], [-0.1])


def test_loss_nonnegative_and_zero_iff_match():
    rng = random.Random(51)
    for _ in range(200):
        n = rng.randint(1, 10)
        target = [rng.random() for _ in range(n)]
        predicted = [t + rng.uniform(-0.5, 0.5) for t in target]
        loss = reward_model_loss(RewardBatch(predicted, target))
        assert loss >= 0.0
        if predicted == target:
            assert loss == 0.0
        if loss == 0.0:
            assert predicted == target
        assert reward_model_loss(RewardBatch(list(target), target)) == 0.0


def test_clip_ratio_fixtures():
    assert clip_ratio(1.0, 0.2) == 1.0
    assert clip_ratio(1.5, 0.2) == pytest.approx(1.2)
    assert clip_ratio(0.5, 0.2) == pytest.approx(0.8)


def test_ppo_sample_objective_fixtures():
    assert ppo_sample_objective(PpoSample(1.0, 3.5, 0.2)) == 3.5
    assert ppo_sample_objective(PpoSample(1.5, 2.0, 0.2)) == pytest.approx(2.4)
    assert ppo_sample_objective(PpoSample(0.5, -1.0, 0.2)) == pytest.approx(-0.8)


def test_ppo_sample_validation():
    with pytest.raises(ContractViolation):
        PpoSample(0.0, 1.0, 0.2)
    with pytest.raises(ContractViolation):
        PpoSample(-0.5, 1.0, 0.2)
    with pytest.raises(ContractViolation):
        PpoSample(1.0, 1.0, 0.0)
    with pytest.raises(ContractViolation):
        PpoSample(1.0, 1.0, 1.0)


def test_objective_matches_direct_branch_evaluation():
    rng = random.Random(52)
    for _ in range(500):
        sample = PpoSample(
            ratio=rng.uniform(0.01, 3.0),
            advantage=rng.uniform(-5.0, 5.0),
            epsilon=rng.uniform(0.05, 0.95),
        )
        unclipped = sample.ratio * sample.advantage
        clipped = min(max(sample.ratio, 1 - sample.epsilon), 1 + sample.epsilon)
        expected = min(unclipped, clipped * sample.advantage)
        assert ppo_sample_objective(sample) == pytest.approx(expected, abs=1e-12)


def test_objective_monotone_then_flat_for_positive_advantage():
    advantage, epsilon = 2.5, 0.2
    grid = [i / 100 for i in range(1, 301)]
    values = [
        ppo_sample_objective(PpoSample(r, advantage, epsilon)) for r in grid
    ]
    for r, earlier, later in zip(grid[1:], values, values[1:]):
        assert later >= earlier - 1e-12
        if r > 1 + epsilon:
            assert later == pytest.approx((1 + epsilon) * advantage, abs=1e-12)


def test_objective_upper_bound_for_positive_advantage():
    rng = random.Random(53)
    for _ in range(200):
        sample = PpoSample(rng.uniform(0.01, 3.0), rng.uniform(0.01, 5.0), 0.2)
        assert ppo_sample_objective(sample) <= (1 + 0.2) * sample.advantage + 1e-12


def test_batch_objective_is_the_mean():
    samples = [
        PpoSample(1.0, 1.0, 0.2),
        PpoSample(1.5, 2.0, 0.2),
        PpoSample(0.5, -1.0, 0.2),
    ]
    expected = (1.0 + 2.4 + -0.8) / 3
    assert ppo_objective(samples) == pytest.approx(expected, abs=1e-12)
    with pytest.raises(ContractViolation):
        ppo_objective([])
