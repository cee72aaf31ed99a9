"""Reward-model loss and the PPO clipped surrogate as pure functions.

No networks and no gradients live here; these exist so the training
objectives used elsewhere in the system have a small, testable form.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import ContractViolation
from .metrics import answer_score


@dataclass(frozen=True)
class RewardBatch:
    """Predicted reward scores paired with their F1-valued targets."""

    predicted: Sequence[float]
    target: Sequence[float]

    def __post_init__(self):
        if len(self.predicted) != len(self.target):
            raise ContractViolation(
                f"predicted and target lengths differ "
                f"({len(self.predicted)} vs {len(self.target)})"
            )
        if len(self.predicted) == 0:
            raise ContractViolation("reward batch must not be empty")
        for t in self.target:
            if not 0.0 <= t <= 1.0:
                raise ContractViolation(f"target {t} outside [0, 1]")


@dataclass(frozen=True)
class PpoSample:
    """One policy-ratio/advantage pair with its clipping width."""

    ratio: float
    advantage: float
    epsilon: float

    def __post_init__(self):
        if self.ratio <= 0.0:
            raise ContractViolation(f"probability ratio {self.ratio} must be > 0")
        if not 0.0 < self.epsilon < 1.0:
            raise ContractViolation(
                f"epsilon {self.epsilon} must lie strictly inside (0, 1)"
            )


def reward_target(final_answer: str, gold: str) -> float:
    """Target reward for a generated answer: its token F1 against gold."""
    return answer_score(final_answer, gold).f1


def reward_model_loss(batch: RewardBatch) -> float:
    """Mean squared error between predicted and target reward scores."""
    n = len(batch.predicted)
    return sum((p - t) ** 2 for p, t in zip(batch.predicted, batch.target)) / n


def clip_ratio(ratio: float, epsilon: float) -> float:
    return min(max(ratio, 1.0 - epsilon), 1.0 + epsilon)


def ppo_sample_objective(sample: PpoSample) -> float:
    """Clipped surrogate for one sample: the pessimistic of both branches."""
    unclipped = sample.ratio * sample.advantage
    clipped = clip_ratio(sample.ratio, sample.epsilon) * sample.advantage
    return min(unclipped, clipped)


def ppo_objective(samples: Iterable[PpoSample]) -> float:
    """Batch objective: mean of per-sample clipped surrogates."""
    samples = list(samples)
    if not samples:
        raise ContractViolation("ppo batch must not be empty")
    return sum(ppo_sample_objective(s) for s in samples) / len(samples)
