"""Token-level F1, exact match, precision and recall for answer strings."""

from __future__ import annotations

import re
import string
from collections import Counter
from dataclasses import dataclass
from typing import Iterable

_ARTICLES_RE = re.compile(r"\b(a|an|the)\b")


def normalize_answer(s: str) -> str:
    """Lowercase, strip punctuation, drop articles, collapse whitespace."""
    s = s.lower()
    s = "".join(ch for ch in s if ch not in string.punctuation)
    s = _ARTICLES_RE.sub(" ", s)
    return " ".join(s.split())


@dataclass(frozen=True)
class AnswerScore:
    f1: float
    em: int
    precision: float
    recall: float

    def to_dict(self) -> dict:
        return {
            "f1": self.f1,
            "em": self.em,
            "precision": self.precision,
            "recall": self.recall,
        }


def answer_score(prediction: str, gold: str) -> AnswerScore:
    """Bag-of-tokens overlap between normalized prediction and gold."""
    pred_tokens = normalize_answer(prediction).split()
    gold_tokens = normalize_answer(gold).split()
    em = int(normalize_answer(prediction) == normalize_answer(gold))
    if not pred_tokens and not gold_tokens:
        return AnswerScore(f1=1.0, em=em, precision=1.0, recall=1.0)
    if not pred_tokens or not gold_tokens:
        return AnswerScore(f1=0.0, em=em, precision=0.0, recall=0.0)
    common = Counter(pred_tokens) & Counter(gold_tokens)
    overlap = sum(common.values())
    if overlap == 0:
        return AnswerScore(f1=0.0, em=em, precision=0.0, recall=0.0)
    precision = overlap / len(pred_tokens)
    recall = overlap / len(gold_tokens)
    f1 = 2 * precision * recall / (precision + recall)
    return AnswerScore(f1=f1, em=em, precision=precision, recall=recall)


@dataclass(frozen=True)
class AggregateScore:
    """Dataset-level means. ``defined`` is False for an empty score list."""

    n: int
    f1: float | None
    em: float | None
    precision: float | None
    recall: float | None

    @property
    def defined(self) -> bool:
        return self.n > 0

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "defined": self.defined,
            "f1": self.f1,
            "em": self.em,
            "precision": self.precision,
            "recall": self.recall,
        }


def aggregate(scores: Iterable[AnswerScore]) -> AggregateScore:
    scores = list(scores)
    if not scores:
        return AggregateScore(n=0, f1=None, em=None, precision=None, recall=None)
    n = len(scores)
    return AggregateScore(
        n=n,
        f1=sum(s.f1 for s in scores) / n,
        em=sum(s.em for s in scores) / n,
        precision=sum(s.precision for s in scores) / n,
        recall=sum(s.recall for s in scores) / n,
    )
