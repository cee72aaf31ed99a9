"""Per-question reasoning loop and batch evaluation.

Each question is decomposed into sub-questions, then answered step by step:
decide whether the step needs a rewrite, rewrite it against the answer
history when it does, retrieve context for the effective question, and
answer. The final answer integrates all steps. Later steps see only the
(sub-question, answer) history, not earlier retrieved passages.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Iterable, Sequence

from .config import Config
from .corpus import Corpus
from .dense_index import VectorIndex
from .errors import ContractViolation, EngineError, ProtocolError, TraceError, TransportError
from .generator import Generator
from .informativeness import InformativenessIndex
from .metrics import AnswerScore, aggregate, answer_score
from .retrieval import RetrievalResult, retrieve


@dataclass
class Step:
    original_sub_question: str
    rewritten: str | None
    effective_question: str
    retrieval: RetrievalResult
    answer: str | None

    def to_dict(self) -> dict:
        return {
            "original_sub_question": self.original_sub_question,
            "rewritten": self.rewritten,
            "effective_question": self.effective_question,
            "retrieval": self.retrieval.to_dict(),
            "answer": self.answer,
        }


@dataclass
class ReasoningTrace:
    question: str
    gold_answer: str | None
    steps: list[Step] = field(default_factory=list)
    final_answer: str | None = None

    def to_dict(self) -> dict:
        return {
            "question": self.question,
            "gold_answer": self.gold_answer,
            "steps": [step.to_dict() for step in self.steps],
            "final_answer": self.final_answer,
        }


@dataclass
class QuestionSpec:
    """One question plus the optional per-step fixture annotations."""

    qid: str
    question: str
    gold_answer: str | None = None
    decomposition: list[str] | None = None
    q_entities: dict[int, list[str]] = field(default_factory=dict)
    q_vectors: dict[int, list[float]] = field(default_factory=dict)

    @classmethod
    def from_json(cls, obj: dict) -> "QuestionSpec":
        def int_keyed(raw: dict | None) -> dict[int, Any]:
            if not raw:
                return {}
            return {int(k): v for k, v in raw.items()}

        return cls(
            qid=str(obj.get("qid", obj.get("id", ""))),
            question=str(obj["question"]),
            gold_answer=(None if obj.get("answer") is None else str(obj["answer"])),
            decomposition=(
                [str(s) for s in obj["decomposition"]]
                if obj.get("decomposition") is not None
                else None
            ),
            q_entities=int_keyed(obj.get("q_entities")),
            q_vectors=int_keyed(obj.get("q_vectors")),
        )


def _step_entities(
    spec: QuestionSpec, step_index: int, effective_question: str, generator: Generator
) -> list[str]:
    if step_index in spec.q_entities:
        return list(spec.q_entities[step_index])
    return generator.extract_entities(effective_question)


def _step_vector(
    spec: QuestionSpec, step_index: int, effective_question: str, generator: Generator
) -> list[float] | None:
    if step_index in spec.q_vectors:
        return list(spec.q_vectors[step_index])
    return generator.embed(effective_question)


def _context_texts(
    corpus: Corpus, result: RetrievalResult, char_budget: int
) -> list[str]:
    texts = [corpus.chunk(chunk_id).text for chunk_id in result.fused]
    if char_budget <= 0:
        return texts
    kept: list[str] = []
    remaining = char_budget
    for text in texts:
        if remaining <= 0:
            break
        kept.append(text[:remaining])
        remaining -= len(kept[-1])
    return kept


def run_question(
    question: str,
    corpus: Corpus,
    vector_index: VectorIndex | None,
    generator: Generator,
    config: Config,
    spec: QuestionSpec | None = None,
    info_index: InformativenessIndex | None = None,
) -> ReasoningTrace:
    """Drive decompose, per-step rewrite/retrieve/answer, then integrate."""
    spec = spec or QuestionSpec(qid="", question=question)
    steps: list[Step] = []

    def abort(stage: str, exc: Exception) -> TraceError:
        return TraceError(f"{stage} failed: {exc}", steps=steps)

    if spec.decomposition is not None:
        sub_questions = list(spec.decomposition)
    else:
        try:
            sub_questions = generator.decompose(question)
        except (TransportError, ProtocolError) as exc:
            raise abort("decomposition", exc)
    sub_questions = sub_questions[: config.max_steps]

    history: list[tuple[str, str]] = []
    for step_index, sub_question in enumerate(sub_questions):
        rewritten: str | None = None
        effective = sub_question
        try:
            if history and generator.rewrite_decision(sub_question, history):
                rewritten = generator.rewrite(sub_question, history)
                effective = rewritten
            entities = _step_entities(spec, step_index, effective, generator)
            vector = _step_vector(spec, step_index, effective, generator)
            result = retrieve(
                corpus,
                vector_index,
                entities,
                vector,
                k_info=config.k_info,
                k_sim=config.k_sim,
                query_id=f"{spec.qid or 'q'}#{step_index}",
                info_index=info_index,
            )
            context = _context_texts(corpus, result, config.context_char_budget)
            answer = generator.answer(effective, context)
        except (TransportError, ProtocolError, ContractViolation) as exc:
            raise abort(f"step {step_index}", exc)
        steps.append(
            Step(
                original_sub_question=sub_question,
                rewritten=rewritten,
                effective_question=effective,
                retrieval=result,
                answer=answer,
            )
        )
        history.append((effective, answer))

    try:
        final_answer = generator.integrate(question, history)
    except (TransportError, ProtocolError) as exc:
        raise abort("integration", exc)

    return ReasoningTrace(
        question=question,
        gold_answer=spec.gold_answer,
        steps=steps,
        final_answer=final_answer,
    )


@dataclass
class Pipeline:
    """Everything one question run needs, bundled for reuse across queries."""

    corpus: Corpus
    vector_index: VectorIndex | None
    generator: Generator
    config: Config
    info_index: InformativenessIndex | None = None

    def __post_init__(self):
        if self.info_index is None:
            self.info_index = InformativenessIndex(self.corpus)

    def run_question(self, spec: QuestionSpec) -> ReasoningTrace:
        return run_question(
            spec.question,
            self.corpus,
            self.vector_index,
            self.generator,
            self.config,
            spec=spec,
            info_index=self.info_index,
        )


@dataclass
class FilterOutcome:
    spec: QuestionSpec
    final_answer: str | None
    em: int
    error: str | None = None

    def to_dict(self) -> dict:
        return {
            "qid": self.spec.qid,
            "question": self.spec.question,
            "decomposition": self.spec.decomposition,
            "gold_answer": self.spec.gold_answer,
            "final_answer": self.final_answer,
            "em": self.em,
            "error": self.error,
        }


def filter_by_answer_consistency(
    candidates: Sequence[QuestionSpec], pipeline: Pipeline
) -> tuple[list[FilterOutcome], list[FilterOutcome]]:
    """Split candidate decompositions by final-answer exact match.

    Every candidate runs with its own decomposition injected; the first
    returned list holds the answer-consistent candidates, the second the
    rest. A candidate whose run errors lands in the second list with a note.
    """
    consistent: list[FilterOutcome] = []
    inconsistent: list[FilterOutcome] = []
    for spec in candidates:
        if spec.decomposition is None:
            raise ContractViolation(
                f"candidate {spec.qid!r} carries no decomposition"
            )
        if spec.gold_answer is None:
            raise ContractViolation(f"candidate {spec.qid!r} carries no gold answer")
        try:
            trace = pipeline.run_question(spec)
        except EngineError as exc:
            inconsistent.append(
                FilterOutcome(spec=spec, final_answer=None, em=0, error=str(exc))
            )
            continue
        em = answer_score(trace.final_answer or "", spec.gold_answer).em
        outcome = FilterOutcome(spec=spec, final_answer=trace.final_answer, em=em)
        (consistent if em == 1 else inconsistent).append(outcome)
    return consistent, inconsistent


def run_eval(
    questions: Iterable[QuestionSpec], pipeline: Pipeline
) -> dict:
    """Run every question, score against gold, and aggregate.

    Questions run in qid order (concurrently when configured); individual
    failures are recorded and excluded from the aggregate.
    """
    specs = sorted(questions, key=lambda spec: spec.qid)

    def run_one(spec: QuestionSpec) -> dict:
        entry: dict[str, Any] = {
            "qid": spec.qid,
            "question": spec.question,
            "gold_answer": spec.gold_answer,
        }
        try:
            trace = pipeline.run_question(spec)
        except EngineError as exc:
            entry["error"] = str(exc)
            entry["trace"] = None
            entry["score"] = None
            return entry
        entry["error"] = None
        entry["trace"] = trace.to_dict()
        if spec.gold_answer is None:
            entry["score"] = None
        else:
            entry["score"] = answer_score(
                trace.final_answer or "", spec.gold_answer
            ).to_dict()
        return entry

    if pipeline.config.workers > 1:
        with ThreadPoolExecutor(max_workers=pipeline.config.workers) as pool:
            entries = list(pool.map(run_one, specs))
    else:
        entries = [run_one(spec) for spec in specs]

    scored = [
        entry["score"] for entry in entries if entry["score"] is not None
    ]
    agg = aggregate(AnswerScore(**score) for score in scored).to_dict()
    failures = sum(1 for entry in entries if entry["error"] is not None)
    return {
        "questions": entries,
        "aggregate": agg,
        "failures": failures,
        "settings": {
            "k_info": pipeline.config.k_info,
            "k_sim": pipeline.config.k_sim,
            "max_steps": pipeline.config.max_steps,
            "generator_mode": pipeline.config.generator_mode,
        },
    }


def read_question_file(lines: Iterable[str]) -> list[QuestionSpec]:
    specs = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ContractViolation(f"questions line {lineno}: invalid JSON: {exc}")
        try:
            specs.append(QuestionSpec.from_json(obj))
        except KeyError as exc:
            raise ContractViolation(
                f"questions line {lineno}: missing key {exc.args[0]!r}"
            )
    return specs
