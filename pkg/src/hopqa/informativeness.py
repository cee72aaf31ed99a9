"""Entity informativeness scoring over dependency-tree descendant counts.

An entity's importance inside a text unit is the sum, over the unit's
sentences that contain it, of the largest descendant count among the
entity's tokens in that sentence. Entities are ranked per chunk into an
ordered table, and a chunk is scored for a question as the sum of the
reciprocal ranks of the question's entities.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .corpus import Chunk, Corpus, Document, EntityRecord, normalize_entity
from .errors import ContractViolation


@dataclass(frozen=True)
class InformativenessTable:
    """Entities of one unit, ordered by importance with ordinal 1-based ranks.

    Ties in importance are ordered by ascending entity string so that every
    entity has a single deterministic rank.
    """

    unit_id: str
    ranked_entities: tuple[tuple[str, int, int], ...]

    def rank_of(self, normalized: str) -> int | None:
        for entity, _, rank in self.ranked_entities:
            if entity == normalized:
                return rank
        return None

    def to_dict(self) -> dict:
        return {
            "chunk_id": self.unit_id,
            "entities": [
                {"e": entity, "imp": importance, "rank": rank}
                for entity, importance, rank in self.ranked_entities
            ],
        }


def ranked_from_importances(
    unit_id: str, importances: Mapping[str, int]
) -> InformativenessTable:
    """Order an entity -> importance map into a rank table."""
    ordered = sorted(importances.items(), key=lambda kv: (-kv[1], kv[0]))
    return InformativenessTable(
        unit_id=unit_id,
        ranked_entities=tuple(
            (entity, importance, rank)
            for rank, (entity, importance) in enumerate(ordered, start=1)
        ),
    )


def _unit_scope(unit: Chunk | Document) -> tuple[str, int, int]:
    if isinstance(unit, Chunk):
        return unit.doc_id, unit.start, unit.end
    return unit.doc_id, 0, len(unit.sentences)


def entity_importance(
    corpus: Corpus, unit: Chunk | Document, entity: EntityRecord | str
) -> int:
    """Sum of per-sentence maximum descendant counts of the entity's tokens.

    Multiple occurrences inside one sentence contribute once, via the
    maximum over all their tokens. Sentences without the entity add 0.
    """
    normalized = entity.normalized if isinstance(entity, EntityRecord) else entity
    doc_id, start, end = _unit_scope(unit)
    total = 0
    for sentence in range(start, end):
        best = -1
        counts = None
        for name, tok_start, tok_end in corpus.sentence_entities(doc_id, sentence):
            if name != normalized:
                continue
            if counts is None:
                counts = corpus.tree(doc_id, sentence).descendant_counts
            best = max(best, max(counts[tok_start:tok_end]))
        if best >= 0:
            total += best
    return total


def build_table(corpus: Corpus, unit: Chunk) -> InformativenessTable:
    """Rank every entity that occurs at least once inside the chunk."""
    doc_id, start, end = _unit_scope(unit)
    importances: dict[str, int] = {}
    present: set[str] = set()
    for sentence in range(start, end):
        for name, _, _ in corpus.sentence_entities(doc_id, sentence):
            present.add(name)
    for name in present:
        importances[name] = entity_importance(corpus, unit, name)
    unit_id = unit.chunk_id if isinstance(unit, Chunk) else unit.doc_id
    return ranked_from_importances(unit_id, importances)


def chunk_score(table: InformativenessTable, question_entities: Iterable[str]) -> float:
    """Sum of reciprocal ranks of the question entities present in the table.

    Both sides are matched on their normalized forms; question entities that
    collapse to the same normalized form count once.
    """
    ranks: dict[str, int] = {}
    for entity, _, rank in table.ranked_entities:
        ranks.setdefault(normalize_entity(entity), rank)
    total = 0.0
    for name in sorted({normalize_entity(raw) for raw in question_entities}):
        rank = ranks.get(name)
        if rank is not None:
            total += 1.0 / rank
    return total


class InformativenessIndex:
    """Per-chunk table cache over an immutable corpus.

    Table computation is pure, so concurrent lookups may race only on the
    cache dict, whose single-key writes are atomic.
    """

    def __init__(self, corpus: Corpus):
        self.corpus = corpus
        self._tables: dict[str, InformativenessTable] = {}

    def table(self, chunk_id: str) -> InformativenessTable:
        cached = self._tables.get(chunk_id)
        if cached is None:
            cached = build_table(self.corpus, self.corpus.chunk(chunk_id))
            self._tables[chunk_id] = cached
        return cached

    def top_k(
        self, question_entities: Iterable[str], k: int
    ) -> list[tuple[str, float]]:
        if k < 1:
            raise ContractViolation(f"k must be >= 1, got {k}")
        entities = sorted(set(question_entities))
        scored = []
        for chunk_id in self.corpus.sorted_chunk_ids():
            score = chunk_score(self.table(chunk_id), entities)
            if score > 0.0:
                scored.append((chunk_id, score))
        scored.sort(key=lambda item: (-item[1], item[0]))
        return scored[:k]


def top_k_by_informativeness(
    corpus: Corpus,
    question_entities: Iterable[str],
    k: int,
    index: InformativenessIndex | None = None,
) -> list[tuple[str, float]]:
    """Highest-scoring chunks for the question entities, zero scores excluded."""
    if index is None:
        index = InformativenessIndex(corpus)
    return index.top_k(question_entities, k)
