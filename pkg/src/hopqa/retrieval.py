"""Dual-path retrieval: informativeness ranking fused with dense similarity.

The fused context is an ordered union, not a re-ranking: the
informativeness block comes first, then similarity hits whose chunk ids are
not already present. Setting ``k_info=0`` yields pure dense retrieval and
``k_sim=0`` pure informativeness retrieval.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import Corpus
from .dense_index import VectorIndex, top_k_by_similarity
from .errors import ContractViolation
from .informativeness import InformativenessIndex, top_k_by_informativeness

DEFAULT_K_INFO = 15
DEFAULT_K_SIM = 10


@dataclass(frozen=True)
class RetrievalResult:
    query_id: str
    informativeness_hits: tuple[tuple[str, float], ...] = ()
    similarity_hits: tuple[tuple[str, float], ...] = ()
    fused: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        return {
            "query_id": self.query_id,
            "informativeness_hits": [
                [chunk_id, score] for chunk_id, score in self.informativeness_hits
            ],
            "similarity_hits": [
                [chunk_id, score] for chunk_id, score in self.similarity_hits
            ],
            "fused": list(self.fused),
        }


def fuse(
    informativeness_hits: Sequence[tuple[str, float]],
    similarity_hits: Sequence[tuple[str, float]],
) -> tuple[str, ...]:
    """Informativeness hits in order, then unseen similarity hits in order."""
    fused: list[str] = []
    seen: set[str] = set()
    for chunk_id, _ in informativeness_hits:
        if chunk_id not in seen:
            seen.add(chunk_id)
            fused.append(chunk_id)
    for chunk_id, _ in similarity_hits:
        if chunk_id not in seen:
            seen.add(chunk_id)
            fused.append(chunk_id)
    return tuple(fused)


def retrieve(
    corpus: Corpus,
    vector_index: VectorIndex | None,
    question_entities: Iterable[str],
    query_vector: Sequence[float] | None,
    k_info: int = DEFAULT_K_INFO,
    k_sim: int = DEFAULT_K_SIM,
    query_id: str = "",
    info_index: InformativenessIndex | None = None,
) -> RetrievalResult:
    """Run both retrieval paths for one query and fuse their hits.

    The similarity path is skipped when ``k_sim`` is 0 or when no query
    vector (or no vector index) is available.
    """
    if k_info < 0 or k_sim < 0:
        raise ContractViolation("k_info and k_sim must be >= 0")
    if k_info == 0 and k_sim == 0:
        raise ContractViolation("k_info and k_sim must not both be 0")

    info_hits: list[tuple[str, float]] = []
    if k_info > 0:
        info_hits = top_k_by_informativeness(
            corpus, question_entities, k_info, index=info_index
        )

    sim_hits: list[tuple[str, float]] = []
    if k_sim > 0 and vector_index is not None and query_vector is not None:
        sim_hits = top_k_by_similarity(vector_index, query_vector, k_sim)

    return RetrievalResult(
        query_id=query_id,
        informativeness_hits=tuple(info_hits),
        similarity_hits=tuple(sim_hits),
        fused=fuse(info_hits, sim_hits),
    )
