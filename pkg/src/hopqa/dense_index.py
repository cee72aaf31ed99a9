"""Exact cosine-similarity retrieval over precomputed chunk embeddings."""

from __future__ import annotations

import json
from typing import Iterable, Sequence

import numpy as np

from .errors import ContractViolation, IngestError

Vector = Sequence[float]


def cosine(u: Vector, v: Vector) -> float:
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ContractViolation(
            f"dimension mismatch: {u.shape[0]} vs {v.shape[0]}"
        )
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ContractViolation("cosine is undefined for an all-zero vector")
    return float(np.dot(u, v) / (nu * nv))


class VectorIndex:
    """Brute-force store of chunk embeddings; no approximate structures."""

    def __init__(self, dimension: int):
        if dimension < 1:
            raise ContractViolation(f"dimension must be >= 1, got {dimension}")
        self.dimension = dimension
        self._vectors: dict[str, np.ndarray] = {}

    def __len__(self) -> int:
        return len(self._vectors)

    def __contains__(self, chunk_id: str) -> bool:
        return chunk_id in self._vectors

    def chunk_ids(self) -> list[str]:
        return sorted(self._vectors)

    def vector(self, chunk_id: str) -> np.ndarray:
        return self._vectors[chunk_id]

    def add(self, chunk_id: str, vector: Vector) -> None:
        arr = np.asarray(vector, dtype=np.float64)
        if arr.ndim != 1 or arr.shape[0] != self.dimension:
            raise IngestError(
                f"embedding for {chunk_id!r} has dimension {arr.shape}, "
                f"expected ({self.dimension},)"
            )
        if not np.any(arr):
            raise IngestError(f"embedding for {chunk_id!r} is all-zero")
        if chunk_id in self._vectors:
            raise IngestError(f"duplicate embedding for chunk {chunk_id!r}")
        self._vectors[chunk_id] = arr


def top_k_by_similarity(
    index: VectorIndex, query_vector: Vector, k: int
) -> list[tuple[str, float]]:
    """Top-k entries by cosine similarity, ties broken by chunk id."""
    if k < 1:
        raise ContractViolation(f"k must be >= 1, got {k}")
    query = np.asarray(query_vector, dtype=np.float64)
    if query.ndim != 1 or query.shape[0] != index.dimension:
        raise ContractViolation(
            f"query dimension {query.shape} does not match index "
            f"dimension ({index.dimension},)"
        )
    scored = [
        (chunk_id, cosine(query, index.vector(chunk_id)))
        for chunk_id in index.chunk_ids()
    ]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]


def index_from_corpus(corpus) -> VectorIndex | None:
    """Collect a corpus's embedded chunks into an index; None when empty."""
    dimension = corpus.embedding_dimension()
    if dimension is None:
        return None
    index = VectorIndex(dimension)
    for chunk_id in corpus.sorted_chunk_ids():
        embedding = corpus.chunks[chunk_id].embedding
        if embedding is not None:
            index.add(chunk_id, embedding)
    return index


def load_embeddings(lines: Iterable[str]) -> dict[str, list[float]]:
    """Read an embeddings JSONL stream into a chunk_id -> vector map."""
    out: dict[str, list[float]] = {}
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"embeddings line {lineno}: invalid JSON: {exc}")
        if "chunk_id" not in obj or "vector" not in obj:
            raise IngestError(
                f"embeddings line {lineno}: expected 'chunk_id' and 'vector' keys"
            )
        chunk_id = str(obj["chunk_id"])
        if chunk_id in out:
            raise IngestError(
                f"embeddings line {lineno}: duplicate chunk_id {chunk_id!r}"
            )
        out[chunk_id] = [float(x) for x in obj["vector"]]
    return out
