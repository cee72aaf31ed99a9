"""The engine's sentence-window chunking contract, restated here.

Chunks start at sentence offsets 0, stride, 2*stride, ...; the final chunk
is truncated at the document end and generation stops once a chunk reaches
the last sentence. Chunk ids are ``<doc_id>/<start sentence>`` and a
chunk's text is the space-joined token forms of its sentences. Embeddings
exported by this package must be keyed by exactly these ids.
"""

from __future__ import annotations

from .errors import AnnotateError

DEFAULT_WINDOW = 3
DEFAULT_STRIDE = 2


def chunk_ranges(n_sentences: int, window: int, stride: int) -> list[tuple[int, int]]:
    if window < 1 or not 1 <= stride <= window:
        raise AnnotateError(
            f"invalid chunking parameters: window={window} stride={stride}"
        )
    ranges: list[tuple[int, int]] = []
    start = 0
    while start < n_sentences:
        end = min(start + window, n_sentences)
        ranges.append((start, end))
        if end >= n_sentences:
            break
        start += stride
    return ranges


def chunk_id(doc_id: str, start: int) -> str:
    return f"{doc_id}/{start}"
