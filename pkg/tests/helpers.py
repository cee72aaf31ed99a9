"""Shared test utilities: random inputs and independent brute-force oracles.

The oracles here re-derive expected values from raw head arrays and
occurrence tuples only, never through the package's own data structures.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field


def random_heads(rng: random.Random, n: int) -> list[int]:
    """Valid head array: token 1 is the root, token i attaches earlier."""
    return [0 if i == 1 else rng.randint(1, i - 1) for i in range(1, n + 1)]


def brute_force_descendants(heads: list[int]) -> list[int]:
    """Ancestor-pair enumeration: walk every token's head path to the root."""
    counts = [0] * len(heads)
    for index in range(1, len(heads) + 1):
        ancestor = heads[index - 1]
        while ancestor != 0:
            counts[ancestor - 1] += 1
            ancestor = heads[ancestor - 1]
    return counts


def depths(heads: list[int]) -> list[int]:
    out = []
    for index in range(1, len(heads) + 1):
        depth = 0
        ancestor = heads[index - 1]
        while ancestor != 0:
            depth += 1
            ancestor = heads[ancestor - 1]
        out.append(depth)
    return out


def conllu_block(
    sent_id: str | None, forms: list[str], heads: list[int]
) -> str:
    lines = []
    if sent_id is not None:
        lines.append(f"# sent_id = {sent_id}")
    for i, (form, head) in enumerate(zip(forms, heads), start=1):
        deprel = "root" if head == 0 else "dep"
        lines.append(f"{i}\t{form}\t_\t_\t_\t_\t{head}\t{deprel}\t_\t_")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Random mini-corpora plus a naive reimplementation of the scoring pipeline.
# ---------------------------------------------------------------------------

ENTITY_POOL = [
    "alpha", "beta", "gamma", "delta", "epsilon", "zeta", "eta", "theta",
]


@dataclass
class MiniSentence:
    heads: list[int]


@dataclass
class MiniDoc:
    doc_id: str
    sentences: list[MiniSentence]
    # (entity, sentence, start, end)
    occurrences: list[tuple[str, int, int, int]] = field(default_factory=list)


@dataclass
class MiniCorpus:
    docs: list[MiniDoc]
    window: int
    stride: int

    def documents_jsonl(self) -> list[str]:
        import json

        return [
            json.dumps({"id": d.doc_id, "title": d.doc_id, "text": d.doc_id})
            for d in self.docs
        ]

    def trees_conllu(self) -> str:
        blocks = []
        for doc in self.docs:
            for si, sent in enumerate(doc.sentences):
                forms = [f"w{i}" for i in range(1, len(sent.heads) + 1)]
                blocks.append(conllu_block(f"{doc.doc_id}#{si}", forms, sent.heads))
        return "\n\n".join(blocks) + "\n"

    def entities_jsonl(self) -> list[str]:
        import json

        lines = []
        for doc in self.docs:
            for entity, sent, start, end in doc.occurrences:
                lines.append(
                    json.dumps(
                        {
                            "doc_id": doc.doc_id,
                            "sent": sent,
                            "start": start,
                            "end": end,
                            "surface": entity,
                            "label": "X",
                        }
                    )
                )
        return lines


def random_mini_corpus(rng: random.Random) -> MiniCorpus:
    docs = []
    for d in range(rng.randint(1, 5)):
        sentences = [
            MiniSentence(heads=random_heads(rng, rng.randint(1, 8)))
            for _ in range(rng.randint(1, 6))
        ]
        doc = MiniDoc(doc_id=f"d{d}", sentences=sentences)
        for _ in range(rng.randint(0, 12)):
            sent = rng.randrange(len(sentences))
            n = len(sentences[sent].heads)
            start = rng.randrange(n)
            end = min(n, start + rng.randint(1, 2))
            doc.occurrences.append(
                (rng.choice(ENTITY_POOL), sent, start, end)
            )
        docs.append(doc)
    window = rng.randint(1, 3)
    stride = rng.randint(1, window)
    return MiniCorpus(docs=docs, window=window, stride=stride)


def naive_chunk_ranges(n_sentences: int, window: int, stride: int) -> list[tuple[int, int]]:
    ranges = []
    start = 0
    while start < n_sentences:
        end = min(start + window, n_sentences)
        ranges.append((start, end))
        if end >= n_sentences:
            break
        start += stride
    return ranges


def naive_importance(
    doc: MiniDoc, entity: str, sent_range: tuple[int, int]
) -> int:
    """Re-derive importance by scanning every occurrence token per sentence."""
    total = 0
    for sent in range(*sent_range):
        counts = brute_force_descendants(doc.sentences[sent].heads)
        best = None
        for name, osent, start, end in doc.occurrences:
            if name != entity or osent != sent:
                continue
            for token in range(start, end):
                if best is None or counts[token] > best:
                    best = counts[token]
        if best is not None:
            total += best
    return total


def naive_table(
    doc: MiniDoc, sent_range: tuple[int, int]
) -> list[tuple[str, int, int]]:
    present = sorted(
        {
            name
            for name, sent, _, _ in doc.occurrences
            if sent_range[0] <= sent < sent_range[1]
        }
    )
    scored = [(name, naive_importance(doc, name, sent_range)) for name in present]
    scored.sort(key=lambda kv: (-kv[1], kv[0]))
    return [
        (name, importance, rank)
        for rank, (name, importance) in enumerate(scored, start=1)
    ]


def naive_score(
    table: list[tuple[str, int, int]], question_entities: set[str]
) -> float:
    ranks = {name: rank for name, _, rank in table}
    total = 0.0
    for entity in sorted(question_entities):
        if entity in ranks:
            total += 1.0 / ranks[entity]
    return total


def naive_top_k(
    corpus: MiniCorpus, question_entities: set[str], k: int
) -> list[tuple[str, float]]:
    scored = []
    for doc in corpus.docs:
        for start, end in naive_chunk_ranges(
            len(doc.sentences), corpus.window, corpus.stride
        ):
            score = naive_score(naive_table(doc, (start, end)), question_entities)
            if score > 0.0:
                scored.append((f"{doc.doc_id}/{start}", score))
    scored.sort(key=lambda item: (-item[1], item[0]))
    return scored[:k]
