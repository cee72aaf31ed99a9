#!/usr/bin/env python3
"""Regenerate the checked-in fixture corpus under tests/fixtures/.

Sentences are declared as (tokens, heads, deprels) triples so token indices,
head links and entity spans stay consistent by construction. Chunk and query
embeddings are deterministic hashed bags of words, frozen into the output
files. Run from the repository root:

    python scripts/make_fixture_corpus.py
"""

from __future__ import annotations

import hashlib
import json
import math
import re
import sys
from pathlib import Path

FIXTURES = Path(__file__).resolve().parent.parent / "tests" / "fixtures"
EMBED_DIM = 16
WINDOW = 3
STRIDE = 2

# ---------------------------------------------------------------------------
# Corpus: (doc_id, title, sentences); sentence = (tokens, heads, entities)
# entities = (surface, start, end) with a 0-based half-open token span.
# ---------------------------------------------------------------------------

DOCS = [
    (
        "boom",
        "Here Comes the Boom",
        [
            (
                "Here Comes the Boom is a 2012 American comedy film .".split(),
                [4, 4, 4, 10, 10, 10, 10, 10, 10, 0, 10],
                [("Here Comes the Boom", 0, 4)],
            ),
            (
                "Kevin James stars as a biology teacher in the film .".split(),
                [2, 3, 0, 7, 7, 7, 3, 10, 10, 3, 3],
                [("Kevin James", 0, 2)],
            ),
            (
                "The film was produced by Kevin James and Todd Garner .".split(),
                [2, 4, 4, 0, 7, 7, 4, 10, 10, 7, 4],
                [("Kevin James", 5, 7), ("Todd Garner", 8, 10)],
            ),
            (
                "Salma Hayek plays Bella Flores in Here Comes the Boom .".split(),
                [2, 3, 0, 5, 3, 10, 10, 10, 10, 3, 3],
                [
                    ("Salma Hayek", 0, 2),
                    ("Bella Flores", 3, 5),
                    ("Here Comes the Boom", 6, 10),
                ],
            ),
            (
                "Frank Coraci directed the film for Happy Madison Productions .".split(),
                [2, 3, 0, 5, 3, 9, 9, 9, 3, 3],
                [("Frank Coraci", 0, 2), ("Happy Madison Productions", 6, 9)],
            ),
        ],
    ),
    (
        "grownups",
        "Grown Ups",
        [
            (
                "Grown Ups is a 2010 American comedy film directed by Dennis Dugan .".split(),
                [2, 8, 8, 8, 8, 8, 8, 0, 8, 12, 12, 9, 8],
                [("Grown Ups", 0, 2), ("Dennis Dugan", 10, 12)],
            ),
            (
                "Kevin James plays Eric Lamonsoff in Grown Ups .".split(),
                [2, 3, 0, 5, 3, 8, 8, 3, 3],
                [
                    ("Kevin James", 0, 2),
                    ("Eric Lamonsoff", 3, 5),
                    ("Grown Ups", 6, 8),
                ],
            ),
            (
                "Maria Bello plays Sally Lamonsoff , the wife of Eric Lamonsoff .".split(),
                [2, 3, 0, 5, 3, 5, 8, 5, 11, 11, 8, 3],
                [
                    ("Maria Bello", 0, 2),
                    ("Sally Lamonsoff", 3, 5),
                    ("Eric Lamonsoff", 9, 11),
                ],
            ),
            (
                "Adam Sandler leads the cast of Grown Ups .".split(),
                [2, 3, 0, 5, 3, 8, 8, 5, 3],
                [("Adam Sandler", 0, 2), ("Grown Ups", 6, 8)],
            ),
            (
                "Salma Hayek plays the wife of Adam Sandler 's character in Grown Ups .".split(),
                [2, 3, 0, 5, 3, 10, 8, 10, 8, 5, 13, 13, 3, 3],
                [
                    ("Salma Hayek", 0, 2),
                    ("Adam Sandler", 6, 8),
                    ("Grown Ups", 11, 13),
                ],
            ),
        ],
    ),
    (
        "kjames",
        "Kevin James",
        [
            (
                "Kevin James is an American actor and comedian .".split(),
                [2, 6, 6, 6, 6, 0, 8, 6, 6],
                [("Kevin James", 0, 2)],
            ),
            (
                "He starred in The King of Queens for nine seasons .".split(),
                [2, 0, 5, 5, 2, 7, 5, 10, 10, 2, 2],
                [("The King of Queens", 3, 7)],
            ),
            (
                "Kevin James produced Here Comes the Boom in 2012 .".split(),
                [2, 3, 0, 7, 7, 7, 3, 9, 3, 3],
                [("Kevin James", 0, 2), ("Here Comes the Boom", 3, 7)],
            ),
            (
                "Kevin James appeared in Grown Ups with Adam Sandler .".split(),
                [2, 3, 0, 6, 6, 3, 9, 9, 3, 3],
                [
                    ("Kevin James", 0, 2),
                    ("Grown Ups", 4, 6),
                    ("Adam Sandler", 7, 9),
                ],
            ),
            (
                "Paul Blart : Mall Cop made Kevin James a star .".split(),
                [2, 6, 2, 5, 2, 0, 8, 6, 10, 6, 6],
                [("Paul Blart: Mall Cop", 0, 5), ("Kevin James", 6, 8)],
            ),
        ],
    ),
    (
        "mbello",
        "Maria Bello",
        [
            (
                "Maria Bello is an American actress .".split(),
                [2, 6, 6, 6, 6, 0, 6],
                [("Maria Bello", 0, 2)],
            ),
            (
                "Maria Bello appeared in Grown Ups in 2010 .".split(),
                [2, 3, 0, 6, 6, 3, 8, 3, 3],
                [("Maria Bello", 0, 2), ("Grown Ups", 4, 6)],
            ),
            (
                "She starred in A History of Violence with Viggo Mortensen .".split(),
                [2, 0, 5, 5, 2, 7, 5, 10, 10, 2, 2],
                [("A History of Violence", 3, 7), ("Viggo Mortensen", 8, 10)],
            ),
            (
                "Maria Bello also worked on the series ER .".split(),
                [2, 4, 4, 0, 7, 7, 4, 7, 4],
                [("Maria Bello", 0, 2), ("ER", 7, 8)],
            ),
        ],
    ),
    (
        "sandler",
        "Adam Sandler",
        [
            (
                "Adam Sandler is an American actor and producer .".split(),
                [2, 6, 6, 6, 6, 0, 8, 6, 6],
                [("Adam Sandler", 0, 2)],
            ),
            (
                "Adam Sandler founded Happy Madison Productions in 1999 .".split(),
                [2, 3, 0, 6, 6, 3, 8, 3, 3],
                [("Adam Sandler", 0, 2), ("Happy Madison Productions", 3, 6)],
            ),
            (
                "Adam Sandler starred in Grown Ups with Kevin James .".split(),
                [2, 3, 0, 6, 6, 3, 9, 9, 3, 3],
                [
                    ("Adam Sandler", 0, 2),
                    ("Grown Ups", 4, 6),
                    ("Kevin James", 7, 9),
                ],
            ),
            (
                "His character in Grown Ups is married to Roxanne .".split(),
                [2, 7, 5, 5, 2, 7, 0, 9, 7, 7],
                [("Grown Ups", 3, 5), ("Roxanne", 8, 9)],
            ),
        ],
    ),
    (
        "hayek",
        "Salma Hayek",
        [
            (
                "Salma Hayek is a Mexican and American actress .".split(),
                [2, 8, 8, 8, 8, 7, 5, 0, 8],
                [("Salma Hayek", 0, 2)],
            ),
            (
                "Salma Hayek plays Roxanne in Grown Ups .".split(),
                [2, 3, 0, 3, 7, 7, 3, 3],
                [("Salma Hayek", 0, 2), ("Roxanne", 3, 4), ("Grown Ups", 5, 7)],
            ),
            (
                "She also appeared in Here Comes the Boom .".split(),
                [3, 3, 0, 8, 8, 8, 8, 3, 3],
                [("Here Comes the Boom", 4, 8)],
            ),
            (
                "Salma Hayek worked with Kevin James in that film .".split(),
                [2, 3, 0, 6, 6, 3, 9, 9, 3, 3],
                [("Salma Hayek", 0, 2), ("Kevin James", 4, 6)],
            ),
        ],
    ),
    (
        "coraci",
        "Frank Coraci",
        [
            (
                "Frank Coraci is an American film director .".split(),
                [2, 7, 7, 7, 7, 7, 0, 7],
                [("Frank Coraci", 0, 2)],
            ),
            (
                "Frank Coraci directed Here Comes the Boom .".split(),
                [2, 3, 0, 7, 7, 7, 3, 3],
                [("Frank Coraci", 0, 2), ("Here Comes the Boom", 3, 7)],
            ),
            (
                "He also directed The Waterboy with Adam Sandler .".split(),
                [3, 3, 0, 5, 3, 8, 8, 3, 3],
                [("The Waterboy", 3, 5), ("Adam Sandler", 6, 8)],
            ),
        ],
    ),
    (
        "happymadison",
        "Happy Madison Productions",
        [
            (
                "Happy Madison Productions is an American film production company .".split(),
                [3, 3, 9, 9, 9, 9, 8, 9, 0, 9],
                [("Happy Madison Productions", 0, 3)],
            ),
            (
                "The company was founded by Adam Sandler .".split(),
                [2, 4, 4, 0, 7, 7, 4, 4],
                [("Adam Sandler", 5, 7)],
            ),
            (
                "Happy Madison Productions produced Grown Ups .".split(),
                [3, 3, 4, 0, 6, 4, 4],
                [("Happy Madison Productions", 0, 3), ("Grown Ups", 4, 6)],
            ),
            (
                "It also produced Here Comes the Boom with Kevin James .".split(),
                [3, 3, 0, 7, 7, 7, 3, 10, 10, 3, 3],
                [("Here Comes the Boom", 3, 7), ("Kevin James", 8, 10)],
            ),
        ],
    ),
    (
        "colosseum",
        "Colosseum",
        [
            (
                "Rome hosts the ancient Colosseum".split(),
                [2, 0, 5, 5, 2],
                [("Rome", 0, 1), ("Colosseum", 4, 5)],
            ),
            (
                "The Colosseum is an ancient amphitheatre in the centre of Rome .".split(),
                [2, 6, 6, 6, 6, 0, 9, 9, 6, 11, 9, 6],
                [("Colosseum", 1, 2), ("Rome", 10, 11)],
            ),
            (
                "It could hold tens of thousands of spectators .".split(),
                [3, 3, 0, 3, 6, 4, 8, 6, 3],
                [],
            ),
        ],
    ),
    (
        "rome",
        "Rome",
        [
            (
                "Rome is the capital city of Italy .".split(),
                [5, 5, 5, 5, 0, 7, 5, 5],
                [("Rome", 0, 1), ("Italy", 6, 7)],
            ),
            (
                "The Tiber flows through Rome .".split(),
                [2, 3, 0, 5, 3, 3],
                [("Tiber", 1, 2), ("Rome", 4, 5)],
            ),
            (
                "Rome hosts landmarks such as the Colosseum and the Pantheon .".split(),
                [2, 0, 2, 7, 7, 7, 3, 10, 10, 7, 2],
                [("Rome", 0, 1), ("Colosseum", 6, 7), ("Pantheon", 9, 10)],
            ),
            (
                "Millions of tourists visit Rome every year .".split(),
                [4, 3, 1, 0, 4, 7, 4, 4],
                [("Rome", 4, 5)],
            ),
        ],
    ),
    (
        "kingofqueens",
        "The King of Queens",
        [
            (
                "The King of Queens is an American television sitcom .".split(),
                [2, 9, 4, 2, 9, 9, 9, 9, 0, 9],
                [("The King of Queens", 0, 4)],
            ),
            (
                "Kevin James starred in The King of Queens .".split(),
                [2, 3, 0, 6, 6, 3, 8, 6, 3],
                [("Kevin James", 0, 2), ("The King of Queens", 4, 8)],
            ),
            (
                "Leah Remini played his wife Carrie on the show .".split(),
                [2, 3, 0, 5, 3, 5, 9, 9, 3, 3],
                [("Leah Remini", 0, 2), ("Carrie", 5, 6)],
            ),
        ],
    ),
    (
        "waterboy",
        "The Waterboy",
        [
            (
                "The Waterboy is a 1998 American sports comedy film .".split(),
                [2, 9, 9, 9, 9, 9, 8, 9, 0, 9],
                [("The Waterboy", 0, 2)],
            ),
            (
                "Adam Sandler starred in The Waterboy .".split(),
                [2, 3, 0, 6, 6, 3, 3],
                [("Adam Sandler", 0, 2), ("The Waterboy", 4, 6)],
            ),
            (
                "Frank Coraci directed the film .".split(),
                [2, 3, 0, 5, 3, 3],
                [("Frank Coraci", 0, 2)],
            ),
        ],
    ),
]

TABLE4_QUESTION = (
    "Who plays the wife of the producer of Here Comes the Boom in Grown Ups?"
)
SUB1 = "Who is the producer of Here Comes the Boom?"
SUB2 = "Who plays the wife of this producer in Grown Ups?"
SUB2_REWRITTEN = "Who plays the wife of Kevin James in Grown Ups?"

ROME_QUESTION = "What ancient amphitheatre does Rome host?"
RIVER_QUESTION = "What river flows through Rome?"
SITCOM_QUESTION = "Who starred in The King of Queens?"

BAD_SUB1 = "Who directed Here Comes the Boom?"
BAD_SUB2 = "Who plays the wife of this director in Grown Ups?"
BAD_SUB2_REWRITTEN = "Who plays the wife of Frank Coraci in Grown Ups?"

DUALPATH_QUESTION = (
    "Which Happy Madison films feature Kevin James with Adam Sandler "
    "in Grown Ups or Here Comes the Boom?"
)
DUALPATH_ENTITIES = [
    "Kevin James",
    "Grown Ups",
    "Here Comes the Boom",
    "Adam Sandler",
]


def hashed_embedding(text: str, dim: int = EMBED_DIM) -> list[float]:
    """Deterministic bag-of-words feature hash, L2-normalized."""
    vec = [0.0] * dim
    for token in re.findall(r"[a-z0-9']+", text.lower()):
        digest = hashlib.md5(token.encode("utf-8")).digest()
        value = int.from_bytes(digest[:8], "big")
        bucket = value % dim
        sign = 1.0 if (value >> 8) % 2 == 0 else -1.0
        vec[bucket] += sign
    norm = math.sqrt(sum(x * x for x in vec))
    if norm == 0.0:
        raise ValueError(f"hashed embedding of {text!r} is all-zero")
    return [round(x / norm, 10) for x in vec]


def validate() -> None:
    seen_docs = set()
    for doc_id, _, sentences in DOCS:
        assert doc_id not in seen_docs, doc_id
        seen_docs.add(doc_id)
        for si, (tokens, heads, entities) in enumerate(sentences):
            n = len(tokens)
            assert len(heads) == n, f"{doc_id}#{si}: {len(heads)} heads, {n} tokens"
            assert heads.count(0) == 1, f"{doc_id}#{si}: needs exactly one root"
            for i, head in enumerate(heads, start=1):
                assert 0 <= head <= n and head != i, f"{doc_id}#{si} token {i}"
            # reachability from the root
            children = {}
            for i, head in enumerate(heads, start=1):
                children.setdefault(head, []).append(i)
            stack, seen = list(children.get(0, [])), set()
            while stack:
                node = stack.pop()
                assert node not in seen, f"{doc_id}#{si}: cycle"
                seen.add(node)
                stack.extend(children.get(node, []))
            assert len(seen) == n, f"{doc_id}#{si}: unreachable tokens"
            for surface, start, end in entities:
                assert 0 <= start < end <= n, f"{doc_id}#{si}: span {surface}"
                joined = " ".join(tokens[start:end])
                squashed = surface.replace(": ", " : ")
                assert joined == squashed, (
                    f"{doc_id}#{si}: span text {joined!r} != surface {surface!r}"
                )


def chunk_ranges(n_sentences: int) -> list[tuple[int, int]]:
    ranges = []
    start = 0
    while start < n_sentences:
        end = min(start + WINDOW, n_sentences)
        ranges.append((start, end))
        if end >= n_sentences:
            break
        start += STRIDE
    return ranges


def write_corpus() -> None:
    docs_lines = []
    conllu_blocks = []
    entity_lines = []
    embedding_lines = []
    for doc_id, title, sentences in DOCS:
        text = " ".join(" ".join(tokens) for tokens, _, _ in sentences)
        docs_lines.append(
            json.dumps({"id": doc_id, "title": title, "text": text})
        )
        for si, (tokens, heads, entities) in enumerate(sentences):
            lines = [f"# sent_id = {doc_id}#{si}"]
            for i, (form, head) in enumerate(zip(tokens, heads), start=1):
                deprel = "root" if head == 0 else "dep"
                lines.append(
                    f"{i}\t{form}\t_\t_\t_\t_\t{head}\t{deprel}\t_\t_"
                )
            conllu_blocks.append("\n".join(lines))
            for surface, start, end in entities:
                entity_lines.append(
                    json.dumps(
                        {
                            "doc_id": doc_id,
                            "sent": si,
                            "start": start,
                            "end": end,
                            "surface": surface,
                            "label": "ENT",
                        }
                    )
                )
        sentence_texts = [" ".join(tokens) for tokens, _, _ in sentences]
        for start, end in chunk_ranges(len(sentences)):
            chunk_id = f"{doc_id}/{start}"
            chunk_text = " ".join(sentence_texts[start:end])
            embedding_lines.append(
                json.dumps(
                    {"chunk_id": chunk_id, "vector": hashed_embedding(chunk_text)}
                )
            )
    (FIXTURES / "documents.jsonl").write_text(
        "\n".join(docs_lines) + "\n", encoding="utf-8"
    )
    (FIXTURES / "trees.conllu").write_text(
        "\n\n".join(conllu_blocks) + "\n", encoding="utf-8"
    )
    (FIXTURES / "entities.jsonl").write_text(
        "\n".join(entity_lines) + "\n", encoding="utf-8"
    )
    (FIXTURES / "embeddings.jsonl").write_text(
        "\n".join(embedding_lines) + "\n", encoding="utf-8"
    )


def write_questions() -> None:
    questions = [
        {
            "qid": "q1",
            "question": TABLE4_QUESTION,
            "answer": "Maria Bello",
            "q_entities": {
                "0": ["Here Comes the Boom"],
                "1": ["Kevin James", "Grown Ups"],
            },
            "q_vectors": {
                "0": hashed_embedding(SUB1),
                "1": hashed_embedding(SUB2_REWRITTEN),
            },
        },
        {
            "qid": "q2",
            "question": ROME_QUESTION,
            "answer": "Colosseum",
            "q_entities": {"0": ["Rome"]},
            "q_vectors": {"0": hashed_embedding(ROME_QUESTION)},
        },
        {
            "qid": "q3",
            "question": SITCOM_QUESTION,
            "answer": "Kevin James and Leah Remini",
            "q_entities": {"0": ["The King of Queens"]},
            "q_vectors": {"0": hashed_embedding(SITCOM_QUESTION)},
        },
    ]
    (FIXTURES / "questions.jsonl").write_text(
        "\n".join(json.dumps(q) for q in questions) + "\n", encoding="utf-8"
    )

    candidates = [
        {
            "qid": "cand1",
            "question": TABLE4_QUESTION,
            "answer": "Maria Bello",
            "decomposition": [SUB1, SUB2],
            "q_entities": {
                "0": ["Here Comes the Boom"],
                "1": ["Kevin James", "Grown Ups"],
            },
            "q_vectors": {
                "0": hashed_embedding(SUB1),
                "1": hashed_embedding(SUB2_REWRITTEN),
            },
        },
        {
            "qid": "cand2",
            "question": TABLE4_QUESTION,
            "answer": "Maria Bello",
            "decomposition": [BAD_SUB1, BAD_SUB2],
            "q_entities": {
                "0": ["Here Comes the Boom"],
                "1": ["Frank Coraci", "Grown Ups"],
            },
            "q_vectors": {
                "0": hashed_embedding(BAD_SUB1),
                "1": hashed_embedding(BAD_SUB2_REWRITTEN),
            },
        },
        {
            "qid": "cand3",
            "question": ROME_QUESTION,
            "answer": "Colosseum",
            "decomposition": [ROME_QUESTION],
            "q_entities": {"0": ["Rome"]},
            "q_vectors": {"0": hashed_embedding(ROME_QUESTION)},
        },
        {
            "qid": "cand4",
            "question": ROME_QUESTION,
            "answer": "Colosseum",
            "decomposition": [RIVER_QUESTION],
            "q_entities": {"0": ["Rome", "Tiber"]},
            "q_vectors": {"0": hashed_embedding(RIVER_QUESTION)},
        },
    ]
    (FIXTURES / "candidates.jsonl").write_text(
        "\n".join(json.dumps(c) for c in candidates) + "\n", encoding="utf-8"
    )

    queries = [
        {
            "qid": "dualpath",
            "text": DUALPATH_QUESTION,
            "entities": DUALPATH_ENTITIES,
            "vector": hashed_embedding(DUALPATH_QUESTION),
        },
        {
            "qid": "sub1",
            "text": SUB1,
            "entities": ["Here Comes the Boom"],
            "vector": hashed_embedding(SUB1),
        },
        {
            "qid": "no-vector",
            "text": ROME_QUESTION,
            "entities": ["Rome"],
        },
    ]
    (FIXTURES / "queries.jsonl").write_text(
        "\n".join(json.dumps(q) for q in queries) + "\n", encoding="utf-8"
    )


def write_stub_script() -> None:
    script = {
        "version": 1,
        "unknown_answer": "unknown",
        "rules": [
            {
                "template": "decompose",
                "match": TABLE4_QUESTION,
                "reply": [SUB1, SUB2],
            },
            {
                "template": "decompose",
                "match": ROME_QUESTION,
                "reply": [ROME_QUESTION],
            },
            {
                "template": "answer",
                "contains": "producer of Here Comes the Boom",
                "reply": "Kevin James",
            },
            {
                "template": "answer",
                "contains": "wife of Kevin James in Grown Ups",
                "reply": "Maria Bello",
            },
            {
                "template": "answer",
                "contains": "directed Here Comes the Boom",
                "reply": "Frank Coraci",
            },
            {
                "template": "answer",
                "contains": "wife of Frank Coraci in Grown Ups",
                "reply": "Salma Hayek",
            },
            {
                "template": "answer",
                "contains": "amphitheatre does Rome host",
                "reply": "The Colosseum",
            },
            {
                "template": "answer",
                "contains": "river flows through Rome",
                "reply": "the Tiber",
            },
            {
                "template": "answer",
                "contains": "starred in The King of Queens",
                "reply": "Kevin James",
            },
        ],
    }
    (FIXTURES / "stub_script.json").write_text(
        json.dumps(script, indent=2) + "\n", encoding="utf-8"
    )


def main() -> int:
    validate()
    FIXTURES.mkdir(parents=True, exist_ok=True)
    write_corpus()
    write_questions()
    write_stub_script()
    n_sentences = sum(len(sentences) for _, _, sentences in DOCS)
    n_chunks = sum(len(chunk_ranges(len(s))) for _, _, s in DOCS)
    print(
        f"wrote fixtures: {len(DOCS)} docs, {n_sentences} sentences, "
        f"{n_chunks} chunks -> {FIXTURES}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
