"""Annotation jobs: documents to engine ingestion files, questions to
fixture-augmented question files.

Entity spans arrive from the NER backend as character offsets over the
sentence text and are aligned to parser tokens by overlap; entities that
overlap no token are dropped with a warning and counted in the summary.
Output files are written atomically (temp file, then rename) at job end.
"""

from __future__ import annotations

import json
import logging
import os
import random
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .backends import (
    BUILTIN,
    DEFAULT_EMBED_MODEL,
    DEFAULT_NER_MODEL,
    DEFAULT_PARSER_MODEL,
    Embedder,
    Ner,
    ParsedSentence,
    Parser,
    build_embedder,
    build_ner,
    build_parser,
)
from .chunking import DEFAULT_STRIDE, DEFAULT_WINDOW, chunk_id, chunk_ranges
from .errors import AnnotateError

logger = logging.getLogger(__name__)


@dataclass
class AnnotationJob:
    documents_path: str | Path
    output_dir: str | Path
    parser_model: str = DEFAULT_PARSER_MODEL
    ner_model: str = DEFAULT_NER_MODEL
    embed_model: str = DEFAULT_EMBED_MODEL
    batch_size: int = 32
    window: int = DEFAULT_WINDOW
    stride: int = DEFAULT_STRIDE
    builtin_embed_dim: int = 32


@dataclass
class JobSummary:
    documents: int = 0
    sentences: int = 0
    entities: int = 0
    dropped_entities: int = 0
    chunks: int = 0
    embedding_dim: int | None = None
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "documents": self.documents,
            "sentences": self.sentences,
            "entities": self.entities,
            "dropped_entities": self.dropped_entities,
            "chunks": self.chunks,
            "embedding_dim": self.embedding_dim,
            "warnings": self.warnings,
        }


def normalize_entity(s: str) -> str:
    """The engine's entity normalization contract: case fold, collapse
    whitespace, strip outer punctuation."""
    s = " ".join(s.casefold().split())
    while True:
        start, end = 0, len(s)
        while start < end and unicodedata.category(s[start]).startswith("P"):
            start += 1
        while end > start and unicodedata.category(s[end - 1]).startswith("P"):
            end -= 1
        stripped = s[start:end].strip()
        if stripped == s:
            return s
        s = stripped


def _read_jsonl(path: str | Path, what: str) -> list[dict]:
    objs = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise AnnotateError(f"{what} line {lineno}: invalid JSON: {exc}")
            if not isinstance(obj, dict):
                raise AnnotateError(f"{what} line {lineno}: expected an object")
            objs.append(obj)
    return objs


def _atomic_write(path: Path, content: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(content, encoding="utf-8")
    os.replace(tmp, path)


def align_entity_to_tokens(
    sentence: ParsedSentence, char_start: int, char_end: int
) -> tuple[int, int] | None:
    """Map a character span to the covering token range by overlap.

    Returns a 0-based half-open token span, or None when no token overlaps.
    """
    first = last = None
    for index, token in enumerate(sentence.tokens):
        overlap = min(char_end, token.char_end) - max(char_start, token.char_start)
        if overlap > 0:
            if first is None:
                first = index
            last = index
    if first is None or last is None:
        return None
    return first, last + 1


def _conllu_block(doc_id: str, ordinal: int, sentence: ParsedSentence) -> str:
    lines = [f"# sent_id = {doc_id}#{ordinal}"]
    for index, token in enumerate(sentence.tokens, start=1):
        lines.append(
            "\t".join(
                [
                    str(index),
                    token.form,
                    "_",
                    "_",
                    "_",
                    "_",
                    str(token.head),
                    token.deprel or "dep",
                    "_",
                    "_",
                ]
            )
        )
    return "\n".join(lines)


def annotate_corpus(
    job: AnnotationJob,
    parser: Parser | None = None,
    ner: Ner | None = None,
    embedder: Embedder | None = None,
) -> JobSummary:
    """Parse, tag and embed every document, writing trees.conllu,
    entities.jsonl and embeddings.jsonl into the job's output directory."""
    parser = parser or build_parser(job.parser_model)
    ner = ner or build_ner(job.ner_model)
    embedder = embedder or build_embedder(
        job.embed_model, batch_size=job.batch_size, builtin_dim=job.builtin_embed_dim
    )

    documents = _read_jsonl(job.documents_path, "documents")
    summary = JobSummary(embedding_dim=embedder.dimension)
    seen: set[str] = set()

    conllu_blocks: list[str] = []
    entity_lines: list[str] = []
    chunk_ids: list[str] = []
    chunk_texts: list[str] = []

    for obj in documents:
        try:
            doc_id = str(obj["id"])
            text = str(obj["text"])
        except KeyError as exc:
            raise AnnotateError(f"documents: missing key {exc.args[0]!r}")
        if doc_id in seen:
            raise AnnotateError(f"duplicate doc id {doc_id!r}")
        seen.add(doc_id)
        summary.documents += 1

        sentences = parser.parse(text)
        sentence_forms: list[str] = []
        for ordinal, sentence in enumerate(sentences):
            summary.sentences += 1
            conllu_blocks.append(_conllu_block(doc_id, ordinal, sentence))
            sentence_forms.append(" ".join(tok.form for tok in sentence.tokens))
            for span in ner.entities(sentence.text):
                aligned = align_entity_to_tokens(
                    sentence, span.char_start, span.char_end
                )
                if aligned is None:
                    summary.dropped_entities += 1
                    message = (
                        f"{doc_id}#{ordinal}: entity {span.surface!r} at "
                        f"[{span.char_start}, {span.char_end}) aligns to no token"
                    )
                    summary.warnings.append(message)
                    logger.warning(message)
                    continue
                summary.entities += 1
                entity_lines.append(
                    json.dumps(
                        {
                            "doc_id": doc_id,
                            "sent": ordinal,
                            "start": aligned[0],
                            "end": aligned[1],
                            "surface": span.surface,
                            "label": span.label,
                        },
                        ensure_ascii=False,
                    )
                )
        for start, end in chunk_ranges(len(sentences), job.window, job.stride):
            chunk_ids.append(chunk_id(doc_id, start))
            chunk_texts.append(" ".join(sentence_forms[start:end]))

    vectors = embedder.encode(chunk_texts) if chunk_texts else []
    summary.chunks = len(chunk_ids)
    embedding_lines = [
        json.dumps({"chunk_id": cid, "vector": vector}, ensure_ascii=False)
        for cid, vector in zip(chunk_ids, vectors)
    ]

    out = Path(job.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    _atomic_write(
        out / "trees.conllu",
        "\n\n".join(conllu_blocks) + "\n" if conllu_blocks else "",
    )
    _atomic_write(
        out / "entities.jsonl",
        "\n".join(entity_lines) + "\n" if entity_lines else "",
    )
    _atomic_write(
        out / "embeddings.jsonl",
        "\n".join(embedding_lines) + "\n" if embedding_lines else "",
    )
    return summary


def annotate_questions(
    questions_path: str | Path,
    out_path: str | Path,
    ner: Ner | None = None,
    embedder: Embedder | None = None,
    ner_model: str = DEFAULT_NER_MODEL,
    embed_model: str = DEFAULT_EMBED_MODEL,
    batch_size: int = 32,
    builtin_embed_dim: int = 32,
    mask_entities: bool = False,
    seed: int = 13,
) -> JobSummary:
    """Add per-sub-question entity lists and embedding vectors.

    Sub-questions come from each record's ``decomposition`` when present,
    else the question itself is the single sub-question. Entity lists use
    the engine's normalization. Masked mode drops one random entity per
    sub-question (seeded) to exercise recognition-failure behavior.
    """
    ner = ner or build_ner(ner_model)
    embedder = embedder or build_embedder(
        embed_model, batch_size=batch_size, builtin_dim=builtin_embed_dim
    )
    rng = random.Random(seed)
    summary = JobSummary(embedding_dim=embedder.dimension)

    lines: list[str] = []
    for obj in _read_jsonl(questions_path, "questions"):
        if "question" not in obj:
            raise AnnotateError("questions: every record needs a 'question'")
        subs: Sequence[str] = obj.get("decomposition") or [obj["question"]]
        q_entities: dict[str, list[str]] = {}
        for index, sub in enumerate(subs):
            names = []
            for span in ner.entities(sub):
                normalized = normalize_entity(span.surface)
                if normalized and normalized not in names:
                    names.append(normalized)
            if mask_entities and names:
                names.pop(rng.randrange(len(names)))
            q_entities[str(index)] = names
            summary.entities += len(names)
        vectors = embedder.encode(list(subs))
        out_obj = dict(obj)
        out_obj["q_entities"] = q_entities
        out_obj["q_vectors"] = {
            str(index): vector for index, vector in enumerate(vectors)
        }
        lines.append(json.dumps(out_obj, ensure_ascii=False))
        summary.documents += 1

    _atomic_write(Path(out_path), "\n".join(lines) + "\n" if lines else "")
    return summary
