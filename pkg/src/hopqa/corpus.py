"""Corpus ingestion: documents, sentence trees, entities, chunks, persistence.

All annotations arrive precomputed. The corpus is built single-threaded and
treated as immutable afterwards.

Input formats (one JSON object per line unless noted):

* documents.jsonl  ``{"id": str, "title": str, "text": str}``
* entities.jsonl   ``{"doc_id": str, "sent": int, "start": int, "end": int,
  "surface": str, "label": str}`` with a 0-based half-open token span over
  the sentence's syntactic words
* trees.conllu     CoNLL-U with ``# sent_id = <doc_id>#<ordinal>`` comments,
  0-based contiguous ordinals per document
* embeddings.jsonl ``{"chunk_id": str, "vector": [float, ...]}``
"""

from __future__ import annotations

import json
import struct
import unicodedata
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, NamedTuple

from .errors import ContractViolation, IndexFormatError, IngestError
from .treebank import DependencyTree, Token, parse_conllu, validate_tree

MAGIC = b"HOPQAIDX"
FORMAT_VERSION = 1

DEFAULT_WINDOW = 3
DEFAULT_STRIDE = 2


def normalize_entity(s: str) -> str:
    """Case fold, collapse whitespace, strip leading/trailing punctuation."""
    s = " ".join(s.casefold().split())
    while True:
        stripped = _strip_outer_punct(s).strip()
        if stripped == s:
            return s
        s = stripped


def _strip_outer_punct(s: str) -> str:
    start, end = 0, len(s)
    while start < end and unicodedata.category(s[start]).startswith("P"):
        start += 1
    while end > start and unicodedata.category(s[end - 1]).startswith("P"):
        end -= 1
    return s[start:end]


class Occurrence(NamedTuple):
    doc_id: str
    sentence: int
    start: int
    end: int


@dataclass
class EntityRecord:
    normalized: str
    surface_forms: set[str] = field(default_factory=set)
    occurrences: list[Occurrence] = field(default_factory=list)


@dataclass
class Document:
    doc_id: str
    title: str
    text: str
    sentences: list[DependencyTree] = field(default_factory=list)
    entity_occurrences: list[tuple[str, int, int, int]] = field(
        default_factory=list
    )

    def sentence_text(self, index: int) -> str:
        return self.sentences[index].text()


@dataclass
class Chunk:
    chunk_id: str
    doc_id: str
    start: int
    end: int
    text: str
    embedding: list[float] | None = None


def chunk_document(doc: Document, window: int, stride: int) -> list[Chunk]:
    """Cut a document into sentence windows at offsets 0, stride, 2*stride...

    The final chunk is truncated at the document end; chunk generation stops
    once a chunk reaches the last sentence.
    """
    if window < 1:
        raise ContractViolation(f"window must be >= 1, got {window}")
    if not 1 <= stride <= window:
        raise ContractViolation(
            f"stride must lie in 1..window ({window}), got {stride}"
        )
    n = len(doc.sentences)
    chunks: list[Chunk] = []
    start = 0
    while start < n:
        end = min(start + window, n)
        text = " ".join(doc.sentence_text(i) for i in range(start, end))
        chunks.append(
            Chunk(
                chunk_id=f"{doc.doc_id}/{start}",
                doc_id=doc.doc_id,
                start=start,
                end=end,
                text=text,
            )
        )
        if end >= n:
            break
        start += stride
    return chunks


class Corpus:
    """Immutable bundle of documents, entity tables and chunks."""

    def __init__(self, window: int = DEFAULT_WINDOW, stride: int = DEFAULT_STRIDE):
        self.window = window
        self.stride = stride
        self.documents: dict[str, Document] = {}
        self.entities: dict[str, EntityRecord] = {}
        self.chunks: dict[str, Chunk] = {}
        # (doc_id, sentence) -> list of (normalized, start, end)
        self._sentence_entities: dict[tuple[str, int], list[tuple[str, int, int]]] = {}

    def __len__(self) -> int:
        return len(self.documents)

    def doc(self, doc_id: str) -> Document:
        return self.documents[doc_id]

    def tree(self, doc_id: str, sentence: int) -> DependencyTree:
        return self.documents[doc_id].sentences[sentence]

    def chunk(self, chunk_id: str) -> Chunk:
        return self.chunks[chunk_id]

    def sorted_chunk_ids(self) -> list[str]:
        return sorted(self.chunks)

    def sentence_entities(
        self, doc_id: str, sentence: int
    ) -> list[tuple[str, int, int]]:
        return self._sentence_entities.get((doc_id, sentence), [])

    def embedding_dimension(self) -> int | None:
        for chunk_id in self.sorted_chunk_ids():
            emb = self.chunks[chunk_id].embedding
            if emb is not None:
                return len(emb)
        return None

    def _register_occurrence(
        self, normalized: str, surface: str, occ: Occurrence
    ) -> None:
        record = self.entities.get(normalized)
        if record is None:
            record = EntityRecord(normalized=normalized)
            self.entities[normalized] = record
        record.surface_forms.add(surface)
        record.occurrences.append(occ)
        key = (occ.doc_id, occ.sentence)
        self._sentence_entities.setdefault(key, []).append(
            (normalized, occ.start, occ.end)
        )

    def _rebuild_chunks(self) -> None:
        self.chunks = {}
        for doc in self.documents.values():
            for chunk in chunk_document(doc, self.window, self.stride):
                self.chunks[chunk.chunk_id] = chunk

    def attach_embeddings(self, vectors: dict[str, list[float]]) -> None:
        dimension = self.embedding_dimension()
        for chunk_id in sorted(vectors):
            vector = vectors[chunk_id]
            if chunk_id not in self.chunks:
                raise IngestError(
                    f"embedding refers to unknown chunk {chunk_id!r}"
                )
            if not vector:
                raise IngestError(f"embedding for {chunk_id!r} is empty")
            if dimension is None:
                dimension = len(vector)
            if len(vector) != dimension:
                raise IngestError(
                    f"embedding for {chunk_id!r} has dimension {len(vector)}, "
                    f"expected {dimension}"
                )
            if all(x == 0.0 for x in vector):
                raise IngestError(f"embedding for {chunk_id!r} is all-zero")
            self.chunks[chunk_id].embedding = [float(x) for x in vector]


def _read_jsonl(lines: Iterable[str], what: str) -> Iterable[tuple[int, dict]]:
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line:
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise IngestError(f"{what} line {lineno}: invalid JSON: {exc}")
        if not isinstance(obj, dict):
            raise IngestError(f"{what} line {lineno}: expected a JSON object")
        yield lineno, obj


def load_corpus(
    documents: Iterable[str],
    trees: Iterable[str],
    entities: Iterable[str],
    window: int = DEFAULT_WINDOW,
    stride: int = DEFAULT_STRIDE,
    embeddings: Iterable[str] | None = None,
) -> Corpus:
    """Cross-link the three annotation streams into a validated corpus."""
    corpus = Corpus(window=window, stride=stride)

    for lineno, obj in _read_jsonl(documents, "documents"):
        try:
            doc_id = str(obj["id"])
            title = str(obj["title"])
            text = str(obj["text"])
        except KeyError as exc:
            raise IngestError(
                f"documents line {lineno}: missing key {exc.args[0]!r}"
            )
        if doc_id in corpus.documents:
            raise IngestError(f"duplicate doc_id {doc_id!r}")
        corpus.documents[doc_id] = Document(doc_id=doc_id, title=title, text=text)

    by_doc: dict[str, dict[int, DependencyTree]] = {}
    for tree in parse_conllu(trees, source="trees"):
        doc_id, sep, ordinal_text = tree.sentence_id.rpartition("#")
        if not sep:
            raise IngestError(
                f"tree sent_id {tree.sentence_id!r} is not of the form "
                "'<doc_id>#<ordinal>'"
            )
        try:
            ordinal = int(ordinal_text)
        except ValueError:
            raise IngestError(
                f"tree sent_id {tree.sentence_id!r} has a non-integer ordinal"
            )
        if doc_id not in corpus.documents:
            raise IngestError(
                f"tree {tree.sentence_id!r} references unknown doc {doc_id!r}"
            )
        sentences = by_doc.setdefault(doc_id, {})
        if ordinal in sentences:
            raise IngestError(f"duplicate tree for sentence {tree.sentence_id!r}")
        sentences[ordinal] = tree
    for doc_id, sentences in by_doc.items():
        expected = set(range(len(sentences)))
        if set(sentences) != expected:
            raise IngestError(
                f"doc {doc_id!r}: sentence ordinals are not contiguous from 0"
            )
        corpus.documents[doc_id].sentences = [
            sentences[i] for i in range(len(sentences))
        ]

    for lineno, obj in _read_jsonl(entities, "entities"):
        try:
            doc_id = str(obj["doc_id"])
            sentence = int(obj["sent"])
            start = int(obj["start"])
            end = int(obj["end"])
            surface = str(obj["surface"])
        except KeyError as exc:
            raise IngestError(
                f"entities line {lineno}: missing key {exc.args[0]!r}"
            )
        if doc_id not in corpus.documents:
            raise IngestError(
                f"entities line {lineno}: unknown doc {doc_id!r}"
            )
        doc = corpus.documents[doc_id]
        if not 0 <= sentence < len(doc.sentences):
            raise IngestError(
                f"entity {surface!r} in doc {doc_id!r}: sentence index "
                f"{sentence} outside 0..{len(doc.sentences) - 1}"
            )
        n_tokens = len(doc.sentences[sentence].tokens)
        if not (0 <= start < end <= n_tokens):
            raise IngestError(
                f"entity {surface!r} in doc {doc_id!r} sentence {sentence}: "
                f"token span [{start}, {end}) outside the sentence's "
                f"{n_tokens} tokens"
            )
        normalized = normalize_entity(surface)
        occ = Occurrence(doc_id, sentence, start, end)
        doc.entity_occurrences.append((normalized, sentence, start, end))
        corpus._register_occurrence(normalized, surface, occ)

    corpus._rebuild_chunks()
    if embeddings is not None:
        from .dense_index import load_embeddings

        corpus.attach_embeddings(load_embeddings(embeddings))
    return corpus


def load_corpus_files(
    documents_path: str | Path,
    trees_path: str | Path,
    entities_path: str | Path,
    window: int = DEFAULT_WINDOW,
    stride: int = DEFAULT_STRIDE,
    embeddings_path: str | Path | None = None,
) -> Corpus:
    with open(documents_path, "r", encoding="utf-8") as docs_handle, open(
        trees_path, "r", encoding="utf-8"
    ) as trees_handle, open(entities_path, "r", encoding="utf-8") as ents_handle:
        if embeddings_path is None:
            return load_corpus(
                docs_handle, trees_handle, ents_handle, window=window, stride=stride
            )
        with open(embeddings_path, "r", encoding="utf-8") as emb_handle:
            return load_corpus(
                docs_handle,
                trees_handle,
                ents_handle,
                window=window,
                stride=stride,
                embeddings=emb_handle,
            )


# ---------------------------------------------------------------------------
# On-disk index: magic bytes, format version, length-prefixed JSON sections
# (meta, documents, trees, entities, chunks, embeddings).
# ---------------------------------------------------------------------------


def _corpus_sections(corpus: Corpus) -> list[bytes]:
    meta = {"window": corpus.window, "stride": corpus.stride}
    documents = [
        {"id": doc.doc_id, "title": doc.title, "text": doc.text}
        for doc in corpus.documents.values()
    ]
    trees = []
    for doc in corpus.documents.values():
        sentences = []
        for tree in doc.sentences:
            sentences.append(
                {
                    "forms": [tok.form for tok in tree.tokens],
                    "heads": [tok.head for tok in tree.tokens],
                    "deprels": [tok.deprel for tok in tree.tokens],
                    "descendant_counts": list(tree.descendant_counts),
                }
            )
        trees.append({"doc_id": doc.doc_id, "sentences": sentences})
    entities = [
        {
            "normalized": record.normalized,
            "surfaces": sorted(record.surface_forms),
            "occurrences": [list(occ) for occ in record.occurrences],
        }
        for record in (
            corpus.entities[name] for name in sorted(corpus.entities)
        )
    ]
    chunks = [
        {
            "chunk_id": chunk.chunk_id,
            "doc_id": chunk.doc_id,
            "start": chunk.start,
            "end": chunk.end,
            "text": chunk.text,
        }
        for chunk in corpus.chunks.values()
    ]
    embeddings = [
        {"chunk_id": chunk_id, "vector": corpus.chunks[chunk_id].embedding}
        for chunk_id in corpus.sorted_chunk_ids()
        if corpus.chunks[chunk_id].embedding is not None
    ]
    return [
        json.dumps(section, ensure_ascii=False, sort_keys=True).encode("utf-8")
        for section in (meta, documents, trees, entities, chunks, embeddings)
    ]


def save_index(corpus: Corpus, path: str | Path) -> None:
    path = Path(path)
    with path.open("wb") as handle:
        handle.write(MAGIC)
        handle.write(struct.pack(">H", FORMAT_VERSION))
        for payload in _corpus_sections(corpus):
            handle.write(struct.pack(">Q", len(payload)))
            handle.write(payload)


def load_index(path: str | Path) -> Corpus:
    path = Path(path)
    with path.open("rb") as handle:
        magic = handle.read(len(MAGIC))
        if magic != MAGIC:
            raise IndexFormatError(f"{path}: not a hopqa index file")
        version_bytes = handle.read(2)
        if len(version_bytes) != 2:
            raise IndexFormatError(f"{path}: truncated header")
        (version,) = struct.unpack(">H", version_bytes)
        if version != FORMAT_VERSION:
            raise IndexFormatError(
                f"{path}: unsupported index format version {version}, "
                f"expected {FORMAT_VERSION}"
            )
        sections = []
        for _ in range(6):
            size_bytes = handle.read(8)
            if len(size_bytes) != 8:
                raise IndexFormatError(f"{path}: truncated section header")
            (size,) = struct.unpack(">Q", size_bytes)
            payload = handle.read(size)
            if len(payload) != size:
                raise IndexFormatError(f"{path}: truncated section payload")
            sections.append(json.loads(payload.decode("utf-8")))
    meta, documents, trees, entities, chunks, embeddings = sections

    corpus = Corpus(window=int(meta["window"]), stride=int(meta["stride"]))
    for obj in documents:
        corpus.documents[obj["id"]] = Document(
            doc_id=obj["id"], title=obj["title"], text=obj["text"]
        )
    for obj in trees:
        doc = corpus.documents[obj["doc_id"]]
        for ordinal, sent in enumerate(obj["sentences"]):
            tokens = tuple(
                Token(index=i + 1, form=form, head=head, deprel=deprel)
                for i, (form, head, deprel) in enumerate(
                    zip(sent["forms"], sent["heads"], sent["deprels"])
                )
            )
            sentence_id = f"{doc.doc_id}#{ordinal}"
            validate_tree(sentence_id, list(tokens))
            doc.sentences.append(
                DependencyTree(
                    sentence_id,
                    tokens,
                    tuple(sent["descendant_counts"]),
                )
            )
    for obj in entities:
        for doc_id, sentence, start, end in obj["occurrences"]:
            doc = corpus.documents[doc_id]
            doc.entity_occurrences.append((obj["normalized"], sentence, start, end))
            corpus._register_occurrence(
                obj["normalized"],
                obj["surfaces"][0] if obj["surfaces"] else obj["normalized"],
                Occurrence(doc_id, sentence, start, end),
            )
        record = corpus.entities.get(obj["normalized"])
        if record is not None:
            record.surface_forms.update(obj["surfaces"])
    for obj in chunks:
        corpus.chunks[obj["chunk_id"]] = Chunk(
            chunk_id=obj["chunk_id"],
            doc_id=obj["doc_id"],
            start=obj["start"],
            end=obj["end"],
            text=obj["text"],
        )
    for obj in embeddings:
        corpus.chunks[obj["chunk_id"]].embedding = [
            float(x) for x in obj["vector"]
        ]
    return corpus
