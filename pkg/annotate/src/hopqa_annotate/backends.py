"""Pluggable parser, NER and embedding backends.

The default model ids name external models (spacy, flair and
sentence-transformers); loading them requires the optional ``models``
extra and downloaded weights, and any load failure raises an error naming
the model id. The ``builtin`` backends are dependency-free, deterministic
stand-ins meant for tests and offline fixture generation:

* parser: regex sentence splitting and tokenization, chain-shaped trees
  (every token attaches to the previous one);
* NER: casing-based span detection (capitalized runs, joined over a few
  connector words, with all-stopword runs dropped);
* embedder: L2-normalized hashed bag of words.
"""

from __future__ import annotations

import hashlib
import math
import re
from dataclasses import dataclass
from typing import Protocol, Sequence

from .errors import AnnotateError

DEFAULT_PARSER_MODEL = "en_core_web_trf"
DEFAULT_NER_MODEL = "flair/ner-english-large"
DEFAULT_EMBED_MODEL = "sentence-transformers/all-MiniLM-L6-v2"
BUILTIN = "builtin"

DEFAULT_BUILTIN_DIM = 32


@dataclass(frozen=True)
class ParsedToken:
    form: str
    head: int  # 0 for the sentence root, else a 1-based token index
    deprel: str
    char_start: int
    char_end: int


@dataclass(frozen=True)
class ParsedSentence:
    text: str
    tokens: tuple[ParsedToken, ...]


@dataclass(frozen=True)
class EntitySpan:
    surface: str
    char_start: int
    char_end: int
    label: str


class Parser(Protocol):
    def parse(self, text: str) -> list[ParsedSentence]: ...


class Ner(Protocol):
    def entities(self, sentence_text: str) -> list[EntitySpan]: ...


class Embedder(Protocol):
    dimension: int

    def encode(self, texts: Sequence[str]) -> list[list[float]]: ...


# ---------------------------------------------------------------------------
# Builtin deterministic backends
# ---------------------------------------------------------------------------

_SENTENCE_RE = re.compile(r"[^.!?]*[.!?]+(?:\s+|$)|[^.!?]+$")
_TOKEN_RE = re.compile(r"\w+(?:-\w+)*|'\w+|[^\w\s]")

_CONNECTORS = {"of", "the", "and", "de", "la"}
_STOPWORDS = {
    "What", "Who", "Whom", "Whose", "Where", "When", "Why", "How", "Which",
    "The", "A", "An", "It", "He", "She", "They", "This", "That", "These",
    "Those", "Is", "Are", "Was", "Were", "Do", "Does", "Did", "In", "On",
    "At", "By", "For", "With", "And", "Or", "But", "If", "Then", "As", "To",
    "Of", "Not", "No",
}
# leading function words stripped from a span; articles stay attached
_TRIMMABLE = _STOPWORDS - {"The", "A", "An"}


class BuiltinParser:
    """Regex sentence splitter and tokenizer with chain-shaped trees."""

    def parse(self, text: str) -> list[ParsedSentence]:
        sentences = []
        for match in _SENTENCE_RE.finditer(text):
            raw = match.group().strip()
            if not raw:
                continue
            tokens = []
            # char offsets are relative to the sentence text, matching the
            # coordinates NER backends report
            for i, tok in enumerate(_TOKEN_RE.finditer(raw)):
                tokens.append(
                    ParsedToken(
                        form=tok.group(),
                        head=i,  # previous token; 0 marks the first as root
                        deprel="root" if i == 0 else "dep",
                        char_start=tok.start(),
                        char_end=tok.end(),
                    )
                )
            if tokens:
                sentences.append(ParsedSentence(text=raw, tokens=tuple(tokens)))
        return sentences


def _entity_like(form: str) -> bool:
    if form[0].isupper():
        return True
    return any(ch.isdigit() for ch in form) and any(ch.isupper() for ch in form)


class BuiltinNer:
    """Span detection from token casing over the builtin tokenizer."""

    label = "ENT"

    def entities(self, sentence_text: str) -> list[EntitySpan]:
        tokens = list(_TOKEN_RE.finditer(sentence_text))
        spans: list[EntitySpan] = []
        run: list[re.Match] = []

        def close() -> None:
            nonlocal run
            while run and run[0].group() in _TRIMMABLE:
                run = run[1:]
            if run and not all(
                tok.group() in _STOPWORDS or tok.group().lower() in _CONNECTORS
                for tok in run
            ):
                spans.append(
                    EntitySpan(
                        surface=sentence_text[run[0].start() : run[-1].end()],
                        char_start=run[0].start(),
                        char_end=run[-1].end(),
                        label=self.label,
                    )
                )
            run = []

        for index, tok in enumerate(tokens):
            form = tok.group()
            if _entity_like(form):
                run.append(tok)
            elif (
                run
                and form.lower() in _CONNECTORS
                and index + 1 < len(tokens)
                and _entity_like(tokens[index + 1].group())
            ):
                run.append(tok)
            else:
                close()
        close()
        return spans


class BuiltinEmbedder:
    """Hashed bag-of-words vectors; deterministic across processes."""

    def __init__(self, dimension: int = DEFAULT_BUILTIN_DIM):
        if dimension < 1:
            raise AnnotateError(f"embedding dimension must be >= 1, got {dimension}")
        self.dimension = dimension

    def encode(self, texts: Sequence[str]) -> list[list[float]]:
        return [self._one(text) for text in texts]

    def _one(self, text: str) -> list[float]:
        vec = [0.0] * self.dimension
        for token in re.findall(r"[a-z0-9']+", text.lower()):
            digest = hashlib.md5(token.encode("utf-8")).digest()
            value = int.from_bytes(digest[:8], "big")
            bucket = value % self.dimension
            vec[bucket] += 1.0 if (value >> 8) % 2 == 0 else -1.0
        norm = math.sqrt(sum(x * x for x in vec))
        if norm == 0.0:
            vec[0] = 1.0  # engine rejects all-zero vectors
            return vec
        return [x / norm for x in vec]


# ---------------------------------------------------------------------------
# External model backends (loaded lazily; failures name the model id)
# ---------------------------------------------------------------------------


class SpacyParser:
    def __init__(self, model_id: str):
        try:
            import spacy

            self._nlp = spacy.load(model_id)
        except Exception as exc:
            raise AnnotateError(
                f"failed to load parser model {model_id!r}: {exc}"
            ) from exc
        self.model_id = model_id

    def parse(self, text: str) -> list[ParsedSentence]:
        doc = self._nlp(text)
        sentences = []
        for sent in doc.sents:
            tokens = []
            for token in sent:
                head = 0 if token.head is token else token.head.i - sent.start + 1
                tokens.append(
                    ParsedToken(
                        form=token.text,
                        head=head,
                        deprel=token.dep_,
                        char_start=token.idx - sent.start_char,
                        char_end=token.idx - sent.start_char + len(token.text),
                    )
                )
            if tokens:
                sentences.append(ParsedSentence(text=sent.text, tokens=tuple(tokens)))
        return sentences


class FlairNer:
    def __init__(self, model_id: str):
        try:
            from flair.models import SequenceTagger

            self._tagger = SequenceTagger.load(model_id)
        except Exception as exc:
            raise AnnotateError(
                f"failed to load NER model {model_id!r}: {exc}"
            ) from exc
        self.model_id = model_id

    def entities(self, sentence_text: str) -> list[EntitySpan]:
        from flair.data import Sentence

        sentence = Sentence(sentence_text)
        self._tagger.predict(sentence)
        return [
            EntitySpan(
                surface=span.text,
                char_start=span.start_position,
                char_end=span.end_position,
                label=span.tag,
            )
            for span in sentence.get_spans("ner")
        ]


class SentenceTransformerEmbedder:
    def __init__(self, model_id: str, batch_size: int = 32):
        try:
            from sentence_transformers import SentenceTransformer

            self._model = SentenceTransformer(model_id)
        except Exception as exc:
            raise AnnotateError(
                f"failed to load embedding model {model_id!r}: {exc}"
            ) from exc
        self.model_id = model_id
        self.batch_size = batch_size
        self.dimension = int(self._model.get_sentence_embedding_dimension())

    def encode(self, texts: Sequence[str]) -> list[list[float]]:
        vectors = self._model.encode(
            list(texts), batch_size=self.batch_size, show_progress_bar=False
        )
        return [[float(x) for x in vector] for vector in vectors]


def build_parser(model_id: str) -> Parser:
    if model_id == BUILTIN:
        return BuiltinParser()
    return SpacyParser(model_id)


def build_ner(model_id: str) -> Ner:
    if model_id == BUILTIN:
        return BuiltinNer()
    return FlairNer(model_id)


def build_embedder(
    model_id: str, batch_size: int = 32, builtin_dim: int = DEFAULT_BUILTIN_DIM
) -> Embedder:
    if model_id == BUILTIN:
        return BuiltinEmbedder(dimension=builtin_dim)
    return SentenceTransformerEmbedder(model_id, batch_size=batch_size)
