"""Exception types shared across the engine."""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class ContractViolation(EngineError, ValueError):
    """A caller broke a documented precondition."""


class ConlluParseError(EngineError):
    """A CoNLL-U line could not be parsed."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class TreeStructureError(EngineError):
    """Head links of a sentence do not form a single-rooted tree."""

    def __init__(self, message: str, sentence_id: str):
        super().__init__(f"sentence {sentence_id!r}: {message}")
        self.sentence_id = sentence_id


class IngestError(EngineError):
    """Corpus inputs are inconsistent or malformed."""


class IndexFormatError(EngineError):
    """An on-disk index file has the wrong magic or format version."""


class TransportError(EngineError):
    """The live generator backend could not be reached."""


class ProtocolError(EngineError):
    """The generator replied with text the template cannot parse."""

    def __init__(self, message: str, raw_text: str = ""):
        super().__init__(message)
        self.raw_text = raw_text


class TraceError(EngineError):
    """A reasoning trace aborted; carries the steps completed so far."""

    def __init__(self, message: str, steps=None):
        super().__init__(message)
        self.steps = list(steps) if steps else []
