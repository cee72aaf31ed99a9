"""CoNLL-U dependency trees and per-token descendant counts.

Only the ID, FORM, HEAD and DEPREL columns are consumed; the remaining
columns are validated for shape (10 tab-separated fields) and discarded.
Multiword-token ranges (``3-4``) and empty nodes (``5.1``) are skipped so
that token indices always refer to syntactic words.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

from .errors import ConlluParseError, ContractViolation, TreeStructureError

_N_COLUMNS = 10


@dataclass(frozen=True)
class Token:
    """One syntactic word. ``head`` is 0 for the root, else a 1-based index."""

    index: int
    form: str
    head: int
    deprel: str


@dataclass
class DependencyTree:
    """A single sentence's tokens plus cached subtree sizes."""

    sentence_id: str
    tokens: tuple[Token, ...]
    _descendant_counts: tuple[int, ...] | None = field(
        default=None, repr=False, compare=False
    )

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def root_index(self) -> int:
        for tok in self.tokens:
            if tok.head == 0:
                return tok.index
        raise TreeStructureError("no root token", self.sentence_id)

    @property
    def descendant_counts(self) -> tuple[int, ...]:
        """Subtree size minus one for every token, in token order."""
        if self._descendant_counts is None:
            self._descendant_counts = _compute_descendant_counts(self)
        return self._descendant_counts

    @property
    def forms(self) -> tuple[str, ...]:
        return tuple(tok.form for tok in self.tokens)

    def text(self) -> str:
        return " ".join(self.forms)


def descendant_count(tree: DependencyTree, token_index: int) -> int:
    """Number of direct and indirect children of the token at ``token_index``.

    ``token_index`` is 1-based, matching CoNLL-U IDs.
    """
    if not 1 <= token_index <= len(tree.tokens):
        raise ContractViolation(
            f"token index {token_index} out of range 1..{len(tree.tokens)} "
            f"in sentence {tree.sentence_id!r}"
        )
    return tree.descendant_counts[token_index - 1]


def _compute_descendant_counts(tree: DependencyTree) -> tuple[int, ...]:
    n = len(tree.tokens)
    children: list[list[int]] = [[] for _ in range(n + 1)]
    for tok in tree.tokens:
        children[tok.head].append(tok.index)
    counts = [0] * (n + 1)
    # One bottom-up pass: push-twice iterative post-order from the root.
    stack: list[tuple[int, bool]] = [(tree.root_index, False)]
    while stack:
        node, ready = stack.pop()
        if ready:
            counts[node] = sum(1 + counts[c] for c in children[node])
        else:
            stack.append((node, True))
            stack.extend((c, False) for c in children[node])
    return tuple(counts[1:])


def validate_tree(sentence_id: str, tokens: list[Token]) -> None:
    """Check the single-root, in-range, acyclic head-link invariants."""
    n = len(tokens)
    roots = [tok.index for tok in tokens if tok.head == 0]
    if len(roots) != 1:
        raise TreeStructureError(
            f"expected exactly one root, found {len(roots)}", sentence_id
        )
    for tok in tokens:
        if tok.head == tok.index:
            raise TreeStructureError(
                f"token {tok.index} is its own head", sentence_id
            )
        if not 0 <= tok.head <= n:
            raise TreeStructureError(
                f"token {tok.index} has head {tok.head} outside 0..{n}",
                sentence_id,
            )
    children: list[list[int]] = [[] for _ in range(n + 1)]
    for tok in tokens:
        children[tok.head].append(tok.index)
    seen = 0
    stack = [roots[0]]
    visited = [False] * (n + 1)
    while stack:
        node = stack.pop()
        if visited[node]:
            raise TreeStructureError("cycle in head links", sentence_id)
        visited[node] = True
        seen += 1
        stack.extend(children[node])
    if seen != n:
        raise TreeStructureError(
            "head links contain a cycle: not all tokens reachable from root",
            sentence_id,
        )


def parse_conllu(
    lines: Iterable[str], source: str = "<stream>"
) -> list[DependencyTree]:
    """Parse a CoNLL-U character stream into one tree per sentence block.

    Sentence ids come from ``# sent_id = ...`` comments when present,
    otherwise ``<source>:<ordinal>`` with a 0-based ordinal.
    """
    trees: list[DependencyTree] = []
    tokens: list[Token] = []
    sent_id: str | None = None
    ordinal = 0

    def flush() -> None:
        nonlocal tokens, sent_id, ordinal
        if not tokens:
            sent_id = None
            return
        sid = sent_id if sent_id is not None else f"{source}:{ordinal}"
        validate_tree(sid, tokens)
        trees.append(DependencyTree(sid, tuple(tokens)))
        tokens = []
        sent_id = None
        ordinal += 1

    for lineno, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            flush()
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                key, _, value = body.partition("=")
                if key.strip() == "sent_id":
                    sent_id = value.strip()
            continue
        cols = line.split("\t")
        if len(cols) != _N_COLUMNS:
            raise ConlluParseError(
                f"expected {_N_COLUMNS} tab-separated columns, got {len(cols)}",
                lineno,
            )
        raw_id = cols[0]
        if "-" in raw_id or "." in raw_id:
            # Multiword-token range or empty node: not a syntactic word.
            continue
        try:
            index = int(raw_id)
        except ValueError:
            raise ConlluParseError(f"non-integer ID {raw_id!r}", lineno) from None
        if index != len(tokens) + 1:
            raise ConlluParseError(
                f"token ID {index} breaks the contiguous 1..n order "
                f"(expected {len(tokens) + 1})",
                lineno,
            )
        try:
            head = int(cols[6])
        except ValueError:
            raise ConlluParseError(
                f"non-integer HEAD {cols[6]!r}", lineno
            ) from None
        tokens.append(Token(index=index, form=cols[1], head=head, deprel=cols[7]))
    flush()
    return trees


def parse_conllu_file(path: str | Path) -> list[DependencyTree]:
    path = Path(path)
    with path.open("r", encoding="utf-8") as handle:
        return parse_conllu(handle, source=path.name)


def to_conllu(trees: Iterable[DependencyTree]) -> str:
    """Serialize trees back to CoNLL-U on the retained columns."""
    blocks = []
    for tree in trees:
        lines = [f"# sent_id = {tree.sentence_id}"]
        for tok in tree.tokens:
            lines.append(
                "\t".join(
                    [
                        str(tok.index),
                        tok.form,
                        "_",
                        "_",
                        "_",
                        "_",
                        str(tok.head),
                        tok.deprel,
                        "_",
                        "_",
                    ]
                )
            )
        blocks.append("\n".join(lines))
    return "\n\n".join(blocks) + ("\n" if blocks else "")
