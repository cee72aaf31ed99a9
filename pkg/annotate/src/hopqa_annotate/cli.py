"""Command-line entry point for annotation jobs.

Exit codes: 0 on success, 1 on user/model errors, 2 on internal errors.
A JSON summary of each job is printed to standard output.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .backends import (
    DEFAULT_EMBED_MODEL,
    DEFAULT_NER_MODEL,
    DEFAULT_PARSER_MODEL,
)
from .chunking import DEFAULT_STRIDE, DEFAULT_WINDOW
from .errors import AnnotateError
from .exporter import AnnotationJob, annotate_corpus, annotate_questions


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise AnnotateError(f"{message}\n\n{self.format_usage()}")


def build_parser() -> _Parser:
    parser = _Parser(
        prog="hopqa-annotate",
        description=(
            "Run a dependency parser, named-entity recognizer and sentence "
            "embedder over raw documents or questions, emitting the hopqa "
            "engine's ingestion files. Pass 'builtin' as a model id for the "
            "deterministic offline backends."
        ),
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("corpus", help="emit trees, entities and embeddings")
    p.add_argument("--docs", required=True, help="documents.jsonl")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--parser-model", default=DEFAULT_PARSER_MODEL)
    p.add_argument("--ner-model", default=DEFAULT_NER_MODEL)
    p.add_argument("--embed-model", default=DEFAULT_EMBED_MODEL)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--window", type=int, default=DEFAULT_WINDOW)
    p.add_argument("--stride", type=int, default=DEFAULT_STRIDE)
    p.add_argument("--embed-dim", type=int, default=32,
                   help="dimension of the builtin hashed embedder")
    p.set_defaults(func=_cmd_corpus)

    p = sub.add_parser(
        "questions", help="augment questions with entities and vectors"
    )
    p.add_argument("--questions", required=True, help="questions.jsonl")
    p.add_argument("--out", required=True, help="augmented questions.jsonl")
    p.add_argument("--ner-model", default=DEFAULT_NER_MODEL)
    p.add_argument("--embed-model", default=DEFAULT_EMBED_MODEL)
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--embed-dim", type=int, default=32)
    p.add_argument("--mask-entities", action="store_true",
                   help="drop one random entity per sub-question")
    p.add_argument("--seed", type=int, default=13)
    p.set_defaults(func=_cmd_questions)

    return parser


def _cmd_corpus(args: argparse.Namespace) -> int:
    job = AnnotationJob(
        documents_path=args.docs,
        output_dir=args.out,
        parser_model=args.parser_model,
        ner_model=args.ner_model,
        embed_model=args.embed_model,
        batch_size=args.batch_size,
        window=args.window,
        stride=args.stride,
        builtin_embed_dim=args.embed_dim,
    )
    summary = annotate_corpus(job)
    print(json.dumps(summary.to_dict(), indent=2, sort_keys=True))
    return 0


def _cmd_questions(args: argparse.Namespace) -> int:
    summary = annotate_questions(
        args.questions,
        args.out,
        ner_model=args.ner_model,
        embed_model=args.embed_model,
        batch_size=args.batch_size,
        builtin_embed_dim=args.embed_dim,
        mask_entities=args.mask_entities,
        seed=args.seed,
    )
    print(json.dumps(summary.to_dict(), indent=2, sort_keys=True))
    return 0


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_usage(sys.stderr)
            return 1
        return args.func(args)
    except (AnnotateError, FileNotFoundError, IsADirectoryError,
            PermissionError) as exc:
        print(f"hopqa-annotate: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(
            f"hopqa-annotate: internal error: {type(exc).__name__}: {exc}",
            file=sys.stderr,
        )
        return 2


def main(argv: Sequence[str] | None = None) -> int:
    code = run(argv)
    if code:
        sys.exit(code)
    return 0
