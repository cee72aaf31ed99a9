"""Command-line entry point wiring ingestion, retrieval and evaluation.

Exit codes: 0 on success, 1 on user error (bad flags, bad input files),
2 on internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .config import API_KEY_ENV, Config, api_key, load_config
from .corpus import load_corpus_files, load_index, save_index
from .dense_index import index_from_corpus, load_embeddings
from .errors import EngineError
from .generator import Generator, LiveGenerator, ScriptedGenerator
from .informativeness import InformativenessIndex
from .orchestrator import (
    Pipeline,
    QuestionSpec,
    filter_by_answer_consistency,
    read_question_file,
    run_eval,
)
from .metrics import aggregate, answer_score
from .retrieval import retrieve

INDEX_FILENAME = "corpus.idx"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{message}\n\n{self.format_usage()}")


def _config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("configuration")
    group.add_argument("--config", help="flat JSON config file")
    group.add_argument("--k-info", type=int, dest="k_info")
    group.add_argument("--k-sim", type=int, dest="k_sim")
    group.add_argument("--window", type=int, dest="chunk_window")
    group.add_argument("--stride", type=int, dest="chunk_stride")
    group.add_argument("--max-steps", type=int, dest="max_steps")
    group.add_argument(
        "--mode", choices=("stub", "live"), dest="generator_mode",
        help="generator backend mode",
    )
    group.add_argument("--endpoint", dest="endpoint_url")
    group.add_argument("--model", dest="model")
    group.add_argument("--decompose-model", dest="decompose_model")
    group.add_argument("--embed-endpoint", dest="embed_endpoint_url")
    group.add_argument("--embed-model", dest="embed_model")
    group.add_argument("--stub-script", dest="stub_script")
    group.add_argument("--temperature", type=float, dest="temperature")
    group.add_argument("--workers", type=int, dest="workers")
    group.add_argument("--char-budget", type=int, dest="context_char_budget")


_CONFIG_KEYS = (
    "k_info",
    "k_sim",
    "chunk_window",
    "chunk_stride",
    "max_steps",
    "generator_mode",
    "endpoint_url",
    "model",
    "decompose_model",
    "embed_endpoint_url",
    "embed_model",
    "stub_script",
    "temperature",
    "workers",
    "context_char_budget",
)


def _resolve_config(args: argparse.Namespace) -> Config:
    overrides = {key: getattr(args, key, None) for key in _CONFIG_KEYS}
    return load_config(file_path=args.config, overrides=overrides)


def _index_file(path: str, create: bool = False) -> Path:
    """`--out idx/` style paths map to <dir>/corpus.idx; paths with a file
    suffix are used verbatim."""
    p = Path(path)
    if p.suffix and not p.is_dir():
        if create:
            p.parent.mkdir(parents=True, exist_ok=True)
        return p
    if create:
        p.mkdir(parents=True, exist_ok=True)
    return p / INDEX_FILENAME


def _build_generator(config: Config) -> Generator:
    if config.generator_mode == "live":
        return LiveGenerator(
            endpoint_url=config.endpoint_url,
            model=config.model,
            api_key=api_key(),
            decompose_model=config.decompose_model,
            embed_endpoint_url=config.embed_endpoint_url,
            embed_model=config.embed_model,
            temperature=config.temperature,
        )
    if config.stub_script:
        stub = ScriptedGenerator.from_file(config.stub_script)
        stub.temperature = config.temperature
        return stub
    return ScriptedGenerator(temperature=config.temperature)


def _pipeline(args: argparse.Namespace, config: Config) -> Pipeline:
    corpus = load_index(_index_file(args.index))
    return Pipeline(
        corpus=corpus,
        vector_index=index_from_corpus(corpus),
        generator=_build_generator(config),
        config=config,
        info_index=InformativenessIndex(corpus),
    )


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _read_jsonl_file(path: str) -> list[dict]:
    objs = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line:
                continue
            try:
                objs.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise UsageError(f"{path} line {lineno}: invalid JSON: {exc}")
    return objs


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------


def _cmd_ingest(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    corpus = load_corpus_files(
        args.docs,
        args.trees,
        args.entities,
        window=config.chunk_window,
        stride=config.chunk_stride,
        embeddings_path=args.embeddings,
    )
    out = _index_file(args.out, create=True)
    save_index(corpus, out)
    print(
        _dump(
            {
                "index": str(out),
                "documents": len(corpus.documents),
                "sentences": sum(
                    len(doc.sentences) for doc in corpus.documents.values()
                ),
                "entities": len(corpus.entities),
                "chunks": len(corpus.chunks),
            }
        ),
        end="",
    )
    return 0


def _cmd_index(args: argparse.Namespace) -> int:
    corpus = load_index(_index_file(args.index))
    with open(args.embeddings, "r", encoding="utf-8") as handle:
        corpus.attach_embeddings(load_embeddings(handle))
    out = _index_file(args.out if args.out else args.index, create=True)
    save_index(corpus, out)
    embedded = sum(
        1 for chunk in corpus.chunks.values() if chunk.embedding is not None
    )
    print(_dump({"index": str(out), "embedded_chunks": embedded}), end="")
    return 0


def _cmd_score(args: argparse.Namespace) -> int:
    corpus = load_index(_index_file(args.index))
    info = InformativenessIndex(corpus)
    chunk_ids = args.chunk if args.chunk else corpus.sorted_chunk_ids()
    for chunk_id in chunk_ids:
        if chunk_id not in corpus.chunks:
            raise UsageError(f"unknown chunk id {chunk_id!r}")
        print(json.dumps(info.table(chunk_id).to_dict(), ensure_ascii=False))
    return 0


def _cmd_retrieve(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    corpus = load_index(_index_file(args.index))
    queries = {str(obj.get("qid", "")): obj for obj in _read_jsonl_file(args.queries)}
    if args.qid not in queries:
        raise UsageError(f"qid {args.qid!r} not found in {args.queries}")
    query = queries[args.qid]
    result = retrieve(
        corpus,
        index_from_corpus(corpus),
        query.get("entities", []),
        query.get("vector"),
        k_info=config.k_info,
        k_sim=config.k_sim,
        query_id=args.qid,
    )
    print(_dump(result.to_dict()), end="")
    return 0


def _find_spec(
    specs: list[QuestionSpec], qid: str | None, question: str | None
) -> QuestionSpec | None:
    for spec in specs:
        if qid and spec.qid == qid:
            return spec
        if question and spec.question == question:
            return spec
    return None


def _cmd_answer(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    if not args.question and not args.qid:
        raise UsageError("one of --question or --qid is required")
    spec = None
    if args.questions:
        with open(args.questions, "r", encoding="utf-8") as handle:
            spec = _find_spec(read_question_file(handle), args.qid, args.question)
    if spec is None:
        if not args.question:
            raise UsageError(
                f"qid {args.qid!r} not found in the questions file"
            )
        spec = QuestionSpec(qid=args.qid or "q", question=args.question)
    pipeline = _pipeline(args, config)
    trace = pipeline.run_question(spec)
    print(f"Question: {trace.question}")
    for i, step in enumerate(trace.steps, start=1):
        print(f"Step {i}: {step.original_sub_question}")
        if step.rewritten is not None:
            print(f"  rewritten: {step.rewritten}")
        fused = ", ".join(step.retrieval.fused[:5])
        more = len(step.retrieval.fused) - 5
        suffix = f" (+{more} more)" if more > 0 else ""
        print(f"  retrieved: {fused}{suffix}")
        print(f"  answer: {step.answer}")
    print(f"Final answer: {trace.final_answer}")
    if trace.gold_answer is not None:
        score = answer_score(trace.final_answer or "", trace.gold_answer)
        print(f"Gold answer: {trace.gold_answer}")
        print(f"F1 {score.f1:.4f}  EM {score.em}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    with open(args.questions, "r", encoding="utf-8") as handle:
        specs = read_question_file(handle)
    pipeline = _pipeline(args, config)
    report = run_eval(specs, pipeline)
    payload = _dump(report)
    with open(args.out, "w", encoding="utf-8") as handle:
        handle.write(payload)
    print(_dump({"out": args.out, "aggregate": report["aggregate"],
                 "failures": report["failures"]}), end="")
    return 0


def _cmd_score_answers(args: argparse.Namespace) -> int:
    preds = {}
    for obj in _read_jsonl_file(args.pred):
        if "qid" not in obj:
            raise UsageError(f"{args.pred}: every line needs a 'qid'")
        preds[str(obj["qid"])] = str(obj.get("answer", ""))
    scores = []
    per_question = []
    for obj in _read_jsonl_file(args.gold):
        if "qid" not in obj:
            raise UsageError(f"{args.gold}: every line needs a 'qid'")
        qid = str(obj["qid"])
        gold = str(obj.get("answer", ""))
        score = answer_score(preds.get(qid, ""), gold)
        scores.append(score)
        per_question.append({"qid": qid, **score.to_dict()})
    print(
        _dump(
            {
                "aggregate": aggregate(scores).to_dict(),
                "questions": per_question,
            }
        ),
        end="",
    )
    return 0


def _cmd_filter_data(args: argparse.Namespace) -> int:
    config = _resolve_config(args)
    with open(args.candidates, "r", encoding="utf-8") as handle:
        candidates = read_question_file(handle)
    pipeline = _pipeline(args, config)
    consistent, inconsistent = filter_by_answer_consistency(candidates, pipeline)
    payload = {
        "consistent": [outcome.to_dict() for outcome in consistent],
        "inconsistent": [outcome.to_dict() for outcome in inconsistent],
    }
    if args.out:
        with open(args.out, "w", encoding="utf-8") as handle:
            handle.write(_dump(payload))
    print(
        _dump(
            {
                "consistent": len(consistent),
                "inconsistent": len(inconsistent),
                "out": args.out,
            }
        ),
        end="",
    )
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="hopqa",
        description=(
            "Multi-hop question answering engine: dependency-tree entity "
            "informativeness retrieval fused with dense similarity, driven "
            "by an iterative sub-question answering loop."
        ),
        epilog=f"The live-backend API key is read from ${API_KEY_ENV}.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p = sub.add_parser("ingest", help="build and save a corpus index")
    p.add_argument("--docs", required=True, help="documents.jsonl")
    p.add_argument("--trees", required=True, help="trees.conllu")
    p.add_argument("--entities", required=True, help="entities.jsonl")
    p.add_argument("--embeddings", help="embeddings.jsonl (optional)")
    p.add_argument("--out", required=True, help="index directory or file")
    _config_flags(p)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("index", help="attach chunk embeddings to a saved index")
    p.add_argument("--index", required=True)
    p.add_argument("--embeddings", required=True)
    p.add_argument("--out", help="defaults to rewriting the input index")
    _config_flags(p)
    p.set_defaults(func=_cmd_index)

    p = sub.add_parser("score", help="emit informativeness tables as JSONL")
    p.add_argument("--index", required=True)
    p.add_argument("--chunk", action="append", help="restrict to chunk id")
    _config_flags(p)
    p.set_defaults(func=_cmd_score)

    p = sub.add_parser("retrieve", help="dual-path retrieval for one query")
    p.add_argument("--index", required=True)
    p.add_argument("--queries", required=True, help="queries.jsonl")
    p.add_argument("--qid", required=True)
    _config_flags(p)
    p.set_defaults(func=_cmd_retrieve)

    p = sub.add_parser("answer", help="answer one question, printing the trace")
    p.add_argument("--index", required=True)
    p.add_argument("--question", help="question text")
    p.add_argument("--qid", help="question id in --questions")
    p.add_argument("--questions", help="questions.jsonl with fixtures")
    _config_flags(p)
    p.set_defaults(func=_cmd_answer)

    p = sub.add_parser("eval", help="run and score a question set")
    p.add_argument("--index", required=True)
    p.add_argument("--questions", required=True)
    p.add_argument("--out", required=True, help="report JSON path")
    _config_flags(p)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("score-answers", help="score predictions against gold")
    p.add_argument("--pred", required=True, help="predictions jsonl (qid, answer)")
    p.add_argument("--gold", required=True, help="gold jsonl (qid, answer)")
    _config_flags(p)
    p.set_defaults(func=_cmd_score_answers)

    p = sub.add_parser(
        "filter-data", help="split candidate decompositions by answer consistency"
    )
    p.add_argument("--index", required=True)
    p.add_argument("--candidates", required=True, help="candidates jsonl")
    p.add_argument("--out", help="write the full split as JSON")
    _config_flags(p)
    p.set_defaults(func=_cmd_filter_data)

    return parser


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "func", None):
            parser.print_usage(sys.stderr)
            return 1
        return args.func(args)
    except UsageError as exc:
        print(f"hopqa: {exc}", file=sys.stderr)
        return 1
    except (EngineError, FileNotFoundError, IsADirectoryError,
            PermissionError) as exc:
        print(f"hopqa: error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"hopqa: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2


def main(argv: Sequence[str] | None = None) -> int:
    code = run(argv)
    if code:
        sys.exit(code)
    return 0
