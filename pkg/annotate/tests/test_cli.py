from __future__ import annotations

import json

import pytest

from hopqa_annotate.cli import run


def test_corpus_subcommand_with_builtin_backends(docs_path, tmp_path, capsys):
    out = tmp_path / "annotated"
    code = run(
        [
            "corpus",
            "--docs", str(docs_path),
            "--out", str(out),
            "--parser-model", "builtin",
            "--ner-model", "builtin",
            "--embed-model", "builtin",
        ]
    )
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["documents"] == 5
    assert summary["chunks"] > 0
    for name in ("trees.conllu", "entities.jsonl", "embeddings.jsonl"):
        assert (out / name).exists()


def test_questions_subcommand_masked(questions_path, tmp_path, capsys):
    out = tmp_path / "augmented.jsonl"
    code = run(
        [
            "questions",
            "--questions", str(questions_path),
            "--out", str(out),
            "--ner-model", "builtin",
            "--embed-model", "builtin",
            "--mask-entities",
            "--seed", "3",
        ]
    )
    assert code == 0
    summary = json.loads(capsys.readouterr().out)
    assert summary["documents"] == 2
    records = [json.loads(line) for line in out.read_text().splitlines()]
    q1 = next(r for r in records if r["qid"] == "q1")
    assert len(q1["q_entities"]["1"]) == 1  # one of two entities masked


def test_default_model_id_failure_is_reported(docs_path, tmp_path, capsys):
    try:
        import spacy  # noqa: F401
    except ImportError:
        pass
    else:
        pytest.skip("spacy installed; the default parser may load")
    code = run(["corpus", "--docs", str(docs_path), "--out", str(tmp_path / "o")])
    assert code == 1
    err = capsys.readouterr().err
    assert "en_core_web_trf" in err


def test_unknown_flag_exits_one(capsys):
    assert run(["corpus", "--nonsense"]) == 1
    assert "usage" in capsys.readouterr().err.lower()


def test_missing_input_file_exits_one(tmp_path, capsys):
    code = run(
        [
            "corpus",
            "--docs", str(tmp_path / "missing.jsonl"),
            "--out", str(tmp_path / "o"),
            "--parser-model", "builtin",
            "--ner-model", "builtin",
            "--embed-model", "builtin",
        ]
    )
    assert code == 1


def test_no_subcommand_exits_one(capsys):
    assert run([]) == 1
