from __future__ import annotations

from pathlib import Path

import pytest

from hopqa.config import Config
from hopqa.corpus import load_corpus_files
from hopqa.dense_index import index_from_corpus
from hopqa.generator import ScriptedGenerator
from hopqa.orchestrator import Pipeline, read_question_file

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def fixture_corpus():
    return load_corpus_files(
        FIXTURES / "documents.jsonl",
        FIXTURES / "trees.conllu",
        FIXTURES / "entities.jsonl",
        embeddings_path=FIXTURES / "embeddings.jsonl",
    )


@pytest.fixture(scope="session")
def fixture_vector_index(fixture_corpus):
    return index_from_corpus(fixture_corpus)


@pytest.fixture()
def stub_generator():
    return ScriptedGenerator.from_file(FIXTURES / "stub_script.json")


@pytest.fixture()
def pipeline(fixture_corpus, fixture_vector_index, stub_generator):
    return Pipeline(
        corpus=fixture_corpus,
        vector_index=fixture_vector_index,
        generator=stub_generator,
        config=Config(),
    )


@pytest.fixture(scope="session")
def question_specs():
    with open(FIXTURES / "questions.jsonl", "r", encoding="utf-8") as handle:
        return read_question_file(handle)


@pytest.fixture(scope="session")
def candidate_specs():
    with open(FIXTURES / "candidates.jsonl", "r", encoding="utf-8") as handle:
        return read_question_file(handle)
