from __future__ import annotations

import subprocess
import sys
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture(scope="session")
def docs_path() -> Path:
    return FIXTURES / "documents.jsonl"


@pytest.fixture(scope="session")
def questions_path() -> Path:
    return FIXTURES / "questions.jsonl"


def run_engine(args: list[str]) -> subprocess.CompletedProcess:
    """Invoke the engine CLI in a subprocess; the exporter talks to the
    engine only through its command line and file formats."""
    return subprocess.run(
        [sys.executable, "-m", "hopqa", *args],
        capture_output=True,
        text=True,
    )


@pytest.fixture(scope="session")
def engine_available() -> bool:
    return run_engine(["--version"]).returncode == 0
