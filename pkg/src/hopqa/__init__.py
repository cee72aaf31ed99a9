"""Multi-hop question answering engine.

Retrieval fuses two paths: chunks ranked by how informative their entities
are in the sentence dependency trees, and chunks ranked by dense cosine
similarity. An iterative loop decomposes each question, rewrites follow-up
sub-questions against the answer history, retrieves, answers, and
integrates the final answer.
"""

__version__ = "0.1.0"

from .config import Config
from .corpus import Corpus, chunk_document, load_corpus, load_index, save_index
from .dense_index import VectorIndex, cosine, top_k_by_similarity
from .generator import LiveGenerator, ScriptedGenerator
from .informativeness import (
    InformativenessIndex,
    InformativenessTable,
    build_table,
    chunk_score,
    entity_importance,
    top_k_by_informativeness,
)
from .metrics import AnswerScore, aggregate, answer_score, normalize_answer
from .orchestrator import (
    Pipeline,
    QuestionSpec,
    ReasoningTrace,
    filter_by_answer_consistency,
    run_eval,
    run_question,
)
from .retrieval import RetrievalResult, retrieve
from .treebank import DependencyTree, Token, descendant_count, parse_conllu

__all__ = [
    "AnswerScore",
    "Config",
    "Corpus",
    "DependencyTree",
    "InformativenessIndex",
    "InformativenessTable",
    "LiveGenerator",
    "Pipeline",
    "QuestionSpec",
    "ReasoningTrace",
    "RetrievalResult",
    "ScriptedGenerator",
    "Token",
    "VectorIndex",
    "aggregate",
    "answer_score",
    "build_table",
    "chunk_document",
    "chunk_score",
    "cosine",
    "descendant_count",
    "entity_importance",
    "filter_by_answer_consistency",
    "load_corpus",
    "load_index",
    "normalize_answer",
    "parse_conllu",
    "retrieve",
    "run_eval",
    "run_question",
    "save_index",
    "top_k_by_informativeness",
    "top_k_by_similarity",
]
