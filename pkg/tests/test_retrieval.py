from __future__ import annotations

import json

import pytest

from hopqa.dense_index import top_k_by_similarity
from hopqa.errors import ContractViolation
from hopqa.informativeness import top_k_by_informativeness
from hopqa.retrieval import fuse, retrieve

QUERY_ENTITIES = ["Kevin James", "Grown Ups", "Here Comes the Boom", "Adam Sandler"]


@pytest.fixture(scope="module")
def query_vector(fixtures_dir):
    with open(fixtures_dir / "queries.jsonl", "r", encoding="utf-8") as handle:
        for line in handle:
            obj = json.loads(line)
            if obj["qid"] == "dualpath":
                return obj["vector"]
    raise AssertionError("dualpath query missing from fixtures")


def test_fuse_disjoint_lists_concatenates():
    info = [(f"i{n}", 1.0 / (n + 1)) for n in range(15)]
    sim = [(f"s{n}", 0.9 - n * 0.01) for n in range(10)]
    fused = fuse(info, sim)
    assert len(fused) == 25
    assert list(fused[:15]) == [cid for cid, _ in info]
    assert list(fused[15:]) == [cid for cid, _ in sim]


def test_fuse_identical_lists_deduplicates():
    hits = [(f"c{n}", 1.0 - n * 0.05) for n in range(15)]
    fused = fuse(hits, hits[:10])
    assert list(fused) == [cid for cid, _ in hits]
    assert len(fused) == 15


def test_empty_question_entities_fall_back_to_dense(
    fixture_corpus, fixture_vector_index, query_vector
):
    result = retrieve(
        fixture_corpus, fixture_vector_index, [], query_vector, 15, 10, query_id="q"
    )
    assert result.informativeness_hits == ()
    assert len(result.similarity_hits) == 10
    assert list(result.fused) == [cid for cid, _ in result.similarity_hits]


def test_missing_query_vector_falls_back_to_informativeness(
    fixture_corpus, fixture_vector_index
):
    result = retrieve(
        fixture_corpus, fixture_vector_index, QUERY_ENTITIES, None, 15, 10, query_id="q"
    )
    assert result.similarity_hits == ()
    assert list(result.fused) == [cid for cid, _ in result.informativeness_hits]


def test_retrieval_is_deterministic(fixture_corpus, fixture_vector_index, query_vector):
    first = retrieve(
        fixture_corpus, fixture_vector_index, QUERY_ENTITIES, query_vector, 15, 10,
        query_id="q",
    )
    second = retrieve(
        fixture_corpus, fixture_vector_index, QUERY_ENTITIES, query_vector, 15, 10,
        query_id="q",
    )
    assert json.dumps(first.to_dict()) == json.dumps(second.to_dict())


def test_hit_list_size_caps(fixture_corpus, fixture_vector_index, query_vector):
    result = retrieve(
        fixture_corpus, fixture_vector_index, QUERY_ENTITIES, query_vector,
        k_info=3, k_sim=2, query_id="q",
    )
    assert len(result.informativeness_hits) == 3
    assert len(result.similarity_hits) == 2
    assert len(set(result.fused)) == len(result.fused)
    hit_ids = {cid for cid, _ in result.informativeness_hits} | {
        cid for cid, _ in result.similarity_hits
    }
    assert set(result.fused) == hit_ids


def test_k_info_zero_is_pure_dense_ranking(
    fixture_corpus, fixture_vector_index, query_vector
):
    result = retrieve(
        fixture_corpus, fixture_vector_index, QUERY_ENTITIES, query_vector,
        k_info=0, k_sim=10, query_id="q",
    )
    dense = top_k_by_similarity(fixture_vector_index, query_vector, 10)
    assert result.informativeness_hits == ()
    assert list(result.similarity_hits) == dense
    assert list(result.fused) == [cid for cid, _ in dense]


def test_k_sim_zero_is_pure_informativeness_ranking(
    fixture_corpus, fixture_vector_index, query_vector
):
    result = retrieve(
        fixture_corpus, fixture_vector_index, QUERY_ENTITIES, query_vector,
        k_info=15, k_sim=0, query_id="q",
    )
    info = top_k_by_informativeness(fixture_corpus, QUERY_ENTITIES, 15)
    assert result.similarity_hits == ()
    assert list(result.informativeness_hits) == info
    assert list(result.fused) == [cid for cid, _ in info]


def test_both_paths_disabled_is_a_contract_violation(
    fixture_corpus, fixture_vector_index
):
    with pytest.raises(ContractViolation):
        retrieve(fixture_corpus, fixture_vector_index, [], None, 0, 0)
    with pytest.raises(ContractViolation):
        retrieve(fixture_corpus, fixture_vector_index, [], None, -1, 5)


def test_fused_ids_all_come_from_hit_lists(
    fixture_corpus, fixture_vector_index, query_vector
):
    result = retrieve(
        fixture_corpus, fixture_vector_index, QUERY_ENTITIES, query_vector, 15, 10,
        query_id="q",
    )
    sources = {cid for cid, _ in result.informativeness_hits}
    sources |= {cid for cid, _ in result.similarity_hits}
    assert set(result.fused) == sources
    assert 15 <= len(result.fused) <= 25
