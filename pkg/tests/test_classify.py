
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ivrflow.asr import Transcript
from ivrflow.errors import BackendContractError, ClassifierUnavailableError, EmptyUtteranceError
from ivrflow.nlu import (
    ClassificationResult,
    ClassifierBackendConfig,
    IntentTaxonomy,
    classify,
    mock_classify,
)

from .conftest import slow
from .generators import SHARED, toy_taxonomy_10, toy_utterances
from .oracles import keyword_argmax

MOCK = ClassifierBackendConfig("mock")


def test_unique_full_overlap(toy_taxonomy, toy_store):
    res = classify(Transcript("мен картамды жоғалттым", "kk"), MOCK, toy_store, toy_taxonomy)
    assert res.class_id == "card_lost"
    assert res.confidence == 1.0
    assert res.alternates == ()
    assert res.context_docs  # retrieval ran


def test_zero_overlap(toy_taxonomy, toy_store):
    res = classify(Transcript("ауа райы қандай", "kk"), MOCK, toy_store, toy_taxonomy)
    assert res.confidence == 0.0
    assert res.class_id == min(toy_taxonomy.class_ids)


def test_confidence_normalised_by_top_three(toy_taxonomy):
    # card_lost 1/2, loan_info 1/2, balance 1/3
    res = mock_classify(["картамды", "несие", "шот"], toy_taxonomy)
    assert res.class_id == "card_lost"
    assert res.confidence == pytest.approx(0.5 / (0.5 + 0.5 + 1 / 3))
    assert [c for c, _ in res.alternates] == ["loan_info", "balance"]


def test_empty_transcript(toy_taxonomy, toy_store):
    with pytest.raises(EmptyUtteranceError):
        classify(Transcript("...", "kk"), MOCK, toy_store, toy_taxonomy)


def test_matches_bruteforce_argmax():
    tax = toy_taxonomy_10()
    pairs = [(c.class_id, c.keywords) for c in tax]
    for text in toy_utterances(tax, 50):
        tokens = Transcript(text).tokens
        assert mock_classify(tokens, tax).class_id == keyword_argmax(tokens, pairs)


@given(st.lists(st.sampled_from(SHARED + ["ерекше0", "ерекше3", "басқа"]), max_size=8), st.randoms())
def test_permutation_invariant(tokens, rnd):
    tax = toy_taxonomy_10()
    shuffled = list(tax.classes)
    rnd.shuffle(shuffled)
    assert mock_classify(tokens, tax) == mock_classify(tokens, IntentTaxonomy.from_classes(shuffled))


@settings(max_examples=200)
@given(st.lists(st.sampled_from(SHARED + ["ерекше0", "ерекше6", "x"]), max_size=10))
def test_result_invariants(tokens):
    tax = toy_taxonomy_10()
    res = mock_classify(tokens, tax)
    assert 0.0 <= res.confidence <= 1.0
    confs = [p for _, p in res.alternates]
    assert all(p <= res.confidence for p in confs)
    assert confs == sorted(confs, reverse=True)
    assert res.class_id in tax and all(c in tax for c, _ in res.alternates)


def test_result_rejects_inconsistent_values():
    with pytest.raises(ValueError):
        ClassificationResult("a", 1.2)
    with pytest.raises(ValueError):
        ClassificationResult("a", 0.5, (("b", 0.6),))
    with pytest.raises(ValueError):
        ClassificationResult("a", 0.5, (("b", 0.1), ("c", 0.2)))


@pytest.fixture
def remote(stub_server):
    return stub_server, ClassifierBackendConfig("remote", endpoint=stub_server.url, timeout=0.5)


def test_remote_success(remote, toy_taxonomy, toy_store):
    server, backend = remote
    server.routes["/v1/classify"] = lambda body: (200, {
        "class_id": "card_lost", "confidence": 0.83, "alternates": [["balance", 0.05], ["loan_info", 0.1]]})
    res = classify(Transcript("Картамды жоғалттым", "kk"), backend, toy_store, toy_taxonomy)
    assert res.class_id == "card_lost"
    assert res.confidence == 0.83
    assert res.alternates == (("loan_info", 0.1), ("balance", 0.05))
    (path, body), = server.requests
    assert path == "/v1/classify"
    assert "Клиенттің сөзі: картамды жоғалттым" in body["prompt"]
    assert "[d1]" in body["prompt"]


@pytest.mark.parametrize("reply", [
    {"class_id": "no_such_class", "confidence": 0.9, "alternates": []},
    {"class_id": "card_lost", "confidence": 1.5, "alternates": []},
    {"class_id": "card_lost", "confidence": True, "alternates": []},
    {"class_id": "card_lost", "confidence": 0.4, "alternates": [["balance", 0.9]]},
    {"class_id": "card_lost", "confidence": 0.9, "alternates": [["ghost", 0.1]]},
    {"class_id": "card_lost", "confidence": 0.9, "alternates": "balance"},
    {"confidence": 0.9},
])
def test_remote_contract_violations(remote, toy_taxonomy, toy_store, reply):
    server, backend = remote
    server.routes["/v1/classify"] = lambda body: (200, reply)
    with pytest.raises(BackendContractError):
        classify(Transcript("картамды"), backend, toy_store, toy_taxonomy)


def test_remote_non_json_is_contract_error(remote, toy_taxonomy, toy_store):
    server, backend = remote
    server.routes["/v1/classify"] = lambda body: (200, b"<html>")
    with pytest.raises(BackendContractError):
        classify(Transcript("картамды"), backend, toy_store, toy_taxonomy)


def test_remote_timeout(remote, toy_taxonomy, toy_store):
    server, backend = remote
    server.routes["/v1/classify"] = slow(1.5, (200, {"class_id": "card_lost", "confidence": 1.0}))
    with pytest.raises(ClassifierUnavailableError):
        classify(Transcript("картамды"), backend, toy_store, toy_taxonomy)


def test_remote_http_error(remote, toy_taxonomy, toy_store):
    server, backend = remote
    server.routes["/v1/classify"] = lambda body: (503, {"error": "overloaded"})
    with pytest.raises(ClassifierUnavailableError):
        classify(Transcript("картамды"), backend, toy_store, toy_taxonomy)


def test_remote_requires_endpoint():
    from ivrflow.errors import ConfigError
    with pytest.raises(ConfigError):
        ClassifierBackendConfig("remote")
