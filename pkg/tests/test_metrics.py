import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ivrflow.errors import EmptyReferenceError, IncompleteBatchError
from ivrflow.metrics import (
    EditCounts,
    SessionOutcome,
    build_report,
    corpus_wer,
    utterance_wer,
    word_edit_distance,
)

from .oracles import all_alignments, min_alignment_cost

ABCD = ["а", "б", "в", "г"]
small_seq = st.lists(st.sampled_from("абв"), max_size=5)


def test_identity():
    c = word_edit_distance(ABCD, ABCD)
    assert c == EditCounts(0, 0, 0, 4)
    assert utterance_wer(c) == 0.0


def test_one_sub_one_del():
    # exhaustive enumeration: minimum cost 2, reached by S=1, D=1
    assert min_alignment_cost(ABCD, ["а", "х", "в"]) == 2
    c = word_edit_distance(ABCD, ["а", "х", "в"])
    assert (c.substitutions, c.deletions, c.insertions) == (1, 1, 0)
    assert utterance_wer(c) == 0.5


def test_single_insertion():
    assert min_alignment_cost(["а"], ["а", "б"]) == 1
    c = word_edit_distance(["а"], ["а", "б"])
    assert (c.substitutions, c.deletions, c.insertions) == (0, 0, 1)
    assert utterance_wer(c) == 1.0


def test_backtrace_prefers_substitution():
    # swap: S=2 and D=1/I=1 both cost 2; substitution wins
    minimal = {a for a in all_alignments(["а", "б"], ["б", "а"]) if sum(a) == 2}
    assert minimal == {(2, 0, 0), (0, 1, 1)}
    c = word_edit_distance(["а", "б"], ["б", "а"])
    assert (c.substitutions, c.deletions, c.insertions) == (2, 0, 0)


def test_empty_lists():
    assert word_edit_distance([], []) == EditCounts(0, 0, 0, 0)
    assert word_edit_distance([], ["а"]) == EditCounts(0, 0, 1, 0)
    assert word_edit_distance(["а"], []) == EditCounts(0, 1, 0, 1)


@pytest.mark.parametrize("counts, expected", [
    (EditCounts(0, 0, 0, 4), 0.0),
    (EditCounts(1, 1, 0, 4), 0.5),
    (EditCounts(0, 0, 0, 0), 0.0),
])
def test_utterance_wer(counts, expected):
    assert utterance_wer(counts) == expected


def test_utterance_wer_empty_reference_with_hypothesis():
    with pytest.raises(EmptyReferenceError):
        utterance_wer(EditCounts(0, 0, 2, 0))


def test_corpus_wer_pools():
    res = corpus_wer([(ABCD, ["а", "х", "в"]), (ABCD, ABCD)])
    assert res.wer == 2 / 8
    assert res.mean_utterance_wer == (0.5 + 0.0) / 2
    assert res.utterances == 2


def test_corpus_wer_identical_and_all_deleted():
    pairs = [(["а", "б"], ["а", "б"]), (["в"], ["в"])]
    assert corpus_wer(pairs).wer == 0.0
    assert corpus_wer([(r, []) for r, _ in pairs]).wer == 1.0


def test_corpus_wer_names_empty_reference():
    with pytest.raises(EmptyReferenceError) as info:
        corpus_wer([(["а"], ["а"]), ([], ["б"])])
    assert info.value.index == 1
    assert "pair 1" in str(info.value)


@settings(max_examples=300)
@given(small_seq, small_seq)
def test_dp_matches_enumeration(ref, hyp):
    c = word_edit_distance(ref, hyp)
    assert c.errors == min_alignment_cost(ref, hyp)
    assert (c.substitutions, c.deletions, c.insertions) in set(all_alignments(ref, hyp))
    assert c.substitutions + c.deletions <= c.ref_len == len(ref)


@given(small_seq, small_seq)
def test_cost_symmetry(ref, hyp):
    fwd = word_edit_distance(ref, hyp)
    back = word_edit_distance(hyp, ref)
    assert fwd.errors == back.errors


@given(small_seq, small_seq, small_seq)
def test_triangle_inequality(a, b, c):
    ab = word_edit_distance(a, b).errors
    bc = word_edit_distance(b, c).errors
    ac = word_edit_distance(a, c).errors
    assert ac <= ab + bc


@given(st.lists(st.tuples(st.lists(st.sampled_from("абвг"), min_size=1, max_size=6),
                          st.lists(st.sampled_from("абвгд"), max_size=6)), min_size=1, max_size=8))
def test_pooling_identity(pairs):
    errors = 0
    words = 0
    for ref, hyp in pairs:
        errors += min_alignment_cost(ref, hyp)
        words += len(ref)
    assert corpus_wer(pairs).wer == pytest.approx(errors / words, abs=1e-12)


def _outcomes(phases):
    return [SessionOutcome(f"r{i}", p, "c1", "c1") for i, p in enumerate(phases)]


def test_report_terminal_rates():
    rep = build_report(_outcomes(["Routed"] * 7 + ["Escalated"] * 2 + ["Abandoned"]))
    assert (rep.rate_routed, rep.rate_escalated, rep.rate_abandoned) == pytest.approx((0.7, 0.2, 0.1))
    assert rep.rate_routed + rep.rate_escalated + rep.rate_abandoned == pytest.approx(1.0, abs=1e-9)
    assert rep.class_accuracy == 1.0
    assert rep.rate_routed_correct == pytest.approx(0.7)


def test_report_accuracy_counts_missing_classification_as_wrong():
    outs = [SessionOutcome("a", "Routed", "x", "x"), SessionOutcome("b", "Escalated", None, "y")]
    rep = build_report(outs)
    assert rep.class_accuracy == 0.5
    assert rep.per_class_accuracy == {"x": 1.0, "y": 0.0}


def test_report_rejects_incomplete_batch():
    with pytest.raises(IncompleteBatchError):
        build_report(_outcomes(["Routed", "Confirming"]))


def test_report_counts_failed_runs():
    outs = _outcomes(["Routed"]) + [SessionOutcome("f", "Failed", failed=True, error="boom")]
    rep = build_report(outs)
    assert rep.failed_runs == 1
    assert rep.session_count == 2
    assert rep.rate_routed == 1.0


def test_report_wer():
    rep = build_report(_outcomes(["Routed"]), [(ABCD, ["а", "х", "в"])])
    assert rep.corpus_wer == 0.5
    assert rep.word_errors == {"substitutions": 1, "deletions": 1, "insertions": 0, "ref_words": 4}
