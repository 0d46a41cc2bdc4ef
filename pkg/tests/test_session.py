import random
from dataclasses import replace

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from ivrflow.asr import Transcript
from ivrflow.errors import ProtocolViolationError, TerminalSessionError, UnroutableClassError
from ivrflow.nlu import ClassificationResult
from ivrflow.session import (
    BackendFailure,
    CallSession,
    ClassificationReady,
    ConfirmNo,
    ConfirmUnclear,
    ConfirmYes,
    Hangup,
    Listen,
    Phase,
    PlayPrompt,
    RoutingTable,
    SessionStart,
    Transfer,
    TransferOperator,
    UtteranceReceived,
    advance,
    route,
)

from .generators import fuzz_session

UTT = UtteranceReceived(Transcript("мен картамды жоғалттым", "kk"))


def ready(conf=0.9, cid="card_lost"):
    return ClassificationReady(ClassificationResult(cid, conf))


def run(config, events, session=None):
    session = session or CallSession("c1", "kk")
    trace = []
    for ev in events:
        session, actions = advance(session, ev, config)
        trace.append(actions)
    return session, trace


def test_happy_path_four_calls(toy_config):
    s, trace = run(toy_config, [SessionStart(), UTT, ready(0.9), ConfirmYes()])
    assert s.phase is Phase.ROUTED
    assert [e.phase_after for e in s.event_log] == [Phase.LISTENING, Phase.CLASSIFYING, Phase.CONFIRMING, Phase.ROUTED]
    assert trace[0] == [PlayPrompt(toy_config.prompt("kk", "greeting")), Listen()]
    assert trace[1] == []
    assert trace[2] == [PlayPrompt("Сіздің мәселеңіз: карта жоғалды. Дұрыс па?"), Listen()]
    assert trace[3] == [Transfer("Q17")]


def test_threshold_is_inclusive(toy_config):
    s, trace = run(toy_config, [SessionStart(), UTT, ready(0.7)])
    assert s.phase is Phase.CONFIRMING


def test_low_confidence_escalates(toy_config):
    s, trace = run(toy_config, [SessionStart(), UTT, ready(0.69)])
    assert s.phase is Phase.ESCALATED
    assert trace[-1] == [TransferOperator()]
    assert s.escalation_reason == "low confidence"


def test_zero_confidence_escalates(toy_config):
    s, _ = run(replace(toy_config, confidence_threshold=0.01), [SessionStart(), UTT, ready(0.0)])
    assert s.phase is Phase.ESCALATED


def test_no_then_reask(toy_config):
    s, trace = run(toy_config, [SessionStart(), UTT, ready(), ConfirmNo()])
    assert s.phase is Phase.LISTENING
    assert s.confirm_attempts == 1
    assert trace[-1] == [PlayPrompt(toy_config.prompt("kk", "reask")), Listen()]


def test_no_at_last_attempt_escalates(toy_config):
    session = replace(CallSession("c1", "kk"), started=True, phase=Phase.CONFIRMING,
                      confirm_attempts=toy_config.max_confirm_attempts - 1,
                      last_classification=ClassificationResult("card_lost", 0.9))
    s, actions = advance(session, ConfirmNo(), toy_config)
    assert s.phase is Phase.ESCALATED
    assert actions == [TransferOperator()]
    assert s.confirm_attempts <= toy_config.max_confirm_attempts


def test_two_rejections_escalate(toy_config):
    s, trace = run(toy_config, [SessionStart(), UTT, ready(), ConfirmNo(), UTT, ready(), ConfirmNo()])
    assert s.phase is Phase.ESCALATED
    assert s.confirm_attempts == 2
    assert trace[-1] == [TransferOperator()]


def test_unclear_replayed_once(toy_config):
    s, trace = run(toy_config, [SessionStart(), UTT, ready(), ConfirmUnclear()])
    assert s.phase is Phase.CONFIRMING
    assert trace[-1] == trace[2]  # same read-back again
    s, actions = advance(s, ConfirmUnclear(), toy_config)
    assert s.phase is Phase.ESCALATED and actions == [TransferOperator()]


def test_unclear_budget_is_per_call(toy_config):
    s, _ = run(toy_config, [SessionStart(), UTT, ready(), ConfirmUnclear(), ConfirmNo(), UTT, ready(), ConfirmUnclear()])
    assert s.phase is Phase.ESCALATED


@pytest.mark.parametrize("prefix", [
    [],
    [SessionStart()],
    [SessionStart(), UTT],
    [SessionStart(), UTT, ready()],
])
def test_hangup_from_any_phase(toy_config, prefix):
    s, _ = run(toy_config, prefix)
    s, actions = advance(s, Hangup(), toy_config)
    assert s.phase is Phase.ABANDONED
    assert actions == []


@pytest.mark.parametrize("prefix", [[SessionStart()], [SessionStart(), UTT], [SessionStart(), UTT, ready()]])
def test_backend_failure_escalates(toy_config, prefix):
    s, _ = run(toy_config, prefix)
    s, actions = advance(s, BackendFailure("classifier: timeout"), toy_config)
    assert s.phase is Phase.ESCALATED
    assert actions == [TransferOperator()]


@pytest.mark.parametrize("terminal_events", [
    [SessionStart(), UTT, ready(), ConfirmYes()],
    [SessionStart(), UTT, ready(0.1)],
    [SessionStart(), Hangup()],
])
@pytest.mark.parametrize("event", [SessionStart(), UTT, ready(), ConfirmYes(), ConfirmNo(), Hangup()])
def test_terminal_absorbs(toy_config, terminal_events, event):
    s, _ = run(toy_config, terminal_events)
    assert s.terminal
    with pytest.raises(TerminalSessionError):
        advance(s, event, toy_config)


@pytest.mark.parametrize("events", [
    [SessionStart(), ConfirmYes()],
    [SessionStart(), ready()],
    [SessionStart(), UTT, UTT],
    [SessionStart(), UTT, ConfirmNo()],
    [SessionStart(), UTT, ready(), UTT],
    [SessionStart(), SessionStart()],
    [UTT],
])
def test_protocol_violations(toy_config, events):
    with pytest.raises(ProtocolViolationError):
        run(toy_config, events)


def test_empty_utterance_rejected():
    with pytest.raises(ProtocolViolationError):
        UtteranceReceived(Transcript("   "))


def test_unroutable_class_escalates(toy_config):
    routing = RoutingTable({"loan_info": "Q03", "balance": "Q05"}, frozenset({"Q03", "Q05", "Q17"}))
    cfg = replace(toy_config, routing=routing)
    s, trace = run(cfg, [SessionStart(), UTT, ready(), ConfirmYes()])
    assert s.phase is Phase.ESCALATED
    assert trace[-1] == [TransferOperator()]


def test_unknown_class_escalates(toy_config):
    s, trace = run(toy_config, [SessionStart(), UTT, ready(0.95, "no_such")])
    assert s.phase is Phase.ESCALATED


def test_language_selects_prompts(toy_config):
    s, trace = run(toy_config, [SessionStart(), UTT, ready()], CallSession("c1", "ru"))
    assert trace[0][0] == PlayPrompt(toy_config.prompt("ru", "greeting"))
    assert trace[2][0] == PlayPrompt("Ваш вопрос: утеря карты. Верно?")


def test_route_lookup():
    table = RoutingTable({"card_lost": "Q17"})
    assert route("card_lost", table) == "Q17"
    with pytest.raises(UnroutableClassError):
        route("unknown", table)


def test_full_taxonomy_routes(default_config):
    assert len(default_config.taxonomy) == 200
    for c in default_config.taxonomy:
        assert route(c.class_id, default_config.routing) == c.queue_id


def test_event_log_ordered_and_append_only(toy_config):
    s, _ = run(toy_config, [SessionStart(), UTT, ready(), ConfirmNo(), UTT])
    seqs = [e.seq for e in s.event_log]
    assert seqs == sorted(set(seqs)) == list(range(5))
    s2, _ = advance(s, ready(), toy_config)
    assert s2.event_log[:5] == s.event_log


def test_advance_is_pure(toy_config):
    s, _ = run(toy_config, [SessionStart(), UTT])
    a = advance(s, ready(0.8), toy_config)
    b = advance(s, ready(0.8), toy_config)
    assert a == b
    assert s.phase is Phase.CLASSIFYING  # input untouched


@settings(max_examples=300, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.integers(0, 2**32), st.integers(1, 4))
def test_fuzz_safety(toy_config, seed, max_attempts):
    cfg = replace(toy_config, max_confirm_attempts=max_attempts)
    session, trace = fuzz_session(cfg, random.Random(seed), cfg.taxonomy)
    assert len(trace) <= 2 + 3 * max_attempts
    assert session.confirm_attempts <= max_attempts
    flat = [a for step in trace for a in step]
    ops = sum(isinstance(a, TransferOperator) for a in flat)
    transfers = sum(isinstance(a, Transfer) for a in flat)
    if session.phase is Phase.ESCALATED:
        assert ops == 1 and transfers == 0
        assert trace[-1] == [TransferOperator()]
    elif session.phase is Phase.ROUTED:
        assert ops == 0 and transfers == 1
    else:
        assert session.phase is Phase.ABANDONED and ops == 0 and transfers == 0
