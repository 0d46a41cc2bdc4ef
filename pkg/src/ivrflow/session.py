"""Per-call dialog state machine.

A call moves Listening -> Classifying -> Confirming and ends in exactly one
of Routed, Escalated or Abandoned. :func:`advance` is pure: the successor
session and the actions to emit depend only on its arguments.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from types import MappingProxyType
from typing import Mapping, Optional

from .errors import ProtocolViolationError, TerminalSessionError, UnroutableClassError
from .tts import render_confirmation


class Phase(str, enum.Enum):
    LISTENING = "Listening"
    CLASSIFYING = "Classifying"
    CONFIRMING = "Confirming"
    ROUTED = "Routed"
    ESCALATED = "Escalated"
    ABANDONED = "Abandoned"

    @property
    def terminal(self) -> bool:
        return self in (Phase.ROUTED, Phase.ESCALATED, Phase.ABANDONED)


# --- events -----------------------------------------------------------------

@dataclass(frozen=True)
class SessionStart:
    pass


@dataclass(frozen=True)
class UtteranceReceived:
    transcript: object

    def __post_init__(self):
        if not self.transcript.raw_text.strip():
            raise ProtocolViolationError("utterance with empty text")


@dataclass(frozen=True)
class ClassificationReady:
    result: object


@dataclass(frozen=True)
class ConfirmYes:
    pass


@dataclass(frozen=True)
class ConfirmNo:
    pass


@dataclass(frozen=True)
class ConfirmUnclear:
    pass


@dataclass(frozen=True)
class Hangup:
    pass


@dataclass(frozen=True)
class BackendFailure:
    """A recognizer/classifier failure the engine could not recover from."""

    reason: str


# --- actions ----------------------------------------------------------------

@dataclass(frozen=True)
class PlayPrompt:
    text: str


@dataclass(frozen=True)
class Listen:
    pass


@dataclass(frozen=True)
class Transfer:
    queue_id: str


@dataclass(frozen=True)
class TransferOperator:
    pass


@dataclass(frozen=True)
class LogOnly:
    note: str


def _snake(name: str) -> str:
    return "".join("_" + ch.lower() if ch.isupper() else ch for ch in name).lstrip("_")


def event_to_dict(event) -> dict:
    out = {"type": _snake(type(event).__name__)}
    if isinstance(event, UtteranceReceived):
        out["text"] = event.transcript.raw_text
    elif isinstance(event, ClassificationReady):
        out.update(event.result.to_dict())
    elif isinstance(event, BackendFailure):
        out["reason"] = event.reason
    return out


def action_to_dict(action) -> dict:
    out = {"type": _snake(type(action).__name__)}
    if isinstance(action, PlayPrompt):
        out["text"] = action.text
    elif isinstance(action, Transfer):
        out["queue_id"] = action.queue_id
    elif isinstance(action, LogOnly):
        out["note"] = action.note
    return out


# --- routing ----------------------------------------------------------------

@dataclass(frozen=True)
class RoutingTable:
    routes: Mapping[str, str]
    queues: frozenset = frozenset()
    operator_queue: str = "OPERATOR"

    def __post_init__(self):
        object.__setattr__(self, "routes", MappingProxyType(dict(self.routes)))
        queues = frozenset(self.queues) or frozenset(self.routes.values())
        object.__setattr__(self, "queues", queues)

    @classmethod
    def from_taxonomy(cls, taxonomy, queues=(), operator_queue="OPERATOR") -> "RoutingTable":
        return cls({c.class_id: c.queue_id for c in taxonomy}, frozenset(queues), operator_queue)


def route(class_id: str, routing: RoutingTable) -> str:
    queue = routing.routes.get(class_id)
    if queue is None or queue not in routing.queues:
        raise UnroutableClassError(f"no queue for class {class_id!r}")
    return queue


# --- session ----------------------------------------------------------------

@dataclass(frozen=True)
class LogEntry:
    seq: int
    event: object
    actions: tuple
    phase_before: Phase
    phase_after: Phase


@dataclass(frozen=True)
class CallSession:
    call_id: str
    language: str = "kk"
    phase: Phase = Phase.LISTENING
    started: bool = False
    confirm_attempts: int = 0
    unclear_replays: int = 0
    last_classification: Optional[object] = None
    escalation_reason: Optional[str] = None
    event_log: tuple = field(default=())

    @property
    def terminal(self) -> bool:
        return self.phase.terminal


def _confirmation_text(session, config, result) -> str:
    template = config.prompt(session.language, "confirm")
    return render_confirmation(config.taxonomy[result.class_id], session.language, template)


def _escalate(session, reason):
    return replace(session, phase=Phase.ESCALATED, escalation_reason=reason), [TransferOperator()]


def _transition(session: CallSession, event, config):
    """Return ``(next_session, actions)`` without touching the event log."""
    if isinstance(event, Hangup):
        return replace(session, phase=Phase.ABANDONED), []
    if isinstance(event, BackendFailure):
        return _escalate(session, event.reason)
    if isinstance(event, SessionStart):
        if session.started or session.phase is not Phase.LISTENING:
            raise ProtocolViolationError("session already started")
        greeting = config.prompt(session.language, "greeting")
        return replace(session, started=True), [PlayPrompt(greeting), Listen()]
    if not session.started:
        raise ProtocolViolationError(f"{type(event).__name__} before SessionStart")

    phase = session.phase
    if phase is Phase.LISTENING and isinstance(event, UtteranceReceived):
        return replace(session, phase=Phase.CLASSIFYING), []

    if phase is Phase.CLASSIFYING and isinstance(event, ClassificationReady):
        result = event.result
        session = replace(session, last_classification=result)
        if result.class_id not in config.taxonomy:
            return _escalate(session, "unknown class")
        if result.confidence < config.confidence_threshold:
            return _escalate(session, "low confidence")
        text = _confirmation_text(session, config, result)
        return replace(session, phase=Phase.CONFIRMING), [PlayPrompt(text), Listen()]

    if phase is Phase.CONFIRMING:
        if isinstance(event, ConfirmYes):
            try:
                queue = route(session.last_classification.class_id, config.routing)
            except UnroutableClassError:
                return _escalate(session, "unroutable class")
            return replace(session, phase=Phase.ROUTED), [Transfer(queue)]
        if isinstance(event, ConfirmNo):
            attempts = session.confirm_attempts + 1
            session = replace(session, confirm_attempts=attempts)
            if attempts < config.max_confirm_attempts:
                reask = config.prompt(session.language, "reask")
                return replace(session, phase=Phase.LISTENING), [PlayPrompt(reask), Listen()]
            return _escalate(session, "caller rejected classification")
        if isinstance(event, ConfirmUnclear):
            # one replay per call keeps the transition count bounded
            if session.unclear_replays < 1:
                text = _confirmation_text(session, config, session.last_classification)
                return replace(session, unclear_replays=session.unclear_replays + 1), [PlayPrompt(text), Listen()]
            return _escalate(session, "unclear confirmation")

    raise ProtocolViolationError(f"{type(event).__name__} is not valid in phase {phase.value}")


def advance(session: CallSession, event, config) -> tuple[CallSession, list]:
    """Apply one dialog event.

    Raises :class:`TerminalSessionError` once the call has ended and
    :class:`ProtocolViolationError` for an event the current phase does not
    accept.
    """
    if session.terminal:
        raise TerminalSessionError(f"call {session.call_id} already ended in {session.phase.value}")
    nxt, actions = _transition(session, event, config)
    entry = LogEntry(len(session.event_log), event, tuple(actions), session.phase, nxt.phase)
    return replace(nxt, event_log=session.event_log + (entry,)), actions
