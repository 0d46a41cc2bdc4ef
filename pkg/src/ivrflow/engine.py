"""Runs many concurrent calls: feeds recognizer/classifier output into the
state machine and records every transition in the call log."""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

from .asr import MOCK_IDENTITY, Transcript, derive_seed, normalize, transcribe
from .errors import (
    AsrUnavailableError,
    BackendError,
    EmptyUtteranceError,
    ProtocolViolationError,
    TerminalSessionError,
    UnknownCallError,
)
from .nlu.classify import classify
from .nlu.confirm import Confirmation, parse_confirmation
from .session import (
    BackendFailure,
    CallSession,
    ClassificationReady,
    ConfirmNo,
    ConfirmUnclear,
    ConfirmYes,
    Hangup,
    Phase,
    SessionStart,
    UtteranceReceived,
    action_to_dict,
    advance,
    event_to_dict,
)

_CONFIRM_EVENTS = {
    Confirmation.YES: ConfirmYes(),
    Confirmation.NO: ConfirmNo(),
    Confirmation.UNCLEAR: ConfirmUnclear(),
}


@dataclass
class CallState:
    session: CallSession
    seed: int
    utterances: int = 0
    transcripts: list = field(default_factory=list)
    wer_pairs: list = field(default_factory=list)
    lock: threading.Lock = field(default_factory=threading.Lock, repr=False)


class Engine:
    """Thread-safe registry of live calls.

    Calls share nothing but the immutable config and the call log; each call
    is serialized by its own lock.
    """

    def __init__(self, config, call_log=None):
        self.config = config
        self.call_log = call_log
        self._calls: dict[str, CallState] = {}
        self._lock = threading.Lock()

    # -- registry ---------------------------------------------------------

    def _state(self, call_id) -> CallState:
        with self._lock:
            try:
                return self._calls[call_id]
            except KeyError:
                raise UnknownCallError(f"unknown call {call_id!r}") from None

    def session(self, call_id) -> CallSession:
        return self._state(call_id).session

    def call_state(self, call_id) -> CallState:
        return self._state(call_id)

    def forget(self, call_id) -> Optional[CallState]:
        with self._lock:
            return self._calls.pop(call_id, None)

    def live_calls(self) -> list[str]:
        with self._lock:
            return [cid for cid, st in self._calls.items() if not st.session.terminal]

    # -- transitions ------------------------------------------------------

    def _apply(self, state: CallState, event) -> list:
        before = state.session
        after, actions = advance(before, event, self.config)
        state.session = after
        if self.call_log is not None:
            self.call_log.append({
                "ts": None,
                "call_id": before.call_id,
                "phase_before": before.phase.value,
                "event": event_to_dict(event),
                "actions": [action_to_dict(a) for a in actions],
                "phase_after": after.phase.value,
            })
        return actions

    def start_call(self, call_id: str, language: Optional[str] = None, seed: Optional[int] = None) -> list:
        language = language or self.config.default_language
        if seed is None:
            seed = derive_seed(self.config.seed, call_id)
        state = CallState(CallSession(call_id, language), seed)
        with self._lock:
            existing = self._calls.get(call_id)
            if existing is not None and not existing.session.terminal:
                raise ProtocolViolationError(f"call {call_id!r} is already live")
            self._calls[call_id] = state
        with state.lock:
            return self._apply(state, SessionStart())

    def hangup(self, call_id: str) -> list:
        state = self._state(call_id)
        with state.lock:
            return self._apply(state, Hangup())

    def _transcribe(self, state: CallState, text, audio_ref, index) -> Transcript:
        lang = state.session.language
        asr = self.config.asr
        if text is not None:
            if asr.kind == "mock":
                transcript = transcribe(None, lang, asr, reference=text, seed=derive_seed(state.seed, index))
            else:
                transcript = Transcript(text, lang, MOCK_IDENTITY)
            ref = normalize(text)
            if ref:
                state.wer_pairs.append((ref, list(transcript.tokens)))
        elif asr.kind == "mock":
            raise AsrUnavailableError("the mock recognizer needs reference text, not audio")
        else:
            transcript = transcribe(audio_ref, lang, asr)
        state.transcripts.append(transcript)
        return transcript

    def utterance(self, call_id: str, text: Optional[str] = None, audio_ref: Optional[str] = None) -> list:
        """Handle one caller utterance and return the actions to play out.

        In Listening the utterance is classified; in Confirming it is read as
        a yes/no reply. Recognizer or classifier failures escalate the call.
        """
        state = self._state(call_id)
        with state.lock:
            session = state.session
            if session.terminal:
                raise TerminalSessionError(f"call {call_id!r} already ended in {session.phase.value}")
            if session.phase not in (Phase.LISTENING, Phase.CONFIRMING):
                raise ProtocolViolationError(f"utterance not expected in phase {session.phase.value}")
            index = state.utterances
            state.utterances += 1
            try:
                transcript = self._transcribe(state, text, audio_ref, index)
            except BackendError as exc:
                return self._apply(state, BackendFailure(f"asr: {exc}"))
            except EmptyUtteranceError:
                transcript = Transcript("", session.language)

            if session.phase is Phase.CONFIRMING:
                verdict = parse_confirmation(transcript, self.config.lexicon)
                return self._apply(state, _CONFIRM_EVENTS[verdict])

            if transcript.is_empty:
                return self._apply(state, BackendFailure("empty utterance"))
            actions = self._apply(state, UtteranceReceived(transcript))
            cfg = self.config
            try:
                result = classify(transcript, cfg.classifier, cfg.store, cfg.taxonomy,
                                  k=cfg.rag_k, template=cfg.prompt_template)
            except BackendError as exc:
                return actions + self._apply(state, BackendFailure(f"classifier: {exc}"))
            return actions + self._apply(state, ClassificationReady(result))
