"""NDJSON-over-TCP wire protocol between the telephony platform and the engine.

One JSON object per LF-terminated line, UTF-8. Inbound frames
(``session_start``, ``utterance``, ``hangup``) come from the telephony side;
outbound frames (``play``, ``listen``, ``transfer``, ``hangup``) go back. A
connection may carry any number of calls, told apart by ``call_id``.
An Asterisk AGI/ARI shim only has to translate between its own events and
these frames.
"""

from __future__ import annotations

import asyncio
import json
import logging
import os
import signal
from dataclasses import dataclass
from typing import Optional, Union

from .config import DEFAULT_PORT
from .errors import EncodeError, FrameError, IvrError, TtsUnavailableError
from .session import Listen, LogOnly, PlayPrompt, Transfer, TransferOperator
from .tts import SynthesisRequest, synthesize

log = logging.getLogger(__name__)

MAX_FRAME = 1 << 20


# --- inbound ----------------------------------------------------------------

@dataclass(frozen=True)
class SessionStartMsg:
    call_id: str
    language: str


@dataclass(frozen=True)
class UtteranceMsg:
    call_id: str
    text: Optional[str] = None
    audio_ref: Optional[str] = None


@dataclass(frozen=True)
class HangupMsg:
    call_id: str


# --- outbound ---------------------------------------------------------------

@dataclass(frozen=True)
class PlayCmd:
    call_id: str
    text: Optional[str] = None
    audio_ref: Optional[str] = None


@dataclass(frozen=True)
class ListenCmd:
    call_id: str


@dataclass(frozen=True)
class TransferCmd:
    call_id: str
    queue_id: str


@dataclass(frozen=True)
class HangupCmd:
    call_id: str


@dataclass(frozen=True)
class ErrorReply:
    reason: str
    call_id: Optional[str] = None


Message = Union[SessionStartMsg, UtteranceMsg, HangupMsg]
Command = Union[PlayCmd, ListenCmd, TransferCmd, HangupCmd]


def _one_of(obj, a, b):
    return (getattr(obj, a) is not None) != (getattr(obj, b) is not None)


def _fields(obj) -> dict:
    """Ordered wire fields: type, call_id, then payload."""
    if isinstance(obj, SessionStartMsg):
        return {"type": "session_start", "call_id": obj.call_id, "language": obj.language}
    if isinstance(obj, (UtteranceMsg, PlayCmd)):
        if not _one_of(obj, "text", "audio_ref"):
            raise EncodeError("exactly one of text/audio_ref is required")
        kind = "utterance" if isinstance(obj, UtteranceMsg) else "play"
        out = {"type": kind, "call_id": obj.call_id}
        if obj.text is not None:
            out["text"] = obj.text
        else:
            out["audio_ref"] = obj.audio_ref
        return out
    if isinstance(obj, (HangupMsg, HangupCmd)):
        return {"type": "hangup", "call_id": obj.call_id}
    if isinstance(obj, ListenCmd):
        return {"type": "listen", "call_id": obj.call_id}
    if isinstance(obj, TransferCmd):
        if not isinstance(obj.queue_id, str) or not obj.queue_id:
            raise EncodeError("transfer needs a queue_id")
        return {"type": "transfer", "call_id": obj.call_id, "queue_id": obj.queue_id}
    if isinstance(obj, ErrorReply):
        out = {"type": "error"}
        if obj.call_id is not None:
            out["call_id"] = obj.call_id
        out["reason"] = obj.reason
        return out
    raise EncodeError(f"cannot encode {type(obj).__name__}")


def encode(obj) -> bytes:
    """Serialize a message or command to one compact LF-terminated frame."""
    fields = _fields(obj)
    if "call_id" in fields and (not isinstance(fields["call_id"], str) or not fields["call_id"]):
        raise EncodeError("call_id must be a non-empty string")
    for key, value in fields.items():
        if not isinstance(value, str):
            raise EncodeError(f"field {key!r} must be a string")
    return json.dumps(fields, ensure_ascii=False, separators=(",", ":")).encode("utf-8") + b"\n"


def _parse(line: bytes) -> dict:
    if line.endswith(b"\n"):
        line = line[:-1]
    if line.endswith(b"\r"):
        line = line[:-1]
    try:
        obj = json.loads(line.decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError):
        raise FrameError("parse") from None
    if not isinstance(obj, dict):
        raise FrameError("parse")
    if "type" not in obj:
        raise FrameError("missing field", "type")
    return obj


def _get(obj, name, required=True):
    if name not in obj:
        if required:
            raise FrameError("missing field", name)
        return None
    value = obj[name]
    if not isinstance(value, str) or not value:
        raise FrameError("invalid field", name)
    return value


def _text_or_audio(obj):
    text = _get(obj, "text", required=False) if "text" in obj else None
    audio = _get(obj, "audio_ref", required=False) if "audio_ref" in obj else None
    if (text is None) == (audio is None):
        raise FrameError("missing field" if text is None else "invalid field", "text|audio_ref")
    return text, audio


def decode(line: bytes) -> Message:
    """Parse one inbound frame from the telephony side."""
    obj = _parse(line)
    kind = obj["type"]
    if kind == "session_start":
        return SessionStartMsg(_get(obj, "call_id"), _get(obj, "language"))
    if kind == "utterance":
        call_id = _get(obj, "call_id")
        text, audio = _text_or_audio(obj)
        return UtteranceMsg(call_id, text, audio)
    if kind == "hangup":
        return HangupMsg(_get(obj, "call_id"))
    raise FrameError("unknown type", str(kind))


def decode_command(line: bytes) -> Union[Command, ErrorReply]:
    """Parse one outbound frame; the telephony-side counterpart of :func:`decode`."""
    obj = _parse(line)
    kind = obj["type"]
    if kind == "error":
        call_id = _get(obj, "call_id", required=False)
        return ErrorReply(_get(obj, "reason"), call_id)
    call_id = _get(obj, "call_id")
    if kind == "play":
        text, audio = _text_or_audio(obj)
        return PlayCmd(call_id, text, audio)
    if kind == "listen":
        return ListenCmd(call_id)
    if kind == "transfer":
        return TransferCmd(call_id, _get(obj, "queue_id"))
    if kind == "hangup":
        return HangupCmd(call_id)
    raise FrameError("unknown type", str(kind))


# --- actions -> commands ----------------------------------------------------

def actions_to_commands(call_id: str, actions, config, language: str) -> list:
    """Render dialog actions as wire commands.

    Prompts are synthesized; if the TTS backend fails the prompt text is sent
    instead so the client can render it without blocking the dialog.
    """
    out = []
    for action in actions:
        if isinstance(action, PlayPrompt):
            try:
                ref = synthesize(SynthesisRequest(action.text, language), config.tts)
                out.append(PlayCmd(call_id, audio_ref=ref))
            except TtsUnavailableError as exc:
                log.warning("TTS failed for %s, sending text: %s", call_id, exc)
                out.append(PlayCmd(call_id, text=action.text))
        elif isinstance(action, Listen):
            out.append(ListenCmd(call_id))
        elif isinstance(action, Transfer):
            out += [TransferCmd(call_id, action.queue_id), HangupCmd(call_id)]
        elif isinstance(action, TransferOperator):
            out += [TransferCmd(call_id, config.routing.operator_queue), HangupCmd(call_id)]
        elif isinstance(action, LogOnly):
            pass
    return out


# --- server -----------------------------------------------------------------

def parse_address(address: str, default_port: int = DEFAULT_PORT) -> tuple[str, int]:
    host, sep, port = address.rpartition(":")
    if not sep:
        return address or "127.0.0.1", default_port
    return host or "127.0.0.1", int(port)


def resolve_bind(config) -> tuple[str, int]:
    return parse_address(os.environ.get("IVR_BIND_ADDR") or config.bind)


class BridgeServer:
    """Asyncio TCP front-end for an :class:`~ivrflow.engine.Engine`.

    Frames on one connection are handled strictly in arrival order; engine
    work runs in a worker thread so slow backends do not stall other
    connections. When a connection drops, every call it still owns is hung up.
    """

    def __init__(self, engine, host: str = "127.0.0.1", port: int = DEFAULT_PORT):
        self.engine = engine
        self.host = host
        self.port = port
        self._server = None

    async def start(self):
        self._server = await asyncio.start_server(self._handle, self.host, self.port, limit=MAX_FRAME)
        self.port = self._server.sockets[0].getsockname()[1]
        return self

    async def serve_forever(self):
        async with self._server:
            await self._server.serve_forever()

    async def close(self):
        if self._server is not None:
            self._server.close()
            await self._server.wait_closed()
        if self.engine.call_log is not None:
            self.engine.call_log.close()

    def _dispatch(self, msg, owned: set) -> list:
        engine = self.engine
        call_id = msg.call_id
        try:
            if isinstance(msg, SessionStartMsg):
                actions = engine.start_call(call_id, msg.language)
                owned.add(call_id)
            elif isinstance(msg, UtteranceMsg):
                if call_id not in owned:
                    return [ErrorReply("unknown call", call_id)]
                actions = engine.utterance(call_id, msg.text, msg.audio_ref)
            else:
                if call_id not in owned:
                    return [ErrorReply("unknown call", call_id)]
                actions = engine.hangup(call_id)
            session = engine.session(call_id)
        except IvrError as exc:
            return [ErrorReply(f"{type(exc).__name__}: {exc}", call_id)]
        cmds = actions_to_commands(call_id, actions, engine.config, session.language)
        if session.terminal:
            owned.discard(call_id)
            engine.forget(call_id)
        return cmds

    async def _handle(self, reader: asyncio.StreamReader, writer: asyncio.StreamWriter):
        owned: set = set()
        try:
            while True:
                try:
                    line = await reader.readline()
                except (asyncio.LimitOverrunError, ValueError):
                    writer.write(encode(ErrorReply("frame too long")))
                    break
                if not line:
                    break
                if not line.strip():
                    continue
                try:
                    msg = decode(line)
                except FrameError as exc:
                    replies = [ErrorReply(str(exc))]
                else:
                    replies = await asyncio.to_thread(self._dispatch, msg, owned)
                for r in replies:
                    writer.write(encode(r))
                await writer.drain()
        except (ConnectionError, asyncio.IncompleteReadError):
            pass
        finally:
            for call_id in sorted(owned):
                try:
                    self.engine.hangup(call_id)
                except IvrError:
                    pass
                self.engine.forget(call_id)
            writer.close()
            try:
                await writer.wait_closed()
            except (ConnectionError, OSError):
                pass


def serve(engine, address: Optional[str] = None) -> None:
    """Run the bridge until SIGINT/SIGTERM, then close the listener and call log."""
    host, port = parse_address(address) if address else resolve_bind(engine.config)

    async def main():
        server = await BridgeServer(engine, host, port).start()
        log.info("bridge listening on %s:%d", server.host, server.port)
        stop = asyncio.Event()
        loop = asyncio.get_running_loop()
        for sig in (signal.SIGINT, signal.SIGTERM):
            try:
                loop.add_signal_handler(sig, stop.set)
            except (NotImplementedError, RuntimeError):
                pass
        task = asyncio.create_task(server.serve_forever())
        await stop.wait()
        task.cancel()
        await server.close()

    asyncio.run(main())
