"""Text-to-speech adapter boundary and confirmation prompt rendering."""

from __future__ import annotations

import hashlib
import logging
from dataclasses import dataclass
from typing import Optional

from ._http import HttpFailure, post_json
from .errors import ConfigError, TtsUnavailableError

log = logging.getLogger(__name__)

MOCK_AUDIO_PREFIX = "mock-audio:"


@dataclass(frozen=True)
class SynthesisRequest:
    text: str
    language: str = "kk"
    voice: Optional[str] = None

    def __post_init__(self):
        if not self.text:
            raise ConfigError("synthesis text must be non-empty", field="text")


@dataclass(frozen=True)
class TtsBackendConfig:
    kind: str = "mock"
    endpoint: Optional[str] = None
    timeout: float = 5.0
    voice: Optional[str] = None

    def __post_init__(self):
        if self.kind not in ("mock", "remote"):
            raise ConfigError(f"unknown TTS kind {self.kind!r}", field="tts.kind")
        if self.kind == "remote" and not self.endpoint:
            raise ConfigError("remote TTS requires an endpoint", field="tts.endpoint")


def render_confirmation(intent_class, language: str, template: str) -> str:
    """Read-back sentence for ``intent_class`` in ``language``.

    A class without a display name in that language is spoken by its raw
    ``class_id`` and a warning is logged.
    """
    name = intent_class.display_name.get(language)
    if not name:
        log.warning("class %s has no display name for %r; falling back to class_id",
                    intent_class.class_id, language)
        name = intent_class.class_id
    return template.replace("{class_name}", name)


def mock_audio_ref(text: str, language: str) -> str:
    digest = hashlib.sha256(f"{language}\x00{text}".encode("utf-8")).hexdigest()
    return MOCK_AUDIO_PREFIX + digest[:32]


def synthesize(request: SynthesisRequest, backend: TtsBackendConfig) -> str:
    if not request.text:
        raise ConfigError("synthesis text must be non-empty", field="text")
    if backend.kind == "mock":
        return mock_audio_ref(request.text, request.language)
    body = {"text": request.text, "language": request.language}
    voice = request.voice or backend.voice
    if voice is not None:
        body["voice"] = voice
    try:
        reply = post_json(backend.endpoint, "/v1/synthesize", body, timeout=backend.timeout)
    except HttpFailure as exc:
        raise TtsUnavailableError(str(exc)) from exc
    ref = reply.get("audio_ref")
    if not isinstance(ref, str) or not ref:
        raise TtsUnavailableError("TTS reply lacks an 'audio_ref' string")
    return ref
