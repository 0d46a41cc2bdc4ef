"""Speech-to-text adapter boundary and the error-injecting mock backend.

The mock never sees audio. It takes the reference text a scenario supplies
and corrupts it at a configured word-error rate, which lets the rest of the
pipeline be exercised under the recognition-quality regimes of interest
(roughly 50% for an unadapted recognizer, 16% after adaptation).
"""

from __future__ import annotations

import hashlib
import random
import unicodedata
from dataclasses import dataclass, field
from typing import Optional, Sequence

from ._http import HttpFailure, post_json
from .errors import AsrUnavailableError, ConfigError, EmptyUtteranceError

EDIT_KINDS = ("substitute", "delete", "insert")
GARBAGE_SPACE = 1_000_000


def normalize(raw_text: str) -> list[str]:
    """Case-fold, strip punctuation and split on whitespace.

    Letters outside the basic Cyrillic block (ә, ғ, қ, ң, ө, ұ, ү, һ, і) are
    ordinary letters to ``str.casefold`` and survive untouched.

    >>> normalize("Сәлем,  ӘЛЕМ!")
    ['сәлем', 'әлем']
    """
    folded = unicodedata.normalize("NFC", raw_text).casefold()
    kept = "".join(ch for ch in folded if not unicodedata.category(ch).startswith("P"))
    # dropping punctuation can bring a base letter and a combining mark together
    return unicodedata.normalize("NFC", kept).split()


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from an arbitrary tuple of ints/strings."""
    text = "\x1f".join(str(p) for p in parts)
    return int.from_bytes(hashlib.blake2b(text.encode("utf-8"), digest_size=8).digest(), "big")


def garbage_token(k: int) -> str:
    return f"⟨err{k}⟩"


def inject_errors(
    tokens: Sequence[str],
    rate: float,
    seed: int,
    kinds: Sequence[str] = EDIT_KINDS,
) -> list[str]:
    """Corrupt ``tokens`` so that about ``rate`` of them carry one word error.

    Each token independently receives, with probability ``rate``, one edit
    drawn uniformly from ``kinds``: replaced by a garbage marker, dropped, or
    accompanied by an inserted garbage marker. Three draws are consumed per
    token whatever the outcome, so for a fixed seed the set of corrupted
    positions at a lower rate is a subset of the set at a higher rate.

    An inserted marker normally follows its token. If a deletion sits in the
    gap after it but not in the gap before, the marker goes in front instead:
    a minimal alignment would otherwise pair the marker with the deleted word
    as one substitution and the measured WER would fall short of ``rate``.
    """
    if not 0.0 <= rate <= 1.0:
        raise ConfigError(f"error rate must lie in [0, 1], got {rate!r}", field="error_rate")
    kinds = tuple(kinds)
    unknown = set(kinds) - set(EDIT_KINDS)
    if not kinds or unknown:
        raise ConfigError(f"unknown edit kinds {sorted(unknown)}", field="kinds")
    rng = random.Random(seed)
    plan = []
    for _ in tokens:
        u = rng.random()
        kind = kinds[int(rng.random() * len(kinds))]
        k = rng.randrange(GARBAGE_SPACE)
        plan.append((kind if u < rate else None, k))

    def deletion_in_gap(i, step):
        j = i + step
        while 0 <= j < len(plan) and plan[j][0] in ("substitute", "delete"):
            if plan[j][0] == "delete":
                return True
            j += step
        return False

    out = []
    for i, (tok, (kind, k)) in enumerate(zip(tokens, plan)):
        if kind is None:
            out.append(tok)
        elif kind == "substitute":
            out.append(garbage_token(k))
        elif kind == "insert":
            if deletion_in_gap(i, 1) and not deletion_in_gap(i, -1):
                out += [garbage_token(k), tok]
            else:
                out += [tok, garbage_token(k)]
        # delete: emit nothing
    return out


@dataclass(frozen=True)
class TranscriptSource:
    kind: str  # "remote" | "mock_identity" | "mock_noisy"
    rate: Optional[float] = None
    seed: Optional[int] = None


REMOTE = TranscriptSource("remote")
MOCK_IDENTITY = TranscriptSource("mock_identity")


@dataclass(frozen=True)
class Transcript:
    """Recognizer output; ``tokens`` is always ``normalize(raw_text)``."""

    raw_text: str
    language: str = "kk"
    source: TranscriptSource = MOCK_IDENTITY
    tokens: tuple = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(normalize(self.raw_text)))

    @property
    def is_empty(self) -> bool:
        return not self.tokens


@dataclass(frozen=True)
class AsrBackendConfig:
    kind: str = "mock"
    endpoint: Optional[str] = None
    error_rate: Optional[float] = 0.0
    seed: Optional[int] = 0
    timeout: float = 5.0

    def __post_init__(self):
        if self.kind == "remote":
            if not self.endpoint:
                raise ConfigError("remote ASR backend requires an endpoint", field="asr.endpoint")
        elif self.kind == "mock":
            if self.error_rate is None or self.seed is None:
                raise ConfigError("mock ASR backend requires error_rate and seed", field="asr")
            if not 0.0 <= self.error_rate <= 1.0:
                raise ConfigError(f"error_rate {self.error_rate!r} outside [0, 1]", field="asr.error_rate")
            if not 0 <= self.seed < 2**64:
                raise ConfigError("seed must be a 64-bit unsigned integer", field="asr.seed")
        else:
            raise ConfigError(f"unknown ASR backend kind {self.kind!r}", field="asr.kind")


def transcribe(
    audio_ref: Optional[str],
    language: str,
    backend: AsrBackendConfig,
    *,
    reference: Optional[str] = None,
    seed: Optional[int] = None,
) -> Transcript:
    """Turn one caller utterance into a :class:`Transcript`.

    For the mock backend ``reference`` carries what the caller said and
    ``seed`` (typically derived from the call and utterance index) is mixed
    with the backend seed so each utterance gets its own noise stream.
    """
    if backend.kind == "mock":
        if reference is None or not reference.strip():
            raise EmptyUtteranceError("mock ASR needs a non-empty reference text")
        if backend.error_rate == 0:
            return Transcript(reference, language, MOCK_IDENTITY)
        eff_seed = backend.seed if seed is None else derive_seed(backend.seed, seed)
        noisy = inject_errors(normalize(reference), backend.error_rate, eff_seed)
        return Transcript(" ".join(noisy), language,
                          TranscriptSource("mock_noisy", backend.error_rate, eff_seed))

    if not audio_ref:
        raise EmptyUtteranceError("no audio reference supplied")
    try:
        reply = post_json(backend.endpoint, "/v1/transcribe",
                          {"audio_ref": audio_ref, "language": language},
                          timeout=backend.timeout)
    except HttpFailure as exc:
        raise AsrUnavailableError(str(exc)) from exc
    text = reply.get("text")
    if not isinstance(text, str):
        raise AsrUnavailableError("ASR reply lacks a string 'text' field")
    return Transcript(text, language, REMOTE)
