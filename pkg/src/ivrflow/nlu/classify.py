"""Intent classification: remote LLM contract and keyword-overlap mock."""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Optional

from .._http import BadReply, HttpFailure, post_json
from ..errors import (
    BackendContractError,
    ClassifierUnavailableError,
    ConfigError,
    EmptyUtteranceError,
)
from .prompt import DEFAULT_TEMPLATE, build_prompt
from .retrieval import retrieve


@dataclass(frozen=True)
class ClassificationResult:
    class_id: str
    confidence: float
    alternates: tuple = ()
    context_docs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "alternates", tuple((c, float(p)) for c, p in self.alternates))
        object.__setattr__(self, "context_docs", tuple(self.context_docs))
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence {self.confidence} outside [0, 1]")
        confs = [p for _, p in self.alternates]
        if any(p > self.confidence for p in confs):
            raise ValueError("an alternate outranks the chosen class")
        if confs != sorted(confs, reverse=True):
            raise ValueError("alternates must be sorted by descending confidence")

    def to_dict(self) -> dict:
        return {
            "class_id": self.class_id,
            "confidence": self.confidence,
            "alternates": [list(a) for a in self.alternates],
            "context_docs": list(self.context_docs),
        }


@dataclass(frozen=True)
class ClassifierBackendConfig:
    kind: str = "mock"
    endpoint: Optional[str] = None
    timeout: float = 10.0
    max_connections: int = 4

    def __post_init__(self):
        if self.kind not in ("mock", "remote"):
            raise ConfigError(f"unknown classifier kind {self.kind!r}", field="classifier.kind")
        if self.kind == "remote" and not self.endpoint:
            raise ConfigError("remote classifier requires an endpoint", field="classifier.endpoint")
        if self.max_connections < 1:
            raise ConfigError("max_connections must be >= 1", field="classifier.max_connections")


_limits: dict = {}
_limits_lock = threading.Lock()


def _connection_slot(backend: ClassifierBackendConfig) -> threading.BoundedSemaphore:
    key = (backend.endpoint, backend.max_connections)
    with _limits_lock:
        if key not in _limits:
            _limits[key] = threading.BoundedSemaphore(backend.max_connections)
        return _limits[key]


def keyword_scores(tokens, taxonomy) -> list[tuple[str, float]]:
    """Fraction of each class's keywords present in ``tokens``, best first."""
    present = set(tokens)
    scored = []
    for c in taxonomy:
        kw = set(c.keywords)
        scored.append((c.class_id, len(present & kw) / len(kw)))
    scored.sort(key=lambda cs: (-cs[1], cs[0]))
    return scored


def mock_classify(tokens, taxonomy, context_docs=()) -> ClassificationResult:
    """Keyword-overlap classifier.

    Confidence is the best score divided by the sum of the top three, so an
    utterance that matches one class and nothing else gets 1.0 and one that
    matches nothing gets 0.0.
    """
    top = keyword_scores(tokens, taxonomy)[:3]
    total = sum(s for _, s in top)
    best_id, best = top[0]
    if total == 0:
        return ClassificationResult(best_id, 0.0, (), context_docs)
    alternates = tuple((cid, s / total) for cid, s in top[1:] if s > 0)
    return ClassificationResult(best_id, best / total, alternates, context_docs)


def _parse_reply(reply, taxonomy, context_docs) -> ClassificationResult:
    class_id = reply.get("class_id")
    conf = reply.get("confidence")
    alternates = reply.get("alternates", [])
    if not isinstance(class_id, str) or class_id not in taxonomy:
        raise BackendContractError(f"classifier returned unknown class_id {class_id!r}")
    if not _is_prob(conf):
        raise BackendContractError(f"classifier confidence {conf!r} is not a number in [0, 1]")
    if not isinstance(alternates, list):
        raise BackendContractError("alternates must be a list")
    parsed = []
    for alt in alternates:
        if not (isinstance(alt, list) and len(alt) == 2 and isinstance(alt[0], str) and _is_prob(alt[1])):
            raise BackendContractError(f"malformed alternate {alt!r}")
        if alt[0] not in taxonomy:
            raise BackendContractError(f"alternate names unknown class_id {alt[0]!r}")
        if alt[1] > conf:
            raise BackendContractError(f"alternate {alt[0]!r} outranks the chosen class")
        parsed.append((alt[0], float(alt[1])))
    parsed.sort(key=lambda a: (-a[1], a[0]))
    return ClassificationResult(class_id, float(conf), tuple(parsed), context_docs)


def _is_prob(x) -> bool:
    return (isinstance(x, (int, float)) and not isinstance(x, bool)
            and math.isfinite(x) and 0.0 <= x <= 1.0)


def classify(
    transcript,
    backend: ClassifierBackendConfig,
    store,
    taxonomy,
    *,
    k: int = 3,
    template: str = DEFAULT_TEMPLATE,
) -> ClassificationResult:
    """Retrieve context, build the prompt and ask the backend for an intent.

    The mock ignores the prompt but still records which documents were
    retrieved, so both paths report the same ``context_docs``.
    """
    if transcript.is_empty:
        raise EmptyUtteranceError("cannot classify an empty transcript")
    hits = retrieve(transcript.tokens, store, k) if store is not None else []
    context_docs = tuple(doc_id for doc_id, _ in hits)
    if backend.kind == "mock":
        return mock_classify(transcript.tokens, taxonomy, context_docs)

    prompt = build_prompt(transcript, [store[d] for d in context_docs], taxonomy, template)
    with _connection_slot(backend):
        try:
            reply = post_json(backend.endpoint, "/v1/classify", {"prompt": prompt},
                              timeout=backend.timeout)
        except BadReply as exc:
            raise BackendContractError(str(exc)) from exc
        except HttpFailure as exc:
            raise ClassifierUnavailableError(str(exc)) from exc
    return _parse_reply(reply, taxonomy, context_docs)
