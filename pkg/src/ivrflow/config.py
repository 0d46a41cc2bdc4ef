"""Engine configuration loading/validation and the JSONL call log."""

from __future__ import annotations

import json
import os
import sys
import threading
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from importlib import resources
from pathlib import Path
from types import MappingProxyType
from typing import Mapping, Optional

from .asr import AsrBackendConfig
from .errors import ConfigError
from .nlu.classify import ClassifierBackendConfig
from .nlu.confirm import ConfirmationLexicon
from .nlu.prompt import DEFAULT_TEMPLATE, check_template
from .nlu.retrieval import KnowledgeStore
from .nlu.taxonomy import IntentTaxonomy
from .session import RoutingTable
from .tts import TtsBackendConfig

DEFAULT_PORT = 8573
PROMPT_KEYS = ("greeting", "confirm", "reask")

DEFAULT_PROMPTS = {
    "kk": {
        "greeting": "Сәлеметсіз бе! Мәселеңізді қысқаша айтып беріңізші.",
        "confirm": "Сіздің мәселеңіз: {class_name}. Дұрыс па?",
        "reask": "Кешіріңіз. Мәселеңізді басқаша түсіндіріп беріңізші.",
    },
    "ru": {
        "greeting": "Здравствуйте! Кратко опишите, пожалуйста, ваш вопрос.",
        "confirm": "Ваш вопрос: {class_name}. Верно?",
        "reask": "Извините. Опишите, пожалуйста, вопрос другими словами.",
    },
}

_KNOWN_KEYS = {
    "confidence_threshold", "max_confirm_attempts", "rag_k", "seed", "default_language",
    "bind", "call_log", "asr", "classifier", "tts", "taxonomy", "routing",
    "knowledge_base", "prompt_template", "prompts", "lexicon",
}


def default_config_path() -> Path:
    return Path(str(resources.files("ivrflow") / "data" / "default_config.json"))


@dataclass(frozen=True)
class EngineConfig:
    taxonomy: IntentTaxonomy
    routing: RoutingTable
    store: KnowledgeStore = field(default_factory=KnowledgeStore)
    confidence_threshold: float = 0.7
    max_confirm_attempts: int = 2
    rag_k: int = 3
    seed: int = 0
    asr: AsrBackendConfig = field(default_factory=AsrBackendConfig)
    classifier: ClassifierBackendConfig = field(default_factory=ClassifierBackendConfig)
    tts: TtsBackendConfig = field(default_factory=TtsBackendConfig)
    prompt_template: str = DEFAULT_TEMPLATE
    prompts: Mapping[str, Mapping[str, str]] = field(default_factory=lambda: DEFAULT_PROMPTS)
    lexicon: ConfirmationLexicon = field(default_factory=ConfirmationLexicon.default)
    default_language: str = "kk"
    bind: str = f"127.0.0.1:{DEFAULT_PORT}"
    call_log: Optional[str] = None
    source: Optional[str] = None

    def __post_init__(self):
        src = self.source
        if not isinstance(self.confidence_threshold, (int, float)) or not 0.0 <= self.confidence_threshold <= 1.0:
            raise ConfigError(f"must lie in [0, 1], got {self.confidence_threshold!r}", src, "confidence_threshold")
        if not isinstance(self.max_confirm_attempts, int) or self.max_confirm_attempts < 1:
            raise ConfigError("must be an integer >= 1", src, "max_confirm_attempts")
        if not isinstance(self.rag_k, int) or self.rag_k < 1:
            raise ConfigError("must be an integer >= 1", src, "rag_k")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("must be a 64-bit unsigned integer", src, "seed")
        check_template(self.prompt_template, src)
        prompts = {}
        for lang, entry in self.prompts.items():
            missing = [k for k in PROMPT_KEYS if not entry.get(k)]
            if missing:
                raise ConfigError(f"missing prompt(s) {missing}", src, f"prompts.{lang}")
            if "{class_name}" not in entry["confirm"]:
                raise ConfigError("confirmation template lacks {class_name}", src, f"prompts.{lang}.confirm")
            prompts[lang] = MappingProxyType(dict(entry))
        if self.default_language not in prompts:
            raise ConfigError(f"no prompts for default language {self.default_language!r}", src, "default_language")
        object.__setattr__(self, "prompts", MappingProxyType(prompts))
        for c in self.taxonomy:
            if c.queue_id not in self.routing.queues:
                raise ConfigError(f"class {c.class_id!r} routes to queue {c.queue_id!r} "
                                  "absent from the routing table", src, f"taxonomy.{c.class_id}.queue_id")
        for class_id in self.routing.routes:
            if class_id not in self.taxonomy:
                raise ConfigError(f"routing entry for unknown class {class_id!r}", src, "routing")
        for d in self.store.docs:
            if d.class_hint is not None and d.class_hint not in self.taxonomy:
                raise ConfigError(f"doc {d.doc_id!r} hints unknown class {d.class_hint!r}", src, "knowledge_base")

    def prompt(self, language: str, key: str) -> str:
        entry = self.prompts.get(language) or self.prompts[self.default_language]
        return entry[key]

    def with_error_rate(self, rate: float) -> "EngineConfig":
        return replace(self, asr=replace(self.asr, error_rate=rate))


def _read_json(path: Path, field_name: str):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError("file not found", path, field_name) from exc
    except (OSError, UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot parse: {exc}", path, field_name) from exc


def _load_routing(path: Path, taxonomy) -> RoutingTable:
    data = _read_json(path, "routing")
    if not isinstance(data, dict) or not isinstance(data.get("queues"), (dict, list)):
        raise ConfigError("routing file needs a 'queues' object or list", path, "routing.queues")
    queues = frozenset(data["queues"])
    operator = data.get("operator_queue", "OPERATOR")
    if not isinstance(operator, str) or not operator:
        raise ConfigError("operator_queue must be a non-empty string", path, "routing.operator_queue")
    for c in taxonomy:
        if c.queue_id not in queues:
            raise ConfigError(f"class {c.class_id!r} routes to queue {c.queue_id!r} "
                              "absent from the routing table", path, f"queues ({c.class_id})")
    return RoutingTable.from_taxonomy(taxonomy, queues | {operator}, operator)


def _backend(cls, data, path, name):
    if data is None:
        return cls()
    if not isinstance(data, dict):
        raise ConfigError("backend config must be an object", path, name)
    try:
        return cls(**data)
    except TypeError as exc:
        raise ConfigError(f"bad backend fields: {exc}", path, name) from exc
    except ConfigError as exc:
        raise ConfigError(str(exc), path, exc.field or name) from exc


def load_config(path=None) -> EngineConfig:
    """Load and fully validate an engine configuration file.

    ``path`` defaults to ``$IVR_CONFIG`` and then to the configuration shipped
    with the package. Referenced files are resolved relative to the config
    file. Every problem surfaces as :class:`ConfigError` naming the file and
    the offending field.
    """
    if path is None:
        path = os.environ.get("IVR_CONFIG") or default_config_path()
    path = Path(path)
    data = _read_json(path, "config")
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object", path, "config")
    unknown = sorted(set(data) - _KNOWN_KEYS)
    if unknown:
        raise ConfigError(f"unknown key(s) {unknown}", path, unknown[0])
    base = path.parent

    def ref(key, required=True):
        value = data.get(key)
        if value is None:
            if required:
                raise ConfigError("missing required file reference", path, key)
            return None
        if not isinstance(value, str):
            raise ConfigError("must be a file path string", path, key)
        p = base / value
        if not p.is_file():
            raise ConfigError(f"referenced file {str(p)!r} does not exist", path, key)
        return p

    taxonomy = IntentTaxonomy.load(ref("taxonomy"))
    routing = _load_routing(ref("routing"), taxonomy)
    kb = ref("knowledge_base", required=False)
    store = KnowledgeStore.load(kb) if kb else KnowledgeStore()
    tpl_path = ref("prompt_template", required=False)
    template = DEFAULT_TEMPLATE
    if tpl_path:
        template = check_template(tpl_path.read_text(encoding="utf-8"), tpl_path)
    prompts_path = ref("prompts", required=False)
    prompts = _read_json(prompts_path, "prompts") if prompts_path else DEFAULT_PROMPTS
    if not isinstance(prompts, dict):
        raise ConfigError("prompts file must be an object keyed by language", prompts_path, "prompts")
    lex_path = ref("lexicon", required=False)
    lexicon = ConfirmationLexicon.load(lex_path) if lex_path else ConfirmationLexicon.default()

    call_log = data.get("call_log")
    if call_log is not None:
        call_log = str(base / call_log)

    scalars = {k: data[k] for k in ("confidence_threshold", "max_confirm_attempts", "rag_k",
                                    "seed", "default_language", "bind") if k in data}
    try:
        return EngineConfig(
            taxonomy=taxonomy,
            routing=routing,
            store=store,
            asr=_backend(AsrBackendConfig, data.get("asr"), path, "asr"),
            classifier=_backend(ClassifierBackendConfig, data.get("classifier"), path, "classifier"),
            tts=_backend(TtsBackendConfig, data.get("tts"), path, "tts"),
            prompt_template=template,
            prompts=prompts,
            lexicon=lexicon,
            call_log=call_log,
            source=str(path),
            **scalars,
        )
    except ConfigError as exc:
        if exc.path is None:
            raise ConfigError(str(exc), path, exc.field) from exc
        raise


def rfc3339_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="milliseconds").replace("+00:00", "Z")


class CallLog:
    """Append-only JSONL writer shared by every session.

    Each record goes out as one ``os.write`` on an ``O_APPEND`` descriptor
    under a lock, so concurrent writers never interleave and a crash can only
    truncate the last line. Write failures are reported on stderr and
    otherwise ignored.
    """

    def __init__(self, path, timestamps: bool = True):
        self.path = Path(path)
        self.timestamps = timestamps
        self._lock = threading.Lock()
        self._fd = None
        try:
            self._fd = os.open(self.path, os.O_WRONLY | os.O_APPEND | os.O_CREAT, 0o644)
        except OSError as exc:
            print(f"call log unavailable ({self.path}): {exc}", file=sys.stderr)

    def append(self, record: dict) -> None:
        if self.timestamps and record.get("ts") is None:
            record = {"ts": rfc3339_now(), **{k: v for k, v in record.items() if k != "ts"}}
        data = (json.dumps(record, ensure_ascii=False) + "\n").encode("utf-8")
        with self._lock:
            if self._fd is None:
                return
            try:
                view = memoryview(data)
                while view:
                    n = os.write(self._fd, view)
                    view = view[n:]
            except OSError as exc:
                print(f"call log write failed ({self.path}): {exc}", file=sys.stderr)

    def close(self) -> None:
        with self._lock:
            if self._fd is not None:
                try:
                    os.fsync(self._fd)
                except OSError:
                    pass
                os.close(self._fd)
                self._fd = None

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()
