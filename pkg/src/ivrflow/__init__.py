"""Call-center IVR engine: speech -> text -> intent -> spoken read-back ->
routing, with operator escalation on rejection or low confidence."""

from .asr import AsrBackendConfig, Transcript, inject_errors, normalize, transcribe
from .config import CallLog, EngineConfig, load_config
from .engine import Engine
from .metrics import EditCounts, EvalReport, build_report, corpus_wer, utterance_wer, word_edit_distance
from .session import CallSession, Phase, RoutingTable, advance, route

__version__ = "0.1.0"

__all__ = [
    "AsrBackendConfig",
    "CallLog",
    "CallSession",
    "EditCounts",
    "Engine",
    "EngineConfig",
    "EvalReport",
    "Phase",
    "RoutingTable",
    "Transcript",
    "advance",
    "build_report",
    "corpus_wer",
    "inject_errors",
    "load_config",
    "normalize",
    "route",
    "transcribe",
    "utterance_wer",
    "word_edit_distance",
]
