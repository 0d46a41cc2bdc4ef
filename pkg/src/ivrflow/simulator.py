"""Scripted callers: drive the engine through scenarios and aggregate batches."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence

from .asr import derive_seed, normalize
from .engine import Engine
from .errors import ConfigError, InputError, IvrError, ScenarioUnderrunError
from .metrics import SessionOutcome, build_report, corpus_wer
from .session import Phase, action_to_dict

STEP_KINDS = ("say", "confirm", "hangup")
TERMINALS = ("Routed", "Escalated", "Abandoned")


@dataclass(frozen=True)
class Step:
    kind: str
    text: str = ""


@dataclass(frozen=True)
class Scenario:
    scenario_id: str
    language: str
    steps: tuple
    expected_class: Optional[str] = None
    expected_terminal: Optional[str] = None

    def __post_init__(self):
        if not any(s.kind == "say" for s in self.steps):
            raise ConfigError("scenario needs at least one utterance", field=f"scenario {self.scenario_id}")
        if self.expected_terminal is not None and self.expected_terminal not in TERMINALS:
            raise ConfigError(f"bad expected_terminal {self.expected_terminal!r}",
                              field=f"scenario {self.scenario_id}")
        if self.expected_terminal == "Routed" and self.expected_class is None:
            raise ConfigError("a Routed scenario must name its expected_class",
                              field=f"scenario {self.scenario_id}")

    @classmethod
    def from_dict(cls, obj) -> "Scenario":
        steps = []
        for raw in obj["steps"]:
            (kind, value), = raw.items()
            if kind not in STEP_KINDS:
                raise ConfigError(f"unknown step kind {kind!r}", field=f"scenario {obj.get('scenario_id')}")
            steps.append(Step(kind, "" if kind == "hangup" else value))
        return cls(obj["scenario_id"], obj.get("language", "kk"), tuple(steps),
                   obj.get("expected_class"), obj.get("expected_terminal"))

    def to_dict(self) -> dict:
        steps = [{s.kind: True if s.kind == "hangup" else s.text} for s in self.steps]
        return {"scenario_id": self.scenario_id, "language": self.language, "steps": steps,
                "expected_class": self.expected_class, "expected_terminal": self.expected_terminal}


def load_scenarios(path) -> list[Scenario]:
    """Read scenarios from a ``.json``/``.jsonl`` file or a directory of them."""
    path = Path(path)
    files = sorted(p for p in path.iterdir() if p.suffix in (".json", ".jsonl")) if path.is_dir() else [path]
    out = []
    for f in files:
        try:
            text = f.read_text(encoding="utf-8")
            if f.suffix == ".jsonl":
                objs = [json.loads(line) for line in text.splitlines() if line.strip()]
            else:
                data = json.loads(text)
                objs = data if isinstance(data, list) else [data]
            out.extend(Scenario.from_dict(o) for o in objs)
        except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"cannot load scenarios: {exc}", f, "scenario") from exc
    if not out:
        raise ConfigError("no scenarios found", path, "scenario")
    return sorted(out, key=lambda s: s.scenario_id)


@dataclass
class SessionReport:
    scenario_id: str
    call_id: str
    seed: int
    error_rate: float
    phase: str
    predicted_class: Optional[str]
    confidence: Optional[float]
    expected_class: Optional[str]
    expected_terminal: Optional[str]
    escalation_reason: Optional[str]
    transitions: list = field(default_factory=list)
    actions: list = field(default_factory=list)
    wer_pairs: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def outcome(self) -> SessionOutcome:
        return SessionOutcome(f"{self.scenario_id}/{self.seed}", self.phase, self.predicted_class,
                              self.expected_class, self.expected_terminal)


def run_scenario(scenario: Scenario, config, seed: int = 0, call_log=None) -> SessionReport:
    """Play one scripted caller against a fresh engine until the call ends.

    When the system replays its read-back after an unclear reply, the caller
    repeats the previous reply rather than consuming a new step.
    """
    engine = Engine(config, call_log)
    call_id = f"{scenario.scenario_id}#{seed}"
    actions = list(engine.start_call(call_id, scenario.language, seed=derive_seed(seed, scenario.scenario_id)))
    steps = iter(scenario.steps)
    repeat: Optional[Step] = None
    while not engine.session(call_id).terminal:
        step = repeat if repeat is not None else next(steps, None)
        repeat = None
        if step is None:
            raise ScenarioUnderrunError(
                f"scenario {scenario.scenario_id} ran out of steps in phase {engine.session(call_id).phase.value}")
        phase = engine.session(call_id).phase
        if step.kind == "hangup":
            actions += engine.hangup(call_id)
            continue
        actions += engine.utterance(call_id, text=step.text)
        if phase is Phase.CONFIRMING and engine.session(call_id).phase is Phase.CONFIRMING:
            repeat = step

    state = engine.call_state(call_id)
    session = state.session
    result = session.last_classification
    return SessionReport(
        scenario_id=scenario.scenario_id,
        call_id=call_id,
        seed=seed,
        error_rate=config.asr.error_rate if config.asr.kind == "mock" else 0.0,
        phase=session.phase.value,
        predicted_class=result.class_id if result else None,
        confidence=result.confidence if result else None,
        expected_class=scenario.expected_class,
        expected_terminal=scenario.expected_terminal,
        escalation_reason=session.escalation_reason,
        transitions=[[e.phase_before.value, type(e.event).__name__, e.phase_after.value]
                     for e in session.event_log],
        actions=[action_to_dict(a) for a in actions],
        wer_pairs=[[list(r), list(h)] for r, h in state.wer_pairs],
    )


def run_batch(
    scenarios: Sequence[Scenario],
    config,
    seeds: Iterable[int] = (0,),
    error_rates: Optional[Iterable[float]] = None,
    call_log=None,
) -> dict:
    """Run every scenario x seed at each error rate; one report per rate.

    Runs are ordered by ``(scenario_id, seed)`` so the reports do not depend on
    input order. A run that raises is counted in ``failed_runs``.
    """
    seeds = list(seeds)
    rates = list(error_rates) if error_rates is not None else [config.asr.error_rate]
    ordered = sorted(scenarios, key=lambda s: s.scenario_id)
    reports = {}
    for rate in rates:
        cfg = config.with_error_rate(rate)
        outcomes, pairs = [], []
        for sc in ordered:
            for seed in seeds:
                try:
                    rep = run_scenario(sc, cfg, seed, call_log)
                except IvrError as exc:
                    outcomes.append(SessionOutcome(f"{sc.scenario_id}/{seed}", "Failed",
                                                   expected_class=sc.expected_class,
                                                   expected_terminal=sc.expected_terminal,
                                                   failed=True, error=str(exc)))
                    continue
                outcomes.append(rep.outcome())
                pairs.extend(rep.wer_pairs)
        reports[rate] = build_report(outcomes, pairs, error_rate=rate)
    return reports


def batch_to_json(reports: dict, seeds, scenario_count: int) -> str:
    doc = {
        "scenarios": scenario_count,
        "seeds": list(seeds),
        "reports": [reports[r].to_dict() for r in sorted(reports)],
    }
    return json.dumps(doc, ensure_ascii=False, indent=2) + "\n"


def _read_lines(path) -> list[str]:
    try:
        return Path(path).read_text(encoding="utf-8").splitlines()
    except (OSError, UnicodeDecodeError) as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc


def eval_asr(ref_file, hyp_file=None) -> dict:
    """Pooled WER for line-aligned reference/hypothesis files.

    With a single argument the file is read as TSV, ``ref<TAB>hyp`` per line.
    """
    if hyp_file is None:
        refs, hyps = [], []
        for n, line in enumerate(_read_lines(ref_file), 1):
            if "\t" not in line:
                raise InputError(f"line {n} of {ref_file} has no TAB separator")
            r, h = line.split("\t", 1)
            refs.append(r)
            hyps.append(h)
    else:
        refs, hyps = _read_lines(ref_file), _read_lines(hyp_file)
        if len(refs) != len(hyps):
            raise InputError(f"line count mismatch: {len(refs)} reference vs {len(hyps)} hypothesis lines")
    res = corpus_wer([(normalize(r), normalize(h)) for r, h in zip(refs, hyps)])
    return {
        "wer": res.wer,
        "mean_utterance_wer": res.mean_utterance_wer,
        "utterances": res.utterances,
        "substitutions": res.counts.substitutions,
        "deletions": res.counts.deletions,
        "insertions": res.counts.insertions,
        "ref_words": res.counts.ref_len,
    }
