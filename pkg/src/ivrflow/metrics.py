"""Word error rate and batch reporting."""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import EmptyReferenceError, IncompleteBatchError

TERMINAL_PHASES = ("Routed", "Escalated", "Abandoned")


@dataclass(frozen=True)
class EditCounts:
    substitutions: int = 0
    deletions: int = 0
    insertions: int = 0
    ref_len: int = 0

    @property
    def errors(self) -> int:
        return self.substitutions + self.deletions + self.insertions

    def __add__(self, other: "EditCounts") -> "EditCounts":
        return EditCounts(
            self.substitutions + other.substitutions,
            self.deletions + other.deletions,
            self.insertions + other.insertions,
            self.ref_len + other.ref_len,
        )


def word_edit_distance(ref: Sequence[str], hyp: Sequence[str]) -> EditCounts:
    """Minimal unit-cost alignment of ``hyp`` against ``ref``.

    Among alignments of equal cost the backtrace takes the diagonal
    (match or substitution) first, then deletion, then insertion, which pins
    down the S/D/I split.
    """
    n, m = len(ref), len(hyp)
    dist = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dist[i][0] = i
    for j in range(1, m + 1):
        dist[0][j] = j
    for i in range(1, n + 1):
        row, prev = dist[i], dist[i - 1]
        r = ref[i - 1]
        for j in range(1, m + 1):
            diag = prev[j - 1] + (r != hyp[j - 1])
            row[j] = min(diag, prev[j] + 1, row[j - 1] + 1)

    s = d = ins = 0
    i, j = n, m
    while i > 0 or j > 0:
        cur = dist[i][j]
        if i > 0 and j > 0 and cur == dist[i - 1][j - 1] + (ref[i - 1] != hyp[j - 1]):
            s += ref[i - 1] != hyp[j - 1]
            i, j = i - 1, j - 1
        elif i > 0 and cur == dist[i - 1][j] + 1:
            d += 1
            i -= 1
        else:
            ins += 1
            j -= 1
    return EditCounts(s, d, ins, n)


def utterance_wer(counts: EditCounts) -> float:
    if counts.ref_len == 0:
        if counts.insertions:
            raise EmptyReferenceError("WER is undefined for an empty reference with a non-empty hypothesis")
        return 0.0
    return counts.errors / counts.ref_len


@dataclass(frozen=True)
class CorpusWer:
    wer: float
    mean_utterance_wer: float
    counts: EditCounts
    utterances: int


def corpus_wer(pairs: Iterable[tuple[Sequence[str], Sequence[str]]]) -> CorpusWer:
    """Pooled WER: total errors over total reference words.

    The unweighted mean of per-utterance WERs is carried along for
    information only.
    """
    total = EditCounts()
    per_utt = []
    for idx, (ref, hyp) in enumerate(pairs):
        if not ref:
            raise EmptyReferenceError(f"pair {idx} has an empty reference", index=idx)
        c = word_edit_distance(ref, hyp)
        total = total + c
        per_utt.append(c.errors / c.ref_len)
    if not per_utt:
        return CorpusWer(0.0, 0.0, total, 0)
    return CorpusWer(total.errors / total.ref_len, sum(per_utt) / len(per_utt), total, len(per_utt))


@dataclass
class SessionOutcome:
    """What :func:`build_report` needs to know about one finished call."""

    run_id: str
    phase: str
    predicted_class: Optional[str] = None
    expected_class: Optional[str] = None
    expected_terminal: Optional[str] = None
    failed: bool = False
    error: Optional[str] = None


@dataclass
class EvalReport:
    corpus_wer: float
    mean_utterance_wer: float
    utterance_count: int
    word_errors: dict
    session_count: int
    failed_runs: int
    rate_routed: float
    rate_escalated: float
    rate_abandoned: float
    rate_routed_correct: float
    class_accuracy: Optional[float] = None
    per_class_accuracy: dict = field(default_factory=dict)
    terminal_match_rate: Optional[float] = None
    error_rate: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def build_report(
    outcomes: Sequence[SessionOutcome],
    wer_pairs: Sequence[tuple[Sequence[str], Sequence[str]]] = (),
    error_rate: Optional[float] = None,
) -> EvalReport:
    """Aggregate finished sessions and recognizer output into an :class:`EvalReport`.

    Failed runs are counted but excluded from the terminal-state rates.
    Class accuracy covers every completed run that has an expected class; a
    run that never produced a classification counts as wrong.
    """
    done = [o for o in outcomes if not o.failed]
    for o in done:
        if o.phase not in TERMINAL_PHASES:
            raise IncompleteBatchError(f"session {o.run_id} ended in non-terminal phase {o.phase}")
    phases = Counter(o.phase for o in done)
    n = len(done)

    def rate(count):
        return count / n if n else 0.0

    labelled = [o for o in done if o.expected_class is not None]
    hits = defaultdict(int)
    seen = defaultdict(int)
    for o in labelled:
        seen[o.expected_class] += 1
        hits[o.expected_class] += o.predicted_class == o.expected_class
    class_accuracy = sum(hits.values()) / len(labelled) if labelled else None
    per_class = {c: hits[c] / seen[c] for c in sorted(seen)}

    routed_correct = sum(
        1 for o in done
        if o.phase == "Routed" and o.expected_class is not None and o.predicted_class == o.expected_class
    )
    scripted = [o for o in done if o.expected_terminal is not None]
    terminal_match = (
        sum(o.phase == o.expected_terminal for o in scripted) / len(scripted) if scripted else None
    )

    wer = corpus_wer(wer_pairs)
    return EvalReport(
        corpus_wer=wer.wer,
        mean_utterance_wer=wer.mean_utterance_wer,
        utterance_count=wer.utterances,
        word_errors={
            "substitutions": wer.counts.substitutions,
            "deletions": wer.counts.deletions,
            "insertions": wer.counts.insertions,
            "ref_words": wer.counts.ref_len,
        },
        session_count=len(outcomes),
        failed_runs=len(outcomes) - n,
        rate_routed=rate(phases["Routed"]),
        rate_escalated=rate(phases["Escalated"]),
        rate_abandoned=rate(phases["Abandoned"]),
        rate_routed_correct=rate(routed_correct),
        class_accuracy=class_accuracy,
        per_class_accuracy=per_class,
        terminal_match_rate=terminal_match,
        error_rate=error_rate,
    )
