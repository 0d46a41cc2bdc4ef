"""
Scripted callers and the noise sweep
====================================

Replay the shipped mixed scenario set through the full engine with the
mock recognizer at three noise levels and compare the outcomes.
"""

from importlib import resources
from pathlib import Path

from ivrflow.config import load_config
from ivrflow.simulator import load_scenarios, run_batch, run_scenario

cfg = load_config()
scenarios = load_scenarios(Path(str(resources.files("ivrflow") / "data" / "scenarios" / "mixed_100.jsonl")))

# one scenario in detail: the caller says "no" once, rephrases, then says "yes"
retry = next(s for s in scenarios if s.scenario_id.endswith("retry"))
report = run_scenario(retry, cfg, seed=0)
for step in report.transitions:
    print("  ", " -> ".join(step))
print("ended", report.phase, "as", report.predicted_class)

# the whole set, five seeds each, at three recognizer error rates
reports = run_batch(scenarios, cfg, seeds=range(5), error_rates=[0.0, 0.16, 0.5])
print(f"\n{'rate':>5} {'WER':>6} {'routed+correct':>15} {'escalated':>10} {'accuracy':>9}")
for rate, r in sorted(reports.items()):
    print(f"{rate:5} {r.corpus_wer:6.3f} {r.rate_routed_correct:15.3f} {r.rate_escalated:10.3f} {r.class_accuracy:9.3f}")
