"""Command-line entry point: ``ivrflow <subcommand>``.

Exit codes: 0 success, 1 usage or configuration error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .config import CallLog, load_config
from .errors import ConfigError, InputError, IvrError

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _call_log(args, config):
    path = getattr(args, "call_log", None) or config.call_log
    if not path:
        return None
    return CallLog(path, timestamps=not args.no_timestamps)


def cmd_validate_config(args) -> int:
    cfg = load_config(args.config)
    print(json.dumps({
        "config": cfg.source,
        "classes": len(cfg.taxonomy),
        "queues": len(cfg.routing.queues),
        "knowledge_docs": len(cfg.store),
        "confidence_threshold": cfg.confidence_threshold,
        "max_confirm_attempts": cfg.max_confirm_attempts,
    }, ensure_ascii=False))
    return EXIT_OK


def cmd_serve(args) -> int:
    from .bridge import serve
    from .engine import Engine

    cfg = load_config(args.config)
    engine = Engine(cfg, _call_log(args, cfg))
    serve(engine, args.bind)
    return EXIT_OK


def cmd_run_scenario(args) -> int:
    from .simulator import load_scenarios, run_scenario

    cfg = load_config(args.config)
    if args.error_rate is not None:
        cfg = cfg.with_error_rate(args.error_rate)
    scenarios = load_scenarios(args.scenario)
    if args.id:
        scenarios = [s for s in scenarios if s.scenario_id == args.id]
        if not scenarios:
            raise InputError(f"no scenario with id {args.id!r}")
    log = _call_log(args, cfg)
    try:
        reports = [run_scenario(s, cfg, args.seed, log).to_dict() for s in scenarios]
    finally:
        if log:
            log.close()
    doc = reports[0] if len(reports) == 1 else reports
    _emit(json.dumps(doc, ensure_ascii=False, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_run_batch(args) -> int:
    from .simulator import batch_to_json, load_scenarios, run_batch

    cfg = load_config(args.config)
    scenarios = load_scenarios(args.scenarios)
    seeds = args.seed or [0]
    log = _call_log(args, cfg)
    try:
        reports = run_batch(scenarios, cfg, seeds, args.error_rate, log)
    finally:
        if log:
            log.close()
    _emit(batch_to_json(reports, seeds, len(scenarios)), args.out)
    return EXIT_OK


def cmd_eval_asr(args) -> int:
    from .simulator import eval_asr

    report = eval_asr(args.ref, args.hyp)
    _emit(json.dumps(report, ensure_ascii=False, indent=2) + "\n", args.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="engine config JSON (default: $IVR_CONFIG, then the shipped default)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--no-timestamps", action="store_true", help="write null timestamps in the call log")
    common.add_argument("--call-log", help="append JSONL call records to this file")

    p = _Parser(prog="ivrflow", description="IVR intent routing engine")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("serve", parents=[common], help="run the NDJSON telephony bridge")
    s.add_argument("--bind", help="HOST:PORT (default: $IVR_BIND_ADDR, then config)")
    s.set_defaults(func=cmd_serve)

    s = sub.add_parser("run-scenario", parents=[common], help="replay scripted caller(s)")
    s.add_argument("scenario", help="scenario .json/.jsonl file or directory")
    s.add_argument("--id", help="run only this scenario_id")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--error-rate", type=float)
    s.set_defaults(func=cmd_run_scenario)

    s = sub.add_parser("run-batch", parents=[common], help="seeded batch with an error-rate sweep")
    s.add_argument("scenarios", help="scenario .json/.jsonl file or directory")
    s.add_argument("--seed", type=int, action="append", help="repeatable; default 0")
    s.add_argument("--error-rate", type=float, action="append", help="repeatable; default from config")
    s.set_defaults(func=cmd_run_batch)

    s = sub.add_parser("eval-asr", parents=[common], help="corpus WER of hypothesis vs reference")
    s.add_argument("ref", help="reference file, or a ref<TAB>hyp TSV when HYP is omitted")
    s.add_argument("hyp", nargs="?")
    s.set_defaults(func=cmd_eval_asr)

    s = sub.add_parser("validate-config", parents=[common], help="load and check a config")
    s.set_defaults(func=cmd_validate_config)
    return p


def main(argv=None) -> int:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (IvrError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
