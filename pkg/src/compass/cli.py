"""Batch command line interface.

Exit codes: 0 success, 1 validation findings, 2 errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import agreement, evaluation, fsm, ingest, translator
from .context import TaskId, parse_task
from .errors import CompassError

DEFAULT_DATA_ENV = "COMPASS_DATA"


def _task(text: str) -> TaskId:
    try:
        return parse_task(text)
    except CompassError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _emit(args, lines, payload) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, sort_keys=True))
    else:
        for line in lines:
            print(line)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="compass",
        description="Model dry-lab surgical tasks as finite state machines: "
        "validate and translate context transcripts, compute agreement and "
        "consensus, score label sequences, and host the labeling service.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="check a context transcript against the task FSM")
    p.add_argument("task", type=_task)
    p.add_argument("context_file", type=Path)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("translate", help="translate a context transcript to MP transcripts")
    p.add_argument("task", type=_task)
    p.add_argument("context_file", type=Path)
    p.add_argument("--span", choices=translator.SPAN_MODES, default="leading")
    p.add_argument("--side", choices=("both", "left", "right"), default="both")
    p.add_argument("--rate", type=int, default=30)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("consensus", help="per-variable majority vote over transcripts")
    p.add_argument("task", type=_task)
    p.add_argument("files", nargs="+", type=Path)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_consensus)

    p = sub.add_parser("alpha", help="Krippendorff's alpha over annotator transcripts")
    p.add_argument("task", type=_task)
    p.add_argument("files", nargs="+", type=Path)
    p.add_argument("--granularity", choices=("state", "variable"), default="state")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_alpha)

    p = sub.add_parser("score", help="accuracy and edit score between two MP transcripts")
    p.add_argument("truth", type=Path)
    p.add_argument("pred", type=Path)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("walk", help="generate a random valid context transcript")
    p.add_argument("task", type=_task)
    p.add_argument("--len", dest="length", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_walk)

    p = sub.add_parser("ingest", help="scan a dataset tree and report coverage")
    p.add_argument("root", nargs="?", type=Path, default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("serve", help="run the context labeling service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--data", type=Path, default=None)
    p.add_argument("--frontend", type=Path, default=None)
    p.set_defaults(func=cmd_serve)

    return parser


def cmd_validate(args) -> int:
    transcript = ingest.load_context_transcript(args.context_file, args.task)
    report = fsm.validate_transcript(transcript)
    counts = report.counts()
    lines = [v.render() for v in report.undecomposable]
    lines += [f"warning: {w}" for w in report.warnings]
    lines.append(
        "verdicts={} unchanged={} direct={} composite={} undecomposable={}".format(
            len(report.verdicts),
            counts["unchanged"],
            counts["direct"],
            counts["composite"],
            counts["undecomposable"],
        )
    )
    payload = {
        "task": args.task.value,
        "counts": counts,
        "verdicts": [
            {
                "frame_from": v.frame_from,
                "frame_to": v.frame_to,
                "kind": v.kind,
                "mps": [mp.render() for mp in v.mps],
            }
            for v in report.verdicts
        ],
        "warnings": list(report.warnings),
    }
    _emit(args, lines, payload)
    return 0 if report.ok else 1


def cmd_translate(args) -> int:
    transcript = ingest.load_context_transcript(args.context_file, args.task)
    combined = translator.translate(transcript, args.rate, args.span)
    if args.side == "both":
        chosen = combined
    else:
        left, right = translator.split_sides(combined, combined.total_samples)
        chosen = left if args.side == "left" else right
    _emit(
        args,
        chosen.render_lines(),
        {
            "task": args.task.value,
            "side": args.side,
            "span": args.span,
            "sample_rate": args.rate,
            "entries": chosen.render_lines(),
        },
    )
    return 0


def cmd_consensus(args) -> int:
    transcripts = [
        ingest.load_context_transcript(path, args.task) for path in args.files
    ]
    aligned = agreement.align_to_union(transcripts)
    result, warnings = agreement.consensus_detailed(aligned)
    lines = [f"warning: {w}" for w in warnings] + result.render_lines()
    _emit(
        args,
        lines,
        {
            "task": args.task.value,
            "entries": result.render_lines(),
            "warnings": warnings,
        },
    )
    return 0


def _fmt_alpha(alpha) -> str:
    return "undefined" if alpha is None else f"{alpha:.6f}"


def cmd_alpha(args) -> int:
    transcripts = [
        ingest.load_context_transcript(path, args.task) for path in args.files
    ]
    matrix = agreement.matrix_from_transcripts(transcripts)
    frames = matrix.pairable_unit_count()
    per_slot = {}
    if args.granularity == "state":
        alpha = agreement.krippendorff_alpha(matrix)
    else:
        alpha, per_slot = agreement.per_variable_alpha(transcripts)
    band = "undefined" if alpha is None else agreement.interpret_alpha(alpha)
    lines = [
        "task alpha band frames",
        f"{args.task.value} {_fmt_alpha(alpha)} {band} {frames}",
        f"task={args.task.value}",
        f"granularity={args.granularity}",
        f"alpha={_fmt_alpha(alpha)}",
        f"band={band}",
        f"frames={frames}",
    ]
    for name, value in per_slot.items():
        lines.append(f"alpha.{name}={_fmt_alpha(value)}")
    payload = {
        "task": args.task.value,
        "granularity": args.granularity,
        "alpha": alpha,
        "band": band,
        "frames": frames,
    }
    if per_slot:
        payload["per_variable"] = per_slot
    _emit(args, lines, payload)
    return 0


def cmd_score(args) -> int:
    truth = ingest.load_mp_transcript(args.truth)
    pred = ingest.load_mp_transcript(args.pred)
    truth_samples = translator.per_sample_labels(truth)
    pred_samples = translator.per_sample_labels(pred)
    acc = evaluation.accuracy(truth_samples, pred_samples)
    score = evaluation.edit_score(truth_samples, pred_samples)
    line = f"accuracy={acc:.4f} edit_score={score:.2f}"
    _emit(args, [line], {"accuracy": acc, "edit_score": score})
    return 0


def cmd_walk(args) -> int:
    transcript = fsm.random_walk(args.task, args.length, args.seed)
    _emit(
        args,
        transcript.render_lines(),
        {
            "task": args.task.value,
            "seed": args.seed,
            "entries": transcript.render_lines(),
        },
    )
    return 0


def _data_root(args) -> Path:
    root = args.root if getattr(args, "root", None) else args_data(args)
    if root is None:
        raise CompassError(
            f"no data root given and {DEFAULT_DATA_ENV} is not set"
        )
    return Path(root)


def args_data(args):
    explicit = getattr(args, "data", None)
    if explicit:
        return explicit
    env = os.environ.get(DEFAULT_DATA_ENV)
    return Path(env) if env else None


def cmd_ingest(args) -> int:
    index = ingest.scan_dataset(_data_root(args))
    lines = []
    for task, trials in index.by_task().items():
        lines.append(f"{task.value}: {len(trials)} trials")
        for trial in trials:
            kinds = ",".join(sorted(index.trials[trial]))
            lines.append(f"  {trial.render()} [{kinds}]")
    lines += [f"finding: {f}" for f in index.findings]
    lines.append(f"trials={len(index.trials)} findings={len(index.findings)}")
    payload = {
        "root": str(index.root),
        "trials": {
            t.render(): sorted(index.trials[t])
            for t in sorted(index.trials, key=lambda t: t.sort_key)
        },
        "findings": index.findings,
    }
    _emit(args, lines, payload)
    return 0 if not index.findings else 1


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    root = args_data(args)
    if root is None:
        raise CompassError(f"no --data root given and {DEFAULT_DATA_ENV} is not set")
    frontend = args.frontend
    if frontend is None:
        candidate = Path("frontend") / "dist"
        frontend = candidate if candidate.is_dir() else None
    app = create_app(root, frontend_dist=frontend)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CompassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
