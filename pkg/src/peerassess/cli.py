"""Command-line interface.

Exit status is 0 on success, 2 when input fails validation and 1 on any
other error.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

from . import __version__
from .errors import ValidationError
from .io import (
    CONFIG_ENV,
    directory_digests,
    file_digest,
    load_config,
    load_dataset,
    read_item_matrix,
    write_assignments,
    write_dataset,
    write_manifest,
    write_training,
)
from .report import FORMATS, SELECTORS, render, run_analysis, write_bundle
from .simulator import SimulationConfig, run_semester

log = logging.getLogger("peerassess")


def _cmd_simulate(args) -> int:
    path = args.config or os.environ.get(CONFIG_ENV)
    data = load_config(path) if path else {}
    if args.seed is not None:
        data = {**data, "seed": args.seed}
    cfg = SimulationConfig.from_dict(data)
    run = run_semester(cfg)
    out = Path(args.out)
    write_dataset(run.dataset, out)
    write_assignments(run.course.engine.issued, out / "assignments.csv")
    write_training(run.course.training_records(), out / "training.csv")
    write_manifest(
        out / "manifest.json",
        command="simulate",
        config=cfg.to_dict(),
        seed=cfg.seed,
        inputs={} if not path else {Path(path).name: file_digest(path)},
        outputs=directory_digests(out),
    )
    print(f"wrote {len(run.dataset.posts)} posts and {len(run.dataset.records)} assessments to {out}")
    return 0


def _cmd_analyze(args) -> int:
    ds = load_dataset(args.data, min_nominations=args.min_nominations)
    items = read_item_matrix(args.items) if args.items else None
    bundle = run_analysis(ds, args.which, args.alpha, items, min_count=args.min_count)
    if args.out is None:
        sys.stdout.write(render(bundle, "text"))
        return 0
    written = write_bundle(bundle, args.out)
    inputs = directory_digests(args.data)
    if args.items:
        inputs[Path(args.items).name] = file_digest(args.items)
    write_manifest(
        Path(args.out) / "manifest.json",
        command="analyze",
        config={"which": bundle["meta"]["analyses"], "alpha": args.alpha, "min_count": args.min_count},
        seed=None,
        inputs=inputs,
        outputs={name: file_digest(p) for name, p in sorted(written.items())},
    )
    print(f"wrote report bundle to {args.out}")
    return 0


def _cmd_validate(args) -> int:
    ds, rep = load_dataset(args.data, min_nominations=args.min_nominations, with_report=True)
    print(f"students: {len(ds.students)}")
    print(f"posts: {len(ds.posts)}")
    print(f"assessments read: {rep.assessments_read}")
    print(f"dropped (no feedback): {rep.dropped_empty_feedback}")
    print(f"dropped (inactive graders): {rep.dropped_inactive_graders}")
    print(f"assessments kept: {rep.assessments_kept}")
    print(f"students who never assessed: {rep.students_never_assessed}")
    return 0


def _cmd_report(args) -> int:
    path = Path(args.bundle)
    if path.is_dir():
        path = path / "bundle.json"
    try:
        bundle = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}: not a report bundle ({exc})") from None
    if not isinstance(bundle, dict) or "meta" not in bundle:
        raise ValidationError(f"{path}: not a report bundle")
    sys.stdout.write(render(bundle, args.format))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="peerassess", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="simulate a semester and write its dataset")
    p.add_argument("--config", help=f"YAML or JSON config (default: ${CONFIG_ENV}, else built-in defaults)")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=_cmd_simulate)

    p = sub.add_parser("analyze", help="run analyses on a dataset directory")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--which", default="all", help=f"comma-separated subset of {', '.join(SELECTORS)} or 'all'")
    p.add_argument("--alpha", type=float, default=0.05, help="significance level (default 0.05)")
    p.add_argument("--min-count", type=int, default=3, help="minimum assessments per post for accuracy and bias tables")
    p.add_argument("--min-nominations", type=int, default=4)
    p.add_argument("--items", help="respondents x items CSV for Cronbach's alpha")
    p.add_argument("--out", help="bundle directory (default: print text report)")
    p.set_defaults(func=_cmd_analyze)

    p = sub.add_parser("validate", help="check a dataset directory and report cleaning counts")
    p.add_argument("--data", required=True)
    p.add_argument("--min-nominations", type=int, default=4)
    p.set_defaults(func=_cmd_validate)

    p = sub.add_parser("report", help="render a report bundle")
    p.add_argument("--bundle", required=True, help="bundle.json or a directory containing it")
    p.add_argument("--format", choices=FORMATS, default="text")
    p.set_defaults(func=_cmd_report)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (ValidationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - reported, exit 1
        log.debug("internal error", exc_info=True)
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
