"""Command-line front end: ``polyhardy run <scenario.json> [flags]``.

Exit codes: 0 when every analysis assertion passes, 1 on input errors
(parse failures, invalid scenarios, sizing or truncation problems), 2 when
an analysis assertion fails (the failing block is named on stderr).
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .defaults import (
    AMBIENT_DIM_BUDGET,
    DEFAULT_BOUNDARY_GRID,
    DEFAULT_DECAY_SCHEDULE,
    RANK_REL_TOL,
)
from .errors import PolyhardyError, ScenarioError, SizingError, TruncationError
from .report import RunOptions, decay_csv, execute, report_json, summary_text, timing_json
from .scenario import parse_scenario_file

__all__ = ["main"]


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyhardy",
        description="Numerical laboratory for co-doubly-commuting submodules "
        "of the truncated polydisc Hardy space.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the analyses requested by a scenario file")
    run.add_argument("scenario", help="path to a scenario JSON file")
    run.add_argument("--out", default=".", help="output directory (default: current)")
    run.add_argument(
        "--grid",
        type=int,
        default=DEFAULT_BOUNDARY_GRID,
        help="boundary grid size for inner-ness checks",
    )
    run.add_argument(
        "--rank-tol",
        type=float,
        default=RANK_REL_TOL,
        help="relative singular-value threshold for numerical ranks",
    )
    run.add_argument(
        "--schedule",
        default=",".join(str(s) for s in DEFAULT_DECAY_SCHEDULE),
        help="comma-separated increasing truncation schedule for decay analyses",
    )
    run.add_argument(
        "--budget",
        type=int,
        default=AMBIENT_DIM_BUDGET,
        help="ambient dimension budget used when resolving default degrees",
    )
    run.add_argument(
        "--json-only",
        action="store_true",
        help="write only the JSON report (no plain-text summary)",
    )
    return parser


def _parse_schedule(text: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError as exc:
        raise ScenarioError(f"--schedule: expected comma-separated integers, got {text!r}") from exc
    if len(values) < 3 or any(b <= a for a, b in zip(values, values[1:])):
        raise ScenarioError(
            f"--schedule: expected a strictly increasing list of length >= 3, got {text!r}"
        )
    return values


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; those are input errors here
        return 0 if exc.code in (0, None) else 1

    try:
        schedule = _parse_schedule(args.schedule)
        if args.grid < 64:
            raise ScenarioError(f"--grid: at least 64 boundary points required, got {args.grid}")
        if not 0.0 < args.rank_tol < 1.0:
            raise ScenarioError(f"--rank-tol: must lie in (0, 1), got {args.rank_tol}")
        spec = parse_scenario_file(args.scenario)
        options = RunOptions(
            grid=args.grid,
            rank_tol=args.rank_tol,
            schedule=schedule,
            budget=args.budget,
        )
        bundle = execute(spec, options)
    except (ScenarioError, SizingError, TruncationError, FileNotFoundError) as exc:
        print(f"polyhardy: input error: {exc}", file=sys.stderr)
        return 1
    except PolyhardyError as exc:
        print(f"polyhardy: error: {exc}", file=sys.stderr)
        return 1

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.scenario).stem
    report_path = out_dir / f"{stem}.report.json"
    report_path.write_text(report_json(bundle), encoding="utf-8")
    (out_dir / f"{stem}.timing.json").write_text(timing_json(bundle), encoding="utf-8")
    if not args.json_only:
        (out_dir / f"{stem}.summary.txt").write_text(summary_text(bundle), encoding="utf-8")
    for k, profile in enumerate(bundle.decay_profiles):
        suffix = "" if len(bundle.decay_profiles) == 1 else f".{k}"
        (out_dir / f"{stem}.decay{suffix}.csv").write_text(decay_csv(profile), encoding="utf-8")

    if bundle.failed_blocks:
        print(
            "polyhardy: analysis assertions failed in: " + ", ".join(bundle.failed_blocks),
            file=sys.stderr,
        )
        return 2
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
