"""Command line: ``invkit run --input job.json --output report.json``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .config import budget
from .jobs import run_job


def _summary(report) -> str:
    name = report.task.get("name") or "?"
    line = f"{name}: {report.status}"
    if report.certificate and "g" in report.certificate:
        g = report.certificate["g"]
        line += f"  g = ({g['num']})/({g['den']})"
    if report.error:
        line += f"  [{report.error['type']}] {report.error['message']}"
    return line


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="invkit", description="Exact invariant-function searches from JSON jobs.")
    sub = parser.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run one job file")
    run.add_argument("--input", required=True, type=Path, help="job file (UTF-8 JSON)")
    run.add_argument("--output", type=Path, help="report file; stdout when omitted")
    run.add_argument("--budget-gb-size", type=int, default=None, help="cap on Groebner basis size")
    run.add_argument("--budget-terms", type=int, default=None, help="cap on terms per polynomial")
    run.add_argument("--quiet", action="store_true", help="no summary line on stderr")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        data = args.input.read_bytes()
    except OSError as exc:
        print(f"invkit: cannot read {args.input}: {exc.strerror}", file=sys.stderr)
        return 3
    with budget(args.budget_gb_size, args.budget_terms):
        report = run_job(data)
    text = report.dumps()
    if args.output:
        args.output.write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if not args.quiet:
        print(_summary(report), file=sys.stderr)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
