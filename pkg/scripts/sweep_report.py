#!/usr/bin/env python3
"""Sweep the big-cell matching over a valuation grid and write a JSON report.

    python3 scripts/sweep_report.py --p 7 --vals 0 2 --modes closed-closed,closed-brute --out sweep.json
"""

import argparse
import collections
import sys

from cubicfl import CostGuard, make_field, sweep


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--p", type=int, default=7)
    parser.add_argument("--precision", type=int, default=24)
    parser.add_argument("--vals", type=int, nargs=2, default=(-2, 4), metavar=("LO", "HI"))
    parser.add_argument("--modes", default="closed-closed")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--out", default=None, help="JSON destination (stdout summary only if omitted)")
    args = parser.parse_args()

    fld = make_field(args.p, args.precision)
    try:
        report = sweep(tuple(args.vals), modes=tuple(args.modes.split(",")), field_params=fld,
                       workers=args.workers, stop_on_failure=False)
    except CostGuard as exc:
        print(f"brute force refused: {exc}; narrow --vals", file=sys.stderr)
        return 2
    by_mode = collections.Counter((r.label, r.passed) for r in report.records)
    for label in sorted({label for label, _ in by_mode}):
        print(f"{label:>16}: {by_mode[(label, True)]} passed, {by_mode[(label, False)]} failed")
    print(f"total {report.total}, failed {report.failed}, {report.wall_ms / 1000:.1f}s")
    if args.out:
        with open(args.out, "w") as handle:
            handle.write(report.dumps())
    return 1 if report.failed else 0


if __name__ == "__main__":
    sys.exit(main())
