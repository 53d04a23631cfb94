#!/usr/bin/env python3
"""Run the numbered acceptance criteria and print one verdict line each.

    python3 scripts/run_acceptance.py            # all nine
    python3 scripts/run_acceptance.py 1 4 7      # a subset
    python3 scripts/run_acceptance.py --skip-full-layer
"""

import argparse
import sys

from cubicfl import acceptance


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("criteria", nargs="*", type=int, choices=sorted(acceptance.CRITERIA))
    parser.add_argument("--skip-full-layer", action="store_true",
                        help="omit the slow full-layer integrals from criterion 3")
    args = parser.parse_args()
    if args.skip_full_layer:
        acceptance.CRITERIA[3] = lambda: acceptance.criterion_3(include_full=False)
    results = acceptance.run_all(args.criteria or None)
    failed = [r.number for r in results if not r.ok]
    print(f"{len(results) - len(failed)}/{len(results)} criteria passed" + (f"; failed: {failed}" if failed else ""))
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
