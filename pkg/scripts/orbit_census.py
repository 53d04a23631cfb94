#!/usr/bin/env python3
"""Tabulate orbit families of random vectors over F_q and their relevance.

    python3 scripts/orbit_census.py --q 13 --samples 2000
"""

import argparse
import sys

from cubicfl import orbits


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--q", type=int, default=7)
    parser.add_argument("--samples", type=int, default=1000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    census = orbits.orbit_census(orbits.orbit_field(args.q), samples=args.samples, seed=args.seed)
    print(f"{'family':<24}{'samples':>10}{'relevant':>10}")
    for name, row in sorted(census["families"].items()):
        print(f"{name:<24}{row['total']:>10}{row['relevant']:>10}")
    print(f"consistency failures: {len(census['failures'])}")
    return 1 if census["failures"] else 0


if __name__ == "__main__":
    sys.exit(main())
