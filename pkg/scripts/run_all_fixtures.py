"""Run every built-in fixture and print a one-line summary per fixture.

Exit status is 0 when every fixture matches its pinned expectations.
"""

import argparse
import sys
import time

from qbhkit.fixtures import run_all_fixtures
from qbhkit.symexpr import Policy


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--tol", type=float, default=1e-9)
    parser.add_argument("--samples", type=int, default=200)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("-v", "--verbose", action="store_true", help="print full reports")
    args = parser.parse_args()
    policy = Policy(tolerance=args.tol, sample_count=args.samples, seed=args.seed)
    t0 = time.perf_counter()
    ok_all = True
    for name, report, ok in run_all_fixtures(policy):
        ok_all &= ok
        n = sum(r.matched for r in report.results)
        print(f"{'PASS' if ok else 'FAIL'}  {name:<18} {n}/{len(report.results)} checks as expected")
        if args.verbose or not ok:
            print(report.render())
    print(f"total {time.perf_counter() - t0:.2f}s")
    sys.exit(0 if ok_all else 1)


if __name__ == "__main__":
    main()
