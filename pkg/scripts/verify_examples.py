#!/usr/bin/env python3
"""Check the period identity on a list of configurations and print a table."""
import argparse
import time

from toric_periods.errors import ToricPeriodsError
from toric_periods.lvalues import VerifyOptions, verify

CONFIGS = [
    (11, -4, 1, "trivial"),
    (11, -3, 1, "trivial"),
    (11, -4, 3, 1),
    (11, -11, 1, "trivial"),
    (14, -4, 1, "trivial"),
    (15, -3, 1, "trivial"),
    (17, -3, 1, "trivial"),
    (19, -4, 1, "trivial"),
    (35, -3, 1, "trivial"),
    (11, -7, 1, "trivial"),
]


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--digits", type=int, default=25)
    args = parser.parse_args()
    opts = VerifyOptions(digits=args.digits)
    print(f"{'N':>4} {'D':>4} {'c':>2} {'chi':>8}  {'rel. error':>10}  {'ratio':>8}  {'time':>6}  status")
    for level, d, c, chi in CONFIGS:
        start = time.perf_counter()
        try:
            rep = verify(level, d, c, chi, opts)
            status = "ok" if rep.passed else "MISMATCH"
            err, ratio = f"{rep.relative_error:.1e}", rep.period["ratio"]
        except ToricPeriodsError as exc:
            status, err, ratio = f"skipped: {exc}", "-", "-"
        took = time.perf_counter() - start
        print(f"{level:>4} {d:>4} {c:>2} {str(chi):>8}  {err:>10}  {ratio:>8}  {took:5.1f}s  {status}")


if __name__ == "__main__":
    main()
