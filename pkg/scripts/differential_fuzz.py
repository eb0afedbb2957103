#!/usr/bin/env python3
"""Differential campaign: random programs, engine vs brute-force oracle.

    python3 scripts/differential_fuzz.py --cases 500 --seed 1

Prints a distribution summary and exits 1 on the first divergence, with
the offending program and query reproduced for replay.
"""

import argparse
import random
import sys
import time

from prologtheta.fuzz import erasure_outcomes, fuzz_run, random_case


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--cases", type=int, default=500)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--erasure", action="store_true",
                    help="also check noisy/silent twin agreement per case")
    args = ap.parse_args()

    started = time.monotonic()
    solvable = with_answers = multi = 0
    for i, case, report in fuzz_run(args.cases, args.seed):
        if not report.matched:
            print(f"DIVERGENCE at case {i} (seed {args.seed}, status {report.status})")
            print(case)
            print(report.detail)
            return 1
        if report.engine_answers:
            solvable += 1
            if any(ans for ans in report.engine_answers):
                with_answers += 1
            if len(report.engine_answers) > 1:
                multi += 1
    elapsed = time.monotonic() - started
    print(f"{args.cases}/{args.cases} cases match the oracle in {elapsed:.2f}s")
    print(f"  solvable: {solvable}   with noisy bindings: {with_answers}   "
          f"multiple answers: {multi}")

    if args.erasure:
        rng = random.Random(args.seed)
        for i in range(1, args.cases + 1):
            case = random_case(rng)
            noisy, silent = erasure_outcomes(case)
            if noisy != silent:
                print(f"ERASURE DIVERGENCE at case {i}")
                print(case)
                return 1
        print(f"{args.cases}/{args.cases} silent-twin rewrites preserve the outcome")
    return 0


if __name__ == "__main__":
    sys.exit(main())
