"""Compare the symbolic solver with the explicit-state oracle on random games.

    python scripts/random_suite.py --objective safety --count 50 --seed 0
"""

import argparse
import random
import sys
import time

from issy.smt import SmtSession
from issy.solver import SolverOptions, Verdict, solve
from issy.solver.explicit import explicit_solve
from issy.solver.randgen import random_game
from issy.spec import WinCond

OBJECTIVES = {"safety": WinCond.SAFETY, "reachability": WinCond.REACHABILITY, "buechi": WinCond.BUECHI,
              "cobuechi": WinCond.COBUECHI, "parity": WinCond.PARITY}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--objective", choices=sorted(OBJECTIVES), default="safety")
    ap.add_argument("--count", type=int, default=50)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--accel", choices=("geometric", "none"), default="geometric")
    args = ap.parse_args()

    obj = OBJECTIVES[args.objective]
    mismatches = unknown = 0
    t0 = time.perf_counter()
    with SmtSession() as s:
        for seed in range(args.seed, args.seed + args.count):
            g = random_game(random.Random(seed), obj)
            out = solve(g, SolverOptions(accel=args.accel), s)
            real, _ = explicit_solve(g)
            tag = "ok"
            if out.verdict is Verdict.UNKNOWN:
                unknown += 1
                tag = "unknown"
            elif out.realizable != real:
                mismatches += 1
                tag = "MISMATCH"
            print(f"seed {seed}: symbolic {out.describe()}, oracle {'REALIZABLE' if real else 'UNREALIZABLE'}, "
                  f"{out.seconds:.2f}s {tag}")
    print(f"{args.count} games, {mismatches} mismatches, {unknown} unknown, {time.perf_counter() - t0:.1f}s")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
