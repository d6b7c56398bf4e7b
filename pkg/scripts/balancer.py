"""Solve the load-balancer example end to end and print the verdict.

Needs an LTL translator; pass ``--ltl-cmd`` to use something other than
Spot's ltl2tgba (the test stub works: ``--ltl-cmd "python3 tests/data/stub_ltl.py"``).
"""

import argparse
import logging
import sys
from pathlib import Path

from issy.frontend import load_issy
from issy.game import build_arena
from issy.logic.translate import LtlTranslator
from issy.solver import SolverOptions, solve

SPEC = Path(__file__).resolve().parent.parent / "tests" / "data" / "balancer.issy"


def main() -> int:
    ap = argparse.ArgumentParser(description="Solve the load-balancer example.")
    ap.add_argument("--ltl-cmd", help="LTL translator command")
    ap.add_argument("--timeout", type=float, default=1200.0)
    ap.add_argument("--accel", choices=("geometric", "none"), default="geometric")
    ap.add_argument("-v", "--verbose", action="store_true")
    args = ap.parse_args()
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(asctime)s %(name)s %(message)s")

    spec, _ = load_issy(SPEC.read_text())
    g = build_arena(spec, LtlTranslator(args.ltl_cmd))
    print(f"game: {g.objective}, {len(g.locations)} locations, {len(g.transitions)} transitions")
    out = solve(g, SolverOptions(accel=args.accel, timeout=args.timeout))
    print(f"{out.describe()} in {out.seconds:.1f}s, {out.iterations} iterations, {len(out.lemmas)} lemmas")
    return {"Realizable": 0, "Unrealizable": 1}.get(out.verdict.value, 2)


if __name__ == "__main__":
    sys.exit(main())
