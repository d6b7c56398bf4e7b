"""Command-line driver: ``issy compile|check|solve FILE``.

Exit codes: 0 success or realizable, 1 unrealizable, 2 unknown, 3 input or
diagnostic error, 4 failure of an external tool.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from fractions import Fraction
from pathlib import Path

from . import __version__
from .errors import (BackendError, EnvMismatch, ExtractUnsupported, HoaSyntaxError, IssyError, MissingAtom,
                     MultipleNonSafety, NondeterministicAutomaton, TranslatorError, UnsupportedAcceptance)
from .frontend import IssyDiagnostics, load_issy
from .frontend.check import check_global
from .llissy import emit_llissy, parse_llissy

EXIT_OK, EXIT_UNREALIZABLE, EXIT_UNKNOWN, EXIT_INPUT, EXIT_TOOL = 0, 1, 2, 3, 4

log = logging.getLogger("issy")


class _Fail(Exception):
    def __init__(self, code: int, message: str = ""):
        super().__init__(message)
        self.code = code


def _positive_float(text: str) -> float:
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _fraction(text: str) -> Fraction:
    try:
        v = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="issy", description="Issy specification tools.")
    p.add_argument("--version", action="store_true", help="print tool and backend versions")
    sub = p.add_subparsers(dest="command")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("input", help="specification file (.issy or .llissy)")
    common.add_argument("--format", choices=("issy", "llissy"), help="override format detection by extension")
    common.add_argument("-v", "--verbose", action="count", default=0, help="log progress on stderr")

    c = sub.add_parser("compile", parents=[common], help="translate to canonical LLissy")
    c.add_argument("-o", "--output", help="output file (default: stdout)")

    sub.add_parser("check", parents=[common], help="report diagnostics only")

    s = sub.add_parser("solve", parents=[common], help="decide realizability")
    s.add_argument("-o", "--output", help="C file written with --synt (default: input name with .c)")
    s.add_argument("--pruning", type=int, default=0, choices=range(4), metavar="{0,1,2,3}",
                   help="monitor pruning level (only 0 is supported)")
    s.add_argument("--accel-attr", choices=("geometric", "none"), default="geometric",
                   help="attractor acceleration")
    s.add_argument("--synt", action="store_true", help="synthesize a C program when realizable")
    s.add_argument("--smt-cmd", help="SMT-LIB2 solver command (ISSY_SMT_CMD takes precedence)")
    s.add_argument("--ltl-cmd", help="LTL translator command (ISSY_LTL_CMD takes precedence)")
    s.add_argument("--budget", type=_positive_int, default=100, help="fixpoint iteration budget")
    s.add_argument("--accel-every", type=_positive_int, default=3, help="iterations between acceleration attempts")
    s.add_argument("--epsilon", type=_fraction, default=Fraction(1, 2), help="rank step for real-valued ranks")
    s.add_argument("--timeout", type=_positive_float, default=1200.0, help="wall-clock limit in seconds")
    s.add_argument("--query-timeout", type=_positive_float, default=10.0, help="per-query SMT timeout in seconds")
    s.add_argument("--portfolio", action="store_true",
                   help="run accelerated and plain solving concurrently; first conclusive verdict wins")
    return p


def _err(msg: str):
    print(msg, file=sys.stderr)


def _load(path: str, fmt: str | None):
    """(spec, warnings) or raise _Fail after printing diagnostics."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except (OSError, UnicodeDecodeError) as e:
        raise _Fail(EXIT_INPUT, f"{path}: cannot read input: {e}") from None
    if fmt is None:
        ext = Path(path).suffix.lower()
        if ext not in (".issy", ".llissy"):
            raise _Fail(EXIT_INPUT, f"{path}: unknown extension '{ext}'; use --format issy|llissy")
        fmt = ext[1:]
    if fmt == "issy":
        try:
            return load_issy(text)
        except IssyDiagnostics as e:
            for d in e.diagnostics:
                _err(d.render(path))
            raise _Fail(EXIT_INPUT) from None
    res = parse_llissy(text)
    if isinstance(res, list):
        for d in res:
            _err(d.render(path))
        raise _Fail(EXIT_INPUT)
    return res, [d for d in check_global(res) if not d.is_error]


def _smt_command(flag: str | None) -> str | None:
    return os.environ.get("ISSY_SMT_CMD") or flag


def _ltl_command(flag: str | None) -> str | None:
    return os.environ.get("ISSY_LTL_CMD") or flag


def _version() -> int:
    from .logic.translate import LtlTranslator, translator_command
    from .smt import SmtSession

    print(f"issy {__version__}")
    try:
        with SmtSession(_smt_command(None)) as s:
            print(f"smt: {s.command}: {s.version() or 'unknown version'}")
    except BackendError as e:
        print(f"smt: unavailable ({e})")
    tr = LtlTranslator(_ltl_command(None))
    state = "available" if tr.available() else "not found"
    print(f"ltl: {translator_command(tr.command)} ({state})")
    return EXIT_OK


def _compile(args) -> int:
    spec, warnings = _load(args.input, args.format)
    for d in warnings:
        _err(d.render(args.input))
    text = emit_llissy(spec)
    if args.output:
        try:
            Path(args.output).write_text(text, encoding="utf-8")
        except OSError as e:
            raise _Fail(EXIT_INPUT, f"{args.output}: cannot write: {e}") from None
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _check(args) -> int:
    spec, warnings = _load(args.input, args.format)
    for d in warnings:
        _err(d.render(args.input))
    return EXIT_OK


def _solve(args) -> int:
    from .extract import emit_c, extract_strategy
    from .game import build_arena, validate
    from .logic.translate import LtlTranslator
    from .smt import SmtSession
    from .solver import SolverOptions, Verdict, solve, solve_portfolio

    if args.pruning > 0:
        raise _Fail(EXIT_INPUT, "monitor pruning not supported (levels 1-3 out of scope)")
    spec, warnings = _load(args.input, args.format)
    for d in warnings:
        _err(d.render(args.input))
    smt_cmd = _smt_command(args.smt_cmd)
    try:
        game = build_arena(spec, LtlTranslator(_ltl_command(args.ltl_cmd), timeout=args.timeout))
    except TranslatorError as e:
        raise _Fail(EXIT_TOOL, f"{args.input}: {e}") from None
    except (HoaSyntaxError, UnsupportedAcceptance, NondeterministicAutomaton, MissingAtom) as e:
        raise _Fail(EXIT_TOOL, f"{args.input}: unusable translator output: {e}") from None
    except (MultipleNonSafety, EnvMismatch) as e:
        raise _Fail(EXIT_INPUT, f"{args.input}: {e}") from None
    log.info("game: %d locations, %d transitions, objective %s", len(game.locations), len(game.transitions),
             game.objective)
    opts = SolverOptions(accel=args.accel_attr, accel_every=args.accel_every, budget=args.budget,
                         epsilon=args.epsilon, timeout=args.timeout)
    try:
        with SmtSession(smt_cmd, timeout=args.query_timeout) as s:
            s.version()  # fail early when the backend cannot start
            for d in validate(game, s):
                _err(d.render(args.input))
            if args.portfolio:
                out = solve_portfolio(game, opts, smt_cmd)
            else:
                out = solve(game, opts, s)
            print(out.describe())
            sys.stdout.flush()
            if out.verdict is Verdict.UNKNOWN:
                return EXIT_UNKNOWN
            if out.verdict is Verdict.UNREALIZABLE:
                return EXIT_UNREALIZABLE
            if args.synt:
                try:
                    prog = extract_strategy(game, out, s)
                except ExtractUnsupported as e:
                    raise _Fail(EXIT_INPUT, f"{args.input}: strategy extraction unsupported: {e}") from None
                dest = args.output or str(Path(args.input).with_suffix(".c"))
                try:
                    Path(dest).write_text(emit_c(prog), encoding="utf-8")
                except OSError as e:
                    raise _Fail(EXIT_INPUT, f"{dest}: cannot write: {e}") from None
                _err(f"wrote {dest}")
            return EXIT_OK
    except BackendError as e:
        raise _Fail(EXIT_TOOL, f"SMT backend error: {e}") from None


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:  # argparse reports usage errors itself
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    if args.version:
        return _version()
    if args.command is None:
        parser.print_usage(sys.stderr)
        return EXIT_INPUT
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")
    try:
        return {"compile": _compile, "check": _check, "solve": _solve}[args.command](args)
    except _Fail as e:
        if str(e):
            _err(str(e))
        return e.code
    except IssyError as e:
        _err(f"{args.input}: {e}")
        return EXIT_INPUT


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
