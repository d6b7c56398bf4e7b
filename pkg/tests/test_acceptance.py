"""Acceptance gate: one PASS/FAIL/SKIP line per criterion.

Lines are collected in ``conftest.ACCEPTANCE`` and repeated in the terminal
summary, so ``pytest -v`` output ends with the full verdict table.
"""

import itertools
import random
import sys
import time

import pytest

from issy import cli
from issy.extract import RankedLoop, Simulator, compile_c, emit_c, extract_strategy, random_inputs
from issy.frontend import IssyDiagnostics, load_issy, parse_issy
from issy.game import build_arena
from issy.llissy import emit_llissy, parse_llissy
from issy.logic.automata import abstract_to_ltl, collect_atoms
from issy.logic.hoa import parse_hoa
from issy.logic.rpltl import And, Atom, F, G, Iff, Implies, Not, Or, R, U, W, X, evaluate_lasso
from issy.logic.translate import LtlTranslator
from issy.smt import SmtSession
from issy.solver import SolverOptions, Verdict, solve
from issy.solver.explicit import enumerate_game, explicit_solve
from issy.solver.randgen import decrement_game, random_game
from issy.spec import WinCond
from issy.terms import Sort, Var, evaluate

from conftest import ACCEPTANCE, DATA, load_text
from helpers import SpecGen, lowered

CORPUS = sorted((DATA / "corpus").glob("*.issy"))
MALFORMED = sorted((DATA / "malformed").glob("*.issy"))


def report(name: str, ok: bool | None, detail: str, blocking: bool = True):
    status = "SKIP" if ok is None else ("PASS" if ok else "FAIL")
    line = f"{status} {name}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    if ok is None:
        pytest.skip(line)
    if not ok:
        if blocking:
            pytest.fail(line)
        pytest.xfail(line)


def raw(path) -> str:
    with open(path, encoding="utf-8", newline="") as fh:
        return fh.read()


@pytest.fixture(scope="module")
def session():
    with SmtSession() as s:
        yield s


def symbolic_mismatches(g, out, win, state_range=range(0, 8)) -> int:
    """Positions where the symbolic region and the oracle's winning set
    disagree. A safety run that stops once the initial domain is lost
    reports an intermediate region, which only has to contain the winners."""
    partial = g.objective is WinCond.SAFETY and out.verdict is Verdict.UNREALIZABLE
    names = [d.name for d in g.env.states]
    bad = 0
    for loc in g.locations:
        for vals in itertools.product(state_range, repeat=len(names)):
            m = {(n, False): v for n, v in zip(names, vals)}
            if evaluate(g.domain(loc.name), m):
                sym, exp = evaluate(out.system_region[loc.name], m), ("e", loc.name, vals) in win
                bad += (exp and not sym) if partial else sym != exp
    return bad


# ---------------------------------------------------------------------------

def test_front_end_fidelity():
    t0 = time.perf_counter()
    text = load_text("balancer.issy")
    spec, _ = load_issy(text)
    ast = parse_issy(text)
    (fb,) = spec.formulas
    (g,) = spec.games
    colors = {loc.name: loc.color for loc in g.locations}
    counts = (len(spec.env.inputs), len(spec.env.states), len(ast.macros), len(spec.formulas),
              len(fb.assumes), len(fb.asserts), g.wincond, len(g.locations), colors.get("err"), len(g.transitions))
    expected = (2, 4, 4, 1, 1, 1, WinCond.SAFETY, 5, 0, 9)
    same = parse_llissy(emit_llissy(spec)) == lowered(spec)
    dt = time.perf_counter() - t0
    report("front-end fidelity", counts == expected and same and dt < 1.0,
           f"counts {'ok' if counts == expected else counts}, reparse {'identical' if same else 'DIFFERS'}, "
           f"{dt:.3f}s (< 1s)")


def test_llissy_round_trip():
    t0 = time.perf_counter()
    bad = [k for k in range(500) if parse_llissy(emit_llissy(s := SpecGen(random.Random(k)).spec())) != lowered(s)]
    canon = [emit_llissy(load_issy(raw(p))[0]) for p in CORPUS]
    unstable = [p.stem for p, t in zip(CORPUS, canon) if emit_llissy(parse_llissy(t)) != t]
    dt = time.perf_counter() - t0
    report("LLissy round trip", not bad and not unstable and dt < 30,
           f"500 random specs, {len(bad)} mismatches; {len(canon)} canonical texts, {len(unstable)} unstable; "
           f"{dt:.1f}s (< 30s)")


def test_grammar_conformance():
    t0 = time.perf_counter()
    rejected_good = []
    for p in CORPUS:
        try:
            load_issy(raw(p))
        except IssyDiagnostics:
            rejected_good.append(p.stem)
    unpositioned = []
    for p in MALFORMED:
        text = raw(p)
        try:
            load_issy(text)
            unpositioned.append(p.stem)
        except IssyDiagnostics as e:
            errs = [d for d in e.diagnostics if d.is_error and d.span.line >= 1 and d.span.col >= 1]
            if not errs:
                unpositioned.append(p.stem)
    dt = time.perf_counter() - t0
    ok = not rejected_good and not unpositioned and len(MALFORMED) >= 25 and dt < 10
    report("grammar conformance", ok,
           f"{len(CORPUS)} corpus files, {len(rejected_good)} rejected; {len(MALFORMED)} malformed files, "
           f"{len(unpositioned)} without a positioned error; {dt:.2f}s (< 10s)")


@pytest.mark.slow
def test_oracle_equivalence(session):
    t0 = time.perf_counter()
    games = [random_game(random.Random(seed), WinCond.SAFETY) for seed in range(30)]
    games += [random_game(random.Random(100 + seed), WinCond.REACHABILITY) for seed in range(30)]
    verdicts = regions = unknown = 0
    realizable = 0
    for g in games:
        out = solve(g, SolverOptions(), session)
        real, win = explicit_solve(g)
        realizable += real
        if out.verdict is Verdict.UNKNOWN:
            unknown += 1
            continue
        verdicts += out.realizable != real
        regions += symbolic_mismatches(g, out, win) > 0
    dt = time.perf_counter() - t0
    report("oracle equivalence", verdicts == unknown == regions == 0 and dt < 300,
           f"{len(games)} games ({realizable} realizable), {verdicts} verdict mismatches, {unknown} unknown, "
           f"{regions} region mismatches; {dt:.1f}s (< 300s)")


def test_acceleration_necessity(session):
    games = [load_game_dec()] + [decrement_game(step) for step in (1, 2, 3)]
    lines, ok = [], True
    for g in games:
        plain = solve(g, SolverOptions(accel="none"), session)
        t0 = time.perf_counter()
        fast = solve(g, SolverOptions(accel="geometric", timeout=60), session)
        dt = time.perf_counter() - t0
        good = plain.describe() == "UNKNOWN(budget)" and fast.verdict is Verdict.REALIZABLE and dt < 60
        ok &= good
        lines.append(f"{g.name}: none {plain.describe()}, geometric {fast.describe()} in {dt:.2f}s")
    code_none = cli.run(["solve", "--accel-attr", "none", str(DATA / "games" / "g_dec.issy")])
    code_geo = cli.run(["solve", "--accel-attr", "geometric", str(DATA / "games" / "g_dec.issy")])
    ok &= (code_none, code_geo) == (2, 0)
    report("acceleration necessity", ok, "; ".join(lines) + f"; cli exit codes {code_none}/{code_geo}")


def load_game_dec():
    from conftest import load_game

    return load_game("g_dec")


@pytest.mark.slow
def test_parity_partition(session):
    t0 = time.perf_counter()
    n = mism = unknown = 0
    seed = 0
    while n < 24:
        g = random_game(random.Random(7000 + seed), WinCond.PARITY, colors=3)
        seed += 1
        if len({loc.color for loc in g.locations}) < 2:
            continue  # single-color instances say nothing about the recursion
        n += 1
        out = solve(g, SolverOptions(), session)
        if out.verdict is Verdict.UNKNOWN:
            unknown += 1
            continue
        _, win = explicit_solve(g)
        mism += symbolic_mismatches(g, out, win) > 0
    dt = time.perf_counter() - t0
    report("parity partition", mism == unknown == 0 and dt < 300,
           f"{n} three-color instances, {mism} partition mismatches, {unknown} unknown; {dt:.1f}s (< 300s)")


P = [Var(f"p{k}", Sort.BOOL) for k in range(3)]
AP = [Atom(p) for p in P]


def random_ltl(rng: random.Random, depth: int):
    if depth == 0 or rng.random() < 0.25:
        return rng.choice(AP)
    op = rng.choice((Not, X, F, G, U, W, R, And, Or, Implies, Iff))
    if op in (Not, X, F, G):
        return op(random_ltl(rng, depth - 1))
    return op(random_ltl(rng, depth - 1), random_ltl(rng, depth - 1))


def test_rpltl_trace_semantics():
    tr = LtlTranslator()
    if not tr.available():
        report("RP-LTL trace semantics", None, "external LTL translator (ltl2tgba) not installed")
    t0 = time.perf_counter()
    rng = random.Random(11)
    mism = 0
    for _ in range(200):
        f = random_ltl(rng, 4)
        table = collect_atoms(f)
        aut = parse_hoa(tr.translate(abstract_to_ltl(f, table)))
        index = {f"p{i}": a for i, a in enumerate(table.atoms)}
        for _ in range(20):
            n = rng.randint(1, 6)
            trace = [{p.name: rng.random() < 0.5 for p in P} for _ in range(n)]
            loop = rng.randrange(n)
            letters = [{i: evaluate(index[name], {(p.name, False): tr_[p.name] for p in P})
                        for i, name in enumerate(aut.aps)} for tr_ in trace]
            mism += aut.accepts_lasso(letters, loop) != evaluate_lasso(f, trace, loop)
    report("RP-LTL trace semantics", mism == 0,
           f"200 formulas x 20 lassos, {mism} mismatches; {time.perf_counter() - t0:.1f}s")


def reach_bounds(g):
    """Fewest rounds in which the system forces a target location from each
    environment position of the finite-range game, against any input."""
    eg = enumerate_game(g, range(0, 8), range(-12, 13))
    env = eg.env_positions()
    inf = float("inf")
    rank = {e: (0 if eg.color[e] > 0 else inf) for e in env}
    changed = True
    while changed:
        changed = False
        for e in env:
            if rank[e] == 0:
                continue
            worst = max((min((rank[q] for q in eg.succ[s]), default=inf) for s in eg.succ[e]), default=inf)
            if worst + 1 < rank[e]:
                rank[e] = worst + 1
                changed = True
    return rank


@pytest.mark.slow
def test_extraction(session):
    t0 = time.perf_counter()
    programs = violations = warnings = bounded = 0
    for seed in range(60):
        obj = (WinCond.SAFETY, WinCond.REACHABILITY)[seed % 2]
        g = random_game(random.Random(3000 + seed), obj, assignment_only=True)
        out = solve(g, SolverOptions(), session)
        if not out.realizable:
            continue
        p = extract_strategy(g, out, session)
        exe, err = compile_c(emit_c(p))
        warnings += bool(err)
        programs += 1
        loops = any(isinstance(s, RankedLoop) for c in p.code for s in c.steps)
        bounds = reach_bounds(g) if obj is WinCond.REACHABILITY and not loops else None
        bounded += bounds is not None
        names = [d.name for d in g.env.states]
        inits = [v for v in itertools.product(range(8), repeat=len(names))
                 if evaluate(g.domain(g.initial), {(n, False): x for n, x in zip(names, v)})]
        sim = Simulator(g, p, exe)
        rng = random.Random(seed)
        for _ in range(100):
            init = rng.choice(inits)
            bound = bounds[("e", g.initial, init)] if bounds else None
            res = sim.run(init, random_inputs(g, rng, 1000, -8, 8), bound)
            if not res.ok:
                violations += 1
                print(f"seed {seed}: {res.violations[:1]}", file=sys.stderr)
    dt = time.perf_counter() - t0
    report("extraction", programs > 0 and violations == warnings == 0,
           f"{programs} realizable instances ({bounded} reachability with oracle step bounds), "
           f"{warnings} with compiler warnings, {violations} violating runs "
           f"of 100 x 1000 steps each; {dt:.1f}s")


@pytest.mark.slow
def test_stretch_balancer_realizable():
    tr = LtlTranslator()
    if not tr.available():
        report("stretch: balancer end to end", None, "external LTL translator (ltl2tgba) not installed",
               blocking=False)
    spec, _ = load_issy(load_text("balancer.issy"))
    g = build_arena(spec, tr)
    out = solve(g, SolverOptions(timeout=1200))
    report("stretch: balancer end to end", out.verdict is Verdict.REALIZABLE,
           f"{out.describe()} after {out.seconds:.0f}s (budget 1200s)", blocking=False)
