"""Symbolic solver: predecessors, attractors, acceleration and verdicts."""

import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from issy.solver import (Arena, Player, Region, SolverOptions, Verdict, attractor, region_includes, solve,
                         solve_portfolio)
from issy.solver.explicit import explicit_solve
from issy.solver.randgen import decrement_game, random_game
from issy.spec import WinCond
from issy.terms import FALSE, TRUE, VarEnv, VarKind, Sort, evaluate

from conftest import load_game
from helpers import term

XENV = VarEnv.of(("x", VarKind.STATE, Sort.INT), ("i", VarKind.INPUT, Sort.INT))


def x(text):
    return term(text, XENV)


def lit(n: int) -> str:
    return str(n) if n >= 0 else f"(- {-n})"


def same(smt, r1, r2, locs):
    return region_includes(r1, r2, smt, locs) is True and region_includes(r2, r1, smt, locs) is True


def symbolic_agrees(g, outcome, win, state_range=range(0, 8)):
    """Count environment positions where the symbolic region and the explicit
    winning set disagree. An early safety exit leaves an over-approximation."""
    partial = g.objective is WinCond.SAFETY and outcome.verdict is Verdict.UNREALIZABLE
    names = [d.name for d in g.env.states]
    bad = 0
    for loc in g.locations:
        for vals in itertools.product(state_range, repeat=len(names)):
            env = {(n, False): v for n, v in zip(names, vals)}
            if not evaluate(g.domain(loc.name), env):
                continue
            sym, exp = evaluate(outcome.system_region[loc.name], env), ("e", loc.name, vals) in win
            bad += (exp and not sym) if partial else sym != exp
    return bad


# -- regions -----------------------------------------------------------------

def test_region_includes(smt):
    big = Region({"a": x("(<= x 5)"), "b": TRUE})
    small = Region({"a": x("(<= x 2)"), "b": x("(= x 0)")})
    assert region_includes(big, small, smt) is True
    assert region_includes(small, big, smt) is False
    assert region_includes(small, big, smt, ["b"]) is False
    assert region_includes(small, Region({"a": FALSE, "b": FALSE}), smt) is True


def test_missing_location_reads_false(smt):
    r = Region({"a": TRUE})
    assert r["zzz"] == FALSE
    assert region_includes(r, Region({"zzz": FALSE}), smt) is True


# -- cpre --------------------------------------------------------------------

@pytest.mark.parametrize("name, target, expected", [
    ("g_in", {"b": "true"}, {"a": "(>= x 3)", "b": "true"}),
    ("g_dec", {"b": "true"}, {"a": "(<= x 0)", "b": "true"}),
    ("g_loop", {"a": "true"}, {"a": "true"}),
    ("g_loop", {"a": "false"}, {"a": "false"}),
])
def test_cpre_examples(smt, name, target, expected):
    g = load_game(name)
    arena = Arena(g, smt)
    got = arena.cpre(Player.SYSTEM, Region({k: x(v) for k, v in target.items()}))
    want = Region({k: x(v) for k, v in expected.items()})
    assert same(smt, got, want, g.names)


def test_environment_cpre_on_input_choice(smt):
    g = load_game("g_in")
    arena = Arena(g, smt)
    # the environment can keep the play in a exactly when it may pick i = 0 and x < 3
    got = arena.cpre(Player.ENVIRONMENT, Region({"a": TRUE}))
    assert same(smt, got, Region({"a": x("(< x 3)")}), ["a"])


@settings(max_examples=25, deadline=None)
@given(lo=st.integers(-6, 6), hi=st.integers(-6, 6), extra=st.integers(-6, 6))
def test_cpre_is_monotone(smt, lo, hi, extra):
    g = load_game("g_in")
    arena = Arena(g, smt)
    lo, hi, extra = lit(lo), lit(hi), lit(extra)
    small = Region({"a": x(f"(and (>= x {lo}) (<= x {hi}))"), "b": x(f"(>= x {extra})")})
    large = Region({"a": x(f"(or (and (>= x {lo}) (<= x {hi})) (= x {extra}))"), "b": TRUE})
    for p in Player:
        assert region_includes(arena.cpre(p, large), arena.cpre(p, small), smt, g.names) is True


# -- attractors and acceleration ----------------------------------------------

def test_decrement_attractor_uses_a_rank_lemma(smt):
    g = load_game("g_dec")
    res = attractor(Arena(g, smt), Player.SYSTEM, Region({"b": TRUE}), SolverOptions())
    assert res.converged
    assert res.lemmas and res.lemmas[0].location == "a"
    assert res.lemmas[0].rank == x("x")
    assert res.lemmas[0].single_location
    assert same(smt, res.region, Region({"a": TRUE, "b": TRUE}), g.names)
    assert set(res.lemma_layers) <= set(range(len(res.layers)))


def test_decrement_without_acceleration_keeps_growing(smt):
    g = load_game("g_dec")
    res = attractor(Arena(g, smt), Player.SYSTEM, Region({"b": TRUE}), SolverOptions(accel="none", budget=10))
    assert not res.converged
    assert same(smt, res.region, Region({"a": x("(<= x 9)"), "b": TRUE}), g.names)


def test_layers_grow(smt):
    g = load_game("g_dec")
    for accel in ("none", "geometric"):
        res = attractor(Arena(g, smt), Player.SYSTEM, Region({"b": TRUE}), SolverOptions(accel=accel, budget=12))
        for a, b in zip(res.layers, res.layers[1:]):
            assert region_includes(b, a, smt, g.names) is True


def test_no_lemma_without_numeric_progress(smt):
    for name in ("g_loop", "g_in"):
        out = solve(load_game(name), SolverOptions(), smt)
        assert out.lemmas == []


@pytest.mark.parametrize("step", [1, 2, 3])
def test_lemma_conclusions_are_attracted(smt, step):
    """Every point a lemma claims must be attracted in the finite oracle."""
    g = decrement_game(step=step, start_bound=8)
    res = attractor(Arena(g, smt), Player.SYSTEM, Region({"b": TRUE}), SolverOptions())
    assert res.lemmas
    _, win = explicit_solve(g, range(-8, 9), range(0, 1))
    for lemma in res.lemmas:
        for v in range(-8, 9):
            if evaluate(lemma.conclusion, {("x", False): v}):
                assert ("e", lemma.location, (v,)) in win


def test_real_rank_uses_given_epsilon(smt):
    env = VarEnv.of(("r", VarKind.STATE, Sort.REAL))
    from issy.game import Location, SymbolicGame, Transition

    r = lambda s: term(s, env)  # noqa: E731
    g = SymbolicGame(env, (Location("a", 0, TRUE), Location("b", 1, TRUE)),
                     (Transition("a", "b", r("(and (<= r 0.0) (= r~ r))")),
                      Transition("a", "a", r("(and (> r 0.0) (= r~ (- r 0.5)))")),
                      Transition("b", "b", TRUE)),
                     WinCond.REACHABILITY, "a", "realdec")
    out = solve(g, SolverOptions(), smt)
    assert out.verdict is Verdict.REALIZABLE
    assert out.lemmas and all(l.epsilon == SolverOptions().epsilon for l in out.lemmas)


# -- verdicts ----------------------------------------------------------------

@pytest.mark.parametrize("name, accel, verdict", [
    ("g_loop", "geometric", Verdict.REALIZABLE),
    ("g_trap", "geometric", Verdict.UNREALIZABLE),
    ("g_in", "geometric", Verdict.UNREALIZABLE),
    ("g_dec", "geometric", Verdict.REALIZABLE),
    ("g_dec", "none", Verdict.UNKNOWN),
])
def test_solve_examples(smt, name, accel, verdict):
    out = solve(load_game(name), SolverOptions(accel=accel), smt)
    assert out.verdict is verdict
    if verdict is Verdict.UNKNOWN:
        assert out.reason == "budget"
        assert out.describe() == "UNKNOWN(budget)"


def test_timeout_gives_unknown():
    out = solve(load_game("g_dec"), SolverOptions(accel="none", budget=10_000, timeout=0.2))
    assert out.verdict is Verdict.UNKNOWN and out.reason == "timeout"


def test_portfolio_takes_the_conclusive_run():
    out = solve_portfolio(load_game("g_dec"), SolverOptions())
    assert out.verdict is Verdict.REALIZABLE
    assert out.config == "geometric"


@pytest.mark.parametrize("kwargs", [dict(accel="widen"), dict(budget=0), dict(epsilon=0), dict(accel_every=0)])
def test_bad_options(kwargs):
    with pytest.raises(ValueError):
        SolverOptions(**kwargs)


@pytest.mark.parametrize("objective, n, seed0", [
    (WinCond.SAFETY, 20, 0), (WinCond.REACHABILITY, 12, 100), (WinCond.BUECHI, 6, 200),
    (WinCond.COBUECHI, 6, 300), (WinCond.PARITY, 8, 400),
])
def test_matches_explicit_oracle(smt, objective, n, seed0):
    for seed in range(seed0, seed0 + n):
        g = random_game(random.Random(seed), objective)
        out = solve(g, SolverOptions(), smt)
        real, win = explicit_solve(g)
        assert out.verdict is not Verdict.UNKNOWN, seed
        assert out.realizable == real, seed
        assert symbolic_agrees(g, out, win) == 0, seed
