"""Random finite-range games over integer variables.

Every location domain bounds the state variables to ``[0, hi]``, so the
symbolic game and its explicit enumeration describe the same arena. Guards
come from a small pool of linear templates: a condition on current values
and inputs, and per state variable either an assignment or, occasionally, a
non-deterministic constraint on the next value.
"""

from __future__ import annotations

import random

from ..game import SymbolicGame
from ..spec import Location, Transition, WinCond
from ..terms import TRUE, App, Sort, Term, VarEnv, VarKind, mk_and, mk_or, num

HI = 7
INPUT_VALUES = range(-12, 13)


def _c(v: int) -> Term:
    return num(v, Sort.INT)


def _plus(a: Term, k: int) -> Term:
    if k == 0:
        return a
    return App("+", (a, _c(k))) if k > 0 else App("-", (a, _c(-k)))


def _condition(rng: random.Random, svars, ivars) -> Term:
    pool = svars + ivars
    kind = rng.randrange(5)
    v = rng.choice(pool)
    op = rng.choice(("<=", ">=", "=", "<", ">"))
    if kind == 0:
        return TRUE
    if kind in (1, 2):
        lo, hi = (-3, 3) if v in ivars else (0, HI)
        return App(op, (v, _c(rng.randint(lo, hi))))
    if kind == 3 and ivars and svars:
        return App(op, (App("+", (rng.choice(svars), rng.choice(ivars))), _c(rng.randint(-3, 3))))
    if len(svars) > 1:
        a, b = rng.sample(svars, 2)
        return App(op, (a, b))
    return mk_or(App("<=", (v, _c(rng.randint(-3, 3)))), App(">=", (v, _c(rng.randint(0, HI)))))


def _update(rng: random.Random, x, svars, ivars, assignment_only: bool) -> Term:
    xp = x.__class__(x.name, x.sort, True)
    kind = rng.randrange(7 if assignment_only else 9)
    if kind == 0:
        return App("=", (xp, x))
    if kind in (1, 2):
        return App("=", (xp, _plus(x, rng.choice((-2, -1, 1, 2)))))
    if kind == 3:
        return App("=", (xp, _c(rng.randint(0, HI))))
    if kind == 4 and ivars:
        return App("=", (xp, rng.choice(ivars)))
    if kind == 5 and ivars:
        return App("=", (xp, App("+", (x, rng.choice(ivars)))))
    if kind == 6 and len(svars) > 1:
        return App("=", (xp, rng.choice([s for s in svars if s != x])))
    if kind == 7:
        return App(rng.choice(("<=", ">=")), (xp, x))
    if kind == 8:
        return App(">=", (xp, _c(rng.randint(0, HI))))
    return App("=", (xp, x))


def random_game(rng: random.Random, objective: WinCond, max_locations: int = 4, max_transitions: int = 6,
                max_states: int = 2, max_inputs: int = 1, assignment_only: bool = False,
                colors: int | None = None) -> SymbolicGame:
    ns = rng.randint(1, max_states)
    ni = rng.randint(0, max_inputs)
    env = VarEnv.of(*([(f"x{k}", VarKind.STATE, Sort.INT) for k in range(ns)] +
                      [(f"i{k}", VarKind.INPUT, Sort.INT) for k in range(ni)]))
    svars = env.state_vars()
    ivars = env.input_vars()
    nloc = rng.randint(1, max_locations)
    names = [f"l{k}" for k in range(nloc)]
    if colors is None:
        colors = 2 if objective in (WinCond.SAFETY, WinCond.REACHABILITY, WinCond.BUECHI, WinCond.COBUECHI) else 3
    bounds = [mk_and(App(">=", (x, _c(0))), App("<=", (x, _c(HI)))) for x in svars]
    locs = []
    for n in names:
        dom = mk_and(*bounds)
        if rng.random() < 0.2:
            x = rng.choice(svars)
            dom = mk_and(dom, App(rng.choice(("<=", ">=")), (x, _c(rng.randint(1, HI - 1)))))
        locs.append(Location(n, rng.randrange(colors), dom))
    ntrans = rng.randint(nloc, max(nloc, max_transitions))
    trans = []
    for k in range(ntrans):
        src = names[k] if k < nloc else rng.choice(names)
        dst = rng.choice(names)
        parts = [_condition(rng, svars, ivars)]
        parts += [_update(rng, x, svars, ivars, assignment_only) for x in svars]
        trans.append(Transition(src, dst, mk_and(*parts)))
    return SymbolicGame(env, tuple(locs), tuple(trans), objective, names[0], "random")


def decrement_game(step: int = 1, start_bound: int | None = None) -> SymbolicGame:
    """Unbounded-integer count-down: wins by reaching ``x <= 0``, which takes
    as many steps as the initial value, so plain iteration never converges."""
    env = VarEnv.of(("x", VarKind.STATE, Sort.INT))
    x = env.var("x")
    xp = env.var("x", primed=True)
    dom = TRUE if start_bound is None else App("<=", (x, _c(start_bound)))
    locs = (Location("a", 0, dom), Location("b", 1, TRUE))
    trans = (Transition("a", "b", mk_and(App("<=", (x, _c(0))), App("=", (xp, x)))),
             Transition("a", "a", mk_and(App(">", (x, _c(0))), App("=", (xp, _plus(x, -step))))),
             Transition("b", "b", TRUE))
    return SymbolicGame(env, locs, trans, WinCond.REACHABILITY, "a", f"dec{step}")
