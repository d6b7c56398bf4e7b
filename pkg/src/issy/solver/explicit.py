"""Explicit-state solving of finite-range games, used as a cross-check.

Every state variable ranges over a finite set of values (location domains
are expected to enforce that range), inputs over a finite set chosen by the
caller. The game graph is enumerated and solved by classical attractors and
Zielonka's recursion.
"""

from __future__ import annotations

import itertools
import operator
from dataclasses import dataclass, field

from ..game import SymbolicGame
from ..spec import WinCond
from ..terms import App, Const, Sort, Term, Var, evaluate

EnvPos = tuple  # ("e", loc, state)
SysPos = tuple  # ("s", loc, state, inputs)


def _values(sort: Sort, rng: range):
    return (False, True) if sort is Sort.BOOL else tuple(rng)


@dataclass
class ExplicitGame:
    """Two-layer game graph. ``succ`` maps every position to its successors."""
    state_names: tuple[str, ...]
    input_names: tuple[str, ...]
    succ: dict = field(default_factory=dict)
    color: dict = field(default_factory=dict)
    owner: dict = field(default_factory=dict)  # position -> "sys" | "env"
    initial: list = field(default_factory=list)

    def env_positions(self):
        return [p for p in self.succ if p[0] == "e"]


_CMPF = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge, "=": operator.eq}


def compile_term(t: Term):
    """Closure evaluating ``t`` on a valuation dict; falls back to
    :func:`evaluate` for operators outside the common linear fragment."""
    if isinstance(t, Const):
        v = evaluate(t, {})
        return lambda m: v
    if isinstance(t, Var):
        k = t.key
        return lambda m: m[k]
    if isinstance(t, App):
        fs = [compile_term(a) for a in t.args]
        op = t.op
        if op == "and":
            return lambda m: all(f(m) for f in fs)
        if op == "or":
            return lambda m: any(f(m) for f in fs)
        if op == "not":
            f = fs[0]
            return lambda m: not f(m)
        if op in _CMPF and len(fs) == 2:
            c, (f, g) = _CMPF[op], fs
            return lambda m: c(f(m), g(m))
        if op == "+":
            return lambda m: sum(f(m) for f in fs)
        if op == "-" and len(fs) == 1:
            f = fs[0]
            return lambda m: -f(m)
        if op == "-" and len(fs) == 2:
            f, g = fs
            return lambda m: f(m) - g(m)
    return lambda m: evaluate(t, m)


def enumerate_game(g: SymbolicGame, state_range: range, input_values) -> ExplicitGame:
    """Finite game graph under the step rule of the symbolic game."""
    svars = g.env.states
    ivars = g.env.inputs
    states = list(itertools.product(*(_values(d.sort, state_range) for d in svars)))
    inputs = list(itertools.product(*(_values(d.sort, input_values) for d in ivars)))
    eg = ExplicitGame(tuple(d.name for d in svars), tuple(d.name for d in ivars))

    def val(cur, inp=(), nxt=None):
        m = {(d.name, False): v for d, v in zip(svars, cur)}
        m.update({(d.name, False): v for d, v in zip(ivars, inp)})
        if nxt is not None:
            m.update({(d.name, True): v for d, v in zip(svars, nxt)})
        return m

    in_dom = {loc.name: [s for s in states if evaluate(loc.domain, val(s))] for loc in g.locations}
    guards = {id(t): compile_term(t.guard) for t in g.transitions}
    for loc in g.locations:
        for s in in_dom[loc.name]:
            e = ("e", loc.name, s)
            eg.owner[e] = "env"
            eg.color[e] = loc.color
            eg.succ[e] = []
            for i in inputs:
                p = ("s", loc.name, s, i)
                eg.succ[e].append(p)
                eg.owner[p] = "sys"
                eg.color[p] = loc.color
                nxt = []
                m = val(s, i)
                for t in g.outgoing(loc.name):
                    gf = guards[id(t)]
                    for s2 in in_dom[t.dst]:
                        m.update({(d.name, True): v for d, v in zip(svars, s2)})
                        if gf(m):
                            nxt.append(("e", t.dst, s2))
                eg.succ[p] = list(dict.fromkeys(nxt))
    eg.initial = [("e", g.initial, s) for s in in_dom[g.initial]]
    return eg


def _attractor(eg: ExplicitGame, nodes: set, player: str, target: set) -> set:
    """Positions in ``nodes`` from which ``player`` forces ``target``."""
    attr = set(target) & nodes
    pred: dict = {}
    for p in nodes:
        for q in eg.succ[p]:
            if q in nodes:
                pred.setdefault(q, []).append(p)
    count = {p: sum(1 for q in eg.succ[p] if q in nodes) for p in nodes}
    todo = list(attr)
    while todo:
        q = todo.pop()
        for p in pred.get(q, ()):
            if p in attr:
                continue
            if eg.owner[p] == player:
                attr.add(p)
                todo.append(p)
            else:
                count[p] -= 1
                if count[p] == 0:
                    attr.add(p)
                    todo.append(p)
    return attr


def _dead_ends(eg: ExplicitGame, nodes: set) -> set:
    return {p for p in nodes if not any(q in nodes for q in eg.succ[p])}


def _zielonka(eg: ExplicitGame, nodes: set, colors: dict) -> tuple[set, set]:
    if not nodes:
        return set(), set()
    d = max(colors[p] for p in nodes)
    alpha = "sys" if d % 2 == 1 else "env"
    beta = "env" if alpha == "sys" else "sys"
    U = {p for p in nodes if colors[p] == d}
    A = _attractor(eg, nodes, alpha, U)
    w = _zielonka(eg, nodes - A, colors)
    w_alpha, w_beta = (w[0], w[1]) if alpha == "sys" else (w[1], w[0])
    if not w_beta:
        res_alpha, res_beta = set(nodes), set()
    else:
        B = _attractor(eg, nodes, beta, w_beta)
        w2 = _zielonka(eg, nodes - B, colors)
        w2_alpha, w2_beta = (w2[0], w2[1]) if alpha == "sys" else (w2[1], w2[0])
        res_alpha, res_beta = w2_alpha, w2_beta | B
    return (res_alpha, res_beta) if alpha == "sys" else (res_beta, res_alpha)


def winning_positions(g: SymbolicGame, eg: ExplicitGame) -> set:
    """Environment-layer positions won by the system."""
    nodes = set(eg.succ)
    # a player without moves loses; only system positions can be stuck
    dead = {p for p in _dead_ends(eg, nodes) if eg.owner[p] == "sys"}
    if g.objective is WinCond.SAFETY:
        bad = {p for p in nodes if eg.color[p] == 0} | dead
        win = nodes - _attractor(eg, nodes, "env", bad)
    elif g.objective is WinCond.REACHABILITY:
        good = {p for p in nodes if eg.color[p] > 0 and p[0] == "e"}
        win = _attractor(eg, nodes, "sys", good)
    else:
        if g.objective is WinCond.BUECHI:
            colors = {p: 1 if c > 0 else 0 for p, c in eg.color.items()}
        elif g.objective is WinCond.COBUECHI:
            colors = {p: 1 if c > 0 else 2 for p, c in eg.color.items()}
        else:
            colors = dict(eg.color)
        # after removing the stuck positions' attractor every position keeps a move
        rest = nodes - _attractor(eg, nodes, "env", dead)
        win, _ = _zielonka(eg, rest, colors)
    return {p for p in win if p[0] == "e"}


def explicit_solve(g: SymbolicGame, state_range: range = range(0, 8), input_values=range(-12, 13)):
    """(realizable, winning environment positions) of the finite-range game."""
    eg = enumerate_game(g, state_range, input_values)
    win = winning_positions(g, eg)
    return all(p in win for p in eg.initial), win
