"""Abstract reactive programs from solved safety and reachability games.

Next-state values are read off assignment-like guards: after splitting a
guard into disjunctive cases, every primed variable may occur in at most one
literal, and that literal must be ``v' = e`` with ``e`` prime-free. Primed
variables that a case leaves unconstrained keep their value.
"""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field
from fractions import Fraction

from ..errors import ExtractUnsupported, NotRealizable
from ..game import SymbolicGame
from ..smt import SmtSession
from ..spec import Transition, WinCond
from ..terms import (FALSE, TRUE, App, Term, Var, VarEnv, free_vars, mk_and, mk_not, mk_or, num, prime,
                     substitute)
from ..solver.accel import AccelLemma, _rank_sort
from ..solver.region import Region
from ..solver.solve import SolveOutcome, Verdict

log = logging.getLogger(__name__)

MAX_CASES = 32


@dataclass(frozen=True)
class Assignment:
    var: str
    expr: Term


@dataclass(frozen=True)
class Action:
    assignments: tuple[Assignment, ...]
    target: str
    transition: int  # index into the game's transitions


@dataclass(frozen=True)
class Branch:
    condition: Term
    action: Action
    layer: int = 0


@dataclass(frozen=True)
class RankedLoop:
    """Repeat the branches while ``invariant`` holds and ``base`` does not."""
    invariant: Term
    base: Term
    rank: Term
    epsilon: Fraction
    branches: tuple[Branch, ...]
    layer: int = 0


@dataclass(frozen=True)
class LocationCode:
    name: str
    steps: tuple = ()  # Branch | RankedLoop, tried in order


@dataclass(frozen=True)
class AbstractProgram:
    env: VarEnv
    locations: tuple[str, ...]
    initial: str
    code: tuple[LocationCode, ...]
    objective: WinCond
    targets: frozenset = field(default_factory=frozenset)
    domains: tuple[tuple[str, Term], ...] = ()

    def location_code(self, name: str) -> LocationCode:
        for c in self.code:
            if c.name == name:
                return c
        raise KeyError(name)

    def loops(self):
        for c in self.code:
            for s in c.steps:
                if isinstance(s, RankedLoop):
                    yield c.name, s


# --------------------------------------------------------------------------
# assignment-like guards


def _nnf(t: Term, neg: bool = False) -> Term:
    if isinstance(t, App):
        if t.op == "not":
            return _nnf(t.args[0], not neg)
        if t.op in ("and", "or"):
            op = t.op if not neg else ("or" if t.op == "and" else "and")
            return App(op, tuple(_nnf(a, neg) for a in t.args))
        if t.op == "=>" and len(t.args) == 2:
            return _nnf(App("or", (App("not", (t.args[0],)), t.args[1])), neg)
    if t == TRUE or t == FALSE:
        return (FALSE if t == TRUE else TRUE) if neg else t
    return App("not", (t,)) if neg else t


def guard_cases(guard: Term) -> list[list[Term]] | None:
    """Disjunctive normal form as lists of literals; None when too large."""
    def go(t: Term):
        if isinstance(t, App) and t.op == "or":
            out = []
            for a in t.args:
                out += go(a)
                if len(out) > MAX_CASES:
                    raise OverflowError
            return out
        if isinstance(t, App) and t.op == "and":
            out = [[]]
            for a in t.args:
                out = [c + d for c, d in itertools.product(out, go(a))]
                if len(out) > MAX_CASES:
                    raise OverflowError
            return out
        if t == TRUE:
            return [[]]
        if t == FALSE:
            return []
        return [[t]]

    try:
        return go(_nnf(guard))
    except OverflowError:
        return None


def _primed(t: Term) -> set[str]:
    return {v.name for v in free_vars(t) if v.primed}


def case_assignment(case: list[Term], env: VarEnv) -> tuple[Term, dict[str, Term]] | None:
    """(condition over current values and inputs, assignments) or None when
    the case is not assignment-like."""
    conds, assign = [], {}
    for lit in case:
        ps = _primed(lit)
        if not ps:
            conds.append(lit)
            continue
        if len(ps) != 1:
            return None
        (name,) = ps
        if name in assign:
            return None
        d = env.lookup(name)
        pv = Var(name, d.sort, True)
        if lit == pv:
            assign[name] = TRUE
            continue
        if isinstance(lit, App) and lit.op == "not" and lit.args[0] == pv:
            assign[name] = FALSE
            continue
        if isinstance(lit, App) and lit.op == "=" and len(lit.args) == 2:
            a, b = lit.args
            if a == pv and not _primed(b):
                assign[name] = b
                continue
            if b == pv and not _primed(a):
                assign[name] = a
                continue
        return None
    for d in env.states:
        assign.setdefault(d.name, Var(d.name, d.sort))
    return mk_and(*conds), assign


def transition_cases(t: Transition, env: VarEnv):
    """Assignment-like cases of a transition guard and whether every case was."""
    cases = guard_cases(t.guard)
    if cases is None:
        return [], False
    out, complete = [], True
    for c in cases:
        r = case_assignment(c, env)
        if r is None:
            complete = False
        else:
            out.append(r)
    return out, complete


# --------------------------------------------------------------------------
# extraction


def _after(term: Term, env: VarEnv, assign: dict[str, Term]) -> Term:
    """``term`` over primed state variables, evaluated after the assignment."""
    m = {Var(d.name, d.sort, True): assign[d.name] for d in env.states}
    return substitute(term, m)


class _Builder:
    def __init__(self, g: SymbolicGame, session: SmtSession):
        self.g, self.env, self.session = g, g.env, session
        self.cases = {}
        self.complete = {}
        for k, t in enumerate(g.transitions):
            self.cases[k], self.complete[k] = transition_cases(t, self.env)
        self.index = {id(t): k for k, t in enumerate(g.transitions)}

    def branches(self, loc: str, target_of, layer: int) -> list[Branch]:
        """One branch per assignment-like case whose successor satisfies the
        destination domain and ``target_of(dst)`` (a term over primed vars)."""
        out = []
        for t in self.g.outgoing(loc):
            k = self.index[id(t)]
            tgt = target_of(t.dst)
            if tgt == FALSE:
                continue
            for cond, assign in self.cases[k]:
                post = mk_and(prime(self.g.domain(t.dst), self.env), tgt)
                c = self.session.simplify(mk_and(cond, _after(post, self.env, assign)))
                if c == FALSE:
                    continue
                acts = tuple(Assignment(d.name, assign[d.name]) for d in self.env.states
                             if assign[d.name] != Var(d.name, d.sort))
                out.append(Branch(c, Action(acts, t.dst, k), layer))
        return out

    def check_exhaustive(self, loc: str, region: Term, conds: list[Term]):
        if region == FALSE:
            return
        ok = self.session.check_implies(region, mk_or(*conds))
        if ok is True:
            return
        bad = [t for t in self.g.outgoing(loc) if not self.complete[self.index[id(t)]]]
        if bad:
            raise ExtractUnsupported(loc, bad[0], f"transition {bad[0].src} -> {bad[0].dst} is not assignment-like "
                                                  "and no assignment-like move covers the winning region")
        raise ExtractUnsupported(loc, None, "branch conditions are not exhaustive"
                                 + ("" if ok is False else " (solver gave no answer)"))


def extract_strategy(g: SymbolicGame, outcome: SolveOutcome, session: SmtSession | None = None) -> AbstractProgram:
    """Program that keeps a realizable safety game safe or drives a
    realizable reachability game into its target."""
    if outcome.verdict is not Verdict.REALIZABLE:
        raise NotRealizable(f"no strategy to extract: verdict is {outcome.describe()}")
    if g.objective not in (WinCond.SAFETY, WinCond.REACHABILITY):
        raise ExtractUnsupported(g.initial, None, f"strategy extraction for {g.objective} objectives is not supported")
    own = session is None
    session = session or SmtSession()
    try:
        b = _Builder(g, session)
        if g.objective is WinCond.SAFETY:
            code = _safety(g, b, outcome.system_region)
            targets = frozenset()
        else:
            code = _reachability(g, b, outcome)
            targets = frozenset(loc.name for loc in g.locations if loc.color > 0)
    finally:
        if own:
            session.close()
    return AbstractProgram(g.env, tuple(g.names), g.initial, tuple(code), g.objective, targets,
                           tuple((loc.name, loc.domain) for loc in g.locations))


def _safety(g: SymbolicGame, b: _Builder, W: Region) -> list[LocationCode]:
    code = []
    for loc in g.names:
        brs = b.branches(loc, lambda dst: prime(W[dst], g.env), 0)
        b.check_exhaustive(loc, mk_and(g.domain(loc), W[loc]), [x.condition for x in brs])
        code.append(LocationCode(loc, tuple(brs)))
    return code


def _reachability(g: SymbolicGame, b: _Builder, out: SolveOutcome) -> list[LocationCode]:
    layers = out.layers
    steps: dict[str, list] = {loc: [] for loc in g.names}
    conds: dict[str, list[Term]] = {loc: [] for loc in g.names}
    seen: dict[str, set] = {loc: set() for loc in g.names}
    for k in range(1, len(layers)):
        prev = layers[k - 1]
        lemma: AccelLemma | None = out.lemma_layers.get(k)
        if lemma is None:
            for loc in g.names:
                for br in b.branches(loc, lambda dst, prev=prev: prime(prev[dst], g.env), k):
                    key = (br.condition, br.action)
                    if key not in seen[loc]:
                        seen[loc].add(key)
                        steps[loc].append(br)
                        conds[loc].append(br.condition)
            continue
        if not lemma.single_location:
            raise ExtractUnsupported(lemma.location, None, "lemma spans several locations")
        loc = lemma.location
        sort = _rank_sort(lemma.rank)

        def tgt(dst, prev=prev, lemma=lemma, sort=sort):
            t = prime(prev[dst], g.env)
            if dst == lemma.location:
                down = App("<=", (prime(lemma.rank, g.env), App("-", (lemma.rank, num(lemma.epsilon, sort)))))
                t = mk_or(t, mk_and(prime(lemma.invariant, g.env), down))
            return t

        brs = b.branches(loc, tgt, k)
        region = mk_and(g.domain(loc), lemma.invariant, mk_not(prev[loc]))
        b.check_exhaustive(loc, region, [x.condition for x in brs])
        steps[loc].append(RankedLoop(lemma.invariant, prev[loc], lemma.rank, lemma.epsilon, tuple(brs), k))
        conds[loc].append(mk_and(lemma.invariant, mk_not(prev[loc])))
    code = []
    final = out.system_region
    for loc in g.names:
        if g.color(loc) > 0:
            # the objective is met on arrival; any legal move will do afterwards
            code.append(LocationCode(loc, tuple(b.branches(loc, lambda dst: TRUE, 0))))
            continue
        b.check_exhaustive(loc, mk_and(g.domain(loc), final[loc]), conds[loc])
        code.append(LocationCode(loc, tuple(steps[loc])))
    return code
