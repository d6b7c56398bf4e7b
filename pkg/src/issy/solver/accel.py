"""Geometric attractor acceleration.

A lemma at location ``loc`` names an invariant ``B`` and a rank ``r``: from
every state in ``B`` that is not yet attracted, the player can force either
the attracted states or a return to ``loc`` inside ``B`` with ``r`` lowered by
at least ``epsilon``, while ``r`` stays non-negative. Repeating that strategy
must end in the attracted set, so all of ``B`` is attracted.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction

from ..terms import (FALSE, TRUE, App, Sort, Term, Var, conjuncts, free_vars, infer, iter_subterms, mk_and,
                     mk_not, mk_or, normalize, num, prime, substitute)
from .arena import Arena, Player, Subgame
from .region import Region

log = logging.getLogger(__name__)

GHOST = "__g"
_CMP = ("<", "<=", ">", ">=", "=")


@dataclass(frozen=True)
class AccelLemma:
    location: str
    base: Term
    invariant: Term
    rank: Term
    epsilon: Fraction
    conclusion: Term
    scc: tuple[str, ...] = ()
    player: Player = field(default=Player.SYSTEM, compare=False)

    @property
    def single_location(self) -> bool:
        return self.scc == (self.location,)


def _keeps(guard: Term, v: Var) -> bool:
    """Does ``guard`` syntactically force ``v' = v``?"""
    pv = Var(v.name, v.sort, True)
    for c in conjuncts(guard):
        if isinstance(c, App) and c.op == "=" and len(c.args) == 2 and set(c.args) == {v, pv}:
            return True
    return False


def progress_variables(arena: Arena, scc: list[str]) -> list[Var]:
    """Numeric state variables that some transition inside ``scc`` may change."""
    inside = set(scc)
    cyc = [t for t in arena.game.transitions if t.src in inside and t.dst in inside]
    return [v for v in arena.states if v.sort is not Sort.BOOL and not all(_keeps(t.guard, v) for t in cyc)]


def _atoms(t: Term):
    for s in iter_subterms(t):
        if isinstance(s, App) and s.op in _CMP and len(s.args) == 2:
            a, b = s.args
            try:
                sort = infer(a)
            except Exception:
                continue
            if sort in (Sort.INT, Sort.REAL):
                yield a, b, sort


def candidate_ranks(arena: Arena, progress: list[Var], regions: list[Term], limit: int = 12) -> list[Term]:
    """Distance terms: the progress variables themselves, then ``a - b`` and
    ``b - a`` for comparisons ``a ⋈ b`` in the given regions that mention a
    progress variable."""
    keys = {v.key for v in progress}
    out: list[Term] = []

    def add(t: Term):
        t = normalize(t)
        if t not in out and not isinstance(t, type(TRUE)):
            out.append(t)

    for v in progress:
        add(v)
    for v in progress:
        add(App("-", (v,)))
    for r in regions:
        for a, b, _ in _atoms(r):
            if not ({w.key for w in free_vars(a)} | {w.key for w in free_vars(b)}) & keys:
                continue
            add(App("-", (a, b)))
            add(App("-", (b, a)))
    return out[:limit]


def _rank_sort(r: Term) -> Sort:
    try:
        s = infer(r)
    except Exception:
        return Sort.REAL
    return Sort.INT if s is Sort.INT else Sort.REAL


class _Search:
    def __init__(self, arena: Arena, player: Player, loc: str, sub: Subgame, reached: Region,
                 scc: list[str], rank: Term, eps: Fraction):
        self.a, self.p, self.loc, self.sub = arena, player, loc, sub
        self.reached, self.scc, self.rank, self.eps = reached, scc, rank, eps
        sort = _rank_sort(rank)
        self.eps_t = num(eps, sort)
        self.zero = num(0, sort)
        self.ghosts = {v: Var(v.name + GHOST, v.sort) for v in arena.states}

    def cond(self, B: Term) -> Term:
        """States at loc (as a term over unprimed variables) from which the
        player forces reached, or loc-within-B with a lower rank."""
        a, env = self.a, self.a.env
        r = self.rank
        if len(self.scc) == 1:
            tg = self.a.primed_targets(self.reached)
            dec = mk_and(prime(B, env), App("<=", (prime(r, env), App("-", (r, self.eps_t)))))
            tg[self.loc] = mk_or(tg.get(self.loc, FALSE), dec)
            return a.step(self.p, self.loc, self.sub, tg)
        # several locations: iterate predecessors inside the SCC against a
        # ghost copy of the state taken when leaving loc
        rg = substitute(r, self.ghosts)
        Y = dict(self.reached.items())
        base = dict(Y)
        base[self.loc] = mk_or(Y.get(self.loc, FALSE), mk_and(B, App("<=", (r, App("-", (rg, self.eps_t))))))
        Y = dict(base)
        inside = [l for l in self.scc if l in self.sub.S]
        for _ in range(len(inside) + 1):
            tg = {l: prime(t, env) for l, t in Y.items()}
            nY = dict(base)
            for l in inside:
                nY[l] = a.simp(mk_or(base.get(l, FALSE), mk_and(self.sub.S[l], a.step(self.p, l, self.sub, tg))))
            Y = nY
        tg = {l: prime(t, env) for l, t in Y.items()}
        f = a.step(self.p, self.loc, self.sub, tg)
        back = {g: v for v, g in self.ghosts.items()}
        return substitute(f, back)

    def obligation(self, B: Term) -> Term:
        return mk_and(App(">=", (self.rank, self.zero)), self.cond(B))

    def valid(self, B: Term) -> bool:
        a = self.a
        lhs = mk_and(self.sub.S[self.loc], B, mk_not(self.reached[self.loc]))
        return a.session.check_implies(lhs, self.obligation(B)) is True

    def run(self, rounds: int = 5) -> Term | None:
        a = self.a
        A = self.reached[self.loc]
        B = self.sub.S[self.loc]
        for _ in range(rounds):
            a.check_time()
            nb = a.simp(mk_and(B, mk_or(A, self.obligation(B))))
            if a.session.check_implies(B, nb) is True:
                break
            B = nb
        if not self.valid(B):
            return None
        if a.session.is_sat(mk_and(self.sub.S[self.loc], B, mk_not(A))) is not True:
            return None
        return self.generalize(B)

    def generalize(self, B: Term) -> Term:
        """Greedily drop conjuncts while the descent obligation stays valid."""
        parts = conjuncts(B)
        if len(parts) < 2 or len(parts) > 6:
            return B
        i = 0
        while i < len(parts) and len(parts) > 1:
            trial = mk_and(*(parts[:i] + parts[i + 1:]))
            if self.valid(trial):
                parts = parts[:i] + parts[i + 1:]
            else:
                i += 1
        return mk_and(*parts)


def accelerate_geometric(arena: Arena, player: Player, loc: str, target: Region, reached: Region,
                         sub: Subgame | None = None, epsilon: Fraction = Fraction(1, 2),
                         max_candidates: int = 12) -> AccelLemma | None:
    """Try to prove that a ranked loop through ``loc`` reaches ``reached``."""
    sub = sub or arena.full()
    scc = arena.scc(loc, sub)
    if not scc:
        return None
    progress = progress_variables(arena, scc)
    if not progress:
        return None
    regions = [reached[l] for l in scc] + [target[l] for l in scc]
    for rank in candidate_ranks(arena, progress, regions, max_candidates):
        eps = Fraction(1) if _rank_sort(rank) is Sort.INT else Fraction(epsilon)
        try:
            B = _Search(arena, player, loc, sub, reached, scc, rank, eps).run()
        except Exception as e:  # backend trouble means no lemma, never a wrong one
            if type(e).__name__ == "SolverInterrupted":
                raise
            log.debug("acceleration at %s with rank %s failed: %s", loc, rank, e)
            continue
        if B is None:
            continue
        concl = arena.simp(mk_and(sub.S[loc], B))
        log.info("lemma at %s: rank %s, invariant %s", loc, rank, B)
        return AccelLemma(loc, reached[loc], B, rank, eps, concl, tuple(scc), player)
    return None
