"""One-step enforceable predecessors over symbolic games and their sub-games.

Positions come in two layers. At an environment position ``(loc, v)`` the
environment picks inputs ``i``; at the resulting system position
``(loc, v, i)`` the system picks an outgoing transition and next values
``v'`` with the guard and the target domain satisfied. A sub-game keeps a
region ``S`` of environment positions and a region ``T`` (over states and
inputs) of system positions; moves leaving the sub-game are not available.
"""

from __future__ import annotations

import enum
import threading
import time
from dataclasses import dataclass

from ..game import SymbolicGame
from ..smt import SmtSession
from ..terms import (FALSE, TRUE, Term, Var, free_vars, has_quantifier, mk_and, mk_exists, mk_forall, mk_implies,
                     mk_not, mk_or, prime)
from .region import Region


class Player(enum.Enum):
    SYSTEM = "System"
    ENVIRONMENT = "Environment"

    @property
    def opponent(self) -> "Player":
        return Player.ENVIRONMENT if self is Player.SYSTEM else Player.SYSTEM

    def __str__(self) -> str:
        return self.value


PlayerId = Player


class SolverInterrupted(Exception):
    """Raised inside a solve run when the wall clock or a cancel flag stops it."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


@dataclass(frozen=True)
class Subgame:
    S: Region  # environment positions, over state variables
    T: Region  # system positions, over state and input variables

    def locations(self) -> list[str]:
        return list(self.S)


class Arena:
    """A game together with an SMT session and memoized predecessor steps."""

    def __init__(self, game: SymbolicGame, session: SmtSession, deadline: float | None = None,
                 cancel: threading.Event | None = None):
        self.game = game
        self.env = game.env
        self.session = session
        self.deadline = deadline
        self.cancel = cancel
        self.inputs: list[Var] = game.env.input_vars()
        self.states: list[Var] = game.env.state_vars()
        self.primed: list[Var] = game.env.state_vars(primed=True)
        self._memo: dict = {}
        self.exact = True  # cleared when some quantifier could not be eliminated

    # -- housekeeping -------------------------------------------------------

    def check_time(self):
        if self.cancel is not None and self.cancel.is_set():
            raise SolverInterrupted("cancelled")
        if self.deadline is not None and time.monotonic() > self.deadline:
            raise SolverInterrupted("timeout")

    def qe(self, t: Term) -> Term:
        self.check_time()
        if not has_quantifier(t):
            return t
        key = ("qe", t)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        r, ok = self.session.qelim(t)
        if not ok:
            self.exact = False
        else:
            r = self.simp(r)
        self._memo[key] = r
        return r

    def simp(self, t: Term) -> Term:
        if t in (TRUE, FALSE) or has_quantifier(t):
            return t
        return self.session.simplify(t)

    def full(self) -> Subgame:
        doms = Region((loc.name, loc.domain) for loc in self.game.locations)
        return Subgame(doms, doms)

    def domain(self, loc: str) -> Term:
        return self.game.domain(loc)

    def is_empty(self, t: Term) -> bool:
        """Sound emptiness: only True when the backend proves unsatisfiability."""
        if t == FALSE:
            return True
        return self.session.is_sat(t) is False

    # -- predecessor steps --------------------------------------------------

    def moves(self, loc: str, sub: Subgame):
        return [t for t in self.game.outgoing(loc) if sub.S[t.dst] != FALSE]

    def sys_inner(self, loc: str, sub: Subgame, targets: dict[str, Term]) -> Term:
        """∨_t ∃v'. guard ∧ S(dst)' ∧ targets[dst], over current states and inputs.

        ``targets`` maps a location to a term over primed (and possibly
        unprimed) variables; missing entries mean ``false``."""
        parts = []
        for t in self.moves(loc, sub):
            tgt = targets.get(t.dst, FALSE)
            if tgt == FALSE:
                continue
            body = mk_and(t.guard, prime(sub.S[t.dst], self.env), tgt)
            parts.append(self.qe(mk_exists(self.primed, body)))
        return mk_or(*parts)

    def env_inner(self, loc: str, sub: Subgame, targets: dict[str, Term]) -> Term:
        """∧_t ∀v'. guard ∧ S(dst)' ⇒ targets[dst]."""
        parts = []
        for t in self.moves(loc, sub):
            tgt = targets.get(t.dst, FALSE)
            if tgt == TRUE:
                continue
            body = mk_and(t.guard, prime(sub.S[t.dst], self.env), mk_not(tgt))
            parts.append(mk_not(self.qe(mk_exists(self.primed, body))))
        return mk_and(*parts)

    def step(self, player: Player, loc: str, sub: Subgame, targets: dict[str, Term]) -> Term:
        """States at ``loc`` from which ``player`` forces one step into ``targets``."""
        if player is Player.SYSTEM:
            inner = self.sys_inner(loc, sub, targets)
            f = self.qe(mk_forall(self.inputs, mk_implies(sub.T[loc], inner)))
        else:
            inner = self.env_inner(loc, sub, targets)
            f = self.qe(mk_exists(self.inputs, mk_and(sub.T[loc], inner)))
        return f

    def primed_targets(self, r: Region) -> dict[str, Term]:
        return {loc: prime(t, self.env) for loc, t in r.items()}

    def cpre(self, player: Player, r: Region, sub: Subgame | None = None) -> Region:
        sub = sub or self.full()
        targets = self.primed_targets(r)
        out = {}
        for loc in sub.S:
            key = ("cpre", player, loc, sub.S[loc], sub.T[loc], tuple(self._relevant(loc, sub, targets)))
            hit = self._memo.get(key)
            if hit is None:
                hit = self.simp(mk_and(sub.S[loc], self.step(player, loc, sub, targets)))
                self._memo[key] = hit
            out[loc] = hit
        return Region(out)

    def _relevant(self, loc: str, sub: Subgame, targets: dict[str, Term]):
        return [(t.dst, sub.S[t.dst], targets.get(t.dst, FALSE)) for t in self.moves(loc, sub)]

    def attracted_positions(self, player: Player, attr: Region, sub: Subgame) -> Region:
        """System positions (states and inputs) belonging to ``player``'s attractor."""
        targets = self.primed_targets(attr)
        out = {}
        for loc in sub.S:
            if player is Player.SYSTEM:
                inner = self.sys_inner(loc, sub, targets)
            else:
                inner = self.env_inner(loc, sub, targets)
            out[loc] = self.simp(mk_and(sub.T[loc], inner))
        return Region(out)

    def remove(self, sub: Subgame, player: Player, attr: Region) -> Subgame:
        """Sub-game left after deleting ``player``'s attractor ``attr``."""
        B = self.attracted_positions(player, attr, sub)
        S2 = {}
        for loc in sub.S:
            s = self.simp(mk_and(sub.S[loc], mk_not(attr[loc])))
            if not self.is_empty(s):
                S2[loc] = s
        T2 = {loc: self.simp(mk_and(sub.T[loc], mk_not(B[loc]), S2[loc])) for loc in S2}
        return Subgame(Region(S2), Region(T2))

    # -- structure ----------------------------------------------------------

    def scc(self, loc: str, sub: Subgame) -> list[str] | None:
        """Locations of the strongly connected component of ``loc`` within the
        sub-game's location graph; None when ``loc`` lies on no cycle."""
        alive = set(sub.S)
        succ = {l: {t.dst for t in self.game.outgoing(l) if t.dst in alive} for l in alive}

        def reach(start: str, graph) -> set[str]:
            seen, todo = set(), [start]
            while todo:
                for n in graph.get(todo.pop(), ()):
                    if n not in seen:
                        seen.add(n)
                        todo.append(n)
            return seen

        if loc not in alive:
            return None
        fwd = reach(loc, succ)
        if loc not in fwd:
            return None
        pred: dict[str, set[str]] = {l: set() for l in alive}
        for l, ds in succ.items():
            for d in ds:
                pred[d].add(l)
        bwd = reach(loc, pred)
        comp = fwd & bwd
        return [l for l in self.game.names if l in comp]


def term_vars(t: Term) -> set[tuple[str, bool]]:
    return {v.key for v in free_vars(t)}
