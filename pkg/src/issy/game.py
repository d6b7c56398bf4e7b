"""Symbolic games, the conjunctive product and structural validation.

A play step: the environment picks inputs, then the system picks an outgoing
transition and next state values satisfying the guard and the domain of the
target location. A system without a legal move loses.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import cached_property

from .errors import EnvMismatch, MultipleNonSafety
from .frontend.syntax import NOWHERE, Diagnostic, warning
from .spec import GameBlock, Location, Spec, Transition, WinCond
from .terms import (FALSE, TRUE, App, Sort, Term, VarEnv, mk_and, normalize, prime, resolve_numerals)

log = logging.getLogger(__name__)

SINK = "sink"


@dataclass(frozen=True)
class SymbolicGame:
    env: VarEnv
    locations: tuple[Location, ...]
    transitions: tuple[Transition, ...]
    objective: WinCond
    initial: str
    name: str = field(default="game", compare=False)

    def __post_init__(self):
        names = [loc.name for loc in self.locations]
        if len(set(names)) != len(names):
            raise ValueError("duplicate location names")
        known = set(names)
        for t in self.transitions:
            if t.src not in known or t.dst not in known:
                raise ValueError(f"transition {t.src}->{t.dst} uses an undeclared location")
        if self.initial not in known:
            raise ValueError(f"initial location '{self.initial}' is not declared")

    @cached_property
    def _locs(self) -> dict[str, Location]:
        return {loc.name: loc for loc in self.locations}

    @cached_property
    def _out(self) -> dict[str, tuple[Transition, ...]]:
        out: dict[str, list] = {loc.name: [] for loc in self.locations}
        for t in self.transitions:
            out[t.src].append(t)
        return {k: tuple(v) for k, v in out.items()}

    @property
    def names(self) -> list[str]:
        return [loc.name for loc in self.locations]

    def location(self, name: str) -> Location:
        return self._locs[name]

    def color(self, name: str) -> int:
        return self._locs[name].color

    def domain(self, name: str) -> Term:
        return self._locs[name].domain

    def outgoing(self, name: str) -> tuple[Transition, ...]:
        return self._out[name]

    @property
    def max_color(self) -> int:
        return max((loc.color for loc in self.locations), default=0)

    def reachable(self) -> list[str]:
        seen, order, todo = {self.initial}, [self.initial], [self.initial]
        while todo:
            for t in self.outgoing(todo.pop()):
                if t.dst not in seen:
                    seen.add(t.dst)
                    order.append(t.dst)
                    todo.append(t.dst)
        return order


def _resolve(t: Term) -> Term:
    return resolve_numerals(t, Sort.BOOL)


def from_game_block(block: GameBlock, env: VarEnv, name: str = "game") -> SymbolicGame:
    """Game block to a SymbolicGame with every numeral given a concrete sort."""
    locs = tuple(Location(loc.name, loc.color, _resolve(loc.domain)) for loc in block.locations)
    trans = tuple(Transition(t.src, t.dst, _resolve(t.guard)) for t in block.transitions)
    return SymbolicGame(env, locs, trans, block.wincond, block.initial, name)


def trivial_game(env: VarEnv) -> SymbolicGame:
    """Single safe location with a true self-loop: always realizable."""
    return SymbolicGame(env, (Location("top", 1, TRUE),), (Transition("top", "top", TRUE),),
                        WinCond.SAFETY, "top", "trivial")


# --------------------------------------------------------------------------
# product


def _losing_sink_color(objective: WinCond, colors: list[int]) -> int:
    if objective is WinCond.PARITY:
        top = max(colors, default=0)
        return top if top % 2 == 0 else top + 1
    return 0


def _flagged_reachability(g: SymbolicGame) -> SymbolicGame:
    """Reachability as Buechi over (location, reached-flag).

    Used inside products: reaching a target must not end the obligations of
    the other components, so the product tracks whether the target has been
    seen and demands staying in flagged locations forever."""
    def nm(loc: str, f: int) -> str:
        return f"{loc}#{f}"

    targets = {loc.name for loc in g.locations if loc.color > 0}
    start = (g.initial, 1 if g.initial in targets else 0)
    seen, todo = {start}, [start]
    trans = []
    while todo:
        loc, f = todo.pop(0)
        for t in g.outgoing(loc):
            nf = 1 if (f or t.dst in targets) else 0
            dst = (t.dst, nf)
            trans.append(Transition(nm(loc, f), nm(*dst), t.guard))
            if dst not in seen:
                seen.add(dst)
                todo.append(dst)
    order = sorted(seen, key=lambda p: (g.names.index(p[0]), p[1]))
    locs = tuple(Location(nm(loc, f), f, g.domain(loc)) for loc, f in order)
    return SymbolicGame(g.env, locs, tuple(trans), WinCond.BUECHI, nm(*start), g.name)


def product(g1: SymbolicGame, g2: SymbolicGame) -> SymbolicGame:
    """Synchronous product: both components move in every step.

    Pairs in which a safety component sits in a color-0 location are replaced
    by a sink that is losing under the product objective. A Reachability side
    combined with a safety side becomes a Buechi game on a reached flag."""
    if g1.env != g2.env:
        raise EnvMismatch("games are defined over different variable declarations")
    safe1 = g1.objective is WinCond.SAFETY
    safe2 = g2.objective is WinCond.SAFETY
    if not safe1 and not safe2:
        raise MultipleNonSafety(f"both '{g1.name}' ({g1.objective}) and '{g2.name}' ({g2.objective}) are non-safety")
    if safe1 and safe2:
        objective = WinCond.SAFETY
        live = None
    else:
        if not safe1:
            g1, g2 = g2, g1
            swapped = True
        else:
            swapped = False
        # g1 is now safety, g2 the live side
        if g2.objective is WinCond.REACHABILITY:
            g2 = _flagged_reachability(g2)
        objective = g2.objective
        live = g2
        if swapped:
            g1, g2 = g2, g1
    colors = [loc.color for loc in (live.locations if live else ())]
    sink_color = _losing_sink_color(objective, colors)

    def bad(l1: str, l2: str) -> bool:
        return (g1.objective is WinCond.SAFETY and g1.color(l1) == 0) or \
               (g2.objective is WinCond.SAFETY and g2.color(l2) == 0)

    def pair_color(l1: str, l2: str) -> int:
        if live is None:
            return 1
        return g1.color(l1) if live is g1 else g2.color(l2)

    def nm(l1: str, l2: str) -> str:
        return f"{l1}|{l2}"

    env = g1.env
    start = (g1.initial, g2.initial)
    locs: list[Location] = []
    trans: list[Transition] = []
    used_sink = False
    if bad(*start):
        dom = mk_and(g1.domain(start[0]), g2.domain(start[1]))
        return SymbolicGame(env, (Location(SINK, sink_color, dom),), (Transition(SINK, SINK, TRUE),),
                            objective, SINK, f"{g1.name}*{g2.name}")
    seen, todo = {start}, [start]
    while todo:
        l1, l2 = todo.pop(0)
        locs.append(Location(nm(l1, l2), pair_color(l1, l2), mk_and(g1.domain(l1), g2.domain(l2))))
        for t1 in g1.outgoing(l1):
            for t2 in g2.outgoing(l2):
                guard = App("and", (t1.guard, t2.guard))
                if normalize(guard) == FALSE:
                    continue
                dst = (t1.dst, t2.dst)
                if bad(*dst):
                    dom = mk_and(g1.domain(dst[0]), g2.domain(dst[1]))
                    pd = prime(dom, env)
                    trans.append(Transition(nm(l1, l2), SINK, guard if pd == TRUE else App("and", (guard, pd))))
                    used_sink = True
                    continue
                trans.append(Transition(nm(l1, l2), nm(*dst), guard))
                if dst not in seen:
                    seen.add(dst)
                    todo.append(dst)
    if used_sink:
        locs.append(Location(SINK, sink_color, TRUE))
        trans.append(Transition(SINK, SINK, TRUE))
    return SymbolicGame(env, tuple(locs), tuple(trans), objective, nm(*start), f"{g1.name}*{g2.name}")


def build_arena(spec: Spec, translator=None) -> SymbolicGame:
    """Fold all formula-block games and game blocks into one product game.

    Formula blocks come first, then game blocks, each in declaration order."""
    from .logic.automata import formula_block_to_game

    games = [formula_block_to_game(b.assumes, b.asserts, spec.env, translator, name=f"formula{i}")
             for i, b in enumerate(spec.formulas)]
    games += [from_game_block(b, spec.env, name=f"game{i}") for i, b in enumerate(spec.games)]
    if not games:
        return trivial_game(spec.env)
    acc = games[0]
    for g in games[1:]:
        acc = product(acc, g)
    return acc


# --------------------------------------------------------------------------
# validation


def validate(g: SymbolicGame, session=None) -> list[Diagnostic]:
    """Best-effort structural warnings: dead ends, unreachable locations and
    unsatisfiable guards."""
    from .smt import Verdict, default_session

    session = session or default_session()
    diags = []
    reach = set(g.reachable())
    for loc in g.locations:
        if not g.outgoing(loc.name):
            diags.append(warning("DEADEND", f"location '{loc.name}' has no outgoing transition; "
                                            "the system loses there", NOWHERE))
        if loc.name not in reach:
            diags.append(warning("UNREACHABLE", f"location '{loc.name}' is unreachable", NOWHERE))
    for t in g.transitions:
        guard = mk_and(t.guard, prime(g.domain(t.dst), g.env))
        try:
            r = session.check_sat([guard], want_model=False)
        except Exception as e:  # validation must never fail the pipeline
            log.debug("guard check failed: %s", e)
            continue
        if r.verdict is Verdict.UNSAT:
            diags.append(warning("UNSAT_GUARD", f"transition {t.src} -> {t.dst} can never be taken", NOWHERE))
    return diags
