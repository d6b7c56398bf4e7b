"""From RP-LTL formula blocks to symbolic games.

Atoms are abstracted to propositions ``p0, p1, ...`` in first-occurrence
order, the propositional formula is translated externally to a deterministic
automaton, and the automaton is turned back into a game by substituting the
atoms into the edge labels.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from ..errors import MissingAtom
from ..game import SymbolicGame
from ..spec import Location, Transition, WinCond
from ..terms import FALSE, TRUE, Sort, Term, VarEnv, mk_and, mk_not, mk_or, normalize, resolve_numerals
from .hoa import Automaton, Label, parse_hoa
from .rpltl import LTL, Atom, atoms, implication, is_syntactic_safety
from .translate import LtlTranslator

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AtomTable:
    atoms: tuple[Term, ...] = ()

    def __len__(self) -> int:
        return len(self.atoms)

    def index(self, term: Term) -> int | None:
        try:
            return self.atoms.index(term)
        except ValueError:
            return None

    def items(self):
        return [(f"p{i}", a) for i, a in enumerate(self.atoms)]


def canonical_atom(term: Term) -> Term:
    return normalize(resolve_numerals(term, Sort.BOOL))


def collect_atoms(f: LTL) -> AtomTable:
    """Distinct normalized non-constant atoms in first-occurrence order."""
    seen: list[Term] = []
    for a in atoms(f):
        c = canonical_atom(a)
        if c in (TRUE, FALSE) or c in seen:
            continue
        seen.append(c)
    return AtomTable(tuple(seen))


_PREC = {"iff": 1, "implies": 2, "or": 3, "and": 4, "U": 5, "W": 5, "R": 5}
_SYM = {"iff": "<->", "implies": "->", "or": "|", "and": "&", "U": "U", "W": "W", "R": "R"}


def abstract_to_ltl(f: LTL, table: AtomTable) -> str:
    """Propositional LTL in Spot syntax with atoms replaced by ``p<i>``."""

    def go(g: LTL) -> tuple[str, int]:
        if isinstance(g, Atom):
            c = canonical_atom(g.term)
            if c == TRUE:
                return "1", 9
            if c == FALSE:
                return "0", 9
            i = table.index(c)
            if i is None:
                raise MissingAtom(f"atom {g.term} is not in the atom table")
            return f"p{i}", 9
        op = g.op
        if op in ("not", "X", "F", "G"):
            s, p = go(g.args[0])
            if p < 8:
                s = f"({s})"
            return ("!" + s if op == "not" else f"{op} {s}"), 8
        if op in ("and", "or") and not g.args:
            return ("1" if op == "and" else "0"), 9
        if op in ("and", "or") and len(g.args) == 1:
            return go(g.args[0])
        prec = _PREC[op]
        parts = []
        for a in g.args:
            s, p = go(a)
            # everything binary is parenthesized when nested, for readability
            parts.append(f"({s})" if p <= 5 else s)
        return f" {_SYM[op]} ".join(parts), prec

    return go(f)[0]


def _concretize(lab: Label, props: dict[int, Term]) -> Term:
    k = lab[0]
    if k == "t":
        return TRUE
    if k == "f":
        return FALSE
    if k == "ap":
        return props[lab[1]]
    if k == "not":
        return mk_not(_concretize(lab[1], props))
    parts = [_concretize(x, props) for x in lab[1:]]
    return mk_and(parts) if k == "and" else mk_or(parts)


_PNAME = re.compile(r"p(\d+)\Z")


def _props(aut: Automaton, table: AtomTable) -> dict[int, Term]:
    props = {}
    for i, name in enumerate(aut.aps):
        m = _PNAME.match(name)
        if not m or int(m.group(1)) >= len(table):
            raise MissingAtom(f"automaton proposition '{name}' has no atom")
        props[i] = table.atoms[int(m.group(1))]
    return props


def automaton_to_game(aut: Automaton, table: AtomTable, env: VarEnv, safety: bool = False,
                      name: str = "formula") -> SymbolicGame:
    """Game whose locations track the automaton state.

    With transition-based colors a state is split by the color of the edge
    entering it, so that location colors carry the acceptance. With
    ``safety`` the game is a Safety game whose unsafe locations are the
    states with empty language."""
    props = _props(aut, table)
    if safety:
        alive = aut.nonempty_states()

        def col(q: int, c: int) -> int:
            return 1 if q in alive else 0
    else:
        def col(q: int, c: int) -> int:
            return c

    # location variants per state: colors of the incoming edges
    variants: dict[int, set[int]] = {q: set() for q in range(aut.states)}
    for q, es in aut.edges.items():
        for e in es:
            variants[e.target].add(col(e.target, e.color))
    if not variants[aut.initial]:
        variants[aut.initial].add(col(aut.initial, 0))

    def loc_name(q: int, c: int) -> str:
        return f"q{q}" if len(variants[q]) == 1 else f"q{q}c{c}"

    # only keep variants reachable from the initial one
    init = (aut.initial, min(variants[aut.initial]))
    seen, order, todo = {init}, [init], [init]
    trans = []
    while todo:
        q, c = todo.pop(0)
        for e in aut.edges[q]:
            guard = _concretize(e.label, props)
            if guard == FALSE:
                continue
            dst = (e.target, col(e.target, e.color))
            trans.append(Transition(loc_name(q, c), loc_name(*dst), guard))
            if dst not in seen:
                seen.add(dst)
                order.append(dst)
                todo.append(dst)
    locs = tuple(Location(loc_name(q, c), c, TRUE) for q, c in order)
    if safety:
        objective = WinCond.SAFETY
    elif max((c for _, c in order), default=0) <= 1:
        objective = WinCond.BUECHI
    else:
        objective = WinCond.PARITY
    return SymbolicGame(env, locs, tuple(trans), objective, loc_name(*init), name)


def formula_block_to_game(assumes, asserts, env: VarEnv, translator: LtlTranslator | None = None,
                          name: str = "formula") -> SymbolicGame:
    f = implication(tuple(assumes), tuple(asserts))
    table = collect_atoms(f)
    ltl = abstract_to_ltl(f, table)
    translator = translator or LtlTranslator()
    log.info("translating %s", ltl)
    aut = parse_hoa(translator.translate(ltl))
    return automaton_to_game(aut, table, env, safety=is_syntactic_safety(f), name=name)
