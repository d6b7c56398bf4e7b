"""Elaboration: macro-free surface AST to a typed Spec."""

from __future__ import annotations

from ..errors import SortError
from ..logic.rpltl import Atom, Op
from ..spec import FormulaBlock, GameBlock, Location, Spec, Transition, WinCond
from ..terms import (FALSE, TRUE, App, Const, Sort, Term, Var, VarDecl, VarEnv, VarKind, app_sort,
                     free_vars)
from .syntax import (Diagnostic, FBinary, FBool, FHavoc, FIdent, FKeep, FPred, FUnary, PBinary, PIdent,
                     PNum, PUnary, SourceSpec, Span, error, warning)

_SORTS = {"int": Sort.INT, "bool": Sort.BOOL, "real": Sort.REAL}
_LTL_OPS = {"!": "not", "&&": "and", "||": "or", "->": "implies", "<->": "iff",
            "X": "X", "F": "F", "G": "G", "U": "U", "W": "W", "R": "R"}


class _Fail(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


def _flatten(node, op):
    """Operands of a left- or right-nested chain of the same binary operator."""
    if isinstance(node, FBinary) and node.op == op:
        return _flatten(node.left, op) + _flatten(node.right, op)
    return [node]


def _pflatten(node, op):
    if isinstance(node, PBinary) and node.op == op:
        return _pflatten(node.left, op) + [node.right]
    return [node]


class _Elaborator:
    def __init__(self, env: VarEnv):
        self.env = env

    # -- variables ---------------------------------------------------------

    def var(self, name: str, primed: bool, span: Span) -> Var:
        d = self.env.lookup(name)
        if d is None:
            raise _Fail(error("UNKNOWN_VARIABLE", f"unknown variable '{name}'", span))
        if primed and d.kind is VarKind.INPUT:
            raise _Fail(error("PRIMED_INPUT", f"input variable '{name}' cannot be primed", span))
        return Var(name, d.sort, primed)

    # -- predicates --------------------------------------------------------

    def pred(self, p) -> tuple[Term, object]:
        if isinstance(p, PNum):
            if p.is_rat:
                return Const(p.value, Sort.REAL), Sort.REAL
            return Const(p.value, None), "num"
        if isinstance(p, PIdent):
            v = self.var(p.name, p.primed, p.span)
            return v, v.sort
        if isinstance(p, PUnary):
            a, s = self.pred(p.arg)
            return self._app(p.op, [a], [s], p.span)
        if isinstance(p, PBinary):
            parts = _pflatten(p, p.op) if p.op in ("+", "*") else [p.left, p.right]
            built = [self.pred(x) for x in parts]
            return self._app(p.op, [b[0] for b in built], [b[1] for b in built], p.span)
        raise TypeError(p)

    def _app(self, op, args, sorts, span) -> tuple[Term, object]:
        try:
            s = app_sort(op, sorts)
        except SortError as e:
            raise _Fail(error("SORT_ERROR", str(e), span)) from None
        return App(op, tuple(args)), s

    def atom(self, f) -> Term:
        """Atomic formula to a Bool term. Numerals keep the form they were
        written in; consumers resolve them with ``resolve_numerals``."""
        if isinstance(f, FBool):
            return TRUE if f.value else FALSE
        if isinstance(f, FIdent):
            v = self.var(f.name, f.primed, f.span)
            if v.sort is not Sort.BOOL:
                raise _Fail(error("SORT_ERROR", f"'{f.name}' has sort {v.sort} but is used as a Bool atom", f.span))
            return v
        if isinstance(f, FPred):
            t, s = self.pred(f.pred)
            if s is not Sort.BOOL:
                found = "numeral" if s == "num" else str(s)
                raise _Fail(error("SORT_ERROR", f"predicate has sort {found}, expected Bool", f.span))
            return t
        if isinstance(f, FKeep):
            eqs = []
            for name in f.names:
                d = self.env.lookup(name)
                if d is None:
                    raise _Fail(error("UNKNOWN_VARIABLE", f"unknown variable '{name}' in keep", f.span))
                if d.kind is VarKind.INPUT:
                    raise _Fail(error("PRIMED_INPUT", f"keep({name}) would prime input variable '{name}'", f.span))
                eqs.append(App("=", (Var(name, d.sort, True), Var(name, d.sort))))
            if not eqs:
                return TRUE
            return eqs[0] if len(eqs) == 1 else App("and", tuple(eqs))
        if isinstance(f, FHavoc):
            for name in f.names:
                d = self.env.lookup(name)
                if d is None:
                    raise _Fail(error("UNKNOWN_VARIABLE", f"unknown variable '{name}' in havoc", f.span))
                if d.kind is VarKind.INPUT:
                    raise _Fail(error("PRIMED_INPUT", f"havoc({name}) names input variable '{name}'", f.span))
            return TRUE
        raise TypeError(f)

    # -- formulas ----------------------------------------------------------

    def ltl(self, f):
        if isinstance(f, FUnary):
            return Op(_LTL_OPS[f.op], (self.ltl(f.arg),))
        if isinstance(f, FBinary):
            if f.op in ("&&", "||"):
                return Op(_LTL_OPS[f.op], tuple(self.ltl(x) for x in _flatten(f, f.op)))
            return Op(_LTL_OPS[f.op], (self.ltl(f.left), self.ltl(f.right)))
        return Atom(self.atom(f))

    def term(self, f) -> Term:
        if isinstance(f, FUnary):
            if f.op != "!":
                raise _Fail(error("TEMPORAL_IN_GAME", f"temporal operator '{f.op}' is not allowed in a game", f.span))
            return App("not", (self.term(f.arg),))
        if isinstance(f, FBinary):
            if f.op in ("&&", "||"):
                return App("and" if f.op == "&&" else "or", tuple(self.term(x) for x in _flatten(f, f.op)))
            if f.op == "->":
                return App("=>", (self.term(f.left), self.term(f.right)))
            if f.op == "<->":
                return App("=", (self.term(f.left), self.term(f.right)))
            raise _Fail(error("TEMPORAL_IN_GAME", f"temporal operator '{f.op}' is not allowed in a game", f.span))
        return self.atom(f)


def _state_only(t: Term, env: VarEnv) -> str | None:
    for v in sorted(free_vars(t), key=lambda v: v.key):
        if v.primed:
            return f"primed variable '{v.name}'"
        if env.lookup(v.name).kind is VarKind.INPUT:
            return f"input variable '{v.name}'"
    return None


def elaborate(ast: SourceSpec):
    """Typed Spec from a macro-free AST.

    Returns ``(spec, warnings)`` on success, or a list of Diagnostics containing
    at least one error."""
    diags: list[Diagnostic] = []
    decls, seen = [], set()
    for d in ast.vardecls:
        if d.name in seen:
            diags.append(error("DUPLICATE_VARIABLE", f"variable '{d.name}' is declared twice", d.span))
            continue
        seen.add(d.name)
        decls.append(VarDecl(d.name, VarKind(d.kind), _SORTS[d.sort]))
    env = VarEnv(tuple(decls))
    el = _Elaborator(env)
    spans: dict = {}
    formulas, games = [], []

    for block in ast.formula_blocks:
        assumes, asserts = [], []
        spans[("formula", len(formulas))] = block.span
        for s in block.stmts:
            try:
                (assumes if s.kind == "assume" else asserts).append(el.ltl(s.formula))
            except _Fail as e:
                diags.append(e.diag)
        formulas.append(FormulaBlock(tuple(assumes), tuple(asserts)))

    for block in ast.game_blocks:
        gi = len(games)
        spans[("game", gi)] = block.span
        spans[("initial", gi)] = block.initial_span
        locs, names = [], set()
        for ld in block.locations:
            if ld.name in names:
                diags.append(error("DUPLICATE_LOCATION", f"location '{ld.name}' is declared twice", ld.span))
                continue
            names.add(ld.name)
            spans[("loc", gi, ld.name)] = ld.span
            color = ld.color
            if color is None:
                color = 1
                diags.append(warning("COLOR_DEFAULT", f"location '{ld.name}' has no color; using 1", ld.span))
            domain = TRUE
            if ld.domain is not None:
                try:
                    domain = el.term(ld.domain)
                    bad = _state_only(domain, env)
                    if bad:
                        diags.append(error("DOMAIN_NOT_STATE",
                                           f"domain of '{ld.name}' mentions {bad}; only current state variables "
                                           "are allowed", ld.span))
                except _Fail as e:
                    diags.append(e.diag)
            locs.append(Location(ld.name, color, domain))
        trans = []
        for td in block.transitions:
            for end in (td.src, td.dst):
                if end not in names:
                    diags.append(error("UNKNOWN_LOCATION", f"location '{end}' is not declared in this game",
                                       td.span))
            try:
                guard = el.term(td.guard)
            except _Fail as e:
                diags.append(e.diag)
                continue
            spans[("trans", gi, len(trans))] = td.span
            trans.append(Transition(td.src, td.dst, guard))
        games.append(GameBlock(WinCond(block.wincond), block.initial, tuple(locs), tuple(trans)))

    if any(d.is_error for d in diags):
        return diags
    return Spec(env, tuple(formulas), tuple(games), spans), diags
