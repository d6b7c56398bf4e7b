"""LLissy: the s-expression interchange format.

Canonical layout produced by :func:`emit_llissy`::

    ((
      (input Real add)
      (state Real load1)
    ) (
      (((F (G (ap (<= add 0))))) ((F (G (ap (= load1 0))))))
    ) ())

Each of the three top-level lists is ``()`` when empty, otherwise one element
per line indented by two spaces. Everything inside an element is on one line
with single spaces. The text ends with exactly one newline.
"""

from __future__ import annotations

import re
from fractions import Fraction

from .errors import PrimedInput, SortError, UnknownVariable
from .frontend.check import check_global
from .frontend.syntax import Diagnostic, Span, error
from .logic.rpltl import LTL, Atom, Op, lower
from .sexpr import SAtom, SExprError, SList, read_one
from .spec import FormulaBlock, GameBlock, Location, Spec, Transition, WinCond
from .terms import (SURFACE_OPS, App, Const, Quant, Sort, Term, Var, VarDecl, VarEnv, VarKind, app_sort,
                    free_vars)

_ID = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")
_NAT = re.compile(r"[0-9]+\Z")
_RAT = re.compile(r"[0-9]+\.[0-9]+\Z")
_FORMULA_OPS = {"X": 1, "F": 1, "G": 1, "not": 1, "U": 2, "W": 2, "R": 2}
_WINCONDS = {w.value: w for w in WinCond}
_WINCONDS["Reachability "] = WinCond.REACHABILITY


# --------------------------------------------------------------------------
# emitting


def _decimal(v: Fraction) -> str | None:
    """Exact finite decimal expansion of a non-negative rational, if any."""
    d = v.denominator
    e2 = e5 = 0
    while d % 2 == 0:
        d //= 2
        e2 += 1
    while d % 5 == 0:
        d //= 5
        e5 += 1
    if d != 1:
        return None
    k = max(e2, e5)
    scaled = v * 10 ** k
    digits = str(scaled.numerator).rjust(k + 1, "0")
    if k == 0:
        return digits + ".0"
    return digits[:-k] + "." + digits[-k:]


def render_term(t: Term) -> str:
    if isinstance(t, Const):
        v = t.value
        if isinstance(v, bool):
            return "true" if v else "false"
        a = abs(v)
        if t.sort is Sort.REAL or a.denominator != 1:
            body = _decimal(a) or f"(/ {a.numerator}.0 {a.denominator}.0)"
        else:
            body = str(a.numerator)
        return f"(- {body})" if v < 0 else body
    if isinstance(t, Var):
        return t.name + "~" if t.primed else t.name
    if isinstance(t, App):
        return "(" + " ".join([t.op] + [render_term(a) for a in t.args]) + ")"
    if isinstance(t, Quant):
        raise ValueError("quantified terms cannot be written to LLissy")
    raise TypeError(t)


def render_formula(f: LTL) -> str:
    if isinstance(f, Atom):
        return f"(ap {render_term(f.term)})"
    return "(" + " ".join([f.op] + [render_formula(a) for a in f.args]) + ")"


def _block(lines: list[str]) -> str:
    if not lines:
        return "()"
    return "(\n" + "".join(f"  {x}\n" for x in lines) + ")"


def emit_llissy(spec: Spec) -> str:
    vardecs = [f"({d.kind.value} {d.sort.value} {d.name})" for d in spec.env]
    fspecs = []
    for b in spec.formulas:
        a = " ".join(render_formula(lower(f)) for f in b.assumes)
        g = " ".join(render_formula(lower(f)) for f in b.asserts)
        fspecs.append(f"(({a}) ({g}))")
    gspecs = []
    for g in spec.games:
        locs = " ".join(f"({loc.name} {loc.color} {render_term(loc.domain)})" for loc in g.locations)
        trans = " ".join(f"({t.src} {t.dst} {render_term(t.guard)})" for t in g.transitions)
        gspecs.append(f"(({locs}) ({trans}) ({g.initial} {g.wincond.value}))")
    return "(" + " ".join([_block(vardecs), _block(fspecs), _block(gspecs)]) + ")\n"


# --------------------------------------------------------------------------
# parsing


class _Fail(Exception):
    def __init__(self, code: str, message: str, node):
        self.code = code
        self.message = message
        self.node = node
        super().__init__(message)


def _off(node) -> int:
    return getattr(node, "offset", 0)


def _list(node, what: str, n: int | None = None) -> SList:
    if not isinstance(node, SList):
        raise _Fail("EXPECTED_LIST", f"expected {what}, found atom '{node.text}'", node)
    if n is not None and len(node) != n:
        raise _Fail("ARITY", f"{what} needs {n} elements, found {len(node)}", node)
    return node


def _atom(node, what: str) -> str:
    if not isinstance(node, SAtom):
        raise _Fail("EXPECTED_ATOM", f"expected {what}, found a list", node)
    return node.text


def _ident(node, what: str) -> str:
    s = _atom(node, what)
    if not _ID.match(s):
        raise _Fail("BAD_IDENTIFIER", f"'{s}' is not a valid {what}", node)
    if "__" in s:
        raise _Fail("RESERVED_IDENTIFIER", f"identifier '{s}' contains the reserved sequence '__'", node)
    return s


class _Reader:
    def __init__(self, env: VarEnv):
        self.env = env

    def term(self, node) -> tuple[Term, object]:
        if isinstance(node, SAtom):
            s = node.text
            if s in ("true", "false"):
                return Const(s == "true", Sort.BOOL), Sort.BOOL
            if _NAT.match(s):
                return Const(Fraction(int(s)), None), "num"
            if _RAT.match(s):
                return Const(Fraction(s), Sort.REAL), Sort.REAL
            primed = s.endswith("~")
            name = s[:-1] if primed else s
            if not _ID.match(name):
                raise _Fail("BAD_TOKEN", f"'{s}' is not a constant or variable", node)
            d = self.env.lookup(name)
            if d is None:
                raise _Fail("UNKNOWN_VARIABLE", str(UnknownVariable(name)), node)
            if primed and d.kind is VarKind.INPUT:
                raise _Fail("PRIMED_INPUT", str(PrimedInput(name)), node)
            return Var(name, d.sort, primed), d.sort
        if len(node) == 0:
            raise _Fail("EMPTY_TERM", "empty application", node)
        op = _atom(node[0], "an operator")
        if op not in SURFACE_OPS:
            raise _Fail("UNKNOWN_OPERATOR", f"unknown operator '{op}'", node[0])
        built = [self.term(a) for a in node.items[1:]]
        try:
            s = app_sort(op, [b[1] for b in built])
        except SortError as e:
            raise _Fail("SORT_ERROR", str(e), node) from None
        return App(op, tuple(b[0] for b in built)), s

    def bool_term(self, node) -> Term:
        t, s = self.term(node)
        if s is not Sort.BOOL:
            raise _Fail("SORT_ERROR", "expected a Bool term", node)
        return t

    def formula(self, node) -> LTL:
        lst = _list(node, "a formula")
        if len(lst) == 0:
            raise _Fail("EMPTY_FORMULA", "empty formula", node)
        op = _atom(lst[0], "a formula operator")
        args = lst.items[1:]
        if op == "ap":
            if len(args) != 1:
                raise _Fail("ARITY", "'ap' takes exactly one term", node)
            return Atom(self.bool_term(args[0]))
        if op in ("and", "or"):
            return Op(op, tuple(self.formula(a) for a in args))
        if op in _FORMULA_OPS:
            if len(args) != _FORMULA_OPS[op]:
                raise _Fail("ARITY", f"'{op}' takes {_FORMULA_OPS[op]} argument(s), found {len(args)}", node)
            return Op(op, tuple(self.formula(a) for a in args))
        raise _Fail("UNKNOWN_OPERATOR", f"unknown formula operator '{op}'", lst[0])


def _read_vardecs(node) -> VarEnv:
    decls, seen = [], set()
    for v in _list(node, "the variable list"):
        lst = _list(v, "a variable declaration", 3)
        kind = _atom(lst[0], "'input' or 'state'")
        if kind not in ("input", "state"):
            raise _Fail("BAD_VARDEC", f"expected 'input' or 'state', found '{kind}'", lst[0])
        sort = _atom(lst[1], "a type")
        if sort not in ("Int", "Bool", "Real"):
            raise _Fail("BAD_TYPE", f"unknown type '{sort}'", lst[1])
        name = _ident(lst[2], "variable name")
        if name in seen:
            raise _Fail("DUPLICATE_VARIABLE", f"variable '{name}' is declared twice", lst[2])
        seen.add(name)
        decls.append(VarDecl(name, VarKind(kind), Sort(sort)))
    return VarEnv(tuple(decls))


def _read_game(rd: _Reader, node, gi: int, spans: dict) -> GameBlock:
    lst = _list(node, "a game specification", 3)
    locs, names = [], set()
    for ld in _list(lst[0], "the location list"):
        el = _list(ld, "a location definition", 3)
        name = _ident(el[0], "location name")
        if name in names:
            raise _Fail("DUPLICATE_LOCATION", f"location '{name}' is declared twice", el[0])
        names.add(name)
        color = _atom(el[1], "a color")
        if not _NAT.match(color):
            raise _Fail("BAD_COLOR", f"color '{color}' is not a natural number", el[1])
        dom = rd.bool_term(el[2])
        for v in free_vars(dom):
            if v.primed or rd.env.lookup(v.name).kind is VarKind.INPUT:
                raise _Fail("DOMAIN_NOT_STATE", f"domain of '{name}' mentions '{v.name}'", el[2])
        locs.append(Location(name, int(color), dom))
    trans = []
    for td in _list(lst[1], "the transition list"):
        el = _list(td, "a transition definition", 3)
        src = _ident(el[0], "location name")
        dst = _ident(el[1], "location name")
        for x, node_ in ((src, el[0]), (dst, el[1])):
            if x not in names:
                raise _Fail("UNKNOWN_LOCATION", f"location '{x}' is not declared in this game", node_)
        trans.append(Transition(src, dst, rd.bool_term(el[2])))
    obj = _list(lst[2], "an objective", 2)
    init = _ident(obj[0], "initial location")
    wc = _atom(obj[1], "a winning condition")
    if wc not in _WINCONDS:
        raise _Fail("BAD_WINCOND", f"unknown winning condition '{wc}'", obj[1])
    spans[("game", gi)] = node
    spans[("initial", gi)] = obj[0]
    return GameBlock(_WINCONDS[wc], init, tuple(locs), tuple(trans))


def _span(text: str, offset: int, length: int = 1) -> Span:
    """Span with a byte offset; line/col counted in characters."""
    before = text[:offset]
    line = 1 + before.count("\n") + before.count("\r") - before.count("\r\n")
    last = max(before.rfind("\n"), before.rfind("\r"))
    col = offset - last
    byte_off = len(before.encode())
    length = max(0, min(length, len(text.encode()) - byte_off))
    return Span(line, col, length, byte_off)


def parse_llissy(text: str):
    """Parse LLissy text into a Spec, or return a list of error Diagnostics."""
    try:
        top = read_one(text)
    except SExprError as e:
        return [error(e.code, str(e), _span(text, e.offset))]
    nodes: dict = {}
    try:
        lst = _list(top, "a specification", 3)
        env = _read_vardecs(lst[0])
        rd = _Reader(env)
        formulas = []
        for i, fs in enumerate(_list(lst[1], "the formula list")):
            el = _list(fs, "a formula specification", 2)
            nodes[("formula", i)] = fs
            formulas.append(FormulaBlock(tuple(rd.formula(x) for x in _list(el[0], "the assumption list")),
                                         tuple(rd.formula(x) for x in _list(el[1], "the guarantee list"))))
        games = [_read_game(rd, g, i, nodes) for i, g in enumerate(_list(lst[2], "the game list"))]
    except _Fail as e:
        return [error(e.code, e.message, _span(text, _off(e.node)))]
    spans = {k: _span(text, _off(n)) for k, n in nodes.items()}
    spec = Spec(env, tuple(formulas), tuple(games), spans)
    errs = [d for d in check_global(spec) if d.is_error]
    if errs:
        return errs
    return spec
