"""Sorted first-order terms over bool/int/real variables.

Terms are immutable and hashable. A variable reference carries its sort and a
primed flag; only state variables may be primed. Numerals without a fixed sort
(``Const.sort is None``) are polymorphic between Int and Real until
``resolve_numerals`` pins them down from context.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Iterable, Iterator, Mapping

from .errors import PrimedInput, SortError, UnknownVariable


class Sort(enum.Enum):
    BOOL = "Bool"
    INT = "Int"
    REAL = "Real"

    def __str__(self) -> str:
        return self.value


class VarKind(enum.Enum):
    INPUT = "input"
    STATE = "state"


@dataclass(frozen=True)
class VarDecl:
    name: str
    kind: VarKind
    sort: Sort


@dataclass(frozen=True)
class VarEnv:
    decls: tuple[VarDecl, ...] = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        index = {}
        for d in self.decls:
            if d.name in index:
                raise ValueError(f"duplicate variable '{d.name}'")
            index[d.name] = d
        object.__setattr__(self, "_index", index)

    @classmethod
    def of(cls, *entries: tuple[str, VarKind | str, Sort | str]) -> "VarEnv":
        decls = []
        for name, kind, sort in entries:
            decls.append(VarDecl(name, VarKind(kind), Sort(sort) if isinstance(sort, str) else sort))
        return cls(tuple(decls))

    def lookup(self, name: str) -> VarDecl | None:
        return self._index.get(name)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def __iter__(self) -> Iterator[VarDecl]:
        return iter(self.decls)

    def __len__(self) -> int:
        return len(self.decls)

    @property
    def inputs(self) -> tuple[VarDecl, ...]:
        return tuple(d for d in self.decls if d.kind is VarKind.INPUT)

    @property
    def states(self) -> tuple[VarDecl, ...]:
        return tuple(d for d in self.decls if d.kind is VarKind.STATE)

    def var(self, name: str, primed: bool = False) -> "Var":
        d = self.lookup(name)
        if d is None:
            raise UnknownVariable(name)
        if primed and d.kind is VarKind.INPUT:
            raise PrimedInput(name)
        return Var(name, d.sort, primed)

    def input_vars(self) -> list["Var"]:
        return [Var(d.name, d.sort) for d in self.inputs]

    def state_vars(self, primed: bool = False) -> list["Var"]:
        return [Var(d.name, d.sort, primed) for d in self.states]


class Term:
    """Base class of all term nodes."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_sexpr(self)


@dataclass(frozen=True, eq=True)
class Const(Term):
    value: bool | Fraction
    sort: Sort | None = None

    def __hash__(self) -> int:
        return self._h

    @cached_property
    def _h(self) -> int:
        return hash(("C", self.value, self.sort))


@dataclass(frozen=True, eq=True)
class Var(Term):
    name: str
    sort: Sort
    primed: bool = False

    def __hash__(self) -> int:
        return self._h

    @cached_property
    def _h(self) -> int:
        return hash(("V", self.name, self.sort, self.primed))

    @property
    def key(self) -> tuple[str, bool]:
        return (self.name, self.primed)


@dataclass(frozen=True, eq=True)
class App(Term):
    op: str
    args: tuple[Term, ...]

    def __hash__(self) -> int:
        return self._h

    @cached_property
    def _h(self) -> int:
        return hash(("A", self.op, self.args))


@dataclass(frozen=True, eq=True)
class Quant(Term):
    kind: str  # "forall" | "exists"
    vars: tuple[Var, ...]
    body: Term

    def __hash__(self) -> int:
        return self._h

    @cached_property
    def _h(self) -> int:
        return hash(("Q", self.kind, self.vars, self.body))


TRUE = Const(True, Sort.BOOL)
FALSE = Const(False, Sort.BOOL)

BOOL_OPS = {"and", "or", "not", "=>"}
CMP_OPS = {"<", ">", "<=", ">="}
ARITH_OPS = {"+", "-", "*", "/", "mod", "div", "abs", "to_real", "to_int"}
# ops visible in the interchange format; the rest only appear inside the solver
SURFACE_OPS = {"and", "or", "not", "=>", "ite", "distinct", "=", "<", ">", "<=", ">=",
               "+", "-", "*", "/", "mod", "abs", "to_real"}
ALL_OPS = SURFACE_OPS | {"div", "to_int", "is_int"}


def num(value, sort: Sort | None = None) -> Const:
    return Const(Fraction(value), sort)


def as_const(t: Term):
    return t.value if isinstance(t, Const) else None


# --------------------------------------------------------------------------
# typing


_POLY = "num"  # sort of a numeral not yet pinned to Int or Real


def _sname(s) -> str:
    return "numeral" if s == _POLY else str(s)


def _unify_numeric(op: str, sorts: list, position) -> object:
    concrete = {s for s in sorts if s != _POLY}
    if Sort.BOOL in concrete:
        raise SortError(position, "Int or Real", "Bool", f"'{op}' expects numeric arguments, found Bool")
    if len(concrete) > 1:
        raise SortError(position, "matching numeric sorts", "Int and Real",
                        f"'{op}' mixes Int and Real arguments")
    return concrete.pop() if concrete else _POLY


_ARITY = {"not": (1, 1), "abs": (1, 1), "to_real": (1, 1), "to_int": (1, 1), "is_int": (1, 1),
          "ite": (3, 3), "mod": (2, 2), "div": (2, 2), "=>": (2, None), "=": (2, None),
          "distinct": (2, None), "<": (2, None), ">": (2, None), "<=": (2, None), ">=": (2, None),
          "/": (2, None), "+": (1, None), "*": (1, None), "-": (1, None),
          "and": (0, None), "or": (0, None)}


def app_sort(op: str, arg_sorts: list, position=()) -> object:
    """Sort of ``(op args...)`` given argument sorts, or raise SortError.

    Polymorphic numerals are reported as the marker ``"num"``.
    """
    if op not in _ARITY:
        raise SortError(position, "known operator", op, f"unknown operator '{op}'")
    lo, hi = _ARITY[op]
    n = len(arg_sorts)
    if n < lo or (hi is not None and n > hi):
        raise SortError(position, f"{lo}{'+' if hi is None else ''} arguments", f"{n}",
                        f"'{op}' applied to {n} argument(s)")
    if op in BOOL_OPS:
        for i, s in enumerate(arg_sorts):
            if s != Sort.BOOL:
                raise SortError(position + (i,), "Bool", _sname(s))
        return Sort.BOOL
    if op == "is_int":
        _unify_numeric(op, arg_sorts, position)
        return Sort.BOOL
    if op in ("=", "distinct"):
        if all(s == Sort.BOOL for s in arg_sorts):
            return Sort.BOOL
        _unify_numeric(op, arg_sorts, position)
        return Sort.BOOL
    if op == "ite":
        if arg_sorts[0] != Sort.BOOL:
            raise SortError(position + (0,), "Bool", _sname(arg_sorts[0]))
        a, b = arg_sorts[1], arg_sorts[2]
        if a == Sort.BOOL or b == Sort.BOOL:
            if a != b:
                raise SortError(position, _sname(a), _sname(b), "ite branches have different sorts")
            return Sort.BOOL
        return _unify_numeric(op, [a, b], position)
    if op in CMP_OPS:
        _unify_numeric(op, arg_sorts, position)
        return Sort.BOOL
    s = _unify_numeric(op, arg_sorts, position)
    if op == "/":
        if s == Sort.INT:
            raise SortError(position, "Real", "Int", "'/' is real division; Int operands are rejected")
        return Sort.REAL
    if op in ("mod", "div"):
        if s == Sort.REAL:
            raise SortError(position, "Int", "Real", f"'{op}' requires Int operands")
        return Sort.INT
    if op == "to_real":
        if s == Sort.REAL:
            raise SortError(position, "Int", "Real", "'to_real' requires an Int operand")
        return Sort.REAL
    if op == "to_int":
        if s == Sort.INT:
            raise SortError(position, "Real", "Int", "'to_int' requires a Real operand")
        return Sort.INT
    return s


def infer(term: Term, env: VarEnv | None = None, position=(), bound=None) -> object:
    """Sort of ``term`` keeping polymorphic numerals as ``"num"``."""
    if isinstance(term, Const):
        if isinstance(term.value, bool):
            return Sort.BOOL
        return term.sort if term.sort is not None else _POLY
    if isinstance(term, Var):
        if bound and term.key in bound:
            return bound[term.key]
        if env is not None:
            d = env.lookup(term.name)
            if d is None:
                raise UnknownVariable(term.name)
            if term.primed and d.kind is VarKind.INPUT:
                raise PrimedInput(term.name)
            if d.sort != term.sort:
                raise SortError(position, str(d.sort), str(term.sort),
                                f"variable '{term.name}' declared {d.sort}, used as {term.sort}")
        return term.sort
    if isinstance(term, App):
        sorts = [infer(a, env, position + (i,), bound) for i, a in enumerate(term.args)]
        return app_sort(term.op, sorts, position)
    if isinstance(term, Quant):
        inner = dict(bound or {})
        for v in term.vars:
            inner[v.key] = v.sort
        s = infer(term.body, env, position + (0,), inner)
        if s != Sort.BOOL:
            raise SortError(position, "Bool", _sname(s))
        return Sort.BOOL
    raise TypeError(f"not a term: {term!r}")


def typecheck(term: Term, env: VarEnv) -> Sort:
    s = infer(term, env)
    return Sort.INT if s == _POLY else s


def resolve_numerals(term: Term, expected: Sort | None = None) -> Term:
    """Give every polymorphic numeral a concrete sort (D1: default Int)."""
    if isinstance(term, Const):
        if isinstance(term.value, bool) or term.sort is not None:
            return term
        if expected is None or expected == Sort.BOOL:
            expected = Sort.INT if term.value.denominator == 1 else Sort.REAL
        return Const(term.value, expected)
    if isinstance(term, Var):
        return term
    if isinstance(term, Quant):
        return Quant(term.kind, term.vars, resolve_numerals(term.body, Sort.BOOL))
    op, args = term.op, term.args
    if op in BOOL_OPS:
        return App(op, tuple(resolve_numerals(a, Sort.BOOL) for a in args))
    if op == "ite":
        inner = _common(args[1:], expected)
        return App(op, (resolve_numerals(args[0], Sort.BOOL),) + tuple(resolve_numerals(a, inner) for a in args[1:]))
    if op in ("=", "distinct") or op in CMP_OPS or op == "is_int":
        inner = _common(args, None)
        return App(op, tuple(resolve_numerals(a, inner) for a in args))
    if op == "/":
        return App(op, tuple(resolve_numerals(a, Sort.REAL) for a in args))
    if op in ("mod", "div", "to_real"):
        return App(op, tuple(resolve_numerals(a, Sort.INT) for a in args))
    if op == "to_int":
        return App(op, tuple(resolve_numerals(a, Sort.REAL) for a in args))
    inner = _common(args, expected)
    return App(op, tuple(resolve_numerals(a, inner) for a in args))


def _common(args, expected):
    for a in args:
        s = infer(a)
        if s != _POLY:
            return s
    if expected in (Sort.INT, Sort.REAL):
        return expected
    if any(isinstance(a, Const) and not isinstance(a.value, bool) and a.value.denominator != 1
           for a in iter_subterms_many(args)):
        return Sort.REAL
    return Sort.INT


def iter_subterms_many(terms):
    for t in terms:
        yield from iter_subterms(t)


def iter_subterms(term: Term) -> Iterator[Term]:
    stack = [term]
    while stack:
        t = stack.pop()
        yield t
        if isinstance(t, App):
            stack.extend(reversed(t.args))
        elif isinstance(t, Quant):
            stack.append(t.body)


# --------------------------------------------------------------------------
# variables, substitution, priming


def free_vars(term: Term) -> set[Var]:
    out: set[Var] = set()
    _free(term, frozenset(), out)
    return out


def _free(t: Term, bound: frozenset, out: set) -> None:
    if isinstance(t, Var):
        if t.key not in bound:
            out.add(t)
    elif isinstance(t, App):
        for a in t.args:
            _free(a, bound, out)
    elif isinstance(t, Quant):
        _free(t.body, bound | {v.key for v in t.vars}, out)


def ordered_free_vars(term: Term) -> list[Var]:
    return sorted(free_vars(term), key=lambda v: (v.name, v.primed))


_fresh = itertools.count()


def substitute(term: Term, mapping: Mapping[Var, Term]) -> Term:
    """Capture-free simultaneous substitution; keys match on (name, primed)."""
    if not mapping:
        return term
    keyed: dict[tuple[str, bool], Term] = {}
    for v, r in mapping.items():
        rs = infer(r)
        if rs != _POLY and rs != v.sort:
            raise SortError((), str(v.sort), _sname(rs), f"cannot replace {v.name} ({v.sort}) by a {_sname(rs)} term")
        if rs == _POLY and v.sort == Sort.BOOL:
            raise SortError((), "Bool", "numeral")
        keyed[v.key] = r
    return _subst(term, keyed)


def _subst(t: Term, m: dict) -> Term:
    if isinstance(t, Var):
        r = m.get(t.key)
        if r is None:
            return t
        return resolve_numerals(r, t.sort) if isinstance(r, Const) else r
    if isinstance(t, Const):
        return t
    if isinstance(t, App):
        new = tuple(_subst(a, m) for a in t.args)
        return t if all(x is y for x, y in zip(new, t.args)) else App(t.op, new)
    # quantifier: drop shadowed keys, rename binders that would capture
    inner = {k: r for k, r in m.items() if k not in {v.key for v in t.vars}}
    if not inner:
        return t
    incoming = set()
    for r in inner.values():
        incoming |= {v.key for v in free_vars(r)}
    binders, ren = [], {}
    for v in t.vars:
        if v.key in incoming:
            nv = Var(f"{v.name}__b{next(_fresh)}", v.sort, v.primed)
            ren[v.key] = nv
            binders.append(nv)
        else:
            binders.append(v)
    body = _subst(t.body, ren) if ren else t.body
    return Quant(t.kind, tuple(binders), _subst(body, inner))


class Priming(enum.Enum):
    PRIME_ALL = "prime"
    UNPRIME_ALL = "unprime"


def apply_priming(term: Term, direction: Priming, env: VarEnv) -> Term:
    states = {d.name for d in env.states}

    def go(t: Term, bound: frozenset) -> Term:
        if isinstance(t, Var):
            if t.key in bound:
                return t
            d = env.lookup(t.name)
            if d is None:
                raise UnknownVariable(t.name)
            if d.kind is VarKind.INPUT:
                if t.primed:
                    raise PrimedInput(t.name)
                return t
            if t.name in states:
                return Var(t.name, t.sort, direction is Priming.PRIME_ALL)
            return t
        if isinstance(t, App):
            return App(t.op, tuple(go(a, bound) for a in t.args))
        if isinstance(t, Quant):
            return Quant(t.kind, t.vars, go(t.body, bound | {v.key for v in t.vars}))
        return t

    return go(term, frozenset())


def prime(term: Term, env: VarEnv) -> Term:
    return apply_priming(term, Priming.PRIME_ALL, env)


def unprime(term: Term, env: VarEnv) -> Term:
    return apply_priming(term, Priming.UNPRIME_ALL, env)


def map_vars(term: Term, fn: Callable[[Var], Term]) -> Term:
    """Rebuild ``term`` replacing every free variable ``v`` by ``fn(v)``."""

    def go(t: Term, bound: frozenset) -> Term:
        if isinstance(t, Var):
            return t if t.key in bound else fn(t)
        if isinstance(t, App):
            return App(t.op, tuple(go(a, bound) for a in t.args))
        if isinstance(t, Quant):
            return Quant(t.kind, t.vars, go(t.body, bound | {v.key for v in t.vars}))
        return t

    return go(term, frozenset())


# --------------------------------------------------------------------------
# smart constructors


def mk_not(a: Term) -> Term:
    if a == TRUE:
        return FALSE
    if a == FALSE:
        return TRUE
    if isinstance(a, App) and a.op == "not":
        return a.args[0]
    return App("not", (a,))


def _flat(op: str, args: Iterable[Term]) -> list[Term]:
    out: list[Term] = []
    seen = set()
    for a in args:
        parts = a.args if isinstance(a, App) and a.op == op else (a,)
        for p in parts:
            if p not in seen:
                seen.add(p)
                out.append(p)
    return out


def mk_and(*args: Term) -> Term:
    if len(args) == 1 and not isinstance(args[0], Term):
        args = tuple(args[0])
    parts = [a for a in _flat("and", args) if a != TRUE]
    if FALSE in parts:
        return FALSE
    if not parts:
        return TRUE
    if len(parts) == 1:
        return parts[0]
    return App("and", tuple(parts))


def mk_or(*args: Term) -> Term:
    if len(args) == 1 and not isinstance(args[0], Term):
        args = tuple(args[0])
    parts = [a for a in _flat("or", args) if a != FALSE]
    if TRUE in parts:
        return TRUE
    if not parts:
        return FALSE
    if len(parts) == 1:
        return parts[0]
    return App("or", tuple(parts))


def mk_implies(a: Term, b: Term) -> Term:
    if a == TRUE:
        return b
    if a == FALSE or b == TRUE:
        return TRUE
    if b == FALSE:
        return mk_not(a)
    return App("=>", (a, b))


def mk_eq(a: Term, b: Term) -> Term:
    if a == b:
        return TRUE
    return App("=", (a, b))


def mk_app(op: str, *args: Term) -> Term:
    return App(op, tuple(args))


def mk_exists(vs: Iterable[Var], body: Term) -> Term:
    keys = {v.key for v in free_vars(body)}
    vs = tuple(v for v in vs if v.key in keys)
    if not vs or body in (TRUE, FALSE):
        return body
    return Quant("exists", vs, body)


def mk_forall(vs: Iterable[Var], body: Term) -> Term:
    keys = {v.key for v in free_vars(body)}
    vs = tuple(v for v in vs if v.key in keys)
    if not vs or body in (TRUE, FALSE):
        return body
    return Quant("forall", vs, body)


def conjuncts(t: Term) -> list[Term]:
    if isinstance(t, App) and t.op == "and":
        out = []
        for a in t.args:
            out.extend(conjuncts(a))
        return out
    if t == TRUE:
        return []
    return [t]


def disjuncts(t: Term) -> list[Term]:
    if isinstance(t, App) and t.op == "or":
        out = []
        for a in t.args:
            out.extend(disjuncts(a))
        return out
    if t == FALSE:
        return []
    return [t]


def has_quantifier(t: Term) -> bool:
    return any(isinstance(s, Quant) for s in iter_subterms(t))


# --------------------------------------------------------------------------
# normalization


def _arith_fold(op: str, vals: list[Fraction], sort):
    if op == "+":
        return sum(vals, Fraction(0))
    if op == "*":
        r = Fraction(1)
        for v in vals:
            r *= v
        return r
    if op == "-":
        if len(vals) == 1:
            return -vals[0]
        r = vals[0]
        for v in vals[1:]:
            r -= v
        return r
    if op == "/":
        r = vals[0]
        for v in vals[1:]:
            if v == 0:
                return None
            r /= v
        return r
    if op == "mod":
        a, b = vals
        if b == 0 or a.denominator != 1 or b.denominator != 1:
            return None
        return Fraction(int(a) % abs(int(b)))
    if op == "div":
        a, b = vals
        if b == 0 or a.denominator != 1 or b.denominator != 1:
            return None
        r = int(a) % abs(int(b))
        return Fraction((int(a) - r) // int(b))
    if op == "abs":
        return abs(vals[0])
    if op == "to_real":
        return vals[0]
    if op == "to_int":
        return Fraction(vals[0].__floor__())
    return None


def _cmp(op: str, vals: list) -> bool:
    pairs = list(zip(vals, vals[1:]))
    if op == "<":
        return all(a < b for a, b in pairs)
    if op == ">":
        return all(a > b for a, b in pairs)
    if op == "<=":
        return all(a <= b for a, b in pairs)
    if op == ">=":
        return all(a >= b for a, b in pairs)
    if op == "=":
        return all(a == b for a, b in pairs)
    if op == "distinct":
        return len(set(vals)) == len(vals)
    raise ValueError(op)


def normalize(term: Term) -> Term:
    """Equivalence-preserving cleanup: constant folding, and/or flattening,
    double-negation removal and unit absorption."""
    if isinstance(term, (Const, Var)):
        return term
    if isinstance(term, Quant):
        body = normalize(term.body)
        return mk_forall(term.vars, body) if term.kind == "forall" else mk_exists(term.vars, body)
    args = [normalize(a) for a in term.args]
    op = term.op
    if op == "and":
        return mk_and(args)
    if op == "or":
        return mk_or(args)
    if op == "not":
        return mk_not(args[0])
    if op == "=>":
        # right-associative chain a => b => c
        r = args[-1]
        for a in reversed(args[:-1]):
            r = mk_implies(a, r)
        return r
    if op == "ite":
        c, a, b = args
        if c == TRUE:
            return a
        if c == FALSE:
            return b
        if a == b:
            return a
        return App(op, tuple(args))
    consts = [as_const(a) for a in args]
    if all(v is not None for v in consts):
        if op in CMP_OPS or op in ("=", "distinct"):
            return TRUE if _cmp(op, consts) else FALSE
        if op == "is_int":
            return TRUE if consts[0].denominator == 1 else FALSE
        if op in ARITH_OPS:
            v = _arith_fold(op, consts, None)
            if v is not None:
                s = infer(term)
                return Const(v, None if s == _POLY else s)
    if op == "=" and len(args) == 2 and args[0] == args[1]:
        return TRUE
    if op == "=" and len(args) == 2 and Sort.BOOL == _bool_sort(args):
        a, b = args
        if a == TRUE:
            return b
        if b == TRUE:
            return a
        if a == FALSE:
            return mk_not(b)
        if b == FALSE:
            return mk_not(a)
    return App(op, tuple(args))


def _bool_sort(args):
    try:
        return Sort.BOOL if all(infer(a) == Sort.BOOL for a in args) else None
    except Exception:
        return None


# --------------------------------------------------------------------------
# evaluation (concrete semantics, used by oracles and simulation)


def _euclid_mod(a: int, b: int) -> int:
    return a % abs(b)


def evaluate(term: Term, valuation: Mapping[tuple[str, bool], object]):
    """Evaluate a quantifier-free term under ``valuation`` keyed by (name, primed).

    Int values are Python ints, Real values Fractions, Bool values bools.
    Division by zero yields 0 (a fixed total extension; SMT leaves it open).
    """
    if isinstance(term, Const):
        v = term.value
        if isinstance(v, bool):
            return v
        if term.sort == Sort.REAL or v.denominator != 1:
            return v
        return int(v)
    if isinstance(term, Var):
        try:
            return valuation[term.key]
        except KeyError:
            raise UnknownVariable(term.name + ("'" if term.primed else "")) from None
    if isinstance(term, Quant):
        raise ValueError("cannot evaluate a quantified term")
    op = term.op
    if op == "and":
        return all(evaluate(a, valuation) for a in term.args)
    if op == "or":
        return any(evaluate(a, valuation) for a in term.args)
    if op == "not":
        return not evaluate(term.args[0], valuation)
    if op == "=>":
        vals = term.args
        r = evaluate(vals[-1], valuation)
        for a in reversed(vals[:-1]):
            r = (not evaluate(a, valuation)) or r
        return r
    if op == "ite":
        c = evaluate(term.args[0], valuation)
        return evaluate(term.args[1] if c else term.args[2], valuation)
    vals = [evaluate(a, valuation) for a in term.args]
    if op in CMP_OPS or op in ("=", "distinct"):
        return _cmp(op, vals)
    if op == "+":
        return sum(vals[1:], vals[0])
    if op == "*":
        r = vals[0]
        for v in vals[1:]:
            r = r * v
        return r
    if op == "-":
        if len(vals) == 1:
            return -vals[0]
        r = vals[0]
        for v in vals[1:]:
            r = r - v
        return r
    if op == "/":
        r = Fraction(vals[0])
        for v in vals[1:]:
            r = r / v if v != 0 else Fraction(0)
        return r
    if op == "mod":
        a, b = vals
        return _euclid_mod(a, b) if b != 0 else 0
    if op == "div":
        a, b = vals
        if b == 0:
            return 0
        return (a - _euclid_mod(a, b)) // b
    if op == "abs":
        return abs(vals[0])
    if op == "to_real":
        return Fraction(vals[0])
    if op == "to_int":
        return vals[0].__floor__()
    if op == "is_int":
        return Fraction(vals[0]).denominator == 1
    raise ValueError(f"cannot evaluate operator {op}")


# --------------------------------------------------------------------------
# printing


def render_const(c: Const, smt: bool = True) -> str:
    v = c.value
    if isinstance(v, bool):
        return "true" if v else "false"
    real = c.sort == Sort.REAL or v.denominator != 1
    neg = v < 0
    a = abs(v)
    if a.denominator == 1:
        body = f"{a.numerator}.0" if real else str(a.numerator)
    else:
        body = f"(/ {a.numerator}.0 {a.denominator}.0)"
    return f"(- {body})" if neg else body


def to_sexpr(term: Term, prime_suffix: str = "__p") -> str:
    """SMT-LIB style rendering; ``prime_suffix`` marks primed variables."""
    parts: list[str] = []
    _render(term, prime_suffix, parts)
    return "".join(parts)


def _render(t: Term, suffix: str, out: list) -> None:
    if isinstance(t, Const):
        out.append(render_const(t))
    elif isinstance(t, Var):
        out.append(t.name + suffix if t.primed else t.name)
    elif isinstance(t, App):
        if t.op in ("and", "or") and len(t.args) <= 1:
            if not t.args:
                out.append("true" if t.op == "and" else "false")
            else:
                _render(t.args[0], suffix, out)
            return
        out.append("(" + t.op)
        for a in t.args:
            out.append(" ")
            _render(a, suffix, out)
        out.append(")")
    elif isinstance(t, Quant):
        out.append(f"({t.kind} (")
        out.append(" ".join(f"({v.name + suffix if v.primed else v.name} {v.sort})" for v in t.vars))
        out.append(") ")
        _render(t.body, suffix, out)
        out.append(")")
    else:
        raise TypeError(t)


def serialize_smt2(term: Term, env: VarEnv | None = None) -> str:
    if env is not None:
        typecheck(term, env)
    return to_sexpr(term, "__p")


def pretty(term: Term) -> str:
    """Human-readable infix form, primes rendered with '."""
    if isinstance(term, Const):
        if isinstance(term.value, bool):
            return "true" if term.value else "false"
        v = term.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    if isinstance(term, Var):
        return term.name + ("'" if term.primed else "")
    if isinstance(term, Quant):
        vs = " ".join(pretty(v) for v in term.vars)
        return f"({term.kind} {vs}. {pretty(term.body)})"
    op, args = term.op, term.args
    infix = {"and": " && ", "or": " || ", "=>": " -> ", "+": " + ", "*": " * ", "/": " / ",
             "mod": " mod ", "=": " = ", "<": " < ", ">": " > ", "<=": " <= ", ">=": " >= "}
    if op == "not":
        return "!" + pretty(args[0])
    if op == "-" and len(args) == 1:
        return "-" + pretty(args[0])
    if op == "-":
        return "(" + " - ".join(pretty(a) for a in args) + ")"
    if op in infix and args:
        return "(" + infix[op].join(pretty(a) for a in args) + ")"
    return f"{op}(" + ", ".join(pretty(a) for a in args) + ")"
