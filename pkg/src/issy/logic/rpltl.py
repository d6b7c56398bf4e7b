"""RP-LTL formulas: LTL with quantifier-free first-order atoms.

A formula is either an :class:`Atom` wrapping a Bool term or an :class:`Op`
node. Operators: ``not and or implies iff X F G U W R``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator, Sequence, Union

from ..terms import FALSE, TRUE, Term, evaluate

UNARY = ("not", "X", "F", "G")
BINARY = ("implies", "iff", "U", "W", "R")
NARY = ("and", "or")
TEMPORAL = ("X", "F", "G", "U", "W", "R")


@dataclass(frozen=True)
class Atom:
    term: Term


@dataclass(frozen=True)
class Op:
    op: str
    args: tuple

    def __post_init__(self):
        n = len(self.args)
        if self.op in UNARY and n != 1:
            raise ValueError(f"{self.op} takes one argument")
        if self.op in BINARY and n != 2:
            raise ValueError(f"{self.op} takes two arguments")
        if self.op not in UNARY + BINARY + NARY:
            raise ValueError(f"unknown RP-LTL operator {self.op}")


LTL = Union[Atom, Op]

LTL_TRUE = Atom(TRUE)
LTL_FALSE = Atom(FALSE)


def Not(a):
    return Op("not", (a,))


def And(*args):
    return Op("and", tuple(args))


def Or(*args):
    return Op("or", tuple(args))


def Implies(a, b):
    return Op("implies", (a, b))


def Iff(a, b):
    return Op("iff", (a, b))


def X(a):
    return Op("X", (a,))


def F(a):
    return Op("F", (a,))


def G(a):
    return Op("G", (a,))


def U(a, b):
    return Op("U", (a, b))


def W(a, b):
    return Op("W", (a, b))


def R(a, b):
    return Op("R", (a, b))


def conj(fs: Sequence[LTL]) -> LTL:
    fs = list(fs)
    if not fs:
        return LTL_TRUE
    if len(fs) == 1:
        return fs[0]
    return Op("and", tuple(fs))


def atoms(f: LTL) -> Iterator[Term]:
    """Atom terms in first-occurrence (left-to-right) order, with repeats."""
    stack = [f]
    while stack:
        g = stack.pop()
        if isinstance(g, Atom):
            yield g.term
        else:
            stack.extend(reversed(g.args))


def map_atoms(f: LTL, fn: Callable[[Term], Term]) -> LTL:
    if isinstance(f, Atom):
        return Atom(fn(f.term))
    return Op(f.op, tuple(map_atoms(a, fn) for a in f.args))


def lower(f: LTL) -> LTL:
    """Replace implies/iff by and/or/not: a -> b becomes (or (not a) b)."""
    if isinstance(f, Atom):
        return f
    args = tuple(lower(a) for a in f.args)
    if f.op == "implies":
        return Op("or", (Op("not", (args[0],)), args[1]))
    if f.op == "iff":
        a, b = args
        return Op("and", (Op("or", (Op("not", (a,)), b)), Op("or", (Op("not", (b,)), a))))
    return Op(f.op, args)


def has_temporal(f: LTL) -> bool:
    if isinstance(f, Atom):
        return False
    return f.op in TEMPORAL or any(has_temporal(a) for a in f.args)


def nnf(f: LTL, negate: bool = False) -> LTL:
    """Negation normal form; negations only directly above atoms."""
    if isinstance(f, Atom):
        return Op("not", (f,)) if negate else f
    op, a = f.op, f.args
    if op == "not":
        return nnf(a[0], not negate)
    if op == "implies":
        return nnf(Op("or", (Op("not", (a[0],)), a[1])), negate)
    if op == "iff":
        x, y = a
        return nnf(Op("and", (Op("or", (Op("not", (x,)), y)), Op("or", (Op("not", (y,)), x)))), negate)
    if op in ("and", "or"):
        new = op if not negate else ("or" if op == "and" else "and")
        return Op(new, tuple(nnf(b, negate) for b in a))
    if op == "X":
        return Op("X", (nnf(a[0], negate),))
    if op == "F":
        return Op("G" if negate else "F", (nnf(a[0], negate),))
    if op == "G":
        return Op("F" if negate else "G", (nnf(a[0], negate),))
    if op == "U":
        if negate:
            return Op("R", (nnf(a[0], True), nnf(a[1], True)))
        return Op("U", (nnf(a[0]), nnf(a[1])))
    if op == "R":
        if negate:
            return Op("U", (nnf(a[0], True), nnf(a[1], True)))
        return Op("R", (nnf(a[0]), nnf(a[1])))
    if op == "W":
        if negate:
            # !(a W b) == !b U (!a & !b)
            nb = nnf(a[1], True)
            return Op("U", (nb, Op("and", (nnf(a[0], True), nb))))
        return Op("W", (nnf(a[0]), nnf(a[1])))
    raise ValueError(op)


_SAFE_OPS = {"and", "or", "X", "G", "W", "R"}


def is_syntactic_safety(f: LTL) -> bool:
    def ok(g: LTL) -> bool:
        if isinstance(g, Atom):
            return True
        if g.op == "not":
            return isinstance(g.args[0], Atom)
        return g.op in _SAFE_OPS and all(ok(a) for a in g.args)

    return ok(nnf(f))


def implication(assumes: Sequence[LTL], asserts: Sequence[LTL]) -> LTL:
    """(and assumes) -> (and asserts), with the trivial cases folded."""
    guarantee = conj(asserts)
    if not assumes:
        return guarantee
    return Op("implies", (conj(assumes), guarantee))


# --------------------------------------------------------------------------
# direct semantics on ultimately periodic traces


def evaluate_lasso(f: LTL, trace: Sequence[dict], loop_start: int) -> bool:
    """Truth of ``f`` at position 0 of the infinite word
    ``trace[:loop_start] (trace[loop_start:])^ω``.

    Each trace element maps variable names to values. Atoms at position i see
    unprimed variables from position i and primed ones from position i+1.
    """
    n = len(trace)
    if n == 0 or not 0 <= loop_start < n:
        raise ValueError("need a non-empty trace and a loop start inside it")
    succ = [i + 1 for i in range(n - 1)] + [loop_start]
    vals = []
    for i in range(n):
        v = {(k, False): x for k, x in trace[i].items()}
        v.update({(k, True): x for k, x in trace[succ[i]].items()})
        vals.append(v)
    return _eval(f, vals, succ)[0]


def _fix(step, init: bool, n: int) -> list[bool]:
    cur = [init] * n
    while True:
        new = [step(i, cur) for i in range(n)]
        if new == cur:
            return cur
        cur = new


def _eval(f: LTL, vals, succ) -> list[bool]:
    n = len(vals)
    if isinstance(f, Atom):
        return [bool(evaluate(f.term, v)) for v in vals]
    op = f.op
    sub = [_eval(a, vals, succ) for a in f.args]
    if op == "not":
        return [not x for x in sub[0]]
    if op == "and":
        return [all(s[i] for s in sub) for i in range(n)]
    if op == "or":
        return [any(s[i] for s in sub) for i in range(n)]
    if op == "implies":
        return [(not a) or b for a, b in zip(*sub)]
    if op == "iff":
        return [a == b for a, b in zip(*sub)]
    if op == "X":
        return [sub[0][succ[i]] for i in range(n)]
    if op == "F":
        a = sub[0]
        return _fix(lambda i, c: a[i] or c[succ[i]], False, n)
    if op == "G":
        a = sub[0]
        return _fix(lambda i, c: a[i] and c[succ[i]], True, n)
    a, b = sub
    if op == "U":
        return _fix(lambda i, c: b[i] or (a[i] and c[succ[i]]), False, n)
    if op == "W":
        return _fix(lambda i, c: b[i] or (a[i] and c[succ[i]]), True, n)
    if op == "R":
        return _fix(lambda i, c: b[i] and (a[i] or c[succ[i]]), True, n)
    raise ValueError(op)
