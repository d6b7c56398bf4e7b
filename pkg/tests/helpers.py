"""Shared builders for the test suite."""

import random
from fractions import Fraction

from issy.llissy import _Reader
from issy.sexpr import read_one
from issy.terms import App, Const, Sort, Var, VarEnv, VarKind, num

ENV = VarEnv.of(("x", VarKind.STATE, Sort.INT), ("y", VarKind.STATE, Sort.INT),
                ("r", VarKind.STATE, Sort.REAL), ("p", VarKind.STATE, Sort.BOOL),
                ("i", VarKind.INPUT, Sort.INT), ("add", VarKind.INPUT, Sort.REAL))


def term(text: str, env: VarEnv = ENV):
    """Read a term written in LLissy syntax (``x~`` is the primed ``x``)."""
    return _Reader(env).term(read_one(text))[0]


def int_term(rng: random.Random, depth: int, names=("x", "y", "i")):
    if depth == 0 or rng.random() < 0.3:
        if rng.random() < 0.4:
            return num(rng.randint(-5, 5), Sort.INT)
        return Var(rng.choice(names), Sort.INT)
    k = rng.randrange(6)
    a = int_term(rng, depth - 1, names)
    if k == 0:
        return App("+", (a, int_term(rng, depth - 1, names)))
    if k == 1:
        return App("-", (a, int_term(rng, depth - 1, names)))
    if k == 2:
        return App("*", (num(rng.randint(-3, 3), Sort.INT), a))
    if k == 3:
        return App("-", (a,))
    if k == 4:
        return App("abs", (a,))
    return App("mod", (a, num(rng.choice((2, 3, 5)), Sort.INT)))


def bool_term(rng: random.Random, depth: int, names=("x", "y", "i"), with_p: bool = True):
    """Random well-typed linear Bool term."""
    if depth == 0 or rng.random() < 0.25:
        k = rng.randrange(4 if with_p else 3)
        if k == 0:
            return Const(rng.random() < 0.5, Sort.BOOL)
        if k == 3:
            return Var("p", Sort.BOOL)
        op = rng.choice(("<", "<=", ">", ">=", "="))
        return App(op, (int_term(rng, 2, names), int_term(rng, 2, names)))
    k = rng.randrange(6)
    a = bool_term(rng, depth - 1, names, with_p)
    if k == 0:
        return App("not", (a,))
    if k == 1:
        return App("and", (a, bool_term(rng, depth - 1, names, with_p)))
    if k == 2:
        return App("or", (a, bool_term(rng, depth - 1, names, with_p)))
    if k == 3:
        return App("=>", (a, bool_term(rng, depth - 1, names, with_p)))
    if k == 4:
        return App("ite", (a, bool_term(rng, depth - 1, names, with_p), bool_term(rng, depth - 1, names, with_p)))
    op = rng.choice(("<", "<=", ">", ">=", "=", "distinct"))
    return App(op, (int_term(rng, 2, names), int_term(rng, 2, names)))


def real_const(v) -> Const:
    return Const(Fraction(v), Sort.REAL)


# -- random elaborated specifications ----------------------------------------

from issy.frontend.check import check_global  # noqa: E402
from issy.logic.rpltl import Atom, Op, lower  # noqa: E402
from issy.spec import FormulaBlock, GameBlock, Location, Spec, Transition, WinCond  # noqa: E402
from issy.terms import TRUE as _TRUE  # noqa: E402


class SpecGen:
    """Random well-typed Specs in the shape the LLissy reader produces:
    naturals carry no sort, decimals are Real."""

    def __init__(self, rng: random.Random):
        self.rng = rng

    def env(self) -> VarEnv:
        n = self.rng.randint(1, 5)
        return VarEnv.of(*[(f"v{k}", self.rng.choice((VarKind.INPUT, VarKind.STATE)),
                            self.rng.choice((Sort.INT, Sort.REAL, Sort.BOOL))) for k in range(n)])

    def _vars(self, env, sort, primes, inputs):
        out = []
        for d in env:
            if d.sort is not sort or (d.kind is VarKind.INPUT and not inputs):
                continue
            out.append(Var(d.name, d.sort))
            if primes and d.kind is VarKind.STATE:
                out.append(Var(d.name, d.sort, True))
        return out

    def numeric(self, env, sort, depth, primes=False, inputs=True):
        rng = self.rng
        vs = self._vars(env, sort, primes, inputs)
        if depth == 0 or rng.random() < 0.35:
            if vs and rng.random() < 0.6:
                return rng.choice(vs)
            if sort is Sort.REAL and rng.random() < 0.5:
                return Const(Fraction(rng.randint(0, 400), rng.choice((1, 2, 4, 5, 10, 100))), Sort.REAL)
            return Const(Fraction(rng.randint(0, 20)), None)
        sub = lambda: self.numeric(env, sort, depth - 1, primes, inputs)
        ops = ["+", "-", "*", "neg", "abs", "ite"] + (["mod"] if sort is Sort.INT else ["/", "to_real"])
        op = rng.choice(ops)
        if op == "neg":
            return App("-", (sub(),))
        if op == "abs":
            return App("abs", (sub(),))
        if op == "ite":
            return App("ite", (self.boolean(env, depth - 1, primes, inputs), sub(), sub()))
        if op == "to_real":
            return App("to_real", (self.numeric(env, Sort.INT, depth - 1, primes, inputs),))
        if op == "mod":
            return App("mod", (sub(), Const(Fraction(rng.randint(1, 7)), None)))
        k = rng.randint(2, 3) if op in ("+", "*") else 2
        return App(op, tuple(sub() for _ in range(k)))

    def boolean(self, env, depth, primes=False, inputs=True):
        rng = self.rng
        vs = self._vars(env, Sort.BOOL, primes, inputs)
        if depth == 0 or rng.random() < 0.3:
            k = rng.randrange(3)
            if k == 0 and vs:
                return rng.choice(vs)
            if k == 1:
                return Const(rng.random() < 0.5, Sort.BOOL)
            sort = rng.choice((Sort.INT, Sort.REAL))
            op = rng.choice(("<", "<=", ">", ">=", "="))
            return App(op, (self.numeric(env, sort, 1, primes, inputs), self.numeric(env, sort, 1, primes, inputs)))
        sub = lambda: self.boolean(env, depth - 1, primes, inputs)
        op = rng.choice(("and", "or", "not", "=>", "ite", "distinct", "cmp"))
        if op == "not":
            return App("not", (sub(),))
        if op == "ite":
            return App("ite", (sub(), sub(), sub()))
        if op == "cmp":
            sort = rng.choice((Sort.INT, Sort.REAL))
            o = rng.choice(("<", "<=", ">", ">=", "=", "distinct"))
            return App(o, (self.numeric(env, sort, depth - 1, primes, inputs),
                           self.numeric(env, sort, depth - 1, primes, inputs)))
        return App(op, tuple(sub() for _ in range(self.rng.randint(2, 3))))

    def formula(self, env, depth):
        rng = self.rng
        if depth == 0 or rng.random() < 0.3:
            return Atom(self.boolean(env, 2))
        op = rng.choice(("not", "X", "F", "G", "U", "W", "R", "and", "or", "implies", "iff"))
        sub = lambda: self.formula(env, depth - 1)
        if op in ("not", "X", "F", "G"):
            return Op(op, (sub(),))
        if op in ("and", "or"):
            return Op(op, tuple(sub() for _ in range(rng.randint(2, 3))))
        return Op(op, (sub(), sub()))

    def game(self, env, wincond):
        rng = self.rng
        names = [f"l{k}" for k in range(rng.randint(1, 3))]
        locs = tuple(Location(n, rng.randint(0, 3),
                              self.boolean(env, 2, inputs=False) if rng.random() < 0.5 else _TRUE) for n in names)
        trans = tuple(Transition(rng.choice(names), rng.choice(names), self.boolean(env, 3, primes=True))
                      for _ in range(rng.randint(0, 4)))
        return GameBlock(wincond, rng.choice(names), locs, trans)

    def spec(self) -> Spec:
        rng = self.rng
        while True:
            env = self.env()
            formulas = tuple(FormulaBlock(tuple(self.formula(env, 3) for _ in range(rng.randint(0, 2))),
                                          tuple(self.formula(env, 3) for _ in range(rng.randint(0, 2))))
                             for _ in range(rng.randint(0, 2)))
            games = tuple(self.game(env, rng.choice(list(WinCond))) for _ in range(rng.randint(0, 2)))
            s = Spec(env, formulas, games)
            if not any(d.is_error for d in check_global(s)):
                return s


def lowered(spec: Spec) -> Spec:
    """The Spec with implications rewritten the way LLissy stores them."""
    fs = tuple(FormulaBlock(tuple(lower(f) for f in b.assumes), tuple(lower(f) for f in b.asserts))
               for b in spec.formulas)
    return Spec(spec.env, fs, spec.games)
