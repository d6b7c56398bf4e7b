"""Recursive-descent parser for Issy specifications.

Logical precedence, tightest first::

    ! X F G   >   U W R (right)   >   &&   >   ||   >   -> (right)   >   <-> (right)

Predicate precedence inside ``[...]``::

    abs, unary -   >   * / mod   >   + -   >   = < > <= >=
"""

from __future__ import annotations

from dataclasses import replace
from fractions import Fraction

from .lexer import Token, tokenize
from .syntax import (Diagnostic, FBinary, FBool, FHavoc, FIdent, FKeep, FormulaBlockSyntax, FPred,
                     FUnary, GameBlockSyntax, LocDefSyntax, LogicStmt, MacroDefSyntax, PBinary, PIdent,
                     PNum, PUnary, SourceSpec, Span, TransDefSyntax, VarDeclSyntax, error)

TOP_KEYWORDS = {"input", "state", "formula", "game", "def"}
KEYWORDS = TOP_KEYWORDS | {"int", "bool", "real", "assume", "assert", "from", "to", "with", "loc",
                           "keep", "havoc", "true", "false", "mod", "abs",
                           "X", "F", "G", "U", "W", "R"}
WINCONDS = ("Safety", "Reachability", "Buechi", "CoBuechi", "ParityMaxOdd")
TYPES = ("int", "bool", "real")
CMP = ("=", "<", ">", "<=", ">=")


class _ParseError(Exception):
    def __init__(self, diag: Diagnostic):
        self.diag = diag


class Parser:
    def __init__(self, tokens: list[Token]):
        self.toks = tokens
        self.pos = 0

    # -- token helpers -----------------------------------------------------

    @property
    def tok(self) -> Token:
        return self.toks[self.pos]

    def peek(self, k: int = 1) -> Token:
        return self.toks[min(self.pos + k, len(self.toks) - 1)]

    def at(self, text: str) -> bool:
        t = self.tok
        return t.kind in ("SYM", "IDENT") and t.text == text

    def next(self) -> Token:
        t = self.tok
        if t.kind != "EOF":
            self.pos += 1
        return t

    def fail(self, what: str, tok: Token | None = None):
        tok = tok or self.tok
        if tok.kind == "EOF":
            span = tok.span
            if self.pos > 0:  # point just past the last token, not at trailing blank lines
                p = self.toks[self.pos - 1].span
                span = Span(p.line, p.col + p.length, 0, p.offset + p.length)
            raise _ParseError(error("UNEXPECTED_EOF", f"expected {what}, found end of input", span))
        raise _ParseError(error("UNEXPECTED_TOKEN", f"expected {what}, found '{tok.text}'", tok.span))

    def expect(self, text: str) -> Token:
        if not self.at(text):
            self.fail(f"'{text}'")
        return self.next()

    def ident(self, what: str = "identifier") -> Token:
        t = self.tok
        if t.kind != "IDENT":
            self.fail(what)
        if t.text in KEYWORDS:
            raise _ParseError(error("RESERVED_IDENTIFIER", f"'{t.text}' is a keyword and cannot be used as {what}",
                                    t.span))
        if "__" in t.text:
            raise _ParseError(error("RESERVED_IDENTIFIER",
                                    f"identifier '{t.text}' contains '__', which is reserved for internal names",
                                    t.span))
        return self.next()

    # -- top level ---------------------------------------------------------

    def spec(self) -> tuple[SourceSpec, list[Diagnostic]]:
        items, diags = [], []
        while self.tok.kind != "EOF":
            try:
                items.append(self.item())
            except _ParseError as e:
                diags.append(e.diag)
                self._recover()
        return SourceSpec(tuple(items)), diags

    def _recover(self):
        self.next()
        while self.tok.kind != "EOF" and not (self.tok.kind == "IDENT" and self.tok.text in TOP_KEYWORDS):
            self.next()

    def item(self):
        t = self.tok
        if t.kind == "IDENT":
            if t.text in ("input", "state"):
                return self.vardecl()
            if t.text == "formula":
                return self.formula_block()
            if t.text == "game":
                return self.game_block()
            if t.text == "def":
                return self.macro()
        self.fail("'input', 'state', 'formula', 'game' or 'def'")

    def vardecl(self) -> VarDeclSyntax:
        kw = self.next()
        t = self.tok
        if not (t.kind == "IDENT" and t.text in TYPES):
            self.fail("a type ('int', 'bool' or 'real')")
        self.next()
        name = self.ident("a variable name")
        return VarDeclSyntax(kw.text, t.text, name.text, kw.span.cover(name.span))

    def macro(self) -> MacroDefSyntax:
        kw = self.next()
        name = self.ident("a macro name")
        self.expect("=")
        body = self.formula()
        return MacroDefSyntax(name.text, body, kw.span.cover(body.span))

    def formula_block(self) -> FormulaBlockSyntax:
        kw = self.next()
        self.expect("{")
        stmts = []
        while not self.at("}"):
            t = self.tok
            if not (t.kind == "IDENT" and t.text in ("assume", "assert")):
                self.fail("'assume', 'assert' or '}'")
            self.next()
            f = self.formula()
            stmts.append(LogicStmt(t.text, f, t.span.cover(f.span)))
        end = self.next()
        return FormulaBlockSyntax(tuple(stmts), kw.span.cover(end.span))

    def game_block(self) -> GameBlockSyntax:
        kw = self.next()
        w = self.tok
        if not (w.kind == "IDENT" and w.text in WINCONDS):
            self.fail("a winning condition (" + ", ".join(WINCONDS) + ")")
        self.next()
        self.expect("from")
        init = self.ident("the initial location")
        self.expect("{")
        body = []
        while not self.at("}"):
            if self.at("loc"):
                body.append(self.locdef())
            elif self.at("from"):
                body.append(self.transdef())
            else:
                self.fail("'loc', 'from' or '}'")
        end = self.next()
        return GameBlockSyntax(w.text, init.text, tuple(body), kw.span.cover(end.span), init.span)

    def locdef(self) -> LocDefSyntax:
        kw = self.next()
        name = self.ident("a location name")
        last = name.span
        color = None
        if self.tok.kind == "NAT":
            t = self.next()
            color = int(t.text)
            last = t.span
        elif self.tok.kind == "RAT":
            raise _ParseError(error("BAD_COLOR", "location colors are natural numbers", self.tok.span))
        domain = None
        if self.at("with"):
            self.next()
            domain = self.formula()
            last = domain.span
        return LocDefSyntax(name.text, color, domain, kw.span.cover(last))

    def transdef(self) -> TransDefSyntax:
        kw = self.next()
        src = self.ident("a source location")
        self.expect("to")
        dst = self.ident("a target location")
        self.expect("with")
        g = self.formula()
        return TransDefSyntax(src.text, dst.text, g, kw.span.cover(g.span))

    # -- formulas ----------------------------------------------------------

    def formula(self):
        return self.iff()

    def iff(self):
        left = self.implies()
        if self.at("<->"):
            self.next()
            right = self.iff()
            return FBinary("<->", left, right, left.span.cover(right.span))
        return left

    def implies(self):
        left = self.disj()
        if self.at("->"):
            self.next()
            right = self.implies()
            return FBinary("->", left, right, left.span.cover(right.span))
        return left

    def disj(self):
        left = self.conj()
        while self.at("||"):
            self.next()
            right = self.conj()
            left = FBinary("||", left, right, left.span.cover(right.span))
        return left

    def conj(self):
        left = self.temporal()
        while self.at("&&"):
            self.next()
            right = self.temporal()
            left = FBinary("&&", left, right, left.span.cover(right.span))
        return left

    def temporal(self):
        left = self.unary()
        t = self.tok
        if t.kind == "IDENT" and t.text in ("U", "W", "R"):
            self.next()
            right = self.temporal()
            return FBinary(t.text, left, right, left.span.cover(right.span))
        return left

    def unary(self):
        t = self.tok
        if (t.kind == "SYM" and t.text == "!") or (t.kind == "IDENT" and t.text in ("X", "F", "G")):
            self.next()
            arg = self.unary()
            return FUnary(t.text, arg, t.span.cover(arg.span))
        return self.primary()

    def primary(self):
        t = self.tok
        if self.at("("):
            self.next()
            f = self.formula()
            end = self.expect(")")
            return _respan(f, t.span.cover(end.span))
        if self.at("["):
            self.next()
            p = self.pred()
            end = self.expect("]")
            return FPred(p, t.span.cover(end.span))
        if t.kind == "IDENT" and t.text in ("true", "false"):
            self.next()
            return FBool(t.text == "true", t.span)
        if t.kind == "IDENT" and t.text in ("keep", "havoc"):
            self.next()
            self.expect("(")
            names = []
            while self.tok.kind == "IDENT":
                names.append(self.ident("a variable name").text)
            end = self.expect(")")
            cls = FKeep if t.text == "keep" else FHavoc
            return cls(tuple(names), t.span.cover(end.span))
        if t.kind == "IDENT":
            name = self.ident("an atom")
            if self.at("'"):
                q = self.next()
                return FIdent(name.text, True, name.span.cover(q.span))
            return FIdent(name.text, False, name.span)
        self.fail("a formula")

    # -- predicates --------------------------------------------------------

    def pred(self):
        left = self.sum()
        if self.tok.kind == "SYM" and self.tok.text in CMP:
            op = self.next().text
            right = self.sum()
            if self.tok.kind == "SYM" and self.tok.text in CMP:
                raise _ParseError(error("CHAINED_COMPARISON",
                                        "comparisons cannot be chained; combine them with &&", self.tok.span))
            return PBinary(op, left, right, left.span.cover(right.span))
        return left

    def sum(self):
        left = self.product()
        while self.tok.kind == "SYM" and self.tok.text in ("+", "-"):
            op = self.next().text
            right = self.product()
            left = PBinary(op, left, right, left.span.cover(right.span))
        return left

    def product(self):
        left = self.punary()
        while (self.tok.kind == "SYM" and self.tok.text in ("*", "/")) or self.at("mod"):
            op = self.next().text
            right = self.punary()
            left = PBinary(op, left, right, left.span.cover(right.span))
        return left

    def punary(self):
        t = self.tok
        if (t.kind == "SYM" and t.text == "-") or (t.kind == "IDENT" and t.text == "abs"):
            self.next()
            arg = self.punary()
            return PUnary(t.text, arg, t.span.cover(arg.span))
        return self.patom()

    def patom(self):
        t = self.tok
        if t.kind == "NAT":
            self.next()
            return PNum(Fraction(int(t.text)), False, t.span)
        if t.kind == "RAT":
            self.next()
            return PNum(Fraction(t.text), True, t.span)
        if self.at("("):
            self.next()
            p = self.pred()
            end = self.expect(")")
            return _respan(p, t.span.cover(end.span))
        if t.kind == "IDENT" and t.text in ("true", "false"):
            raise _ParseError(error("UNEXPECTED_TOKEN",
                                    f"boolean constant '{t.text}' belongs outside the brackets", t.span))
        if t.kind == "IDENT":
            name = self.ident("a variable")
            if self.at("'"):
                q = self.next()
                return PIdent(name.text, True, name.span.cover(q.span))
            return PIdent(name.text, False, name.span)
        self.fail("a term")


def _respan(node, span: Span):
    return replace(node, span=span)


def parse_issy(text: str):
    """Parse Issy source. Returns a SourceSpec, or a non-empty list of
    error Diagnostics."""
    toks, diags = tokenize(text)
    if diags:
        return diags
    spec, diags = Parser(toks).spec()
    if diags:
        return diags
    return spec
