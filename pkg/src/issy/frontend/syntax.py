"""Source positions, diagnostics and the surface AST."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union


@dataclass(frozen=True)
class Span:
    line: int  # 1-based
    col: int  # 1-based, in characters
    length: int
    offset: int  # character offset into the source

    def cover(self, other: "Span") -> "Span":
        end = max(self.offset + self.length, other.offset + other.length)
        first = self if self.offset <= other.offset else other
        return Span(first.line, first.col, end - first.offset, first.offset)


NOWHERE = Span(1, 1, 0, 0)


class Severity(enum.Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    severity: Severity
    code: str
    message: str
    span: Span

    def render(self, path: str = "<input>") -> str:
        return f"{path}:{self.span.line}:{self.span.col}: {self.severity.value} [{self.code}] {self.message}"

    @property
    def is_error(self) -> bool:
        return self.severity is Severity.ERROR


def error(code: str, message: str, span: Span) -> Diagnostic:
    return Diagnostic(Severity.ERROR, code, message, span)


def warning(code: str, message: str, span: Span) -> Diagnostic:
    return Diagnostic(Severity.WARNING, code, message, span)


# -- predicate level -------------------------------------------------------


@dataclass(frozen=True)
class PNum:
    value: Fraction
    is_rat: bool  # written with a decimal point
    span: Span = field(compare=False)


@dataclass(frozen=True)
class PIdent:
    name: str
    primed: bool
    span: Span = field(compare=False)


@dataclass(frozen=True)
class PUnary:
    op: str  # "-" | "abs"
    arg: "Pred"
    span: Span = field(compare=False)


@dataclass(frozen=True)
class PBinary:
    op: str  # + - * / mod = < > <= >=
    left: "Pred"
    right: "Pred"
    span: Span = field(compare=False)


Pred = Union[PNum, PIdent, PUnary, PBinary]


# -- formula level ---------------------------------------------------------


@dataclass(frozen=True)
class FBool:
    value: bool
    span: Span = field(compare=False)


@dataclass(frozen=True)
class FPred:
    pred: Pred
    span: Span = field(compare=False)


@dataclass(frozen=True)
class FIdent:
    name: str
    primed: bool
    span: Span = field(compare=False)


@dataclass(frozen=True)
class FKeep:
    names: tuple[str, ...]
    span: Span = field(compare=False)


@dataclass(frozen=True)
class FHavoc:
    names: tuple[str, ...]
    span: Span = field(compare=False)


@dataclass(frozen=True)
class FUnary:
    op: str  # ! X F G
    arg: "Formula"
    span: Span = field(compare=False)


@dataclass(frozen=True)
class FBinary:
    op: str  # && || -> <-> U W R
    left: "Formula"
    right: "Formula"
    span: Span = field(compare=False)


Formula = Union[FBool, FPred, FIdent, FKeep, FHavoc, FUnary, FBinary]


# -- items -----------------------------------------------------------------


@dataclass(frozen=True)
class VarDeclSyntax:
    kind: str  # input | state
    sort: str  # int | bool | real
    name: str
    span: Span = field(compare=False)


@dataclass(frozen=True)
class MacroDefSyntax:
    name: str
    body: Formula
    span: Span = field(compare=False)


@dataclass(frozen=True)
class LogicStmt:
    kind: str  # assume | assert
    formula: Formula
    span: Span = field(compare=False)


@dataclass(frozen=True)
class FormulaBlockSyntax:
    stmts: tuple[LogicStmt, ...]
    span: Span = field(compare=False)


@dataclass(frozen=True)
class LocDefSyntax:
    name: str
    color: int | None
    domain: Formula | None
    span: Span = field(compare=False)


@dataclass(frozen=True)
class TransDefSyntax:
    src: str
    dst: str
    guard: Formula
    span: Span = field(compare=False)


@dataclass(frozen=True)
class GameBlockSyntax:
    wincond: str
    initial: str
    # locdefs and transdefs in source order
    body: tuple[Union[LocDefSyntax, TransDefSyntax], ...]
    span: Span = field(compare=False)
    initial_span: Span = field(compare=False, default=NOWHERE)

    @property
    def locations(self) -> tuple[LocDefSyntax, ...]:
        return tuple(x for x in self.body if isinstance(x, LocDefSyntax))

    @property
    def transitions(self) -> tuple[TransDefSyntax, ...]:
        return tuple(x for x in self.body if isinstance(x, TransDefSyntax))


Item = Union[VarDeclSyntax, MacroDefSyntax, FormulaBlockSyntax, GameBlockSyntax]


@dataclass(frozen=True)
class SourceSpec:
    items: tuple[Item, ...] = ()

    def of_type(self, cls) -> list:
        return [i for i in self.items if isinstance(i, cls)]

    @property
    def vardecls(self) -> list[VarDeclSyntax]:
        return self.of_type(VarDeclSyntax)

    @property
    def macros(self) -> list[MacroDefSyntax]:
        return self.of_type(MacroDefSyntax)

    @property
    def formula_blocks(self) -> list[FormulaBlockSyntax]:
        return self.of_type(FormulaBlockSyntax)

    @property
    def game_blocks(self) -> list[GameBlockSyntax]:
        return self.of_type(GameBlockSyntax)
