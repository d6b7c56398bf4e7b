"""Elaborated specification data model shared by both front ends."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .logic.rpltl import LTL
from .terms import Term, VarEnv


class WinCond(enum.Enum):
    SAFETY = "Safety"
    REACHABILITY = "Reachability"
    BUECHI = "Buechi"
    COBUECHI = "CoBuechi"
    PARITY = "ParityMaxOdd"

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class Location:
    name: str
    color: int
    domain: Term


@dataclass(frozen=True)
class Transition:
    src: str
    dst: str
    guard: Term


@dataclass(frozen=True)
class FormulaBlock:
    assumes: tuple[LTL, ...] = ()
    asserts: tuple[LTL, ...] = ()


@dataclass(frozen=True)
class GameBlock:
    wincond: WinCond
    initial: str
    locations: tuple[Location, ...] = ()
    transitions: tuple[Transition, ...] = ()

    def location(self, name: str) -> Location | None:
        for loc in self.locations:
            if loc.name == name:
                return loc
        return None


@dataclass(frozen=True)
class Spec:
    env: VarEnv = field(default_factory=VarEnv)
    formulas: tuple[FormulaBlock, ...] = ()
    games: tuple[GameBlock, ...] = ()
    # source positions for diagnostics after elaboration; ignored by equality
    spans: dict = field(default_factory=dict, compare=False, hash=False, repr=False)
