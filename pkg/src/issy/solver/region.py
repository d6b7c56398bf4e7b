"""Symbolic state sets: one term over state variables per location."""

from __future__ import annotations

from typing import Callable, Iterable, Mapping

from ..terms import FALSE, TRUE, Term, mk_and, mk_not, mk_or


class Region:
    """Immutable map location -> term; missing locations mean ``false``."""

    __slots__ = ("_m",)

    def __init__(self, terms: Mapping[str, Term] | Iterable[tuple[str, Term]] = ()):
        m = dict(terms)
        self._m = {k: v for k, v in m.items() if v != FALSE}

    @classmethod
    def of(cls, locations: Iterable[str], fn: Callable[[str], Term]) -> "Region":
        return cls((loc, fn(loc)) for loc in locations)

    @classmethod
    def empty(cls) -> "Region":
        return cls()

    def __getitem__(self, loc: str) -> Term:
        return self._m.get(loc, FALSE)

    def __iter__(self):
        return iter(self._m)

    def items(self):
        return self._m.items()

    def __eq__(self, other) -> bool:
        return isinstance(other, Region) and self._m == other._m

    def __hash__(self) -> int:
        return hash(tuple(sorted(self._m.items(), key=lambda kv: kv[0])))

    def __repr__(self) -> str:
        return "Region(" + ", ".join(f"{k}: {v}" for k, v in self._m.items()) + ")"

    def is_syntactically_empty(self) -> bool:
        return not self._m

    def map(self, fn: Callable[[str, Term], Term], locations: Iterable[str] | None = None) -> "Region":
        locs = list(locations) if locations is not None else list(self._m)
        return Region((loc, fn(loc, self[loc])) for loc in locs)

    def union(self, other: "Region") -> "Region":
        keys = list(dict.fromkeys(list(self._m) + list(other._m)))
        return Region((k, mk_or(self[k], other[k])) for k in keys)

    def inter(self, other: "Region") -> "Region":
        return Region((k, mk_and(self[k], other[k])) for k in self._m if k in other._m)

    def minus(self, other: "Region") -> "Region":
        return Region((k, mk_and(v, mk_not(other[k])) if other[k] != FALSE else v) for k, v in self._m.items())

    def restrict(self, locations: Iterable[str]) -> "Region":
        keep = set(locations)
        return Region((k, v) for k, v in self._m.items() if k in keep)

    def as_dict(self) -> dict[str, Term]:
        return dict(self._m)


def full(locations: Iterable[str], value: Term = TRUE) -> Region:
    return Region((loc, value) for loc in locations)


def region_includes(r1: Region, r2: Region, session=None, locations: Iterable[str] | None = None):
    """True iff r2 ⊆ r1 at every location; None if some check is inconclusive."""
    from ..smt import default_session

    session = session or default_session()
    locs = set(locations) if locations is not None else set(r1) | set(r2)
    unknown = False
    for loc in sorted(locs):
        r = session.check_implies(r2[loc], r1[loc])
        if r is False:
            return False
        if r is None:
            unknown = True
    return None if unknown else True
