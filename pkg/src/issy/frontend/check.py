"""Whole-specification checks run after elaboration."""

from __future__ import annotations

from ..logic.rpltl import implication, is_syntactic_safety
from ..spec import FormulaBlock, Spec, WinCond
from .syntax import NOWHERE, Diagnostic, error, warning


def block_is_safety(block: FormulaBlock) -> bool:
    return is_syntactic_safety(implication(block.assumes, block.asserts))


def nonsafety_components(spec: Spec) -> list[tuple[str, int]]:
    out = [("formula", i) for i, b in enumerate(spec.formulas) if not block_is_safety(b)]
    out += [("game", i) for i, g in enumerate(spec.games) if g.wincond is not WinCond.SAFETY]
    return out


def check_global(spec: Spec) -> list[Diagnostic]:
    """Cross-block diagnostics; never raises."""
    diags: list[Diagnostic] = []
    spans = spec.spans
    nonsafe = nonsafety_components(spec)
    if len(nonsafe) > 1:
        for kind, i in nonsafe[1:]:
            first = f"{nonsafe[0][0]} block {nonsafe[0][1] + 1}"
            diags.append(error("MULTIPLE_NONSAFETY",
                               f"{kind} block {i + 1} is a second non-safety component (the first is {first}); "
                               "at most one is allowed", spans.get((kind, i), NOWHERE)))
    for gi, g in enumerate(spec.games):
        names = [loc.name for loc in g.locations]
        if g.initial not in names:
            diags.append(error("UNKNOWN_INITIAL", f"initial location '{g.initial}' is not declared",
                               spans.get(("initial", gi), spans.get(("game", gi), NOWHERE))))
            continue
        succ: dict[str, set[str]] = {n: set() for n in names}
        for t in g.transitions:
            succ.setdefault(t.src, set()).add(t.dst)
        seen, todo = {g.initial}, [g.initial]
        while todo:
            for m in succ.get(todo.pop(), ()):
                if m not in seen:
                    seen.add(m)
                    todo.append(m)
        for n in names:
            if n not in seen:
                diags.append(warning("UNREACHABLE_LOCATION", f"location '{n}' is unreachable from '{g.initial}'",
                                     spans.get(("loc", gi, n), NOWHERE)))
    return diags
