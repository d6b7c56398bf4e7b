"""Source text to a checked Spec in one call."""

from __future__ import annotations

from ..errors import IssyError
from ..spec import Spec
from .check import check_global
from .elaborate import elaborate
from .macros import expand_macros
from .parser import parse_issy
from .syntax import Diagnostic


class IssyDiagnostics(IssyError):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = diagnostics
        first = next((d for d in diagnostics if d.is_error), diagnostics[0])
        super().__init__(first.render())


def load_issy(text: str) -> tuple[Spec, list[Diagnostic]]:
    """Parse, expand, elaborate and check. Returns the Spec and its warnings;
    raises IssyDiagnostics when any stage reports an error."""
    ast = parse_issy(text)
    if isinstance(ast, list):
        raise IssyDiagnostics(ast)
    ast = expand_macros(ast)
    if isinstance(ast, list):
        raise IssyDiagnostics(ast)
    res = elaborate(ast)
    if isinstance(res, list):
        raise IssyDiagnostics(res)
    spec, warnings = res
    diags = warnings + check_global(spec)
    if any(d.is_error for d in diags):
        raise IssyDiagnostics(diags)
    return spec, diags
