"""Issy surface syntax: parsing, macro expansion and elaboration."""

from .syntax import Diagnostic, Severity, SourceSpec, Span
from .parser import parse_issy
from .macros import expand_macros
from .elaborate import elaborate
from .check import check_global
from .pipeline import load_issy, IssyDiagnostics

__all__ = ["Diagnostic", "Severity", "SourceSpec", "Span", "parse_issy", "expand_macros",
           "elaborate", "check_global", "load_issy", "IssyDiagnostics"]
