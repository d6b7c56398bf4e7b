"""Exception types shared across the toolchain."""

from __future__ import annotations


class IssyError(Exception):
    pass


class SortError(IssyError):
    def __init__(self, position, expected: str, found: str, message: str | None = None):
        self.position = position
        self.expected = expected
        self.found = found
        super().__init__(message or f"sort error at {position}: expected {expected}, found {found}")


class UnknownVariable(IssyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"unknown variable '{name}'")


class PrimedInput(IssyError):
    def __init__(self, name: str):
        self.name = name
        super().__init__(f"input variable '{name}' cannot be primed")


class BackendError(IssyError):
    """The SMT process failed or answered something we cannot read."""


class TranslatorError(IssyError):
    def __init__(self, exit_code: int | None, stderr: str):
        self.exit_code = exit_code
        self.stderr = stderr
        super().__init__(f"LTL translator failed (exit code {exit_code}): {stderr.strip()}")


class MissingAtom(IssyError):
    pass


class HoaSyntaxError(IssyError):
    pass


class UnsupportedAcceptance(IssyError):
    pass


class NondeterministicAutomaton(IssyError):
    pass


class MultipleNonSafety(IssyError):
    pass


class EnvMismatch(IssyError):
    pass


class ExtractUnsupported(IssyError):
    def __init__(self, location: str, transition=None, reason: str = ""):
        self.location = location
        self.transition = transition
        msg = f"cannot extract a strategy at location '{location}'"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class NotRealizable(IssyError):
    pass
