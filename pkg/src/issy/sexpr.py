"""Minimal s-expression reader with source offsets.

Tokens are read greedily until whitespace, a parenthesis or end of input.
``;`` starts a comment running to the end of the line; any of the newline
forms ``\\n``, ``\\r\\n``, ``\\n\\r`` and ``\\r`` terminates it.
"""

from __future__ import annotations

from dataclasses import dataclass, field

WHITESPACE = " \t\n\r"


@dataclass
class SAtom:
    text: str
    offset: int = 0

    def __eq__(self, other):
        if isinstance(other, str):
            return self.text == other
        return isinstance(other, SAtom) and self.text == other.text

    def __hash__(self):
        return hash(self.text)


@dataclass
class SList:
    items: list = field(default_factory=list)
    offset: int = 0

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]


class SExprError(Exception):
    def __init__(self, code: str, message: str, offset: int):
        self.code = code
        self.offset = offset
        super().__init__(f"{message} (at byte {offset})")


def _skip(text: str, i: int) -> int:
    n = len(text)
    while i < n:
        c = text[i]
        if c in WHITESPACE:
            i += 1
        elif c == ";":
            while i < n and text[i] not in "\n\r":
                i += 1
        else:
            break
    return i


def read_all(text: str) -> list:
    """Read every top-level expression of ``text``."""
    out = []
    i = _skip(text, 0)
    while i < len(text):
        e, i = _read(text, i)
        out.append(e)
        i = _skip(text, i)
    return out


def read_one(text: str):
    exprs = read_all(text)
    if not exprs:
        raise SExprError("EMPTY_INPUT", "no expression found", 0)
    if len(exprs) > 1:
        raise SExprError("TRAILING_INPUT", "unexpected input after expression", exprs[1].offset)
    return exprs[0]


def _read(text: str, i: int):
    n = len(text)
    c = text[i]
    if c == ")":
        raise SExprError("UNBALANCED_PAREN", "unexpected ')'", i)
    if c == "(":
        # iterative over depth to survive deeply nested inputs
        stack = [SList([], i)]
        i += 1
        while True:
            i = _skip(text, i)
            if i >= n:
                raise SExprError("UNBALANCED_PAREN", "missing ')'", stack[-1].offset)
            c = text[i]
            if c == "(":
                stack.append(SList([], i))
                i += 1
            elif c == ")":
                done = stack.pop()
                i += 1
                if not stack:
                    return done, i
                stack[-1].items.append(done)
            else:
                atom, i = _atom(text, i)
                stack[-1].items.append(atom)
    return _atom(text, i)


def _atom(text: str, i: int):
    n = len(text)
    start = i
    if text[i] == '"':
        i += 1
        while i < n:
            if text[i] == '"':
                if i + 1 < n and text[i + 1] == '"':
                    i += 2
                    continue
                return SAtom(text[start:i + 1], start), i + 1
            i += 1
        raise SExprError("UNTERMINATED_STRING", "unterminated string literal", start)
    if text[i] == "|":
        j = text.find("|", i + 1)
        if j < 0:
            raise SExprError("UNTERMINATED_SYMBOL", "unterminated quoted symbol", start)
        return SAtom(text[start:j + 1], start), j + 1
    while i < n and text[i] not in WHITESPACE and text[i] not in "();":
        i += 1
    return SAtom(text[start:i], start), i


def dump(e) -> str:
    """Single-line rendering with single spaces."""
    if isinstance(e, SAtom):
        return e.text
    if isinstance(e, str):
        return e
    return "(" + " ".join(dump(x) for x in e) + ")"
