"""Tokenizer for the Issy surface format."""

from __future__ import annotations

from dataclasses import dataclass

from .syntax import Diagnostic, Span, error

SYMBOLS = ("<->", "->", "&&", "||", "<=", ">=", "<", ">", "=", "!", "+", "-", "*", "/",
           "(", ")", "[", "]", "{", "}", "'")


@dataclass(frozen=True)
class Token:
    kind: str  # IDENT | NAT | RAT | SYM | EOF
    text: str
    span: Span


def _is_alpha(c: str) -> bool:
    return ("a" <= c <= "z") or ("A" <= c <= "Z")


def _is_digit(c: str) -> bool:
    return "0" <= c <= "9"


class _Cursor:
    """Tracks line/column while walking the text; \\r\\n, \\r and \\n all end a line."""

    def __init__(self, text: str):
        self.text = text
        self.i = 0
        self.line = 1
        self.col = 1

    def peek(self, k: int = 0) -> str:
        j = self.i + k
        return self.text[j] if j < len(self.text) else ""

    def advance(self, n: int = 1) -> None:
        for _ in range(n):
            c = self.text[self.i]
            self.i += 1
            if c == "\n" or (c == "\r" and self.peek() != "\n"):
                self.line += 1
                self.col = 1
            elif c != "\r":
                self.col += 1

    def span_from(self, line: int, col: int, start: int) -> Span:
        return Span(line, col, self.i - start, start)


def tokenize(text: str) -> tuple[list[Token], list[Diagnostic]]:
    cur = _Cursor(text)
    toks: list[Token] = []
    diags: list[Diagnostic] = []
    n = len(text)
    while cur.i < n:
        c = cur.peek()
        line, col, start = cur.line, cur.col, cur.i
        if c in " \t\n\r\f\v":
            cur.advance()
            continue
        if c == "/" and cur.peek(1) == "/":
            while cur.i < n and cur.peek() not in "\n\r":
                cur.advance()
            continue
        if c == "/" and cur.peek(1) == "*":
            end = text.find("*/", cur.i + 2)
            if end < 0:
                diags.append(error("UNTERMINATED_COMMENT", "comment opened here is never closed",
                                   Span(line, col, 2, start)))
                cur.advance(n - cur.i)
                break
            cur.advance(end + 2 - cur.i)
            continue
        if _is_alpha(c):
            while cur.i < n and (_is_alpha(cur.peek()) or _is_digit(cur.peek()) or cur.peek() == "_"):
                cur.advance()
            toks.append(Token("IDENT", text[start:cur.i], cur.span_from(line, col, start)))
            continue
        if _is_digit(c):
            while cur.i < n and _is_digit(cur.peek()):
                cur.advance()
            kind = "NAT"
            bad = False
            if cur.peek() == ".":
                cur.advance()
                if not _is_digit(cur.peek()):
                    bad = True
                while cur.i < n and _is_digit(cur.peek()):
                    cur.advance()
                kind = "RAT"
            if cur.i < n and (_is_alpha(cur.peek()) or cur.peek() in "_."):
                bad = True
                while cur.i < n and (_is_alpha(cur.peek()) or _is_digit(cur.peek()) or cur.peek() in "_."):
                    cur.advance()
            sp = cur.span_from(line, col, start)
            if bad:
                diags.append(error("BAD_NUMERAL", f"malformed numeral '{text[start:cur.i]}'", sp))
                continue
            toks.append(Token(kind, text[start:cur.i], sp))
            continue
        for sym in SYMBOLS:
            if text.startswith(sym, cur.i):
                cur.advance(len(sym))
                toks.append(Token("SYM", sym, cur.span_from(line, col, start)))
                break
        else:
            hint = ""
            if c in "&|":
                hint = f" (did you mean '{c}{c}'?)"
            cur.advance()
            diags.append(error("BAD_CHARACTER", f"unexpected character {c!r}{hint}",
                               cur.span_from(line, col, start)))
    end = Span(cur.line, cur.col, 0, n)
    toks.append(Token("EOF", "", end))
    return toks, diags
