"""Line/column-tracking s-expression reader shared by the text formats."""

from __future__ import annotations

from dataclasses import dataclass


class SexprError(Exception):
    def __init__(self, message: str, line: int = 0, col: int = 0):
        super().__init__(f"{line}:{col}: {message}" if line else message)
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Atom:
    text: str
    line: int = 0
    col: int = 0
    quoted: bool = False  # came from a "..." literal


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int = 0
    col: int = 0


_DELIMS = "()\"; \t\r\n"


def _tokenize(text: str):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line += 1
            col = 1
            i += 1
        elif c in " \t\r":
            i += 1
            col += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield (c, line, col)
            i += 1
            col += 1
        elif c == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            buf = []
            while True:
                if i >= n:
                    raise SexprError("unterminated string", start_line, start_col)
                c = text[i]
                if c == "\\" and i + 1 < n:
                    buf.append(text[i + 1])
                    i += 2
                    col += 2
                elif c == '"':
                    i += 1
                    col += 1
                    break
                else:
                    if c == "\n":
                        line += 1
                        col = 0
                    buf.append(c)
                    i += 1
                    col += 1
            yield (Atom("".join(buf), start_line, start_col, quoted=True), start_line, start_col)
        else:
            start_line, start_col = line, col
            j = i
            while j < n and text[j] not in _DELIMS:
                j += 1
            yield (Atom(text[i:j], start_line, start_col), start_line, start_col)
            col += j - i
            i = j


def parse_all(text: str) -> list:
    """Read every top-level form in `text` as Atom/SList trees."""
    stack: list[list] = []
    positions: list[tuple[int, int]] = []
    top: list = []
    for tok, line, col in _tokenize(text):
        if tok == "(":
            stack.append([])
            positions.append((line, col))
        elif tok == ")":
            if not stack:
                raise SexprError("unexpected ')'", line, col)
            items = stack.pop()
            pline, pcol = positions.pop()
            node = SList(tuple(items), pline, pcol)
            (stack[-1] if stack else top).append(node)
        else:
            (stack[-1] if stack else top).append(tok)
    if stack:
        pline, pcol = positions[-1]
        raise SexprError("unclosed '('", pline, pcol)
    return top


def parse_one(text: str):
    forms = parse_all(text)
    if len(forms) != 1:
        raise SexprError(f"expected exactly one form, found {len(forms)}")
    return forms[0]
