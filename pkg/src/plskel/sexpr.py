"""Minimal s-expression reader with source positions.

Atoms are maximal runs of characters other than whitespace and parentheses;
``;`` starts a comment running to the end of the line.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import List, Union

from .errors import SessionSyntaxError


@dataclass(frozen=True)
class Sym:
    text: str
    line: int
    col: int

    def __str__(self):
        return self.text


@dataclass(frozen=True)
class SList:
    items: tuple
    line: int
    col: int

    def __len__(self):
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    @property
    def head(self) -> str:
        return self.items[0].text if self.items and isinstance(self.items[0], Sym) else ""


Node = Union[Sym, SList]


def read_all(text: str) -> List[Node]:
    """Parse every top-level expression in ``text``."""
    out: List[Node] = []
    stack: List[tuple] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line, col = line + 1, 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == ";":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch == "(":
            stack.append((line, col, []))
            i += 1
            col += 1
            continue
        if ch == ")":
            if not stack:
                raise SessionSyntaxError("unexpected ')'", line, col)
            l0, c0, items = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][2] if stack else out).append(node)
            i += 1
            col += 1
            continue
        j = i
        while j < n and not text[j].isspace() and text[j] not in "();":
            j += 1
        sym = Sym(text[i:j], line, col)
        (stack[-1][2] if stack else out).append(sym)
        col += j - i
        i = j
    if stack:
        l0, c0, _ = stack[-1]
        raise SessionSyntaxError("unbalanced '(' never closed", l0, c0)
    return out


def dump(node) -> str:
    """Render a nested tuple/str structure as an s-expression."""
    if isinstance(node, (list, tuple)):
        return "(" + " ".join(dump(x) for x in node) + ")"
    return str(node)
