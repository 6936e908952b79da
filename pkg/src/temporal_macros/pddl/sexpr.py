"""Minimal s-expression reader with source positions."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from ..errors import ParseError


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

    def __iter__(self):
        return iter(self.items)

    def head(self) -> str:
        """Lower-cased leading symbol, or '' when the list is empty or starts with a list."""
        if self.items and isinstance(self.items[0], Sym):
            return self.items[0].text
        return ""


Node = Union[Sym, SList]


def tokenize(text: str):
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        c = text[i]
        if c == "\n":
            line, col = line + 1, 1
            i += 1
        elif c.isspace():
            i += 1
            col += 1
        elif c == ";":
            while i < n and text[i] != "\n":
                i += 1
        elif c in "()":
            yield c, line, col
            i += 1
            col += 1
        else:
            start, start_col = i, col
            while i < n and not text[i].isspace() and text[i] not in "();":
                i += 1
                col += 1
            yield text[start:i].lower(), line, start_col


def parse_sexprs(text: str) -> list[Node]:
    """Read every top-level expression; symbols are lower-cased (PDDL is case-insensitive)."""
    stack: list[tuple[list, int, int]] = []
    top: list[Node] = []
    for tok, line, col in tokenize(text):
        if tok == "(":
            stack.append(([], line, col))
        elif tok == ")":
            if not stack:
                raise ParseError("unbalanced ')'", line, col)
            items, l0, c0 = stack.pop()
            node = SList(tuple(items), l0, c0)
            (stack[-1][0] if stack else top).append(node)
        else:
            (stack[-1][0] if stack else top).append(Sym(tok, line, col))
    if stack:
        _, line, col = stack[-1]
        raise ParseError("unclosed '('", line, col, "')'")
    return top


def parse_one(text: str) -> SList:
    nodes = parse_sexprs(text)
    if len(nodes) != 1 or not isinstance(nodes[0], SList):
        where = nodes[1] if len(nodes) > 1 else None
        raise ParseError("expected exactly one parenthesised expression",
                         getattr(where, "line", 1), getattr(where, "col", 1))
    return nodes[0]
