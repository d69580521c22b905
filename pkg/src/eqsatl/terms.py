"""Ground terms and rewrite patterns, with their prefix-notation text format.

Terms are operator trees such as ``(+ a b)``; patterns additionally allow
variables written with a ``?`` prefix, e.g. ``(+ ?x 0)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .sexpr import Atom, SexprError, SList, parse_one


class TermSyntaxError(Exception):
    pass


@dataclass(frozen=True)
class Term:
    symbol: str
    children: tuple["Term", ...] = ()

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def depth(self) -> int:
        return 1 + max((c.depth() for c in self.children), default=0)

    def __str__(self) -> str:
        if not self.children:
            return self.symbol
        return f"({self.symbol} {' '.join(str(c) for c in self.children)})"


@dataclass(frozen=True)
class Var:
    name: str

    def __str__(self) -> str:
        return f"?{self.name}"


@dataclass(frozen=True)
class PNode:
    symbol: str
    children: tuple["Pattern", ...] = ()

    def __str__(self) -> str:
        if not self.children:
            return self.symbol
        return f"({self.symbol} {' '.join(str(c) for c in self.children)})"


Pattern = Union[Var, PNode]


def _term_from_sexpr(node) -> Term:
    if isinstance(node, Atom):
        if node.text.startswith("?"):
            raise TermSyntaxError(f"{node.line}:{node.col}: variable {node.text} not allowed in a ground term")
        return Term(node.text)
    assert isinstance(node, SList)
    if not node.items or not isinstance(node.items[0], Atom):
        raise TermSyntaxError(f"{node.line}:{node.col}: expected an operator application")
    head = node.items[0]
    return Term(head.text, tuple(_term_from_sexpr(c) for c in node.items[1:]))


def parse_term(text: str) -> Term:
    try:
        return _term_from_sexpr(parse_one(text))
    except SexprError as e:
        raise TermSyntaxError(str(e)) from e


def _pattern_from_sexpr(node) -> Pattern:
    if isinstance(node, Atom):
        if node.text.startswith("?"):
            if len(node.text) < 2:
                raise TermSyntaxError(f"{node.line}:{node.col}: bare '?' is not a variable")
            return Var(node.text[1:])
        return PNode(node.text)
    assert isinstance(node, SList)
    if not node.items or not isinstance(node.items[0], Atom) or node.items[0].text.startswith("?"):
        raise TermSyntaxError(f"{node.line}:{node.col}: pattern head must be an operator symbol")
    head = node.items[0]
    return PNode(head.text, tuple(_pattern_from_sexpr(c) for c in node.items[1:]))


def parse_pattern(text: str) -> Pattern:
    try:
        return _pattern_from_sexpr(parse_one(text))
    except SexprError as e:
        raise TermSyntaxError(str(e)) from e


def pattern_from_sexpr(node) -> Pattern:
    return _pattern_from_sexpr(node)


def pattern_vars(p: Pattern) -> set[str]:
    if isinstance(p, Var):
        return {p.name}
    out: set[str] = set()
    for c in p.children:
        out |= pattern_vars(c)
    return out


def pattern_symbols(p: Pattern) -> dict[str, int]:
    """Operator symbols used by the pattern, mapped to their arity."""
    out: dict[str, int] = {}
    if isinstance(p, PNode):
        out[p.symbol] = len(p.children)
        for c in p.children:
            for sym, ar in pattern_symbols(c).items():
                out.setdefault(sym, ar)
    return out


def term_to_pattern(t: Term) -> Pattern:
    return PNode(t.symbol, tuple(term_to_pattern(c) for c in t.children))


def instantiate(p: Pattern, subst: dict[str, Term]) -> Term:
    """Replace every variable in `p` using `subst`; all variables must be bound."""
    if isinstance(p, Var):
        return subst[p.name]
    return Term(p.symbol, tuple(instantiate(c, subst) for c in p.children))


def match_term(p: Pattern, t: Term, subst: dict[str, Term] | None = None) -> dict[str, Term] | None:
    """Syntactic match of a pattern against one concrete term."""
    if subst is None:
        subst = {}
    if isinstance(p, Var):
        bound = subst.get(p.name)
        if bound is None:
            subst[p.name] = t
            return subst
        return subst if bound == t else None
    if p.symbol != t.symbol or len(p.children) != len(t.children):
        return None
    for pc, tc in zip(p.children, t.children):
        if match_term(pc, tc, subst) is None:
            return None
    return subst


def subterm_at(t: Term, path: tuple[int, ...]) -> Term:
    for i in path:
        t = t.children[i]
    return t


def replace_at(t: Term, path: tuple[int, ...], new: Term) -> Term:
    if not path:
        return new
    i = path[0]
    kids = list(t.children)
    kids[i] = replace_at(kids[i], path[1:], new)
    return Term(t.symbol, tuple(kids))
