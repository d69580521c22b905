"""Union provenance and explanation reconstruction for the e-graph.

Every e-node instance ever added gets a stable explain id; each class merge
records one justified edge between two such instances.  Explanations between
two represented terms are rebuilt by walking the resulting forest and
flattening congruence descents into child positions on the rule steps, so a
finished explanation is a term sequence where consecutive terms differ by one
rewrite at a recorded path.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .terms import Pattern, Term, Var, instantiate, match_term, replace_at, subterm_at


class NotEquivalent(Exception):
    pass


class InvalidExplanation(Exception):
    pass


@dataclass(frozen=True)
class RuleJustification:
    """A union caused by applying a named rewrite rule.

    `subst` maps rule variables to explain ids; it is present for unions made
    by the saturation engine and may be None for externally asserted unions.
    """

    rule_name: str
    subst: Optional[tuple[tuple[str, int], ...]] = None


@dataclass(frozen=True)
class CongruenceJustification:
    pass


Justification = "RuleJustification | CongruenceJustification"


@dataclass(frozen=True)
class RewriteStep:
    """One rewrite in a flattened explanation.

    The step turns the enclosing term into the next one by replacing the
    subterm at `path` (its congruence path) with `after`.  `subst` holds the
    concrete variable bindings when the originating union recorded them.
    """

    rule_name: str
    path: tuple[int, ...]
    before: Term
    after: Term
    forward: bool = True
    subst: Optional[tuple[tuple[str, Term], ...]] = None

    def lifted(self, position: int) -> "RewriteStep":
        return RewriteStep(self.rule_name, (position,) + self.path, self.before,
                           self.after, self.forward, self.subst)


@dataclass(frozen=True)
class Explanation:
    """Alternating terms and rewrite steps: terms[i] --steps[i]--> terms[i+1]."""

    terms: tuple[Term, ...]
    steps: tuple[RewriteStep, ...]

    def __len__(self) -> int:
        return len(self.steps)

    def rule_names(self) -> list[str]:
        return [s.rule_name for s in self.steps]


@dataclass
class _ExplainNode:
    symbol: str
    children: tuple[int, ...]


@dataclass
class ProofForest:
    """Forest over e-node instances; one justified edge per class merge."""

    _nodes: list[_ExplainNode] = field(default_factory=list)
    _parent: list[int] = field(default_factory=list)
    # edge child -> parent; `fwd` means the justification was recorded with
    # the child as its left-hand end.
    _edge_just: dict[int, object] = field(default_factory=dict)
    _edge_fwd: dict[int, bool] = field(default_factory=dict)

    def add_node(self, symbol: str, children: tuple[int, ...]) -> int:
        nid = len(self._nodes)
        self._nodes.append(_ExplainNode(symbol, children))
        self._parent.append(nid)
        return nid

    def node(self, nid: int) -> _ExplainNode:
        return self._nodes[nid]

    def record_union(self, a: int, b: int, just) -> None:
        """Link the trees of `a` and `b`; `just` relates term(a) to term(b)."""
        self._reroot(a)
        self._parent[a] = b
        self._edge_just[a] = just
        self._edge_fwd[a] = True

    def _reroot(self, x: int) -> None:
        prev = x
        prev_just = None
        prev_fwd = True
        while True:
            nxt = self._parent[prev]
            just = self._edge_just.get(prev)
            fwd = self._edge_fwd.get(prev, True)
            if prev_just is None:
                self._parent[prev] = prev
                self._edge_just.pop(prev, None)
                self._edge_fwd.pop(prev, None)
            else:
                self._parent[prev] = last
                self._edge_just[prev] = prev_just
                self._edge_fwd[prev] = not prev_fwd
            if nxt == prev:
                break
            last = prev
            prev = nxt
            prev_just = just
            prev_fwd = fwd

    def _ancestors(self, x: int) -> list[int]:
        out = [x]
        while self._parent[out[-1]] != out[-1]:
            out.append(self._parent[out[-1]])
        return out

    def _path(self, u: int, v: int) -> list[tuple[int, int, object, bool]]:
        """Edges (from, to, justification, forward) connecting u to v."""
        if u == v:
            return []
        au = self._ancestors(u)
        av = self._ancestors(v)
        seen = {n: i for i, n in enumerate(au)}
        lca = None
        for j, n in enumerate(av):
            if n in seen:
                lca = (seen[n], j)
                break
        if lca is None:
            raise NotEquivalent("terms are not in the same equivalence class")
        iu, iv = lca
        edges: list[tuple[int, int, object, bool]] = []
        for k in range(iu):
            x = au[k]
            edges.append((x, self._parent[x], self._edge_just[x], self._edge_fwd[x]))
        down = []
        for k in range(iv):
            x = av[k]
            # traversed parent -> child, so the edge orientation flips
            down.append((self._parent[x], x, self._edge_just[x], not self._edge_fwd[x]))
        edges.extend(reversed(down))
        return edges

    # -- flattening ---------------------------------------------------------

    def term_of(self, nid: int, _memo: dict[int, Term] | None = None) -> Term:
        if _memo is None:
            _memo = {}
        got = _memo.get(nid)
        if got is not None:
            return got
        node = self._nodes[nid]
        t = Term(node.symbol, tuple(self.term_of(c, _memo) for c in node.children))
        _memo[nid] = t
        return t

    def explain(self, u: int, v: int) -> Explanation:
        memo: dict[int, Term] = {}
        steps = self._explain_ids(u, v, memo)
        terms = [self.term_of(u, memo)]
        for s in steps:
            cur = terms[-1]
            if subterm_at(cur, s.path) != s.before:
                raise InvalidExplanation("reconstructed step does not line up")
            terms.append(replace_at(cur, s.path, s.after))
        if terms[-1] != self.term_of(v, memo):
            raise InvalidExplanation("explanation does not reach the target term")
        return Explanation(tuple(terms), tuple(steps))

    def _explain_ids(self, u: int, v: int, memo: dict[int, Term]) -> list[RewriteStep]:
        steps: list[RewriteStep] = []
        for x, y, just, fwd in self._path(u, v):
            steps.extend(self._edge_steps(x, y, just, fwd, memo))
        return steps

    def _edge_steps(self, x: int, y: int, just, fwd: bool, memo) -> list[RewriteStep]:
        if isinstance(just, CongruenceJustification):
            nx, ny = self._nodes[x], self._nodes[y]
            out: list[RewriteStep] = []
            for i, (cx, cy) in enumerate(zip(nx.children, ny.children)):
                if cx == cy:
                    continue
                out.extend(s.lifted(i) for s in self._explain_ids(cx, cy, memo))
            return out
        assert isinstance(just, RuleJustification)
        concrete = None
        if just.subst is not None:
            concrete = tuple((var, self.term_of(nid, memo)) for var, nid in just.subst)
        return [RewriteStep(just.rule_name, (), self.term_of(x, memo),
                            self.term_of(y, memo), forward=fwd, subst=concrete)]


def replay(explanation: Explanation, rules: dict[str, tuple[Pattern, Pattern]] | None = None) -> None:
    """Re-run every step of an explanation, raising InvalidExplanation on any mismatch.

    `rules` maps rule names to (lhs, rhs); steps whose rule is known and which
    carry a recorded substitution are re-matched at their recorded path.
    """
    terms = explanation.terms
    steps = explanation.steps
    if len(terms) != len(steps) + 1:
        raise InvalidExplanation("term/step counts disagree")
    for i, step in enumerate(steps):
        cur, nxt = terms[i], terms[i + 1]
        try:
            before = subterm_at(cur, step.path)
        except IndexError:
            raise InvalidExplanation(f"step {i}: path {step.path} does not exist") from None
        if before != step.before:
            raise InvalidExplanation(f"step {i}: recorded source subterm differs")
        if replace_at(cur, step.path, step.after) != nxt:
            raise InvalidExplanation(f"step {i}: replacement does not produce the next term")
        if rules is not None and step.rule_name in rules and step.subst is not None:
            lhs, rhs = rules[step.rule_name]
            src, dst = (lhs, rhs) if step.forward else (rhs, lhs)
            bindings = {var: t for var, t in step.subst}
            got = match_term(src, step.before)
            if got is None:
                raise InvalidExplanation(f"step {i}: rule {step.rule_name} does not match at path {step.path}")
            for var, t in got.items():
                if var in bindings and bindings[var] != t:
                    raise InvalidExplanation(f"step {i}: substitution disagrees on ?{var}")
            if instantiate(dst, bindings) != step.after:
                raise InvalidExplanation(f"step {i}: rule {step.rule_name} does not produce the recorded result")
