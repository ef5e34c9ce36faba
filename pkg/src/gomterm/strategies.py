"""Visitor-combinator traversal strategies over canonical terms.

Strategies either succeed with a (canonical) result node or fail; failure is
an outcome, not an error.  Rebuilding after a child rewrite always goes
through the factory, so a deep rewrite can trigger cascading normalization in
the ancestors — which is exactly what keeps canonical forms invariant during
rewriting in arbitrary context (deep inference).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterator

from .errors import StepBudgetExceeded
from .factory import Factory, apply_substitution
from .matcher import Pattern, Substitution, iter_matches
from .signature import GuardExpr
from .store import NodeRef


class Strategy:
    __slots__ = ()


@dataclass(frozen=True)
class Identity(Strategy):
    pass


@dataclass(frozen=True)
class Fail(Strategy):
    pass


@dataclass(frozen=True)
class Sequence(Strategy):
    first: Strategy
    second: Strategy


@dataclass(frozen=True)
class Choice(Strategy):
    first: Strategy
    second: Strategy


@dataclass(frozen=True)
class All(Strategy):
    inner: Strategy


@dataclass(frozen=True)
class One(Strategy):
    inner: Strategy


@dataclass(frozen=True)
class Congruence(Strategy):
    """Apply child strategies positionally under the given head operator."""

    operator: str
    children: tuple[Strategy, ...]


@dataclass(frozen=True)
class Rule(Strategy):
    """Rewrite at the root: fires on the first match solution whose guard holds."""

    pattern: Pattern
    template: Pattern
    guard: GuardExpr | Callable[[Substitution], bool] | None = None


@dataclass(frozen=True)
class TopDown(Strategy):
    inner: Strategy


@dataclass(frozen=True)
class BottomUp(Strategy):
    inner: Strategy


@dataclass(frozen=True)
class Innermost(Strategy):
    """Normalize until the inner strategy fails everywhere.

    Divergent rule sets are cut off by the step budget (rule firings per
    top-level application) with StepBudgetExceeded.
    """

    inner: Strategy
    budget: int = 10**6


@dataclass(frozen=True)
class Collect(Strategy):
    """Match at a position and run an action for every solution.

    The action receives a CollectContext; the default action adds the matched
    subterm to the sink.  Used with collect_everywhere it visits every subterm
    position, which gives rewriting in arbitrary context when the action adds
    spine-rebuilt whole terms.
    """

    pattern: Pattern
    action: Callable[["CollectContext"], None] | None = None
    guard: GuardExpr | Callable[[Substitution], bool] | None = None


def top_down(s: Strategy) -> Strategy:
    return TopDown(s)


def bottom_up(s: Strategy) -> Strategy:
    return BottomUp(s)


def innermost(s: Strategy, budget: int = 10**6) -> Strategy:
    return Innermost(s, budget)


class ResultSink:
    """Ordered collection of nodes with set semantics under node_equal.

    Interned references make deduplication an O(1) identity check.
    """

    def __init__(self):
        self._seen: set[int] = set()
        self._items: list[NodeRef] = []

    def add(self, node: NodeRef) -> bool:
        key = id(node)
        if key in self._seen:
            return False
        self._seen.add(key)
        self._items.append(node)
        return True

    def __iter__(self):
        return iter(self._items)

    def __len__(self) -> int:
        return len(self._items)

    def __contains__(self, node: NodeRef) -> bool:
        return id(node) in self._seen


@dataclass
class CollectContext:
    """Everything a collect action needs: the solution, the position, and a way
    to rebuild the whole term with this position replaced."""

    substitution: Substitution
    node: NodeRef
    path: tuple[int, ...]
    root: NodeRef
    factory: Factory
    sink: ResultSink

    def rebuilt(self, replacement: NodeRef) -> NodeRef:
        """The full input term with this position replaced, rebuilt canonically
        along the spine."""
        return replace_at(self.factory, self.root, self.path, replacement)


def positions(t: NodeRef, path: tuple[int, ...] = ()) -> Iterator[tuple[tuple[int, ...], NodeRef]]:
    """Every subterm position of t, pre-order, as (path of child indices, node)."""
    yield path, t
    for i, child in enumerate(t.children):
        yield from positions(child, path + (i,))


def rebuild(factory: Factory, node: NodeRef, children) -> NodeRef:
    """Rebuild a node's head over new children through the hook pipeline."""
    if node.decl.is_variadic:
        return factory.build_variadic(node.decl.name, children)
    return factory.build(node.decl.name, children)


def replace_at(factory: Factory, root: NodeRef, path: tuple[int, ...], replacement: NodeRef) -> NodeRef:
    """Replace the subterm at ``path`` and rebuild every ancestor canonically."""
    if not path:
        return replacement
    i = path[0]
    children = list(root.children)
    children[i] = replace_at(factory, children[i], path[1:], replacement)
    return rebuild(factory, root, children)


def _guard_holds(guard, subst: Substitution, factory: Factory) -> bool:
    if guard is None:
        return True
    if isinstance(guard, GuardExpr):
        return factory.eval_guard(guard, subst)
    return bool(guard(subst))


def apply_strategy(s: Strategy, t: NodeRef, factory: Factory) -> NodeRef | None:
    """Standard combinator semantics; returns the result node or None on failure."""
    if isinstance(s, Identity):
        return t
    if isinstance(s, Fail):
        return None
    if isinstance(s, Sequence):
        r = apply_strategy(s.first, t, factory)
        if r is None:
            return None
        return apply_strategy(s.second, r, factory)
    if isinstance(s, Choice):
        r = apply_strategy(s.first, t, factory)
        if r is not None:
            return r
        return apply_strategy(s.second, t, factory)
    if isinstance(s, All):
        return _apply_all(s.inner, t, factory)
    if isinstance(s, One):
        for i, child in enumerate(t.children):
            r = apply_strategy(s.inner, child, factory)
            if r is not None:
                kids = list(t.children)
                kids[i] = r
                return rebuild(factory, t, kids)
        return None
    if isinstance(s, Congruence):
        if t.decl.name != s.operator or len(t.children) != len(s.children):
            return None
        kids = []
        for strat, child in zip(s.children, t.children):
            r = apply_strategy(strat, child, factory)
            if r is None:
                return None
            kids.append(r)
        return rebuild(factory, t, kids)
    if isinstance(s, Rule):
        for subst in iter_matches(s.pattern, t):
            if _guard_holds(s.guard, subst, factory):
                return apply_substitution(s.template, subst, factory)
        return None
    if isinstance(s, TopDown):
        r = apply_strategy(s.inner, t, factory)
        if r is None:
            return None
        return _apply_all(TopDown(s.inner), r, factory)
    if isinstance(s, BottomUp):
        r = _apply_all(BottomUp(s.inner), t, factory)
        if r is None:
            return None
        return apply_strategy(s.inner, r, factory)
    if isinstance(s, Innermost):
        budget = [s.budget]
        return _innermost(s.inner, t, factory, budget)
    if isinstance(s, Collect):
        fired = False
        for subst in iter_matches(s.pattern, t):
            if _guard_holds(s.guard, subst, factory):
                fired = True
                _run_collect_action(s, subst, t, (), t, factory, ResultSink())
        return t if fired else None
    raise TypeError(f"not a strategy: {s!r}")


def _apply_all(inner: Strategy, t: NodeRef, factory: Factory) -> NodeRef | None:
    if not t.children:
        return t
    kids = []
    for child in t.children:
        r = apply_strategy(inner, child, factory)
        if r is None:
            return None
        kids.append(r)
    return rebuild(factory, t, kids)


def _innermost(inner: Strategy, t: NodeRef, factory: Factory, budget: list) -> NodeRef:
    if t.children:
        kids = [_innermost(inner, c, factory, budget) for c in t.children]
        t = rebuild(factory, t, kids)
    while True:
        r = apply_strategy(inner, t, factory)
        if r is None:
            return t
        budget[0] -= 1
        if budget[0] < 0:
            raise StepBudgetExceeded("innermost exceeded its rewrite budget")
        if r.children:
            kids = [_innermost(inner, c, factory, budget) for c in r.children]
            r = rebuild(factory, r, kids)
        t = r


def _run_collect_action(c: Collect, subst, node, path, root, factory, sink):
    ctx = CollectContext(subst, node, path, root, factory, sink)
    if c.action is None:
        sink.add(node)
    else:
        c.action(ctx)


def collect_everywhere(c: Collect, t: NodeRef, factory: Factory, sink: ResultSink | None = None) -> ResultSink:
    """Visit every subterm position of t (pre-order); at each position run the
    collect action once per match solution.  Returns the sink."""
    if sink is None:
        sink = ResultSink()
    for path, node in positions(t):
        for subst in iter_matches(c.pattern, node):
            if _guard_holds(c.guard, subst, factory):
                _run_collect_action(c, subst, node, path, t, factory, sink)
    return sink
