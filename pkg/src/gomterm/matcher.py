"""Pattern matching against canonical nodes.

Two flavours are supported on one pattern language: plain syntactic matching
for fixed-arity operators, and associative-with-neutral list matching for
variadic operators, where star variables bind possibly-empty sublists.
Subjects are always canonical nodes, so commutativity never has to be handled
here: sorted child lists make associative matching sufficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterator

if TYPE_CHECKING:
    from .store import NodeRef


class Pattern:
    """Base class for pattern (and term-template) nodes."""

    __slots__ = ()


@dataclass(frozen=True)
class Wildcard(Pattern):
    def __str__(self) -> str:
        return "_"


@dataclass(frozen=True)
class Var(Pattern):
    """Matches any term; a name bound twice must bind identical terms."""

    name: str

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class StarVar(Pattern):
    """Binds a possibly-empty sublist; legal only directly under a variadic operator."""

    name: str

    def __str__(self) -> str:
        return self.name + "*"


@dataclass(frozen=True)
class OpPattern(Pattern):
    op: str
    children: tuple[Pattern, ...] = ()

    def __str__(self) -> str:
        if not self.children:
            return self.op
        return f"{self.op}({','.join(str(c) for c in self.children)})"


@dataclass(frozen=True)
class Substitution:
    """A matching solution.

    Scalar variables map to single nodes, star variables to tuples of nodes.
    Star names are stored without the trailing ``*``.
    """

    bindings: dict
    star_bindings: dict

    def is_empty(self) -> bool:
        return not self.bindings and not self.star_bindings


def resolve_names(pattern: Pattern, operators) -> Pattern:
    """Promote bare variables whose names are known operators to constant patterns.

    ``operators`` maps operator name to its declaration.  Applied heads are kept
    as operator patterns regardless (an applied unknown head is a validation
    error, not a variable).
    """
    if isinstance(pattern, Var) and pattern.name in operators:
        return OpPattern(pattern.name, ())
    if isinstance(pattern, OpPattern):
        kids = tuple(resolve_names(c, operators) for c in pattern.children)
        if kids != pattern.children:
            return OpPattern(pattern.op, kids)
    return pattern


def pattern_variables(pattern: Pattern):
    """Yield (name, is_star) pairs for every variable occurrence."""
    if isinstance(pattern, Var):
        yield pattern.name, False
    elif isinstance(pattern, StarVar):
        yield pattern.name, True
    elif isinstance(pattern, OpPattern):
        for child in pattern.children:
            yield from pattern_variables(child)


class _Env:
    """Mutable binding environment used while backtracking."""

    __slots__ = ("scalars", "stars")

    def __init__(self):
        self.scalars = {}
        self.stars = {}

    def snapshot(self) -> Substitution:
        return Substitution(dict(self.scalars), dict(self.stars))


def _match_node(pattern: Pattern, subject, env: _Env) -> Iterator[None]:
    if isinstance(pattern, Wildcard):
        yield
        return
    if isinstance(pattern, Var):
        bound = env.scalars.get(pattern.name)
        if bound is not None:
            if bound is subject:
                yield
            return
        env.scalars[pattern.name] = subject
        try:
            yield
        finally:
            del env.scalars[pattern.name]
        return
    if isinstance(pattern, OpPattern):
        if subject.decl.name != pattern.op:
            return
        if subject.decl.is_variadic:
            yield from _match_seq(pattern.children, 0, subject.children, 0, env)
        else:
            if len(pattern.children) != len(subject.children):
                return
            yield from _match_tuple(pattern.children, subject.children, 0, env)
        return
    # A star variable in scalar position never matches; the parser rejects the
    # syntax and hook validation flags it, so this is a safe dead end.
    return


def _match_tuple(patterns, subjects, i, env) -> Iterator[None]:
    if i == len(patterns):
        yield
        return
    for _ in _match_node(patterns[i], subjects[i], env):
        yield from _match_tuple(patterns, subjects, i + 1, env)


def _match_seq(patterns, i, subjects, j, env) -> Iterator[None]:
    if i == len(patterns):
        if j == len(subjects):
            yield
        return
    p = patterns[i]
    if isinstance(p, StarVar):
        bound = env.stars.get(p.name)
        if bound is not None:
            k = j + len(bound)
            if subjects[j:k] == bound:
                yield from _match_seq(patterns, i + 1, subjects, k, env)
            return
        # Leftmost star takes the shortest prefix first.
        for k in range(j, len(subjects) + 1):
            env.stars[p.name] = subjects[j:k]
            try:
                yield from _match_seq(patterns, i + 1, subjects, k, env)
            finally:
                del env.stars[p.name]
        return
    if j == len(subjects):
        return
    for _ in _match_node(p, subjects[j], env):
        yield from _match_seq(patterns, i + 1, subjects, j + 1, env)


def iter_matches(pattern: Pattern, subject) -> Iterator[Substitution]:
    """Enumerate all solutions in the canonical order (leftmost star shortest first)."""
    env = _Env()
    for _ in _match_node(pattern, subject, env):
        yield env.snapshot()


def iter_tuple_matches(patterns, subjects) -> Iterator[Substitution]:
    """Conjunctive matching of a pattern tuple against an equal-length value tuple.

    Variables are shared across positions, so a name bound at position 0 must
    match identically at position 1 (this is how hook clauses see all of their
    parameters at once).
    """
    if len(patterns) != len(subjects):
        return
    env = _Env()
    for _ in _match_tuple(patterns, subjects, 0, env):
        yield env.snapshot()


def match_all(pattern: Pattern, subject) -> list[Substitution]:
    """All solutions of ``pattern`` against ``subject``, deterministically ordered."""
    return list(iter_matches(pattern, subject))


def match_one(pattern: Pattern, subject) -> Substitution | None:
    """First solution in the canonical enumeration order, or None."""
    return next(iter_matches(pattern, subject), None)
