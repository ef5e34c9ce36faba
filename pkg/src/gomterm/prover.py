"""Proof search for system BV of the calculus of structures.

The prover works over the canonical Struct signature: structures are kept
unit-free, flattened and sorted by the construction hooks, so the search
rewrites each goal conclusion-to-premise with the rules ai-down, switch (two
orientations) and q-down at every subterm position, until the unit ``o`` is
reached.  Canonical representatives make the visited set exact: states are
deduplicated by node identity.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

from .errors import InvalidGoalSort
from .factory import Factory
from .store import NodeRef
from .strategies import positions, replace_at

AI_DOWN = "ai_down"
SWITCH_LEFT = "switch_left"
SWITCH_RIGHT = "switch_right"
Q_DOWN = "q_down"

PROVED = "proved"
NOT_PROVED = "not_proved_within_bounds"
REFUTED = "refuted_by_exhaustion"


@dataclass(frozen=True)
class ProofStep:
    rule: str
    position: tuple[int, ...]
    before: NodeRef
    after: NodeRef


@dataclass(frozen=True)
class ProofTrace:
    goal: NodeRef
    steps: tuple[ProofStep, ...]
    status: str
    states_explored: int = 0

    @property
    def proved(self) -> bool:
        return self.status == PROVED


@dataclass(frozen=True)
class SearchConfig:
    max_depth: int = 20
    max_frontier: int = 100_000
    can_react_pruning: bool = True
    strategy: str = "breadth_first"  # or "depth_first"

    def __post_init__(self):
        if self.max_depth <= 0 or self.max_frontier <= 0:
            raise ValueError("search bounds must be positive")


def _is_atom(t: NodeRef) -> bool:
    return not t.children and not t.decl.is_variadic and t.decl.name != "o"


def _dual_atoms(x: NodeRef, y: NodeRef) -> bool:
    for plain, negated in ((x, y), (y, x)):
        if negated.decl.name == "neg" and negated.children[0] is plain and _is_atom(plain):
            return True
    return False


def can_react(part, u: NodeRef) -> bool:
    """Pruning heuristic: a copar part may move next to u only if some atom of
    the part occurs with opposite polarity in u."""
    return u.store.module.builtins.predicates["can_react"](tuple(part), u)


def _par_elements(t: NodeRef):
    """Children of the par list below a par node, or None."""
    if t.decl.name == "par":
        return t.children[0].children
    return None


def _unit(factory: Factory) -> NodeRef:
    return factory.build("o", [])


def _par_of(factory: Factory, elements) -> NodeRef:
    return factory.build("par", [factory.build_variadic("concPar", elements)])


def _seq_of(factory: Factory, elements) -> NodeRef:
    return factory.build("seq", [factory.build_variadic("concSeq", elements)])


def _cop_of(factory: Factory, elements) -> NodeRef:
    return factory.build("cop", [factory.build_variadic("concCop", elements)])


def _add(results: dict, position, node: NodeRef):
    results.setdefault((position, id(node)), (position, node))


def apply_ai_down(factory: Factory, t: NodeRef) -> list[tuple[tuple[int, ...], NodeRef]]:
    """Delete a dual atom pair from a par list, at every position.

    Returns (position, full rewritten term) pairs; the rebuilt spine is
    canonical, so an emptied list collapses to the unit via the hooks.
    """
    results: dict = {}
    for path, node in positions(t):
        elements = _par_elements(node)
        if elements is None:
            continue
        for i in range(len(elements)):
            for j in range(i + 1, len(elements)):
                if not _dual_atoms(elements[i], elements[j]):
                    continue
                rest = [e for k, e in enumerate(elements) if k not in (i, j)]
                inner = _par_of(factory, rest)
                _add(results, path, replace_at(factory, t, path, inner))
    return [v for v in results.values()]


def apply_switch(factory: Factory, t: NodeRef, pruning: bool = True) -> list[tuple[str, tuple[int, ...], NodeRef]]:
    """Both switch orientations at every position and decomposition.

    A par list must hold a copar element and a separate element U; the copar
    content splits into non-empty parts R and T (contiguous splits of the
    sorted list), and the moved part pairs with U inside a new par.  Because
    the lists are sorted, U is taken on either side of the copar element.
    With pruning on, orientations whose moved part cannot react with U are
    skipped.
    """
    results: dict = {}
    for path, node in positions(t):
        elements = _par_elements(node)
        if elements is None:
            continue
        for ci, c in enumerate(elements):
            if c.decl.name != "cop":
                continue
            content = c.children[0].children
            for uj, u in enumerate(elements):
                if uj == ci:
                    continue
                context = [e for k, e in enumerate(elements) if k not in (ci, uj)]
                for cut in range(1, len(content)):
                    r_part, t_part = content[:cut], content[cut:]
                    if not pruning or can_react(r_part, u):
                        moved = _par_of(factory, list(r_part) + [u])
                        new_cop = _cop_of(factory, [moved] + list(t_part))
                        inner = _par_of(factory, [new_cop] + context)
                        key = ((SWITCH_LEFT,) + path, id(inner))
                        if key not in results:
                            results[key] = (SWITCH_LEFT, path, replace_at(factory, t, path, inner))
                    if not pruning or can_react(t_part, u):
                        moved = _par_of(factory, list(t_part) + [u])
                        new_cop = _cop_of(factory, [moved] + list(r_part))
                        inner = _par_of(factory, [new_cop] + context)
                        key = ((SWITCH_RIGHT,) + path, id(inner))
                        if key not in results:
                            results[key] = (SWITCH_RIGHT, path, replace_at(factory, t, path, inner))
    return list(results.values())


def _seq_splits(factory: Factory, e: NodeRef):
    """All readings of an element as a seq pair (left; right).

    Canonicalization collapses unit-padded seqs, so a non-seq element X is
    also read degenerately as (X; o) and (o; X).
    """
    if e.decl.name == "seq":
        content = e.children[0].children
    else:
        content = (e,)
    out = []
    for cut in range(len(content) + 1):
        out.append((_seq_of(factory, content[:cut]), _seq_of(factory, content[cut:])))
    return out


def apply_q_down(factory: Factory, t: NodeRef) -> list[tuple[tuple[int, ...], NodeRef]]:
    """Merge two par-list elements read as seq pairs (R;T) and (U;V) into
    seq(par(R,U); par(T,V)), at every position and for every split choice."""
    results: dict = {}
    for path, node in positions(t):
        elements = _par_elements(node)
        if elements is None:
            continue
        for i in range(len(elements)):
            for j in range(i + 1, len(elements)):
                rest = [e for k, e in enumerate(elements) if k not in (i, j)]
                for left_r, left_t in _seq_splits(factory, elements[i]):
                    for right_u, right_v in _seq_splits(factory, elements[j]):
                        merged = _seq_of(
                            factory,
                            [
                                _par_of(factory, [left_r, right_u]),
                                _par_of(factory, [left_t, right_v]),
                            ],
                        )
                        inner = _par_of(factory, [merged] + rest)
                        _add(results, path, replace_at(factory, t, path, inner))
    return [v for v in results.values()]


def successors(factory: Factory, t: NodeRef, config: SearchConfig):
    """Deterministically ordered (rule, position, result) triples, deduplicated
    on the result node."""
    out = []
    seen: set[int] = set()

    def push(rule, pos, node):
        if id(node) not in seen:
            seen.add(id(node))
            out.append((rule, pos, node))

    for pos, node in apply_ai_down(factory, t):
        push(AI_DOWN, pos, node)
    for rule, pos, node in apply_switch(factory, t, pruning=config.can_react_pruning):
        push(rule, pos, node)
    for pos, node in apply_q_down(factory, t):
        push(Q_DOWN, pos, node)
    return out


def prove(factory: Factory, goal: NodeRef, config: SearchConfig | None = None) -> ProofTrace:
    """Search from the goal over the union of the rule successor relations.

    Success when the unit is reached; refuted-by-exhaustion when the reachable
    set is exhausted within bounds; not-proved-within-bounds when a bound
    triggers first.
    """
    if config is None:
        config = SearchConfig()
    if goal.sort != "Struc":
        raise InvalidGoalSort(f"goal must be a Struc, got {goal.sort}")

    unit = _unit(factory)
    parents: dict[int, tuple[NodeRef | None, ProofStep | None]] = {id(goal): (None, None)}
    depth_first = config.strategy == "depth_first"
    frontier: deque = deque([(goal, 0)])
    bound_hit = False
    explored = 0

    found: NodeRef | None = None
    while frontier:
        node, depth = frontier.pop() if depth_first else frontier.popleft()
        explored += 1
        if node is unit:
            found = node
            break
        succs = successors(factory, node, config)
        if depth >= config.max_depth:
            if any(id(s) not in parents for _, _, s in succs):
                bound_hit = True
            continue
        for rule, pos, result in succs:
            if id(result) in parents:
                continue
            if len(frontier) >= config.max_frontier:
                bound_hit = True
                break
            parents[id(result)] = (node, ProofStep(rule, pos, node, result))
            frontier.append((result, depth + 1))

    if found is None:
        status = NOT_PROVED if bound_hit else REFUTED
        return ProofTrace(goal, (), status, explored)

    steps: list[ProofStep] = []
    cursor = found
    while True:
        parent, step = parents[id(cursor)]
        if step is None:
            break
        steps.append(step)
        cursor = parent
    steps.reverse()
    return ProofTrace(goal, tuple(steps), PROVED, explored)


def format_position(position: tuple[int, ...]) -> str:
    return "/" + "/".join(str(i) for i in position) if position else "/"


def format_trace(trace: ProofTrace) -> str:
    from .store import print_term

    lines = [
        f"{step.rule} @ {format_position(step.position)} : "
        f"{print_term(step.before)} ==> {print_term(step.after)}"
        for step in trace.steps
    ]
    if trace.status == PROVED:
        lines.append(f"PROVED in {len(trace.steps)} steps")
    elif trace.status == NOT_PROVED:
        lines.append("NOT PROVED (bound)")
    else:
        lines.append(f"REFUTED (exhausted {trace.states_explored} states)")
    return "\n".join(lines)
