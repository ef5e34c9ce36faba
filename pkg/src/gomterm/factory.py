"""The smart-constructor pipeline.

Every term construction flows through the operator's hooks, so every node a
factory hands out is a canonical form: re-building its head over its children
returns the identical node.  Termination of the hook system is the signature
author's responsibility; the factory converts divergence into a
RecursionBudgetExceeded error instead of hanging.
"""

from __future__ import annotations

import threading

from .errors import (
    ArityMismatch,
    GomError,
    RecursionBudgetExceeded,
    SortMismatch,
    UnboundVariable,
    UnknownOperator,
)
from .matcher import (
    OpPattern,
    Pattern,
    StarVar,
    Substitution,
    Var,
    Wildcard,
    iter_tuple_matches,
)
from .parser import SurfaceTerm
from .signature import (
    COMPARISON_GUARDS,
    EMPTINESS_GUARDS,
    GuardExpr,
    RawAction,
    SignatureModule,
    TemplateAction,
    TupleAction,
)
from .store import NodeRef, TermStore, compare_terms

# Pipelines re-entering deeper than this raise rather than exhausting the
# interpreter stack; legitimate normalizations at desk scale stay far below.
_DEPTH_LIMIT = 160


class Factory:
    """Per-module entry point through which all terms are constructed."""

    def __init__(self, module: SignatureModule, store: TermStore | None = None,
                 recursion_budget: int = 10_000):
        self.module = module
        self.store = store if store is not None else TermStore(module)
        self.recursion_budget = recursion_budget
        self.hook_table: dict[tuple[str, str], list] = {}
        for hook in module.hooks:
            self.hook_table.setdefault((hook.operator, hook.kind), []).extend(hook.clauses)
        self._local = threading.local()

    # -- budget ------------------------------------------------------------

    def _enter(self):
        local = self._local
        depth = getattr(local, "depth", 0)
        if depth == 0:
            local.steps = 0
        local.depth = depth + 1
        local.steps += 1
        if local.steps > self.recursion_budget or local.depth > _DEPTH_LIMIT:
            local.depth -= 1
            raise RecursionBudgetExceeded(
                f"hook pipeline exceeded its budget after {local.steps} re-entries; "
                "the normalization system is probably not terminating"
            )

    def _exit(self):
        self._local.depth -= 1

    # -- construction ------------------------------------------------------

    def build(self, operator: str, args) -> NodeRef:
        """Construct a fixed-arity node through its make_before/make/make_after hooks."""
        decl = self.module.operator(operator)
        if decl is None:
            raise UnknownOperator(operator)
        if decl.is_variadic:
            raise ArityMismatch(f"{operator} is variadic; use build_variadic or insert")
        args = tuple(args)
        if len(args) != decl.arity:
            raise ArityMismatch(f"{operator} takes {decl.arity} arguments, got {len(args)}")
        for slot, arg in zip(decl.slots, args):
            if arg.sort != slot.sort:
                raise SortMismatch(f"slot {slot.name} of {operator} takes {slot.sort}, got {arg.sort}")
        self._enter()
        try:
            args = self._run_before(operator, "make_before", args)
            node = self._run_make(operator, args)
            if node is None:
                node = self.store._intern(operator, args)
            node = self._run_after(operator, "make_after", None, node)
            if node.sort != decl.result:
                raise SortMismatch(f"hook on {operator} produced a {node.sort}, expected {decl.result}")
            return node
        finally:
            self._exit()

    def insert(self, operator: str, element: NodeRef, lst: NodeRef) -> NodeRef:
        """Add one element to a variadic node through the *_insert hooks.

        The fall-through behaviour is a raw prepend of the element.
        """
        decl = self.module.operator(operator)
        if decl is None:
            raise UnknownOperator(operator)
        if not decl.is_variadic:
            raise ArityMismatch(f"{operator} is not variadic")
        if element.sort != decl.element:
            raise SortMismatch(f"{operator} takes {decl.element} elements, got {element.sort}")
        if lst.decl.name != operator:
            raise SortMismatch(f"insert target must be a {operator} node, got {lst.decl.name}")
        self._enter()
        try:
            element, lst = self._run_before(operator, "make_before_insert", (element, lst))
            node = self._run_make_insert(operator, element, lst)
            if node is None:
                node = self.store._intern(operator, (element,) + lst.children)
            node = self._run_after(operator, "make_after_insert", (element,), node)
            if node.sort != decl.result:
                raise SortMismatch(f"hook on {operator} produced a {node.sort}, expected {decl.result}")
            return node
        finally:
            self._exit()

    def build_variadic(self, operator: str, elements) -> NodeRef:
        """Build a variadic node by folding insert right-to-left over the empty node,
        so each element is inserted with all later elements already canonical."""
        decl = self.module.operator(operator)
        if decl is None:
            raise UnknownOperator(operator)
        if not decl.is_variadic:
            raise ArityMismatch(f"{operator} is not variadic")
        node = self.store._intern(operator, ())
        for element in reversed(tuple(elements)):
            node = self.insert(operator, element, node)
        return node

    def build_surface(self, term: SurfaceTerm) -> NodeRef:
        """Bottom-up construction of a surface term through the hook pipeline."""
        decl = self.module.operator(term.head)
        if decl is None:
            raise UnknownOperator(term.head)
        children = [self.build_surface(c) for c in term.children]
        if decl.is_variadic:
            return self.build_variadic(term.head, children)
        return self.build(term.head, children)

    # -- hook execution ----------------------------------------------------

    def _run_before(self, operator, kind, args):
        clauses = self.hook_table.get((operator, kind))
        if not clauses:
            return args
        for clause in clauses:
            for subst in iter_tuple_matches(clause.patterns, args):
                if clause.guard is not None and not self.eval_guard(clause.guard, subst):
                    continue
                action = clause.action
                if isinstance(action, TupleAction):
                    return tuple(self._eval_template(t, subst) for t in action.templates)
                if isinstance(action, TemplateAction):
                    return (self._eval_template(action.template, subst),)
                raise GomError(f"raw() is not a valid {kind} action")
        return args

    def _run_make(self, operator, args):
        clauses = self.hook_table.get((operator, "make"))
        if not clauses:
            return None
        for clause in clauses:
            for subst in iter_tuple_matches(clause.patterns, args):
                if clause.guard is not None and not self.eval_guard(clause.guard, subst):
                    continue
                return self._eval_action(clause.action, subst)
        return None

    def _run_make_insert(self, operator, element, lst):
        clauses = self.hook_table.get((operator, "make_insert"))
        if not clauses:
            return None
        subjects = (element, lst)
        for clause in clauses:
            for subst in iter_tuple_matches(clause.patterns, subjects):
                if clause.guard is not None and not self.eval_guard(clause.guard, subst):
                    continue
                return self._eval_action(clause.action, subst)
        return None

    def _run_after(self, operator, kind, extra, node):
        """make_after clauses match the constructed node's children (plus the
        inserted element, for make_after_insert) and replace the whole node."""
        clauses = self.hook_table.get((operator, kind))
        if not clauses:
            return node
        if kind == "make_after_insert":
            subjects = tuple(extra) + (node,)
        else:
            subjects = node.children
        for clause in clauses:
            if len(clause.patterns) != len(subjects):
                continue
            for subst in iter_tuple_matches(clause.patterns, subjects):
                if clause.guard is not None and not self.eval_guard(clause.guard, subst):
                    continue
                result = self._eval_action(clause.action, subst)
                if not isinstance(result, NodeRef):
                    raise GomError(f"{kind} action must produce a single node")
                return result
        return node

    def _eval_action(self, action, subst: Substitution) -> NodeRef:
        if isinstance(action, TemplateAction):
            return self._eval_template(action.template, subst)
        if isinstance(action, RawAction):
            return self._eval_raw(action, subst)
        raise GomError("tuple actions are only valid in make_before hooks")

    def _eval_raw(self, action: RawAction, subst: Substitution) -> NodeRef:
        decl = self.module.operator(action.operator)
        if decl is None:
            raise UnknownOperator(action.operator)
        if decl.is_variadic:
            # Binary escape: raw(op(element, list)) prepends without re-entering
            # the insert hooks of this operator.
            if len(action.args) != 2:
                raise ArityMismatch(f"raw() on variadic {action.operator} takes (element, list)")
            head = self._eval_template(action.args[0], subst)
            tail_t = action.args[1]
            if isinstance(tail_t, StarVar):
                tail = self._splice(tail_t.name, subst)
            else:
                tail_node = self._eval_template(tail_t, subst)
                if tail_node.decl.name != action.operator:
                    raise SortMismatch(
                        f"raw() list argument must be a {action.operator} node, got {tail_node.decl.name}"
                    )
                tail = tail_node.children
            return self.store._intern(action.operator, (head,) + tuple(tail))
        children = tuple(self._eval_template(t, subst) for t in action.args)
        return self.store._intern(action.operator, children)

    def _splice(self, name: str, subst: Substitution):
        if name in subst.star_bindings:
            return subst.star_bindings[name]
        if name in subst.bindings:
            value = subst.bindings[name]
            if value.decl.is_variadic:
                return value.children
            raise SortMismatch(f"cannot splice {name}*: bound value is not a variadic node")
        raise UnboundVariable(name + "*")

    def _eval_template(self, template: Pattern, subst: Substitution) -> NodeRef:
        if isinstance(template, Var):
            value = subst.bindings.get(template.name)
            if value is None:
                raise UnboundVariable(template.name)
            return value
        if isinstance(template, OpPattern):
            decl = self.module.operator(template.op)
            if decl is None:
                raise UnknownOperator(template.op)
            if decl.is_variadic:
                elements: list[NodeRef] = []
                for child in template.children:
                    if isinstance(child, StarVar):
                        elements.extend(self._splice(child.name, subst))
                    else:
                        elements.append(self._eval_template(child, subst))
                return self.build_variadic(template.op, elements)
            children = [self._eval_template(c, subst) for c in template.children]
            return self.build(template.op, children)
        if isinstance(template, StarVar):
            raise UnboundVariable(template.name + "*")
        if isinstance(template, Wildcard):
            raise UnboundVariable("_")
        raise GomError(f"not a template: {template!r}")

    # -- guards ------------------------------------------------------------

    def eval_guard(self, guard: GuardExpr, subst: Substitution) -> bool:
        name = guard.predicate
        if name in COMPARISON_GUARDS:
            a = self._eval_template(guard.args[0], subst)
            b = self._eval_template(guard.args[1], subst)
            comparator = self.module.builtins.comparator or compare_terms
            c = comparator(a, b)
            if name == "lt":
                return c < 0
            if name == "leq":
                return c <= 0
            if name == "gt":
                return c > 0
            return c >= 0
        if name in EMPTINESS_GUARDS:
            arg = guard.args[0]
            if not isinstance(arg, StarVar):
                raise GomError(f"{name} takes a star variable")
            seq = subst.star_bindings.get(arg.name)
            if seq is None:
                raise UnboundVariable(arg.name + "*")
            return (len(seq) == 0) == (name == "is_empty")
        predicate = self.module.builtins.predicates.get(name)
        if predicate is None:
            raise GomError(f"unknown guard predicate {name}")
        values = []
        for arg in guard.args:
            if isinstance(arg, StarVar):
                values.append(tuple(self._splice(arg.name, subst)))
            else:
                values.append(self._eval_template(arg, subst))
        return bool(predicate(*values))


def apply_substitution(template: Pattern, subst: Substitution, factory: Factory) -> NodeRef:
    """Instantiate a term template under a substitution.

    Construction goes through the factory's hooks (never raw), so the result is
    canonical; star variables splice their sublists into variadic positions.
    """
    return factory._eval_template(template, subst)
