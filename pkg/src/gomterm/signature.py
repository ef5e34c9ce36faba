"""In-memory representation and validation of algebraic signature modules.

A module declares sorts, operators (fixed-arity or variadic) and hooks.  Hooks
carry normalization programs written in a small closed rule language: each
clause is a pattern tuple, an optional guard, and an action (a term template,
a ``raw(...)`` escape to the hook-free constructor, or a tuple template for the
``make_before*`` kinds).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

from .matcher import OpPattern, Pattern, StarVar, Var, Wildcard, pattern_variables, resolve_names
from .errors import ImportCycle, NameClash, UnknownImport

HOOK_KINDS = (
    "make",
    "make_before",
    "make_after",
    "make_insert",
    "make_before_insert",
    "make_after_insert",
)
INSERT_KINDS = frozenset(k for k in HOOK_KINDS if k.endswith("insert"))

COMPARISON_GUARDS = frozenset({"lt", "leq", "gt", "geq"})
EMPTINESS_GUARDS = frozenset({"is_empty", "non_empty"})

NO_POS = (0, 0)


@dataclass(frozen=True)
class SortDecl:
    name: str
    pos: tuple[int, int] = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class Slot:
    name: str
    sort: str


@dataclass(frozen=True)
class OperatorDecl:
    """A fixed-arity operator (named slots) or a variadic one (single element sort)."""

    name: str
    result: str
    slots: tuple[Slot, ...] = ()
    element: str | None = None
    pos: tuple[int, int] = field(default=NO_POS, compare=False, repr=False)

    @property
    def is_variadic(self) -> bool:
        return self.element is not None

    @property
    def arity(self) -> int:
        return len(self.slots)


@dataclass(frozen=True)
class GuardExpr:
    """A guard over clause bindings: a comparison, an emptiness test, or a
    predicate from the module's builtin registry."""

    predicate: str
    args: tuple[Pattern, ...]

    def __str__(self) -> str:
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class TemplateAction:
    """Build the action template (a bare bound variable is a pass-through)."""

    template: Pattern

    def __str__(self) -> str:
        return str(self.template)


@dataclass(frozen=True)
class RawAction:
    """Escape to the hook-free constructor of one operator.

    Arguments are still built normally (other operators' hooks apply); only the
    top node skips its own hooks.  For a variadic operator the form is binary:
    ``raw(op(element, list))`` prepends the element onto the list node.
    """

    operator: str
    args: tuple[Pattern, ...]

    def __str__(self) -> str:
        return f"raw({self.operator}({','.join(str(a) for a in self.args)}))"


@dataclass(frozen=True)
class TupleAction:
    """Rewrite the hook's argument tuple; only meaningful for make_before kinds."""

    templates: tuple[Pattern, ...]

    def __str__(self) -> str:
        return f"({','.join(str(t) for t in self.templates)})"


Action = TemplateAction | RawAction | TupleAction


@dataclass(frozen=True)
class RuleClause:
    patterns: tuple[Pattern, ...]
    guard: GuardExpr | None
    action: Action
    pos: tuple[int, int] = field(default=NO_POS, compare=False, repr=False)


@dataclass(frozen=True)
class HookDecl:
    operator: str
    kind: str
    params: tuple[str, ...]
    clauses: tuple[RuleClause, ...]
    pos: tuple[int, int] = field(default=NO_POS, compare=False, repr=False)


def _default_dual(t1, t2) -> bool:
    """True iff one argument is the other wrapped in a unary ``neg`` operator."""
    for x, y in ((t1, t2), (t2, t1)):
        if y.decl.name == "neg" and len(y.children) == 1 and y.children[0] is x:
            return True
    return False


def _atom_polarities(node, out, negated=False):
    if node.decl.name == "neg" and len(node.children) == 1:
        _atom_polarities(node.children[0], out, not negated)
        return
    if not node.children and node.decl.name != "o":
        out.add((node.decl.name, negated))
        return
    for child in node.children:
        _atom_polarities(child, out, negated)


def _default_can_react(part, u) -> bool:
    """True iff some atom of ``part`` occurs with opposite polarity in ``u``."""
    if not isinstance(part, (list, tuple)):
        part = (part,)
    left: set = set()
    for node in part:
        _atom_polarities(node, left)
    right: set = set()
    _atom_polarities(u, right)
    return any((name, not pol) in right for name, pol in left)


class BuiltinRegistry:
    """The closed set of host functions visible to hooks and guards.

    ``comparator`` is a total order on nodes (None means: lexical order on the
    canonical printed form).  ``predicates`` maps guard names to boolean
    functions over node tuples; star-variable arguments arrive as tuples of
    nodes.
    """

    def __init__(self, comparator=None, predicates=None):
        self.comparator = comparator
        self.predicates = {"dual": _default_dual, "can_react": _default_can_react}
        if predicates:
            self.predicates.update(predicates)


@dataclass(frozen=True)
class SignatureModule:
    name: str
    imports: tuple[str, ...] = ()
    sorts: tuple[SortDecl, ...] = ()
    operators: tuple[OperatorDecl, ...] = ()
    hooks: tuple[HookDecl, ...] = ()
    builtins: BuiltinRegistry = field(default_factory=BuiltinRegistry, compare=False, repr=False)

    @cached_property
    def operator_table(self) -> dict[str, OperatorDecl]:
        table = {}
        for op in self.operators:
            table.setdefault(op.name, op)
        return table

    @cached_property
    def sort_names(self) -> frozenset[str]:
        return frozenset(s.name for s in self.sorts)

    def operator(self, name: str) -> OperatorDecl | None:
        return self.operator_table.get(name)


@dataclass(frozen=True)
class Diagnostic:
    line: int
    column: int
    code: str
    message: str

    def format(self, filename: str = "<module>") -> str:
        return f"{filename}:{self.line}:{self.column}: {self.code}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    diagnostics: tuple[Diagnostic, ...]

    @property
    def accepted(self) -> bool:
        return not self.diagnostics

    def format(self, filename: str = "<module>") -> str:
        return "\n".join(d.format(filename) for d in self.diagnostics)


def resolve_imports(module: SignatureModule, available) -> SignatureModule:
    """Return a module whose tables include all transitively imported declarations.

    ``available`` is an iterable of candidate modules; the input module is not
    modified.  Hooks travel with the operators they are attached to, and bare
    clause variables naming operators that only come into scope through the
    merge are promoted to constant patterns.
    """
    by_name = {m.name: m for m in available}
    by_name.setdefault(module.name, module)

    order: list[SignatureModule] = []
    state: dict[str, int] = {}  # 1 = on stack, 2 = done

    def visit(mod: SignatureModule, chain: list[str]):
        mark = state.get(mod.name)
        if mark == 2:
            return
        if mark == 1:
            cycle = chain[chain.index(mod.name):] + [mod.name]
            raise ImportCycle(cycle)
        state[mod.name] = 1
        for imp in mod.imports:
            target = by_name.get(imp)
            if target is None:
                raise UnknownImport(imp)
            visit(target, chain + [mod.name])
        state[mod.name] = 2
        order.append(mod)

    visit(module, [])

    if len(order) == 1:
        return module

    sorts: list[SortDecl] = []
    seen_sorts: set[str] = set()
    operators: list[OperatorDecl] = []
    op_origin: dict[str, str] = {}
    hooks: list[HookDecl] = []
    for mod in order:
        for s in mod.sorts:
            if s.name not in seen_sorts:
                seen_sorts.add(s.name)
                sorts.append(s)
        for op in mod.operators:
            if op.name in op_origin and op_origin[op.name] != mod.name:
                raise NameClash(op.name, (op_origin[op.name], mod.name))
            if op.name not in op_origin:
                op_origin[op.name] = mod.name
                operators.append(op)
        hooks.extend(mod.hooks)

    merged = SignatureModule(
        name=module.name,
        imports=module.imports,
        sorts=tuple(sorts),
        operators=tuple(operators),
        hooks=tuple(hooks),
        builtins=module.builtins,
    )
    table = merged.operator_table
    rehooked = tuple(_promote_hook(h, table) for h in merged.hooks)
    if rehooked != merged.hooks:
        merged = SignatureModule(
            name=merged.name,
            imports=merged.imports,
            sorts=merged.sorts,
            operators=merged.operators,
            hooks=rehooked,
            builtins=merged.builtins,
        )
    return merged


def _promote_hook(hook: HookDecl, table) -> HookDecl:
    clauses = tuple(
        RuleClause(
            patterns=tuple(resolve_names(p, table) for p in c.patterns),
            guard=GuardExpr(c.guard.predicate, tuple(resolve_names(a, table) for a in c.guard.args))
            if c.guard
            else None,
            action=_promote_action(c.action, table),
            pos=c.pos,
        )
        for c in hook.clauses
    )
    if clauses == hook.clauses:
        return hook
    return HookDecl(hook.operator, hook.kind, hook.params, clauses, hook.pos)


def _promote_action(action: Action, table) -> Action:
    if isinstance(action, TemplateAction):
        return TemplateAction(resolve_names(action.template, table))
    if isinstance(action, RawAction):
        return RawAction(action.operator, tuple(resolve_names(a, table) for a in action.args))
    return TupleAction(tuple(resolve_names(t, table) for t in action.templates))


def validate(module: SignatureModule) -> ValidationReport:
    """Check every structural invariant of the module; diagnostics are data.

    Imports must already be resolved.  The same input always yields the same
    report, in declaration order.
    """
    diags: list[Diagnostic] = []

    def err(pos, code, message):
        diags.append(Diagnostic(pos[0], pos[1], code, message))

    seen_sorts: set[str] = set()
    for s in module.sorts:
        if s.name in seen_sorts:
            err(s.pos, "DuplicateSort", f"sort {s.name} declared more than once")
        seen_sorts.add(s.name)

    known_sorts = module.sort_names
    seen_ops: set[str] = set()
    for op in module.operators:
        if op.name in seen_ops:
            err(op.pos, "DuplicateOperator", f"operator {op.name} declared more than once")
        seen_ops.add(op.name)
        if op.result not in known_sorts:
            err(op.pos, "UnknownSort", f"result sort {op.result} of {op.name} is not declared")
        if op.is_variadic:
            if op.element not in known_sorts:
                err(op.pos, "UnknownSort", f"element sort {op.element} of {op.name} is not declared")
        else:
            slot_names: set[str] = set()
            for slot in op.slots:
                if slot.name in slot_names:
                    err(op.pos, "DuplicateSlot", f"slot {slot.name} repeated on {op.name}")
                slot_names.add(slot.name)
                if slot.sort not in known_sorts:
                    err(op.pos, "UnknownSort", f"slot sort {slot.sort} of {op.name} is not declared")

    table = module.operator_table
    for hook in module.hooks:
        decl = table.get(hook.operator)
        if decl is None:
            err(hook.pos, "UnknownHookOperator", f"hook on undeclared operator {hook.operator}")
            continue
        if hook.kind in INSERT_KINDS:
            if not decl.is_variadic:
                err(hook.pos, "HookKindMismatch", f"{hook.kind} hook on fixed operator {hook.operator}")
                continue
            if len(hook.params) != 2:
                err(hook.pos, "HookParamCount", f"{hook.kind} takes 2 parameters, got {len(hook.params)}")
                continue
        else:
            if decl.is_variadic:
                err(hook.pos, "HookKindMismatch", f"{hook.kind} hook on variadic operator {hook.operator}")
                continue
            if len(hook.params) != decl.arity:
                err(
                    hook.pos,
                    "HookParamCount",
                    f"{hook.kind} on {hook.operator} takes {decl.arity} parameters, got {len(hook.params)}",
                )
                continue
        for clause in hook.clauses:
            _validate_clause(module, hook, clause, err)

    return ValidationReport(tuple(diags))


def _validate_clause(module, hook, clause, err):
    table = module.operator_table
    if len(clause.patterns) != len(hook.params):
        err(clause.pos, "ClauseArity", f"clause has {len(clause.patterns)} patterns, hook has {len(hook.params)} parameters")
        return

    scalars: set[str] = set()
    stars: set[str] = set()

    def walk_pattern(p, under_variadic):
        if isinstance(p, Var):
            scalars.add(p.name)
        elif isinstance(p, StarVar):
            stars.add(p.name)
            if not under_variadic:
                err(clause.pos, "StarOutsideVariadic", f"star variable {p.name}* outside a variadic pattern")
        elif isinstance(p, OpPattern):
            decl = table.get(p.op)
            if decl is None:
                err(clause.pos, "UnknownOperator", f"pattern uses undeclared operator {p.op}")
                return
            for child in p.children:
                walk_pattern(child, decl.is_variadic)

    for p in clause.patterns:
        walk_pattern(p, False)

    def check_template(t, under_variadic):
        if isinstance(t, Wildcard):
            err(clause.pos, "UnboundVar", "wildcard _ cannot appear in an action")
        elif isinstance(t, Var):
            if t.name not in scalars:
                err(clause.pos, "UnboundVar", f"action variable {t.name} is not bound by the patterns")
        elif isinstance(t, StarVar):
            if not under_variadic:
                err(clause.pos, "StarOutsideVariadic", f"star splice {t.name}* outside a variadic position")
            if t.name not in stars and t.name not in scalars:
                err(clause.pos, "UnboundVar", f"spliced variable {t.name}* is not bound by the patterns")
        elif isinstance(t, OpPattern):
            decl = table.get(t.op)
            if decl is None:
                err(clause.pos, "UnknownOperator", f"template uses undeclared operator {t.op}")
                return
            if not decl.is_variadic and len(t.children) != decl.arity:
                err(clause.pos, "TemplateArity", f"template {t.op} expects {decl.arity} arguments, got {len(t.children)}")
            for child in t.children:
                check_template(child, decl.is_variadic)

    if clause.guard is not None:
        g = clause.guard
        known = g.predicate in COMPARISON_GUARDS or g.predicate in EMPTINESS_GUARDS or g.predicate in module.builtins.predicates
        if not known:
            err(clause.pos, "UnknownGuard", f"unknown guard predicate {g.predicate}")
        elif g.predicate in COMPARISON_GUARDS and len(g.args) != 2:
            err(clause.pos, "GuardArity", f"{g.predicate} takes 2 arguments, got {len(g.args)}")
        elif g.predicate in EMPTINESS_GUARDS:
            if len(g.args) != 1 or not isinstance(g.args[0], StarVar):
                err(clause.pos, "GuardArity", f"{g.predicate} takes a single star variable")
        for a in g.args:
            if isinstance(a, StarVar):
                if a.name not in stars and a.name not in scalars:
                    err(clause.pos, "UnboundVar", f"guard variable {a.name}* is not bound by the patterns")
            else:
                for name, is_star in pattern_variables(a):
                    bound = stars if is_star else scalars
                    if name not in bound:
                        err(clause.pos, "UnboundVar", f"guard variable {name} is not bound by the patterns")

    action = clause.action
    if isinstance(action, TupleAction):
        if hook.kind not in ("make_before", "make_before_insert"):
            err(clause.pos, "ActionKind", f"tuple action is only legal in make_before hooks, not {hook.kind}")
        elif len(action.templates) != len(hook.params):
            err(clause.pos, "ActionArity", f"tuple action has {len(action.templates)} parts, hook has {len(hook.params)} parameters")
        for t in action.templates:
            check_template(t, False)
    elif isinstance(action, RawAction):
        decl = table.get(action.operator)
        if decl is None:
            err(clause.pos, "UnknownOperator", f"raw() uses undeclared operator {action.operator}")
        else:
            if decl.is_variadic:
                if len(action.args) != 2:
                    err(clause.pos, "RawArity", f"raw() on variadic {action.operator} takes (element, list), got {len(action.args)} arguments")
                else:
                    check_template(action.args[0], False)
                    tail = action.args[1]
                    if isinstance(tail, StarVar):
                        if tail.name not in stars and tail.name not in scalars:
                            err(clause.pos, "UnboundVar", f"spliced variable {tail.name}* is not bound by the patterns")
                    else:
                        check_template(tail, False)
                    return
            elif len(action.args) != decl.arity:
                err(clause.pos, "RawArity", f"raw() on {action.operator} expects {decl.arity} arguments, got {len(action.args)}")
        for t in action.args:
            check_template(t, False)
    else:
        if hook.kind in ("make_before", "make_before_insert") and len(hook.params) != 1:
            err(clause.pos, "ActionKind", f"{hook.kind} action must be a tuple of {len(hook.params)} templates")
        check_template(action.template, False)
