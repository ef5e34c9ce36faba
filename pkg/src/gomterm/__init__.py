"""Signature-definition compiler and canonical term-algebra runtime.

Signature modules declare sorts, operators and normalization hooks; a factory
compiled from a module keeps every constructed term in canonical form over a
maximally-shared store, so equality is identity and rewriting never sees a
non-normal term.  A pattern matcher (syntactic plus associative list
matching), a visitor-combinator strategy library and a proof-search engine
for system BV of the calculus of structures are built on top.
"""

from .errors import (
    ArityMismatch,
    GomError,
    ImportCycle,
    InvalidGoalSort,
    NameClash,
    ParseError,
    RecursionBudgetExceeded,
    SortMismatch,
    StarOutsideVariadic,
    StepBudgetExceeded,
    StoreMismatch,
    UnboundVariable,
    UnknownImport,
    UnknownOperator,
)
from .matcher import (
    OpPattern,
    Pattern,
    StarVar,
    Substitution,
    Var,
    Wildcard,
    match_all,
    match_one,
)
from .signature import (
    BuiltinRegistry,
    Diagnostic,
    GuardExpr,
    HookDecl,
    OperatorDecl,
    RawAction,
    RuleClause,
    SignatureModule,
    Slot,
    SortDecl,
    TemplateAction,
    TupleAction,
    ValidationReport,
    resolve_imports,
    validate,
)
from .store import NodeRef, TermStore, compare_terms, node_equal, print_term, sort_of
from .parser import SurfaceTerm, format_module, parse_module, parse_pattern, parse_term
from .factory import Factory, apply_substitution
from .strategies import (
    All,
    BottomUp,
    Choice,
    Collect,
    CollectContext,
    Congruence,
    Fail,
    Identity,
    Innermost,
    One,
    ResultSink,
    Rule,
    Sequence,
    Strategy,
    TopDown,
    apply_strategy,
    bottom_up,
    collect_everywhere,
    innermost,
    positions,
    replace_at,
    top_down,
)
from .prover import (
    AI_DOWN,
    NOT_PROVED,
    PROVED,
    Q_DOWN,
    REFUTED,
    SWITCH_LEFT,
    SWITCH_RIGHT,
    ProofStep,
    ProofTrace,
    SearchConfig,
    apply_ai_down,
    apply_q_down,
    apply_switch,
    can_react,
    format_trace,
    prove,
)
from .corpus import BUILTIN_MODULES, builtin_factory, load_builtin

__version__ = "0.1.0"
