"""Command-line front end: validate signatures, normalize terms, run matches,
run the BV prover.

Exit codes are a stable contract: 0 success, 1 negative result (validation
errors, no match, refuted goal), 2 input error (I/O, syntax), 3 normalization
divergence, 4 search bound hit.
"""

from __future__ import annotations

import argparse
import sys

from .corpus import BUILTIN_MODULES, load_builtin
from .errors import (
    GomError,
    InvalidGoalSort,
    ParseError,
    RecursionBudgetExceeded,
)
from .factory import Factory
from .matcher import match_all
from .parser import parse_module, parse_pattern, parse_term
from .prover import SearchConfig, format_trace, prove
from .signature import resolve_imports, validate
from .store import print_term

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_INPUT = 2
EXIT_DIVERGED = 3
EXIT_BOUND = 4


def _load_module(spec: str):
    """Resolve a module path or builtin name to (module, display name).

    File modules may import the builtin modules; anything else must be on
    disk already merged.
    """
    if spec in BUILTIN_MODULES:
        return load_builtin(spec), spec
    with open(spec, encoding="utf-8") as fh:
        text = fh.read()
    module = parse_module(text)
    available = tuple(load_builtin(n) for n in BUILTIN_MODULES)
    return resolve_imports(module, available), spec


def _fail_input(message: str) -> int:
    print(message, file=sys.stderr)
    return EXIT_INPUT


def cmd_check(args) -> int:
    try:
        module, name = _load_module(args.module)
    except OSError as exc:
        return _fail_input(str(exc))
    except ParseError as exc:
        return _fail_input(f"{args.module}:{exc.line}:{exc.column}: Syntax: {exc.message}")
    except GomError as exc:
        print(f"{args.module}: {exc}", file=sys.stderr)
        return EXIT_NEGATIVE
    report = validate(module)
    if report.accepted:
        return EXIT_OK
    print(report.format(name), file=sys.stderr)
    return EXIT_NEGATIVE


def _load_accepted(spec: str):
    module, name = _load_module(spec)
    report = validate(module)
    if not report.accepted:
        raise GomError(f"module {name} has validation errors:\n{report.format(name)}")
    return module


def cmd_norm(args) -> int:
    try:
        module = _load_accepted(args.module)
        term = parse_term(args.expr, module)
    except (OSError, ParseError, GomError) as exc:
        return _fail_input(str(exc))
    factory = Factory(module)
    try:
        node = factory.build_surface(term)
    except RecursionBudgetExceeded as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_DIVERGED
    except GomError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_NEGATIVE
    print(print_term(node))
    return EXIT_OK


def _format_solution(subst) -> str:
    pairs = [(name, print_term(node)) for name, node in subst.bindings.items()]
    pairs += [
        (name + "*", "[" + ",".join(print_term(n) for n in nodes) + "]")
        for name, nodes in subst.star_bindings.items()
    ]
    if not pairs:
        return "{}"
    return " ".join(f"{name}={value}" for name, value in sorted(pairs))


def cmd_match(args) -> int:
    try:
        module = _load_accepted(args.module)
        pattern = parse_pattern(args.pattern, module)
        term = parse_term(args.expr, module)
    except (OSError, ParseError, GomError) as exc:
        return _fail_input(str(exc))
    factory = Factory(module)
    try:
        subject = factory.build_surface(term)
    except GomError as exc:
        return _fail_input(str(exc))
    solutions = match_all(pattern, subject)
    if args.all:
        for s in solutions:
            print(_format_solution(s))
        print(f"matches: {len(solutions)}")
        return EXIT_OK if solutions else EXIT_NEGATIVE
    if not solutions:
        print("no match")
        return EXIT_NEGATIVE
    print(_format_solution(solutions[0]))
    return EXIT_OK


def cmd_prove(args) -> int:
    try:
        module = load_builtin("struct")
        term = parse_term(args.expr, module)
    except ParseError as exc:
        return _fail_input(str(exc))
    factory = Factory(module)
    try:
        goal = factory.build_surface(term)
        config = SearchConfig(
            max_depth=args.depth,
            max_frontier=args.frontier,
            can_react_pruning=not args.no_pruning,
            strategy="depth_first" if args.dfs else "breadth_first",
        )
        trace = prove(factory, goal, config)
    except (GomError, InvalidGoalSort, ValueError) as exc:
        return _fail_input(str(exc))
    print(format_trace(trace))
    if trace.status == "proved":
        return EXIT_OK
    if trace.status == "not_proved_within_bounds":
        return EXIT_BOUND
    return EXIT_NEGATIVE


def build_arg_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gomterm",
        description="Signature compiler and canonical term runtime with a BV prover.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_check = sub.add_parser("check", help="parse and validate a signature module")
    p_check.add_argument("module", help="path to a .gom file, or a builtin name (boolean, struct, nat)")
    p_check.set_defaults(func=cmd_check)

    p_norm = sub.add_parser("norm", help="normalize a term through the module's hooks")
    p_norm.add_argument("module", help="path to a .gom file, or a builtin name")
    p_norm.add_argument("--expr", required=True, help="term in functional notation")
    p_norm.set_defaults(func=cmd_norm)

    p_match = sub.add_parser("match", help="match a pattern against a term")
    p_match.add_argument("module", help="path to a .gom file, or a builtin name")
    p_match.add_argument("--pattern", required=True)
    p_match.add_argument("--expr", required=True)
    p_match.add_argument("--all", action="store_true", help="print every solution and a count line")
    p_match.set_defaults(func=cmd_match)

    p_prove = sub.add_parser("prove", help="search for a BV proof of a Struc goal")
    p_prove.add_argument("--expr", required=True, help="goal structure over the builtin struct module")
    p_prove.add_argument("--depth", type=int, default=20)
    p_prove.add_argument("--frontier", type=int, default=100_000)
    p_prove.add_argument("--no-pruning", action="store_true", help="disable the can-react heuristic")
    p_prove.add_argument("--dfs", action="store_true", help="depth-first instead of breadth-first search")
    p_prove.set_defaults(func=cmd_prove)

    return parser


def main(argv=None) -> int:
    args = build_arg_parser().parse_args(argv)
    return args.func(args)


def entry():
    sys.exit(main())
