"""Exception types shared across the signature compiler and the term runtime."""

from __future__ import annotations


class GomError(Exception):
    """Base class for every error raised by this package."""


class ParseError(GomError):
    """Rejected input text; carries the 1-based position where parsing stopped."""

    def __init__(self, line: int, column: int, message: str, expected: tuple[str, ...] = ()):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column
        self.message = message
        self.expected = frozenset(expected)


class StarOutsideVariadic(ParseError):
    """A star variable appeared anywhere but directly under a variadic operator."""


class UnknownImport(GomError):
    def __init__(self, name: str):
        super().__init__(f"imported module not available: {name}")
        self.name = name


class ImportCycle(GomError):
    def __init__(self, path: list[str]):
        super().__init__("import cycle: " + " -> ".join(path))
        self.path = list(path)


class NameClash(GomError):
    def __init__(self, operator: str, modules: tuple[str, str]):
        super().__init__(f"operator {operator} declared in both {modules[0]} and {modules[1]}")
        self.operator = operator
        self.modules = modules


class UnknownOperator(GomError):
    def __init__(self, name: str):
        super().__init__(f"unknown operator: {name}")
        self.name = name


class SortMismatch(GomError):
    pass


class ArityMismatch(GomError):
    pass


class StoreMismatch(GomError):
    """Two node references from different stores were mixed in one operation."""


class UnboundVariable(GomError):
    def __init__(self, name: str):
        super().__init__(f"unbound variable in template: {name}")
        self.name = name


class RecursionBudgetExceeded(GomError):
    """The hook pipeline re-entered more times than the factory budget allows.

    This almost always means the normalization system the hooks define is not
    terminating; the budget turns the hang into a diagnosable error.
    """


class StepBudgetExceeded(GomError):
    """A traversal strategy fired more rewrites than its step budget allows."""


class InvalidGoalSort(GomError):
    pass
