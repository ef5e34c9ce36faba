"""Parser for signature module text (.gom files), term expressions and patterns.

The module grammar is the signature language proper (modules, sorts,
productions with named slots or a single variadic element sort) extended with
operator hooks whose bodies use the clause syntax::

    pattern[, pattern] [where guard(args)] -> action ;

where an action is a term template, a parenthesized tuple of templates, or a
``raw(op(...))`` escape.  Comments run from ``//`` to end of line; whitespace
is insignificant; identifiers are ``[A-Za-z][A-Za-z0-9_]*``.  The tokens
``public`` and ``...`` are accepted and ignored.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError, StarOutsideVariadic
from .matcher import OpPattern, Pattern, StarVar, Var, Wildcard, resolve_names
from .signature import (
    HOOK_KINDS,
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
    _promote_hook,
)


@dataclass(frozen=True)
class SurfaceTerm:
    """A purely syntactic term: not yet sorted, arity-checked or interned."""

    head: str
    children: tuple[SurfaceTerm, ...] = ()

    def __str__(self) -> str:
        if not self.children:
            return self.head
        return f"{self.head}({','.join(str(c) for c in self.children)})"


_TOKEN_RE = re.compile(
    r"""
      (?P<ws>\s+)
    | (?P<comment>//[^\n]*)
    | (?P<ellipsis>\.\.\.)
    | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
    | (?P<arrow>->)
    | (?P<punct>[(){},;:*_])
    """,
    re.VERBOSE,
)

_PUNCT_NAMES = {
    "(": "LPAREN",
    ")": "RPAREN",
    "{": "LBRACE",
    "}": "RBRACE",
    ",": "COMMA",
    ";": "SEMI",
    ":": "COLON",
    "*": "STAR",
    "_": "UNDERSCORE",
}


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        m = _TOKEN_RE.match(text, i)
        if m is None:
            raise ParseError(line, col, f"unexpected character {text[i]!r}")
        group = m.lastgroup
        lexeme = m.group()
        if group == "ident":
            tokens.append(Token("IDENT", lexeme, line, col))
        elif group == "arrow":
            tokens.append(Token("ARROW", lexeme, line, col))
        elif group == "punct":
            tokens.append(Token(_PUNCT_NAMES[lexeme], lexeme, line, col))
        # whitespace, comments and '...' are trivia
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        i = m.end()
    tokens.append(Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tok
        if t.kind != "EOF":
            self.pos += 1
        return t

    def at(self, kind: str, text: str | None = None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def fail(self, expected: str):
        t = self.tok
        got = repr(t.text) if t.kind != "EOF" else "end of input"
        raise ParseError(t.line, t.column, f"expected {expected}, got {got}", (expected,))

    def expect(self, kind: str, expected: str) -> Token:
        if not self.at(kind):
            self.fail(expected)
        return self.advance()

    def expect_keyword(self, word: str) -> Token:
        if not self.at("IDENT", word):
            self.fail(f"'{word}'")
        return self.advance()

    def ident(self, what: str = "identifier") -> Token:
        return self.expect("IDENT", what)

    # -- module grammar ----------------------------------------------------

    def module(self) -> SignatureModule:
        self.expect_keyword("module")
        name = self.ident("module name").text
        imports: list[str] = []
        if self.at("IDENT", "imports"):
            self.advance()
            while self.at("IDENT") and self.tok.text not in ("sorts", "public"):
                imports.append(self.advance().text)
        if self.at("IDENT", "public"):
            self.advance()
        self.expect_keyword("sorts")
        sorts: list[SortDecl] = []
        while self.at("IDENT") and self.tok.text != "abstract":
            t = self.advance()
            sorts.append(SortDecl(t.text, (t.line, t.column)))
        self.expect_keyword("abstract")
        self.expect_keyword("syntax")
        operators: list[OperatorDecl] = []
        hooks: list[HookDecl] = []
        while not self.at("EOF"):
            head = self.ident("operator or hook")
            if self.at("COLON"):
                hooks.append(self.hook(head))
            else:
                operators.append(self.production(head))
        module = SignatureModule(
            name=name,
            imports=tuple(imports),
            sorts=tuple(sorts),
            operators=tuple(operators),
            hooks=tuple(hooks),
        )
        # Bare identifiers in hook clauses can only be classified once the
        # whole operator table is known (hooks may precede later productions).
        table = module.operator_table
        promoted = tuple(_promote_hook(h, table) for h in module.hooks)
        if promoted != module.hooks:
            module = SignatureModule(
                name=module.name,
                imports=module.imports,
                sorts=module.sorts,
                operators=module.operators,
                hooks=promoted,
                builtins=module.builtins,
            )
        return module

    def production(self, head: Token) -> OperatorDecl:
        pos = (head.line, head.column)
        slots: list[Slot] = []
        element: str | None = None
        if self.at("LPAREN"):
            self.advance()
            if not self.at("RPAREN"):
                first = self.ident("slot or element sort")
                if self.at("STAR"):
                    self.advance()
                    element = first.text
                else:
                    self.expect("COLON", "':'")
                    slots.append(Slot(first.text, self.ident("sort name").text))
                    while self.at("COMMA"):
                        self.advance()
                        slot_name = self.ident("slot name").text
                        self.expect("COLON", "':'")
                        slots.append(Slot(slot_name, self.ident("sort name").text))
            self.expect("RPAREN", "')'")
        self.expect("ARROW", "'->'")
        result = self.ident("result sort").text
        return OperatorDecl(head.text, result, tuple(slots), element, pos)

    def hook(self, head: Token) -> HookDecl:
        self.expect("COLON", "':'")
        kind_tok = self.ident("hook kind")
        if kind_tok.text not in HOOK_KINDS:
            raise ParseError(kind_tok.line, kind_tok.column, f"unknown hook kind {kind_tok.text}", HOOK_KINDS)
        self.expect("LPAREN", "'('")
        params: list[str] = []
        if not self.at("RPAREN"):
            params.append(self.ident("parameter name").text)
            while self.at("COMMA"):
                self.advance()
                params.append(self.ident("parameter name").text)
        self.expect("RPAREN", "')'")
        self.expect("LBRACE", "'{'")
        clauses: list[RuleClause] = []
        while not self.at("RBRACE"):
            clauses.append(self.clause())
        self.expect("RBRACE", "'}'")
        return HookDecl(head.text, kind_tok.text, tuple(params), tuple(clauses), (head.line, head.column))

    def clause(self) -> RuleClause:
        start = self.tok
        patterns = [self.pattern_expr()]
        while self.at("COMMA"):
            self.advance()
            patterns.append(self.pattern_expr())
        guard = None
        if self.at("IDENT", "where"):
            self.advance()
            guard = self.guard_expr()
        self.expect("ARROW", "'->'")
        action = self.action_expr()
        self.expect("SEMI", "';'")
        return RuleClause(tuple(patterns), guard, action, (start.line, start.column))

    def guard_expr(self) -> GuardExpr:
        name = self.ident("guard predicate")
        self.expect("LPAREN", "'('")
        args: list[Pattern] = []
        if not self.at("RPAREN"):
            args.append(self.pattern_expr())
            while self.at("COMMA"):
                self.advance()
                args.append(self.pattern_expr())
        self.expect("RPAREN", "')'")
        return GuardExpr(name.text, tuple(args))

    def action_expr(self):
        if self.at("LPAREN"):
            self.advance()
            templates = [self.pattern_expr()]
            while self.at("COMMA"):
                self.advance()
                templates.append(self.pattern_expr())
            self.expect("RPAREN", "')'")
            return TupleAction(tuple(templates))
        if self.at("IDENT", "raw"):
            raw_tok = self.advance()
            self.expect("LPAREN", "'('")
            inner = self.pattern_expr()
            self.expect("RPAREN", "')'")
            if not isinstance(inner, OpPattern):
                raise ParseError(raw_tok.line, raw_tok.column, "raw() requires an operator application")
            return RawAction(inner.op, inner.children)
        return TemplateAction(self.pattern_expr())

    def pattern_expr(self) -> Pattern:
        if self.at("UNDERSCORE"):
            self.advance()
            return Wildcard()
        name = self.ident("pattern")
        if self.at("STAR"):
            self.advance()
            return StarVar(name.text)
        if self.at("LPAREN"):
            self.advance()
            children: list[Pattern] = []
            if not self.at("RPAREN"):
                children.append(self.pattern_expr())
                while self.at("COMMA"):
                    self.advance()
                    children.append(self.pattern_expr())
            self.expect("RPAREN", "')'")
            return OpPattern(name.text, tuple(children))
        return Var(name.text)

    # -- term grammar ------------------------------------------------------

    def term(self) -> SurfaceTerm:
        head = self.ident("term")
        children: list[SurfaceTerm] = []
        if self.at("LPAREN"):
            self.advance()
            if not self.at("RPAREN"):
                children.append(self.term())
                while self.at("COMMA"):
                    self.advance()
                    children.append(self.term())
            self.expect("RPAREN", "')'")
        return SurfaceTerm(head.text, tuple(children))

    def end(self):
        if not self.at("EOF"):
            self.fail("end of input")


def parse_module(text: str) -> SignatureModule:
    """Parse module text into an unvalidated SignatureModule."""
    p = _Parser(text)
    module = p.module()
    p.end()
    return module


def parse_term(text: str, module: SignatureModule) -> SurfaceTerm:
    """Parse functional notation ``head(arg,...,arg)``; constants may omit ``()``.

    The parser is arity- and sort-blind by contract; those checks happen when
    the term is built through a factory.
    """
    del module  # terms are syntactic; the module is consulted at build time
    p = _Parser(text)
    t = p.term()
    p.end()
    return t


def parse_pattern(text: str, module: SignatureModule) -> Pattern:
    """Parse a pattern over the module's operators.

    Identifiers ending in ``*`` are star variables (legal only directly under a
    variadic operator), ``_`` is the wildcard, identifiers naming operators are
    operator patterns and everything else is a term variable.
    """
    p = _Parser(text)
    raw = p.pattern_expr()
    p.end()
    pattern = resolve_names(raw, module.operator_table)
    _check_stars(pattern, False, module)
    return pattern


def _check_stars(pattern: Pattern, under_variadic: bool, module: SignatureModule):
    if isinstance(pattern, StarVar) and not under_variadic:
        raise StarOutsideVariadic(0, 0, f"star variable {pattern.name}* outside a variadic operator")
    if isinstance(pattern, OpPattern):
        decl = module.operator(pattern.op)
        variadic = decl.is_variadic if decl is not None else False
        for child in pattern.children:
            _check_stars(child, variadic, module)


# -- pretty printing -------------------------------------------------------


def format_module(module: SignatureModule) -> str:
    """Render a module as parseable text; parsing it back yields a module
    structurally identical to the input (source positions aside)."""
    lines = [f"module {module.name}"]
    if module.imports:
        lines.append("  imports " + " ".join(module.imports))
    lines.append("  sorts " + " ".join(s.name for s in module.sorts))
    lines.append("  abstract syntax")
    for op in module.operators:
        if op.is_variadic:
            sig = f"{op.name}( {op.element}* )"
        elif op.slots:
            sig = f"{op.name}({','.join(f'{s.name}:{s.sort}' for s in op.slots)})"
        else:
            sig = op.name
        lines.append(f"    {sig} -> {op.result}")
    for hook in module.hooks:
        lines.append(f"    {hook.operator}:{hook.kind}({','.join(hook.params)}) {{")
        for clause in hook.clauses:
            head = ", ".join(str(p) for p in clause.patterns)
            guard = f" where {clause.guard}" if clause.guard else ""
            lines.append(f"      {head}{guard} -> {clause.action};")
        lines.append("    }")
    return "\n".join(lines) + "\n"
