"""Lexer, recursive-descent parser and pretty-printer for ``.av`` source.

Grammar::

    unit      := (decl | directive)*
    decl      := head "=" goal ("&" head "=" goal)* "."
    head      := ident "(" [param ("," param)*] ")"
    param     := ident | "_" | int | string | money
    directive := "run" goal "."
    goal      := simple (";" simple)*
    simple    := "true" | call | ident "=" expr | "case" expr "of" branch+ "end"
    branch    := pattern (":" | "->") goal [";"]
    call      := ident "(" [term ("," term)*] ")"
    term      := ident | "_" | int | string | money
    expr      := sum with + - * / and parentheses

Inside a declaration an identifier naming a parameter is a variable;
any other identifier in argument position is a constant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from avlang.ast import (
    BLIND, OPS, Anon, Assign, Atom, BinOp, Call, Case, Clause, Conj, Def, ExistsBlind,
    ForAll, Goal, Lit, LogicVar, Num, Seq, Str, Term, TrueGoal, Var, VarRef,
    elaborate_clause, elaborate_goal, quantifier_prefix,
)
from avlang.errors import ElaborationError, ParseError

KEYWORDS = frozenset({"true", "case", "of", "end", "run"})

_PUNCT = {
    "->": "arrow",
    "=": "eq",
    ";": "semi",
    ",": "comma",
    "(": "lparen",
    ")": "rparen",
    ".": "dot",
    ":": "colon",
    "&": "amp",
    "+": "plus",
    "-": "minus",
    "*": "star",
    "/": "slash",
}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<ident>[A-Za-z][A-Za-z0-9_]*)
  | (?P<underscore>_(?![A-Za-z0-9_]))
  | (?P<int>[0-9]+)
  | (?P<money>\$[A-Za-z0-9]+)
  | (?P<string>"(?:[^"\\\n]|\\["\\])*")
  | (?P<punct>->|[=;,().:&+\-*/])
    """,
    re.VERBOSE,
)

MONEY_RE = re.compile(r"\$[A-Za-z0-9]+\Z")
IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


@dataclass(frozen=True)
class Token:
    kind: str
    value: str
    line: int = field(default=1, compare=False)
    column: int = field(default=1, compare=False)

    def __repr__(self):
        return f"Token({self.kind}, {self.value!r}, {self.line}:{self.column})"


def _position(source: str, offset: int) -> tuple[int, int]:
    line = source.count("\n", 0, offset) + 1
    start = source.rfind("\n", 0, offset) + 1
    return line, offset - start + 1


def lex(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos = 0
    while pos < len(source):
        m = _TOKEN_RE.match(source, pos)
        if m is None:
            line, col = _position(source, pos)
            ch = source[pos]
            if ch == '"':
                raise ParseError(line, col, "unterminated string literal")
            if ch == "_":
                raise ParseError(line, col, "identifiers must start with a letter")
            if ch == "$":
                raise ParseError(line, col, "'$' must be followed by letters or digits")
            raise ParseError(line, col, f"unexpected character {ch!r}")
        kind = m.lastgroup
        text = m.group()
        if kind not in ("ws", "comment"):
            line, col = _position(source, pos)
            if kind == "ident" and text in KEYWORDS:
                kind = text
            elif kind == "punct":
                kind = _PUNCT[text]
            elif kind == "string":
                text = re.sub(r'\\(["\\])', r"\1", text[1:-1])
            tokens.append(Token(kind, text, line, col))
        pos = m.end()
    return tokens


# -- parser ------------------------------------------------------------------


@dataclass
class SourceUnit:
    declarations: list[Clause] = field(default_factory=list)
    directives: list[Goal] = field(default_factory=list)
    directive_lines: list[int] = field(default_factory=list, compare=False)


_LITERAL_KINDS = ("int", "string", "money", "minus")


class _Parser:
    def __init__(self, tokens: list[Token], eof: tuple[int, int]):
        self.tokens = tokens
        self.i = 0
        self.eof = eof
        self.scope: frozenset[str] = frozenset()

    # token helpers

    def peek(self, k: int = 0) -> Token | None:
        j = self.i + k
        return self.tokens[j] if j < len(self.tokens) else None

    def kind(self, k: int = 0) -> str:
        tok = self.peek(k)
        return tok.kind if tok else "eof"

    def error(self, message: str, expected=(), tok: Token | None = None) -> ParseError:
        tok = tok or self.peek()
        line, col = (tok.line, tok.column) if tok else self.eof
        return ParseError(line, col, message, expected)

    def expect(self, *kinds: str) -> Token:
        tok = self.peek()
        if tok is None or tok.kind not in kinds:
            found = f"{tok.value!r}" if tok else "end of input"
            raise self.error(f"unexpected {found}", kinds)
        self.i += 1
        return tok

    def accept(self, kind: str) -> Token | None:
        if self.kind() == kind:
            return self.expect(kind)
        return None

    # unit

    def unit(self) -> SourceUnit:
        unit = SourceUnit()
        while self.peek() is not None:
            if self.kind() == "run":
                line = self.expect("run").line
                self.scope = frozenset()
                g = self.goal(in_case=False)
                self.expect("dot")
                unit.directives.append(self._elab(elaborate_goal, g, line))
                unit.directive_lines.append(line)
            elif self.kind() == "ident":
                unit.declarations.append(self.decl())
            else:
                raise self.error("expected a declaration or 'run'", ["ident", "run"])
        return unit

    def _elab(self, fn, node, line: int):
        try:
            return fn(node)
        except ElaborationError as e:
            raise ParseError(line, 1, str(e)) from None

    def decl(self) -> Clause:
        parts = [self.definition()]
        while self.accept("amp"):
            parts.append(self.definition())
        self.expect("dot")
        out = parts[-1]
        for d in reversed(parts[:-1]):
            out = Conj(d, out)
        return out

    def definition(self) -> Clause:
        start = self.peek()
        name = self.expect("ident").value
        self.expect("lparen")
        params: list[Term] = []
        seen: set[str] = set()
        if self.kind() != "rparen":
            while True:
                tok = self.peek()
                if self.kind() == "ident":
                    if tok.value in seen:
                        raise self.error(f"duplicate parameter {tok.value!r}")
                    seen.add(tok.value)
                    self.i += 1
                    params.append(Var(tok.value))
                elif self.kind() == "underscore":
                    self.i += 1
                    params.append(Anon())
                else:
                    params.append(self.literal(("ident", "underscore", *_LITERAL_KINDS)))
                if not self.accept("comma"):
                    break
        self.expect("rparen")
        self.expect("eq")
        self.scope = frozenset(seen)
        body = self.goal(in_case=False)
        self.scope = frozenset()
        return self._elab(elaborate_clause, Def(Call(name, tuple(params)), body), start.line)

    # goals

    def goal(self, in_case: bool) -> Goal:
        parts = [self.simple()]
        while self.kind() == "semi":
            if in_case and self._branch_ends(1):
                self.i += 1
                break
            self.i += 1
            parts.append(self.simple())
        out = parts[-1]
        for g in reversed(parts[:-1]):
            out = Seq(g, out)
        return out

    def _branch_ends(self, k: int) -> bool:
        if self.kind(k) == "end":
            return True
        if self.kind(k) == "minus":
            k += 1
        return self.kind(k) in ("ident", "int", "string", "money") and self.kind(k + 1) in (
            "colon",
            "arrow",
        )

    def simple(self) -> Goal:
        k = self.kind()
        if k == "true":
            self.i += 1
            return TrueGoal()
        if k == "case":
            return self.case()
        if k == "ident":
            if self.kind(1) == "lparen":
                return self.call()
            if self.kind(1) == "eq":
                target = self.expect("ident").value
                self.expect("eq")
                return Assign(target, self.expr())
            self.i += 1
            raise self.error("expected '(' or '='", ["lparen", "eq"])
        if k == "underscore" and self.kind(1) == "eq":
            raise self.error("'_' cannot be assigned to")
        raise self.error("expected a statement", ["true", "ident", "case"])

    def call(self) -> Call:
        name = self.expect("ident").value
        self.expect("lparen")
        args: list[Term] = []
        if self.kind() != "rparen":
            args.append(self.term())
            while self.accept("comma"):
                args.append(self.term())
        self.expect("rparen")
        return Call(name, tuple(args))

    def term(self) -> Term:
        k = self.kind()
        if k == "ident":
            name = self.expect("ident").value
            return Var(name) if name in self.scope else Atom(name)
        if k == "underscore":
            self.i += 1
            return Anon()
        return self.literal(("ident", "underscore", *_LITERAL_KINDS))

    def literal(self, expected=_LITERAL_KINDS) -> Term:
        k = self.kind()
        if k == "minus":
            self.i += 1
            return Num(-int(self.expect("int").value))
        if k == "int":
            return Num(int(self.expect("int").value))
        if k == "string":
            return Str(self.expect("string").value)
        if k == "money":
            return Str(self.expect("money").value)
        raise self.error("expected an argument", expected)

    def case(self) -> Case:
        self.expect("case")
        scrutinee = self.expr()
        self.expect("of")
        branches = []
        while self.kind() != "end":
            if self.kind() == "ident":
                pattern: Term = Atom(self.expect("ident").value)
            else:
                pattern = self.literal(("ident", *_LITERAL_KINDS, "end"))
            self.expect("colon", "arrow")
            body = self.goal(in_case=True)
            branches.append((pattern, body))
        if not branches:
            raise self.error("case needs at least one branch", ["ident", "int", "string", "money"])
        self.expect("end")
        return Case(scrutinee, tuple(branches))

    # expressions

    def expr(self):
        left = self.product()
        while self.kind() in ("plus", "minus"):
            op = self.expect("plus", "minus").value
            left = BinOp(op, left, self.product())
        return left

    def product(self):
        left = self.factor()
        while self.kind() in ("star", "slash"):
            op = self.expect("star", "slash").value
            left = BinOp(op, left, self.factor())
        return left

    def factor(self):
        k = self.kind()
        if k == "minus":
            self.i += 1
            if self.kind() == "int":
                return Lit(Num(-int(self.expect("int").value)))
            return BinOp("-", Lit(Num(0)), self.factor())
        if k == "int":
            return Lit(Num(int(self.expect("int").value)))
        if k in ("string", "money"):
            return Lit(Str(self.expect(k).value))
        if k == "ident":
            return VarRef(self.expect("ident").value)
        if k == "lparen":
            self.i += 1
            e = self.expr()
            self.expect("rparen")
            return e
        if k == "underscore":
            raise self.error("'_' is not allowed in an expression")
        raise self.error("expected an expression", ["int", "string", "money", "ident", "lparen"])


def _eof_position(source: str) -> tuple[int, int]:
    stripped = source.rstrip()
    if not stripped:
        return 1, 1
    return _position(source, len(stripped) - 1)


def parse(tokens: list[Token], source: str | None = None) -> SourceUnit:
    """Parse a token list into an elaborated :class:`SourceUnit`."""
    if source is not None:
        eof = _eof_position(source)
    elif tokens:
        last = tokens[-1]
        eof = (last.line, last.column + max(len(last.value), 1) - 1)
    else:
        eof = (1, 1)
    return _Parser(tokens, eof).unit()


def parse_source(source: str) -> SourceUnit:
    return parse(lex(source), source)


def parse_goal(source: str) -> Goal:
    """Parse a single statement (no ``run``, no terminating dot)."""
    tokens = lex(source)
    p = _Parser(tokens, _eof_position(source))
    g = p.goal(in_case=False)
    if p.peek() is not None:
        raise p.error("unexpected trailing input")
    return p._elab(elaborate_goal, g, 1)


# -- rendering ---------------------------------------------------------------


def render_term(t: Term) -> str:
    if isinstance(t, Atom):
        return t.name
    if isinstance(t, Num):
        return str(t.value)
    if isinstance(t, Str):
        if MONEY_RE.match(t.value):
            return t.value
        return '"' + t.value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(t, Var):
        return t.name
    if isinstance(t, (LogicVar, Anon)):
        return "_"
    raise TypeError(f"not a term: {t!r}")


def render_expr(e) -> str:
    if isinstance(e, Lit):
        return render_term(e.term)
    if isinstance(e, VarRef):
        return e.name
    if isinstance(e, BinOp):
        assert e.op in OPS

        def side(x):
            s = render_expr(x)
            return f"({s})" if isinstance(x, BinOp) else s

        return f"{side(e.left)} {e.op} {side(e.right)}"
    raise TypeError(f"not an expression: {e!r}")


def _render_call(c: Call, hidden: frozenset[str] = frozenset()) -> str:
    args = ", ".join(
        "_" if isinstance(a, Var) and a.name in hidden else render_term(a) for a in c.args
    )
    return f"{c.name}({args})"


def render_goal(g: Goal) -> str:
    if isinstance(g, TrueGoal):
        return "true"
    if isinstance(g, Call):
        return _render_call(g)
    if isinstance(g, ExistsBlind):
        hidden = set()
        while isinstance(g, ExistsBlind):
            hidden.add(g.bound)
            g = g.body
        return _render_call(g, frozenset(hidden))
    if isinstance(g, Assign):
        return f"{g.target} = {render_expr(g.expr)}"
    if isinstance(g, Seq):
        return f"{render_goal(g.first)}; {render_goal(g.second)}"
    if isinstance(g, Case):
        arms = " ".join(
            f"{render_term(p)} : {render_goal(b)};" for p, b in g.branches
        )
        return f"case {render_expr(g.scrutinee)} of {arms} end"
    raise TypeError(f"not a goal: {g!r}")


def _render_def(d: Clause) -> str:
    binders, core = quantifier_prefix(d)
    if isinstance(core, Conj):
        raise ValueError("a conjunction under a quantifier has no concrete syntax")
    blind = frozenset(name for name, vis in binders if vis is BLIND)
    return f"{_render_call(core.head, blind)} = {render_goal(core.body)}"


def render_clause(d: Clause) -> str:
    parts = []
    while isinstance(d, Conj):
        parts.append(_render_def(d.left))
        d = d.right
    parts.append(_render_def(d))
    return " & ".join(parts) + "."


def render(node) -> str:
    """Concrete syntax for a term, expression, goal or clause.

    Blind binders print as ``_``; clauses end with the terminating dot.
    """
    if isinstance(node, (Def, ForAll, Conj)):
        return render_clause(node)
    if isinstance(node, (Lit, VarRef, BinOp)):
        return render_expr(node)
    if isinstance(node, (Atom, Num, Str, Var, LogicVar, Anon)):
        return render_term(node)
    return render_goal(node)


def render_unit(unit: SourceUnit) -> str:
    lines = [render_clause(d) for d in unit.declarations]
    lines += [f"run {render_goal(g)}." for g in unit.directives]
    return "\n".join(lines) + ("\n" if lines else "")
