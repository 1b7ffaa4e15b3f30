"""Abstract syntax for the language: terms, expressions, goals, clauses.

Surface syntax writes ``_`` for a don't-care value.  The parser produces
:class:`Anon` placeholders and :func:`elaborate_clause` / :func:`elaborate_goal`
turn them into blind binders: ``ForAll(..., BLIND, ...)`` in declarations and
``ExistsBlind`` around calls.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator, Mapping, Union

from avlang.errors import ElaborationError


class Visibility(Enum):
    VISIBLE = "visible"
    BLIND = "blind"


VISIBLE = Visibility.VISIBLE
BLIND = Visibility.BLIND


# -- terms -------------------------------------------------------------------


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Str:
    value: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class LogicVar:
    id: int
    origin: Visibility = field(compare=False)


@dataclass(frozen=True)
class Anon:
    """Surface ``_``; never survives elaboration."""


Term = Union[Atom, Num, Str, Var, LogicVar, Anon]
GROUND = (Atom, Num, Str)


def is_ground(t: Term) -> bool:
    return isinstance(t, GROUND)


# -- expressions -------------------------------------------------------------


@dataclass(frozen=True)
class Lit:
    term: Term


@dataclass(frozen=True)
class VarRef:
    name: str
    # set when an enclosing binder has been instantiated
    binding: Term | None = field(default=None, compare=False)


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Lit, VarRef, BinOp]
OPS = ("+", "-", "*", "/")


# -- goals -------------------------------------------------------------------


@dataclass(frozen=True)
class TrueGoal:
    pass


TRUE = TrueGoal()


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple[Term, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))


@dataclass(frozen=True)
class ExistsBlind:
    bound: str
    body: "Goal"


@dataclass(frozen=True)
class Assign:
    target: str
    expr: Expr


@dataclass(frozen=True)
class Seq:
    first: "Goal"
    second: "Goal"


@dataclass(frozen=True)
class Case:
    scrutinee: Expr
    branches: tuple[tuple[Term, "Goal"], ...]

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(tuple(b) for b in self.branches))
        if not self.branches:
            raise ElaborationError("case needs at least one branch")
        for pattern, _ in self.branches:
            if not is_ground(pattern):
                raise ElaborationError(f"case pattern must be a constant, got {pattern!r}")


Goal = Union[TrueGoal, Call, ExistsBlind, Assign, Seq, Case]


def seq(*goals: Goal) -> Goal:
    """Right-associated sequence, the shape the parser produces."""
    if not goals:
        return TRUE
    out = goals[-1]
    for g in reversed(goals[:-1]):
        out = Seq(g, out)
    return out


# -- clauses -----------------------------------------------------------------


@dataclass(frozen=True)
class Def:
    head: Call
    body: Goal


@dataclass(frozen=True)
class ForAll:
    bound: str
    visibility: Visibility
    inner: "Clause"


@dataclass(frozen=True)
class Conj:
    left: "Clause"
    right: "Clause"


Clause = Union[Def, ForAll, Conj]


@dataclass(frozen=True)
class Program:
    clauses: tuple[Clause, ...] = ()
    theta: Mapping[str, Term] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        object.__setattr__(self, "theta", dict(self.theta))

    def __hash__(self):
        return hash((self.clauses, tuple(sorted(self.theta.items(), key=lambda kv: kv[0]))))

    def with_theta(self, name: str, value: Term) -> "Program":
        theta = dict(self.theta)
        theta[name] = value
        return Program(self.clauses, theta)

    def with_clauses(self, *clauses: Clause) -> "Program":
        return Program(self.clauses + tuple(clauses), self.theta)


# -- fresh binder names ------------------------------------------------------

# itertools.count.__next__ is atomic under the GIL
_binder_names = itertools.count(1)


def fresh_symbol() -> str:
    # user identifiers start with a letter, so these never collide
    return f"_{next(_binder_names)}"


# -- free variables ----------------------------------------------------------


def free_vars(node) -> frozenset[str]:
    """Unbound ``Var`` names and unresolved ``VarRef`` names in *node*.

    Assignment targets are global state names and never count.
    """
    if isinstance(node, Var):
        return frozenset({node.name})
    if isinstance(node, (Atom, Num, Str, LogicVar, Anon, TrueGoal)):
        return frozenset()
    if isinstance(node, Lit):
        return free_vars(node.term)
    if isinstance(node, VarRef):
        return frozenset() if node.binding is not None else frozenset({node.name})
    if isinstance(node, BinOp):
        return free_vars(node.left) | free_vars(node.right)
    if isinstance(node, Call):
        return frozenset().union(*(free_vars(a) for a in node.args))
    if isinstance(node, (ExistsBlind, ForAll)):
        inner = node.body if isinstance(node, ExistsBlind) else node.inner
        return free_vars(inner) - {node.bound}
    if isinstance(node, Assign):
        return free_vars(node.expr)
    if isinstance(node, Seq):
        return free_vars(node.first) | free_vars(node.second)
    if isinstance(node, Case):
        out = free_vars(node.scrutinee)
        for _, body in node.branches:
            out |= free_vars(body)
        return out
    if isinstance(node, Def):
        return free_vars(node.head) | free_vars(node.body)
    if isinstance(node, Conj):
        return free_vars(node.left) | free_vars(node.right)
    raise TypeError(f"not an AST node: {node!r}")


def term_vars(node) -> frozenset[str]:
    """Free ``Var`` names only (expression reads of globals excluded)."""
    if isinstance(node, Var):
        return frozenset({node.name})
    if isinstance(node, Call):
        return frozenset(a.name for a in node.args if isinstance(a, Var))
    if isinstance(node, (ExistsBlind, ForAll)):
        inner = node.body if isinstance(node, ExistsBlind) else node.inner
        return term_vars(inner) - {node.bound}
    if isinstance(node, Seq):
        return term_vars(node.first) | term_vars(node.second)
    if isinstance(node, Case):
        return frozenset().union(*(term_vars(b) for _, b in node.branches))
    if isinstance(node, Def):
        return term_vars(node.head) | term_vars(node.body)
    if isinstance(node, Conj):
        return term_vars(node.left) | term_vars(node.right)
    return frozenset()


# -- substitution of a binder ------------------------------------------------


def subst_term(t: Term, name: str, value: Term) -> Term:
    return value if isinstance(t, Var) and t.name == name else t


def subst_expr(e: Expr, name: str, value: Term) -> Expr:
    if isinstance(e, VarRef):
        if e.name == name and e.binding is None:
            return VarRef(e.name, value)
        return e
    if isinstance(e, BinOp):
        return BinOp(e.op, subst_expr(e.left, name, value), subst_expr(e.right, name, value))
    return e


def subst_goal(g: Goal, name: str, value: Term) -> Goal:
    """``[value/name]g``; stops at a binder that rebinds *name*."""
    if isinstance(g, Call):
        return Call(g.name, tuple(subst_term(a, name, value) for a in g.args))
    if isinstance(g, ExistsBlind):
        if g.bound == name:
            return g
        return ExistsBlind(g.bound, subst_goal(g.body, name, value))
    if isinstance(g, Assign):
        return Assign(g.target, subst_expr(g.expr, name, value))
    if isinstance(g, Seq):
        return Seq(subst_goal(g.first, name, value), subst_goal(g.second, name, value))
    if isinstance(g, Case):
        return Case(
            subst_expr(g.scrutinee, name, value),
            tuple((p, subst_goal(b, name, value)) for p, b in g.branches),
        )
    return g


def subst_clause(d: Clause, name: str, value: Term) -> Clause:
    if isinstance(d, Def):
        return Def(subst_goal(d.head, name, value), subst_goal(d.body, name, value))
    if isinstance(d, ForAll):
        if d.bound == name:
            return d
        return ForAll(d.bound, d.visibility, subst_clause(d.inner, name, value))
    return Conj(subst_clause(d.left, name, value), subst_clause(d.right, name, value))


# -- elaboration -------------------------------------------------------------


def _check_expr(e: Expr) -> None:
    if isinstance(e, Lit) and isinstance(e.term, (Anon, Var, LogicVar)):
        raise ElaborationError("'_' is not allowed inside an expression")
    if isinstance(e, BinOp):
        _check_expr(e.left)
        _check_expr(e.right)


def elaborate_goal(g: Goal) -> Goal:
    """Wrap each call containing ``_`` in one ``ExistsBlind`` per occurrence."""
    if isinstance(g, Call):
        if not any(isinstance(a, Anon) for a in g.args):
            return g
        names: list[str] = []
        args = []
        for a in g.args:
            if isinstance(a, Anon):
                names.append(fresh_symbol())
                args.append(Var(names[-1]))
            else:
                args.append(a)
        out: Goal = Call(g.name, tuple(args))
        for n in reversed(names):
            out = ExistsBlind(n, out)
        return out
    if isinstance(g, ExistsBlind):
        body = elaborate_goal(g.body)
        if g.bound not in free_vars(_innermost_call(body)):
            raise ElaborationError(f"blind binder {g.bound!r} does not occur in its call")
        return ExistsBlind(g.bound, body)
    if isinstance(g, Assign):
        if g.target == "_":
            raise ElaborationError("'_' cannot be assigned to")
        _check_expr(g.expr)
        return g
    if isinstance(g, Seq):
        return Seq(elaborate_goal(g.first), elaborate_goal(g.second))
    if isinstance(g, Case):
        _check_expr(g.scrutinee)
        return Case(g.scrutinee, tuple((p, elaborate_goal(b)) for p, b in g.branches))
    return g


def _innermost_call(g: Goal) -> Goal:
    while isinstance(g, ExistsBlind):
        g = g.body
    return g


def elaborate_clause(d: Clause) -> Clause:
    """Quantify a declaration: ``_`` blindly, named head variables visibly.

    Binders appear in head-argument order.  Already-bound names are left
    alone, which makes elaboration idempotent.
    """
    return _elaborate_clause(d, frozenset())


def _elaborate_clause(d: Clause, bound: frozenset[str]) -> Clause:
    if isinstance(d, Conj):
        return Conj(_elaborate_clause(d.left, bound), _elaborate_clause(d.right, bound))
    if isinstance(d, ForAll):
        if d.bound in bound:
            raise ElaborationError(f"{d.bound!r} is bound twice")
        return ForAll(d.bound, d.visibility, _elaborate_clause(d.inner, bound | {d.bound}))

    binders: list[tuple[str, Visibility]] = []
    seen = set(bound)
    args = []
    for a in d.head.args:
        if isinstance(a, Anon):
            name = fresh_symbol()
            binders.append((name, BLIND))
            args.append(Var(name))
            continue
        if isinstance(a, LogicVar):
            raise ElaborationError("logic variables cannot appear in a declaration")
        if isinstance(a, Var) and a.name not in seen:
            seen.add(a.name)
            binders.append((a.name, VISIBLE))
        args.append(a)
    body = elaborate_goal(d.body)
    out: Clause = Def(Call(d.head.name, tuple(args)), body)
    unbound = term_vars(out) - {n for n, _ in binders} - bound
    if unbound:
        raise ElaborationError(
            f"unbound variable(s) {', '.join(sorted(unbound))} in declaration of {d.head.name}"
        )
    for name, vis in reversed(binders):
        out = ForAll(name, vis, out)
    return out


def quantifier_prefix(d: Clause) -> tuple[list[tuple[str, Visibility]], Clause]:
    binders = []
    while isinstance(d, ForAll):
        binders.append((d.bound, d.visibility))
        d = d.inner
    return binders, d


def clause_name(d: Clause) -> str:
    _, core = quantifier_prefix(d)
    if isinstance(core, Conj):
        return clause_name(core.left)
    return core.head.name


def defs(d: Clause) -> Iterator[Def]:
    _, core = quantifier_prefix(d)
    if isinstance(core, Conj):
        yield from defs(core.left)
        yield from defs(core.right)
    else:
        yield core


# -- alpha equivalence -------------------------------------------------------


def canonical(node):
    """Rename every binder to a positional name; equal results mean alpha-equal."""
    counter = itertools.count()

    def go(n, env: dict[str, str]):
        if isinstance(n, (tuple, list)):
            return tuple(go(x, env) for x in n)
        if isinstance(n, Var):
            return Var(env.get(n.name, n.name))
        if isinstance(n, VarRef):
            return VarRef(env.get(n.name, n.name), n.binding)
        if isinstance(n, BinOp):
            return BinOp(n.op, go(n.left, env), go(n.right, env))
        if isinstance(n, Call):
            return Call(n.name, tuple(go(a, env) for a in n.args))
        if isinstance(n, ExistsBlind):
            fresh = f"#{next(counter)}"
            return ExistsBlind(fresh, go(n.body, {**env, n.bound: fresh}))
        if isinstance(n, ForAll):
            if n.visibility is BLIND:
                fresh = f"#{next(counter)}"
                return ForAll(fresh, BLIND, go(n.inner, {**env, n.bound: fresh}))
            return ForAll(n.bound, VISIBLE, go(n.inner, env))
        if isinstance(n, Assign):
            return Assign(n.target, go(n.expr, env))
        if isinstance(n, Seq):
            return Seq(go(n.first, env), go(n.second, env))
        if isinstance(n, Case):
            return Case(go(n.scrutinee, env), tuple((p, go(b, env)) for p, b in n.branches))
        if isinstance(n, Def):
            return Def(go(n.head, env), go(n.body, env))
        if isinstance(n, Conj):
            return Conj(go(n.left, env), go(n.right, env))
        return n

    return go(node, {})


def alpha_eq(a, b) -> bool:
    """Structural equality up to renaming of blind binders."""
    return canonical(a) == canonical(b)
