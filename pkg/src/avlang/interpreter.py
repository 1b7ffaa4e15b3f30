"""Execution (``ex``) and backchaining (``bc``) judgments.

The engine is a small abstract machine: a continuation of pending tasks and
a stack of choice points.  Clause alternatives (and the two halves of a
conjunctive declaration) are tried in declaration order, left first, with
chronological backtracking.  Binder witnesses are fresh logic variables that
head unification later fills in.

Assignments and ``print`` are destructive.  Executing one discards every
open choice point, so a later failure fails the whole statement instead of
retrying earlier choices against a machine state that can no longer be
rolled back.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field
from typing import Callable, Iterator, Mapping, TextIO

from avlang.ast import (
    BLIND, VISIBLE, Assign, Atom, BinOp, Call, Case, Clause, Conj, Def, ExistsBlind,
    ForAll, Goal, Lit, LogicVar, Num, Program, Seq, Str, Term, TrueGoal, Var, VarRef,
    subst_clause, subst_goal,
)
from avlang.errors import BudgetExceeded, BuiltinError, EvalError, InternalError
from avlang.parser import SourceUnit, parse_source
from avlang.trace import (
    EMPTY_TRACE, Assigned, CallEnter, FailedBranch, Instantiated, MatchedClause, Printed,
    TraceEvent, TraceLog, record, resolve_instantiations,
)
from avlang.unify import EMPTY, Substitution, fresh, resolve, unify_call

DEFAULT_MAX_STEPS = 100_000

BUILTINS = frozenset({"print"})


@dataclass
class Budget:
    """Rule applications left.  Shared by every statement of one run."""

    max_steps: int = DEFAULT_MAX_STEPS
    used: int = 0

    def __post_init__(self):
        if self.max_steps < 1:
            raise ValueError("max_steps must be positive")

    def charge(self) -> None:
        self.used += 1
        if self.used > self.max_steps:
            raise BudgetExceeded(self.max_steps)


@dataclass(frozen=True)
class Success:
    program: Program
    subst: Substitution = EMPTY
    trace: TraceLog = field(default=EMPTY_TRACE)


@dataclass(frozen=True)
class Failure:
    pass


Outcome = Success | Failure
FAILURE = Failure()


# continuation tasks
_EXEC, _TRY, _BC, _FINISH = range(4)


def _text(t: Term) -> str:
    if isinstance(t, Str):
        return t.value
    if isinstance(t, Num):
        return str(t.value)
    if isinstance(t, Atom):
        return t.name
    raise BuiltinError("print of an unbound value")


def _divide(a: int, b: int) -> int:
    q = abs(a) // abs(b)
    return q if (a >= 0) == (b >= 0) else -q


def evaluate(theta: Mapping[str, Term], e, s: Mapping[int, Term] = EMPTY) -> Term:
    if isinstance(e, Lit):
        t = resolve(e.term, s)
        if isinstance(t, (LogicVar, Var)):
            raise EvalError("literal is not a value")
        return t
    if isinstance(e, VarRef):
        if e.binding is not None:
            t = resolve(e.binding, s)
            if isinstance(t, LogicVar):
                raise EvalError(f"parameter {e.name!r} has no value yet")
            return t
        if e.name in theta:
            return theta[e.name]
        raise EvalError(f"unbound variable {e.name!r}")
    if isinstance(e, BinOp):
        a = evaluate(theta, e.left, s)
        b = evaluate(theta, e.right, s)
        if not (isinstance(a, Num) and isinstance(b, Num)):
            raise EvalError(f"operands of {e.op!r} must be numbers")
        if e.op == "+":
            return Num(a.value + b.value)
        if e.op == "-":
            return Num(a.value - b.value)
        if e.op == "*":
            return Num(a.value * b.value)
        if b.value == 0:
            raise EvalError("division by zero")
        return Num(_divide(a.value, b.value))
    raise InternalError(f"not an expression: {e!r}")


class Interpreter:
    """Runs statements against a program.

    ``out`` receives ``print`` output; it defaults to whatever ``sys.stdout``
    is at the time of printing.  ``BudgetExceeded`` raised from a run carries
    the trace of the path being explored in its ``trace`` attribute.
    """

    def __init__(
        self,
        out: TextIO | None = None,
        max_steps: int = DEFAULT_MAX_STEPS,
        listener: Callable[[TraceEvent], None] | None = None,
    ):
        self._out = out
        self.max_steps = max_steps
        # sees every event as it is emitted, including ones on paths that
        # are later backtracked out of the trace
        self.listener = listener

    @property
    def out(self) -> TextIO:
        return self._out if self._out is not None else sys.stdout

    # public judgments

    def exec(
        self,
        p: Program,
        g: Goal,
        s: Substitution = EMPTY,
        budget: Budget | None = None,
        trace: TraceLog = EMPTY_TRACE,
    ) -> Outcome:
        for sol in self.solutions(p, g, s, budget, trace):
            return sol
        return FAILURE

    def solutions(
        self,
        p: Program,
        g: Goal,
        s: Substitution = EMPTY,
        budget: Budget | None = None,
        trace: TraceLog = EMPTY_TRACE,
    ) -> Iterator[Success]:
        """Every derivation of *g*, in search order."""
        budget = budget or Budget(self.max_steps)
        return self._run(p, ((_EXEC, g, 0), None), s, trace, budget)

    def backchain(
        self,
        d: Clause,
        p: Program,
        call: Call,
        s: Substitution = EMPTY,
        budget: Budget | None = None,
        trace: TraceLog = EMPTY_TRACE,
    ) -> Outcome:
        budget = budget or Budget(self.max_steps)
        cont = ((_BC, d, resolve_call_args(call, s, p.theta), (), 0, 0), None)
        for sol in self._run(p, cont, s, trace, budget):
            return sol
        return FAILURE

    def eval(self, p: Program, e, s: Substitution = EMPTY) -> Term:
        return evaluate(p.theta, e, s)

    def call_builtin(self, name: str, args, p: Program, trace: TraceLog = EMPTY_TRACE) -> Outcome:
        text = self._builtin(name, tuple(args))
        return Success(p, EMPTY, record(trace, Printed(text)))

    def run_unit(self, u: SourceUnit, budget: Budget | None = None) -> Outcome:
        """Run every directive in order; θ starts empty."""
        budget = budget or Budget(self.max_steps)
        program = Program(u.declarations, {})
        result: Outcome = Success(program)
        for g in u.directives:
            result = self.exec(result.program, g, result.subst, budget, result.trace)
            if isinstance(result, Failure):
                return result
        return result

    # machine

    def _builtin(self, name: str, args: tuple[Term, ...]) -> str:
        if name == "print":
            if len(args) != 1:
                raise BuiltinError(f"print takes 1 argument, got {len(args)}")
            text = _text(args[0])
            self.out.write(text + "\n")
            return text
        raise BuiltinError(f"unknown builtin {name!r}")

    def _run(self, p: Program, cont, subst, trace, budget: Budget) -> Iterator[Success]:
        clauses = p.clauses
        theta = p.theta
        choices: list = []
        listener = self.listener

        def emit(log, ev):
            if listener is not None:
                listener(ev)
            return record(log, ev)

        while True:
            if cont is None:
                yield Success(Program(clauses, theta), subst, trace)
                if not choices:
                    return
                cont, subst, theta, trace = choices.pop()
                continue

            task, cont = cont
            kind = task[0]
            ok = True

            if kind == _EXEC:
                _charge(budget, trace)
                _, g, depth = task
                if isinstance(g, TrueGoal):
                    pass
                elif isinstance(g, Call):
                    call = resolve_call_args(g, subst, theta)
                    if call.name in BUILTINS:
                        text = self._builtin(call.name, call.args)
                        trace = emit(trace, Printed(text, depth))
                        choices.clear()
                    else:
                        trace = emit(trace, CallEnter(call, depth))
                        cont = ((_TRY, call, 0, depth, None), cont)
                elif isinstance(g, ExistsBlind):
                    lv = fresh(BLIND)
                    cont = ((_EXEC, subst_goal(g.body, g.bound, lv), depth), cont)
                elif isinstance(g, Assign):
                    value = evaluate(theta, g.expr, subst)
                    theta = {**theta, g.target: value}
                    trace = emit(trace, Assigned(g.target, value, depth))
                    choices.clear()
                elif isinstance(g, Seq):
                    cont = ((_EXEC, g.first, depth), ((_EXEC, g.second, depth), cont))
                elif isinstance(g, Case):
                    value = evaluate(theta, g.scrutinee, subst)
                    for pattern, body in g.branches:
                        if pattern == value:
                            cont = ((_EXEC, body, depth), cont)
                            break
                    else:
                        ok = False
                else:
                    raise InternalError(f"not a goal: {g!r}")

            elif kind == _TRY:
                _, call, i, depth, retried = task
                if retried is not None:
                    trace = emit(trace, FailedBranch(retried, depth))
                if i >= len(clauses):
                    ok = False
                else:
                    if i + 1 < len(clauses):
                        choices.append((((_TRY, call, i + 1, depth, i), cont), subst, theta, trace))
                    cont = ((_BC, clauses[i], call, (), i, depth), cont)

            elif kind == _BC:
                _charge(budget, trace)
                _, d, call, pending, index, depth = task
                if isinstance(d, ForAll):
                    lv = fresh(d.visibility)
                    inner = subst_clause(d.inner, d.bound, lv)
                    cont = ((_BC, inner, call, pending + ((d.bound, lv, d.visibility),), index, depth), cont)
                elif isinstance(d, Conj):
                    right = ((_BC, d.right, call, pending, index, depth), cont)
                    choices.append((right, subst, theta, trace))
                    cont = ((_BC, d.left, call, pending, index, depth), cont)
                elif isinstance(d, Def):
                    s2 = unify_call(d.head, call, subst)
                    if s2 is None:
                        ok = False
                    else:
                        subst = s2
                        trace = emit(trace, MatchedClause(index, depth))
                        indices = []
                        for name, lv, vis in pending:
                            if vis is VISIBLE:
                                indices.append(len(trace))
                                trace = emit(
                                    trace, Instantiated(name, resolve(lv, subst), depth + 1, VISIBLE)
                                )
                        if indices:
                            cont = ((_FINISH, tuple(indices)), cont)
                        cont = ((_EXEC, d.body, depth + 1), cont)
                else:
                    raise InternalError(f"not a clause: {d!r}")

            elif kind == _FINISH:
                trace = resolve_instantiations(trace, task[1], subst)

            if not ok:
                if not choices:
                    return
                cont, subst, theta, trace = choices.pop()


def _charge(budget: Budget, trace: TraceLog) -> None:
    try:
        budget.charge()
    except BudgetExceeded as e:
        e.trace = trace
        raise


def resolve_call_args(call: Call, s: Mapping[int, Term], theta: Mapping[str, Term]) -> Call:
    """Resolve logic variables and pass global state names by value."""
    args = []
    for a in call.args:
        if isinstance(a, LogicVar):
            a = resolve(a, s)
        elif isinstance(a, Atom) and a.name in theta:
            a = theta[a.name]
        elif isinstance(a, Var):
            raise InternalError(f"uninstantiated variable {a.name!r} reached a call")
        args.append(a)
    return Call(call.name, tuple(args))


def run_source(source: str, out: TextIO | None = None, max_steps: int = DEFAULT_MAX_STEPS) -> Outcome:
    return Interpreter(out, max_steps).run_unit(parse_source(source))
