"""An interpreter for a small imperative language with anonymous variables."""

from avlang.ast import BLIND, VISIBLE, Program, elaborate_clause, elaborate_goal, free_vars
from avlang.errors import (
    AvError, BudgetExceeded, BuiltinError, ElaborationError, EvalError, InternalError, ParseError,
)
from avlang.interpreter import Budget, Failure, Interpreter, Success, run_source
from avlang.parser import lex, parse, parse_source, render
from avlang.trace import TraceLog, Verbosity, render_trace

__version__ = "0.1.0"

__all__ = [
    "BLIND", "VISIBLE", "Program", "elaborate_clause", "elaborate_goal", "free_vars",
    "AvError", "BudgetExceeded", "BuiltinError", "ElaborationError", "EvalError",
    "InternalError", "ParseError",
    "Budget", "Failure", "Interpreter", "Success", "run_source",
    "lex", "parse", "parse_source", "render",
    "TraceLog", "Verbosity", "render_trace",
]
