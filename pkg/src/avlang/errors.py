"""Exception hierarchy.

Object-language failure ("no derivation") is not an exception; it is the
:class:`avlang.interpreter.Failure` outcome.  Everything here is an error.
"""

from __future__ import annotations


class AvError(Exception):
    """Base class for every error raised by avlang."""


class ParseError(AvError):
    def __init__(self, line: int, column: int, message: str, expected=()):
        self.line = line
        self.column = column
        self.message = message
        self.expected = list(expected)
        text = f"{line}:{column}: {message}"
        if self.expected:
            text += f" (expected {', '.join(self.expected)})"
        super().__init__(text)


class ElaborationError(AvError):
    pass


class EvalError(AvError):
    pass


class BuiltinError(EvalError):
    pass


class BudgetExceeded(AvError):
    def __init__(self, max_steps: int):
        self.max_steps = max_steps
        super().__init__(f"step budget of {max_steps} exhausted")


class InternalError(AvError):
    """An invariant the engine relies on was broken; always a bug."""
