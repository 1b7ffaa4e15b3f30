"""Execution trace.

Visible instantiations are recorded; blind ones never are.  The log is a
persistent vector so that a choice point can hold on to the trace as it was
when the choice was made.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Iterator, Mapping, Union

from pyrsistent import PVector, pvector

from avlang.ast import BLIND, VISIBLE, Call, LogicVar, Term, Visibility
from avlang.errors import InternalError
from avlang.parser import render_goal, render_term
from avlang.unify import resolve


@dataclass(frozen=True)
class CallEnter:
    call: Call
    depth: int = 0


@dataclass(frozen=True)
class MatchedClause:
    index: int
    depth: int = 0


@dataclass(frozen=True)
class Instantiated:
    name: str
    value: Term
    depth: int = 0
    origin: Visibility = VISIBLE


@dataclass(frozen=True)
class Assigned:
    name: str
    value: Term
    depth: int = 0


@dataclass(frozen=True)
class Printed:
    text: str
    depth: int = 0


@dataclass(frozen=True)
class FailedBranch:
    index: int
    depth: int = 0


TraceEvent = Union[CallEnter, MatchedClause, Instantiated, Assigned, Printed, FailedBranch]


class Verbosity(Enum):
    OFF = "off"
    DEFAULT = "default"
    VERBOSE = "verbose"


DEFAULT_KINDS = (Instantiated, Assigned, Printed)


class TraceLog:
    """Append-only, chronological sequence of events."""

    __slots__ = ("_events",)

    def __init__(self, events: Iterable[TraceEvent] = ()):
        self._events: PVector = pvector(events)

    def __iter__(self) -> Iterator[TraceEvent]:
        return iter(self._events)

    def __len__(self) -> int:
        return len(self._events)

    def __getitem__(self, i):
        return self._events[i]

    def __eq__(self, other):
        if isinstance(other, TraceLog):
            return self._events == other._events
        return NotImplemented

    def __hash__(self):
        return hash(self._events)

    def __repr__(self):
        return f"TraceLog({list(self._events)!r})"

    @property
    def events(self) -> tuple[TraceEvent, ...]:
        return tuple(self._events)

    def _replace(self, index: int, ev: TraceEvent) -> "TraceLog":
        out = TraceLog.__new__(TraceLog)
        out._events = self._events.set(index, ev)
        return out

    def filtered(self, verbosity: Verbosity = Verbosity.DEFAULT) -> tuple[TraceEvent, ...]:
        if verbosity is Verbosity.OFF:
            return ()
        if verbosity is Verbosity.VERBOSE:
            return tuple(self._events)
        return tuple(e for e in self._events if isinstance(e, DEFAULT_KINDS))


EMPTY_TRACE = TraceLog()


def record(log: TraceLog, ev: TraceEvent) -> TraceLog:
    if isinstance(ev, Instantiated) and ev.origin is BLIND:
        raise InternalError(f"blind binder {ev.name!r} must not be recorded")
    out = TraceLog.__new__(TraceLog)
    out._events = log._events.append(ev)
    return out


def resolve_instantiations(log: TraceLog, indices: Iterable[int], s: Mapping[int, Term]) -> TraceLog:
    """Refresh the values of the given Instantiated events under *s*."""
    for i in indices:
        ev = log[i]
        if isinstance(ev.value, LogicVar):
            log = log._replace(i, Instantiated(ev.name, resolve(ev.value, s), ev.depth, ev.origin))
    return log


def render_event(ev: TraceEvent) -> str:
    pad = "  " * ev.depth
    if isinstance(ev, CallEnter):
        return f"{pad}call {render_goal(ev.call)}"
    if isinstance(ev, MatchedClause):
        return f"{pad}match clause #{ev.index}"
    if isinstance(ev, FailedBranch):
        return f"{pad}backtrack clause #{ev.index}"
    if isinstance(ev, Instantiated):
        return f"{pad}{ev.name} := {render_term(ev.value)}"
    if isinstance(ev, Assigned):
        return f"{pad}set {ev.name} = {render_term(ev.value)}"
    if isinstance(ev, Printed):
        return f"{pad}print {ev.text}"
    raise TypeError(f"not a trace event: {ev!r}")


def render_trace(log: TraceLog | Iterable[TraceEvent], verbosity: Verbosity = Verbosity.DEFAULT) -> str:
    """One line per event, indented two spaces per call depth."""
    events = log.filtered(verbosity) if isinstance(log, TraceLog) else tuple(log)
    return "".join(render_event(e) + "\n" for e in events)
