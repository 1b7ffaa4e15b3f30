"""First-order unification over flat terms.

Terms never nest, so there is no occurs check.  Adding compound terms
would require one in :func:`_bind`.
"""

from __future__ import annotations

import itertools
from typing import Iterator, Mapping

from pyrsistent import PMap, pmap

from avlang.ast import BLIND, Atom, Call, LogicVar, Num, Str, Term, Visibility
from avlang.errors import InternalError

_ids = itertools.count(1)


def fresh(origin: Visibility = BLIND) -> LogicVar:
    return LogicVar(next(_ids), origin)


class Substitution(Mapping[int, Term]):
    """Immutable map from logic-variable id to term.

    Bindings only ever point from a younger variable to an older one or to a
    constant, so chains are finite.
    """

    __slots__ = ("_map",)

    def __init__(self, bindings: Mapping[int, Term] | None = None):
        self._map: PMap = pmap(bindings or {})

    def __getitem__(self, key: int) -> Term:
        return self._map[key]

    def __iter__(self) -> Iterator[int]:
        return iter(self._map)

    def __len__(self) -> int:
        return len(self._map)

    def __eq__(self, other):
        if isinstance(other, Substitution):
            return self._map == other._map
        return NotImplemented

    def __hash__(self):
        return hash(self._map)

    def __repr__(self):
        inner = ", ".join(f"L{k}↦{v!r}" for k, v in sorted(self._map.items()))
        return f"Substitution({{{inner}}})"

    def extend(self, var: LogicVar, value: Term) -> "Substitution":
        out = Substitution.__new__(Substitution)
        out._map = self._map.set(var.id, value)
        return out


EMPTY = Substitution()


def resolve(t: Term, s: Mapping[int, Term]) -> Term:
    while isinstance(t, LogicVar) and t.id in s:
        t = s[t.id]
    return t


def _check(t: Term) -> None:
    if not isinstance(t, (Atom, Num, Str, LogicVar)):
        raise InternalError(f"cannot unify {t!r}; binders must be instantiated first")


def unify(a: Term, b: Term, s: Substitution = EMPTY) -> Substitution | None:
    """Most general extension of *s* equating *a* and *b*, or ``None``."""
    _check(a)
    _check(b)
    a = resolve(a, s)
    b = resolve(b, s)
    if a == b:
        return s
    if isinstance(a, LogicVar) and isinstance(b, LogicVar):
        young, old = (a, b) if a.id > b.id else (b, a)
        return s.extend(young, old)
    if isinstance(a, LogicVar):
        return s.extend(a, b)
    if isinstance(b, LogicVar):
        return s.extend(b, a)
    return None


def unify_call(pattern: Call, call: Call, s: Substitution = EMPTY) -> Substitution | None:
    if pattern.name != call.name or len(pattern.args) != len(call.args):
        return None
    for x, y in zip(pattern.args, call.args):
        s = unify(x, y, s)
        if s is None:
            return None
    return s


def resolve_call(call: Call, s: Mapping[int, Term]) -> Call:
    return Call(call.name, tuple(resolve(a, s) for a in call.args))

