"""Random program generators and a brute-force derivation oracle for tests.

The oracle shares nothing with the engine beyond the AST classes: it picks
every binder witness from the finite set of constants in sight (literally
"pick a value t") instead of deferring it to unification, and it explores
every choice exhaustively.
"""

from __future__ import annotations

import random
from functools import lru_cache

from avlang.ast import (
    BLIND, VISIBLE, Anon, Assign, Atom, BinOp, Call, Case, Conj, Def, ExistsBlind, ForAll,
    Lit, Num, Program, Seq, Str, TrueGoal, Var, VarRef, elaborate_clause, elaborate_goal,
)

CONSTANTS = (Atom("a"), Atom("b"), Atom("c"), Num(1), Num(2))
PROCS = ("p0", "p1", "p2")
PARAMS = ("x", "y")


# -- small programs for semantic properties ----------------------------------


def _random_def(rng: random.Random, proc: int, arities: dict, with_print: bool):
    """A quantified declaration of PROCS[proc] (≤2 binders)."""
    args, binders = [], []
    for pos in range(arities[PROCS[proc]]):
        if rng.random() < 0.4:
            args.append(rng.choice(CONSTANTS))
        else:
            name = PARAMS[pos]
            args.append(Var(name))
            binders.append((name, rng.choice((VISIBLE, BLIND))))
    params = [n for n, _ in binders]
    body = _random_body(rng, proc, arities, params, depth=2, with_print=with_print)
    out = Def(Call(PROCS[proc], tuple(args)), body)
    for name, vis in reversed(binders):
        out = ForAll(name, vis, out)
    return out


def _random_arg(rng, params, allow_anon=True):
    r = rng.random()
    if params and r < 0.4:
        return Var(rng.choice(params))
    if allow_anon and r < 0.6:
        return Anon()
    return rng.choice(CONSTANTS)


def _random_body(rng, proc, arities, params, depth, with_print):
    callees = list(range(proc + 1, len(PROCS)))
    r = rng.random()
    if depth > 0 and r < 0.3:
        return Seq(
            _random_body(rng, proc, arities, params, 0, with_print),
            _random_body(rng, proc, arities, params, depth - 1, with_print),
        )
    if with_print and r < 0.4:
        return Call("print", (_random_arg(rng, params, allow_anon=False),))
    if callees and r < 0.85:
        j = rng.choice(callees)
        return Call(PROCS[j], tuple(_random_arg(rng, params) for _ in range(arities[PROCS[j]])))
    return TrueGoal()


def random_program(rng: random.Random, with_print: bool = False) -> tuple[Program, object]:
    """≤3 clauses, ≤2 conjuncts each, ≤2 binders per declaration, no assignments.

    The call graph is acyclic (p_i only calls p_j for j > i) so that the
    search always terminates.
    """
    arities = {name: rng.randint(0, 2) for name in PROCS}
    clauses = []
    for _ in range(rng.randint(1, 3)):
        proc = rng.randrange(len(PROCS))
        d = _random_def(rng, proc, arities, with_print)
        if rng.random() < 0.35:
            d = Conj(d, _random_def(rng, rng.randrange(len(PROCS)), arities, with_print))
        clauses.append(elaborate_clause(d))
    target = rng.choice(PROCS)
    directive = Call(target, tuple(_random_arg(rng, ()) for _ in range(arities[target])))
    return Program(clauses, {}), elaborate_goal(directive)


def binder_paths(d) -> int:
    """Number of ForAll binders in a clause."""
    if isinstance(d, ForAll):
        return 1 + binder_paths(d.inner)
    if isinstance(d, Conj):
        return binder_paths(d.left) + binder_paths(d.right)
    return 0


def set_visibility(d, choose):
    """Rebuild *d* with each binder's visibility given by ``choose(i, old)``."""
    counter = iter(range(10**9))

    def go(n):
        if isinstance(n, ForAll):
            return ForAll(n.bound, choose(next(counter), n.visibility), go(n.inner))
        if isinstance(n, Conj):
            return Conj(go(n.left), go(n.right))
        return n

    return go(d)


def flip(vis):
    return BLIND if vis is VISIBLE else VISIBLE


# -- brute-force oracle -------------------------------------------------------


def _constants(node, acc: set):
    if isinstance(node, (Atom, Num, Str)):
        acc.add(node)
    elif isinstance(node, Call):
        for a in node.args:
            _constants(a, acc)
    elif isinstance(node, (ExistsBlind,)):
        _constants(node.body, acc)
    elif isinstance(node, Seq):
        _constants(node.first, acc)
        _constants(node.second, acc)
    elif isinstance(node, ForAll):
        _constants(node.inner, acc)
    elif isinstance(node, Conj):
        _constants(node.left, acc)
        _constants(node.right, acc)
    elif isinstance(node, Def):
        _constants(node.head, acc)
        _constants(node.body, acc)
    return acc


def oracle_derivable(clauses, goal, max_depth: int = 12) -> bool:
    """Does ``ex(P, goal, P')`` have a derivation with ≤ max_depth nested calls?

    Handles the assignment- and print-free fragment.
    """
    universe = set()
    for d in clauses:
        _constants(d, universe)
    _constants(goal, universe)
    universe = sorted(universe, key=repr) or [Atom("u")]

    def ground(args, env):
        return tuple(env[a.name] if isinstance(a, Var) else a for a in args)

    @lru_cache(maxsize=None)
    def call_ok(call: Call, depth: int) -> bool:
        if depth == 0:
            return False
        return any(bc(d, call, {}, depth - 1) for d in clauses)

    def ex(g, env, depth) -> bool:
        if isinstance(g, TrueGoal):
            return True
        if isinstance(g, Call):
            return call_ok(Call(g.name, ground(g.args, env)), depth)
        if isinstance(g, ExistsBlind):
            return any(ex(g.body, {**env, g.bound: t}, depth) for t in universe)
        if isinstance(g, Seq):
            return ex(g.first, env, depth) and ex(g.second, env, depth)
        raise ValueError(f"outside the oracle fragment: {g!r}")

    def bc(d, call, env, depth) -> bool:
        if isinstance(d, ForAll):
            return any(bc(d.inner, call, {**env, d.bound: t}, depth) for t in universe)
        if isinstance(d, Conj):
            return bc(d.left, call, env, depth) or bc(d.right, call, env, depth)
        head = Call(d.head.name, ground(d.head.args, env))
        return head == call and ex(d.body, env, depth)

    return ex(goal, {}, max_depth)


# -- random syntax trees for round-tripping -----------------------------------

ATOMS = ("kim", "lee", "medical", "english", "physics", "a1")
HEAD_PARAMS = ("x", "m", "n", "who")
GLOBALS = ("amount", "count", "total")
STRINGS = ("", "hi there", 'say "no"', "back\\slash", "100%", "a.b;c")
MONEY = ("$10K", "$5K", "$1")


def _literal(rng):
    r = rng.random()
    if r < 0.4:
        return Num(rng.randint(-50, 50))
    if r < 0.7:
        return Str(rng.choice(STRINGS))
    return Str(rng.choice(MONEY))


def _expr(rng, params, depth):
    r = rng.random()
    if depth > 0 and r < 0.35:
        return BinOp(rng.choice("+-*/"), _expr(rng, params, depth - 1), _expr(rng, params, depth - 1))
    if r < 0.55:
        return VarRef(rng.choice(list(params) + list(GLOBALS)))
    return Lit(_literal(rng))


def _term(rng, params):
    r = rng.random()
    if params and r < 0.3:
        return Var(rng.choice(params))
    if r < 0.45:
        return Anon()
    if r < 0.75:
        return Atom(rng.choice(ATOMS))
    return _literal(rng)


def _goal(rng, params, depth):
    r = rng.random()
    if depth > 0 and r < 0.25:
        return Seq(_simple(rng, params, depth - 1), _goal(rng, params, depth - 1))
    return _simple(rng, params, depth)


def _simple(rng, params, depth):
    r = rng.random()
    if r < 0.1:
        return TrueGoal()
    if r < 0.55:
        name = rng.choice(("tuition", "print", "p", "q_1"))
        return Call(name, tuple(_term(rng, params) for _ in range(rng.randint(0, 3))))
    if r < 0.8 or depth == 0:
        return Assign(rng.choice(GLOBALS), _expr(rng, params, 2))
    branches = []
    for _ in range(rng.randint(1, 3)):
        pattern = Atom(rng.choice(ATOMS)) if rng.random() < 0.6 else _literal(rng)
        branches.append((pattern, _goal(rng, params, depth - 1)))
    return Case(_expr(rng, params, 1), tuple(branches))


def _surface_def(rng):
    params = rng.sample(HEAD_PARAMS, rng.randint(0, 3))
    args = []
    for name in params:
        r = rng.random()
        args.append(Anon() if r < 0.25 else _literal(rng) if r < 0.35 else Var(name))
    used = [a.name for a in args if isinstance(a, Var)]
    return Def(Call(rng.choice(("tuition", "p", "q_1", "r")), tuple(args)), _goal(rng, used, 2))


def random_clause(rng: random.Random):
    parts = [_surface_def(rng) for _ in range(rng.choice((1, 1, 2)))]
    out = parts[-1]
    for d in reversed(parts[:-1]):
        out = Conj(d, out)
    return elaborate_clause(out)


def random_goal(rng: random.Random):
    return elaborate_goal(_goal(rng, [], 3))

