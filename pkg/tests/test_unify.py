import pytest
from hypothesis import given, settings, strategies as st

from avlang.ast import BLIND, VISIBLE, Atom, Call, LogicVar, Num, Str, Var
from avlang.errors import InternalError
from avlang.unify import EMPTY, Substitution, fresh, resolve, unify, unify_call


def L(i):
    return LogicVar(i, BLIND)


class TestFresh:
    def test_distinct(self):
        assert fresh(BLIND).id != fresh(BLIND).id

    def test_origin(self):
        assert fresh(VISIBLE).origin is VISIBLE

    def test_ten_thousand_distinct(self):
        assert len({fresh(BLIND).id for _ in range(10_000)}) == 10_000

    def test_monotone(self):
        a, b = fresh(), fresh()
        assert b.id > a.id


class TestResolve:
    def test_constant(self):
        assert resolve(Atom("medical"), EMPTY) == Atom("medical")

    def test_bound(self):
        assert resolve(L(1), Substitution({1: Atom("medical")})) == Atom("medical")

    def test_chain(self):
        assert resolve(L(2), Substitution({2: L(1), 1: Num(5)})) == Num(5)

    def test_unbound(self):
        assert resolve(L(7), EMPTY) == L(7)


class TestUnify:
    def test_variable_with_constant(self):
        assert unify(L(1), Atom("medical"), EMPTY) == Substitution({1: Atom("medical")})

    def test_identical_constants(self):
        assert unify(Atom("medical"), Atom("medical"), EMPTY) == EMPTY

    def test_clash(self):
        assert unify(Atom("medical"), Atom("english"), EMPTY) is None

    def test_kinds_do_not_mix(self):
        assert unify(Num(1), Str("1"), EMPTY) is None
        assert unify(Atom("a"), Str("a"), EMPTY) is None

    @pytest.mark.parametrize("a,b", [(L(3), L(9)), (L(9), L(3))])
    def test_younger_points_to_older(self, a, b):
        assert unify(a, b, EMPTY) == Substitution({9: L(3)})

    def test_self(self):
        assert unify(L(4), L(4), EMPTY) == EMPTY

    def test_named_variable_is_a_fault(self):
        with pytest.raises(InternalError):
            unify(Var("x"), Atom("a"), EMPTY)

    def test_sees_existing_bindings(self):
        s = Substitution({1: Atom("a")})
        assert unify(L(1), Atom("b"), s) is None
        assert unify(L(1), Atom("a"), s) == s


class TestUnifyCall:
    def test_tuition(self):
        s = unify_call(Call("tuition", (L(1), L(2))), Call("tuition", (Atom("kim"), Atom("medical"))))
        assert s == Substitution({1: Atom("kim"), 2: Atom("medical")})

    def test_name_clash(self):
        assert unify_call(Call("p"), Call("q")) is None

    def test_arity_clash(self):
        assert unify_call(Call("p", (L(1),)), Call("p")) is None

    def test_threads_substitution(self):
        assert unify_call(Call("p", (L(1), L(1))), Call("p", (Atom("a"), Atom("b")))) is None
        assert unify_call(Call("p", (L(1), L(1))), Call("p", (Atom("a"), Atom("a")))) == Substitution({1: Atom("a")})


# -- properties ---------------------------------------------------------------

CONSTS = [Atom("a"), Atom("b"), Num(0), Num(1), Str("$1")]
terms = st.one_of(st.sampled_from(CONSTS), st.integers(1, 6).map(L))


@st.composite
def substitutions(draw):
    """Valid substitutions: bindings point to older variables or constants."""
    bindings = {}
    for i in range(1, 7):
        if draw(st.booleans()):
            older = [L(j) for j in range(1, i)]
            bindings[i] = draw(st.sampled_from(CONSTS + older))
    return Substitution(bindings)


def idempotent_normal(s):
    return {k: resolve(v, s) for k, v in s.items()}


@settings(max_examples=300)
@given(terms, terms, substitutions())
def test_soundness_and_monotonicity(a, b, s):
    out = unify(a, b, s)
    if out is None:
        assert resolve(a, s) != resolve(b, s)
        return
    assert resolve(a, out) == resolve(b, out)
    for k, v in s.items():
        assert out[k] == v


@settings(max_examples=300)
@given(terms, terms, substitutions())
def test_success_commutes(a, b, s):
    ab, ba = unify(a, b, s), unify(b, a, s)
    assert (ab is None) == (ba is None)
    if ab is not None:
        assert idempotent_normal(ab) == idempotent_normal(ba)


@settings(max_examples=300)
@given(st.lists(st.tuples(terms, terms), max_size=6), substitutions())
def test_links_point_older_and_resolve_terminates(pairs, s):
    for a, b in pairs:
        nxt = unify(a, b, s)
        if nxt is not None:
            s = nxt
    for k, v in s.items():
        if isinstance(v, LogicVar):
            assert v.id < k
        assert not isinstance(resolve(L(k), s), LogicVar) or resolve(L(k), s).id not in s
