"""Unification, substitution application, and their algebraic laws."""

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prologtheta.terms import (
    Compound,
    Const,
    Substitution,
    Unknown,
    Var,
    apply,
    compose,
    compound,
    fresh_unknown,
    fresh_var,
    is_ground,
    unify,
)

X = Var("X", 9001)
Y = Var("Y", 9002)
Z = Var("Z", 9003)
tom = Const("tom")
cs = Const("cs")


def test_unify_binds_single_variable():
    s = unify(X, tom)
    assert s is not None
    assert apply(s, X) == tom


def test_unify_identical_constants_is_empty():
    s = unify(tom, Const("tom"))
    assert s == Substitution()
    assert len(s) == 0


def test_unify_distinct_constants_fails():
    assert unify(tom, cs) is None


def test_occurs_check_rejects_cyclic_binding():
    assert unify(X, compound("f", X)) is None


def test_occurs_check_can_be_disabled():
    s = unify(X, compound("f", X), occurs_check=False)
    assert s is not None
    # resolution stays total on the cyclic map: the loop variable remains
    resolved = apply(s, X)
    assert resolved == compound("f", X)


def test_distinct_unknowns_do_not_unify():
    k1, k2 = fresh_unknown("emp"), fresh_unknown("emp")
    assert unify(k1, k2) is None
    assert unify(k1, k1) == Substitution()


def test_unknown_vs_constant_fails_but_variable_binds():
    k = fresh_unknown()
    assert unify(k, tom) is None
    assert unify(k, compound("f", tom)) is None
    s = unify(X, k)
    assert apply(s, X) == k


def test_functor_and_arity_clashes_fail():
    assert unify(compound("f", tom), compound("g", tom)) is None
    assert unify(compound("f", tom), compound("f", tom, cs)) is None


def test_apply_replaces_bound_variables():
    s = unify(X, tom)
    assert apply(s, compound("phone", X, Y)) == compound("phone", tom, Y)


def test_apply_empty_substitution_is_identity():
    t = compound("phone", tom, cs, Const("4450"))
    assert apply(Substitution(), t) == t


def test_apply_instantiates_the_recorded_witness():
    # the binding used in the worked phone-book example
    s = unify(X, Const("4450"))
    assert apply(s, compound("phone", tom, cs, X)) == compound(
        "phone", tom, cs, Const("4450")
    )


def test_triangular_chains_resolve_and_stay_idempotent():
    s = Substitution({X.id: compound("f", Y), Y.id: tom})
    once = apply(s, X)
    assert once == compound("f", tom)
    assert apply(s, once) == once


def test_is_ground():
    assert is_ground(compound("phone", tom, cs, Const("4450")))
    assert not is_ground(compound("phone", Const("sue"), X))
    assert is_ground(compound("phone", Const("sue"), fresh_unknown()))


def test_fresh_var_ids_are_distinct():
    a, b = fresh_var("X"), fresh_var("X")
    assert a.id != b.id
    assert a != b


def test_compound_requires_arguments():
    with pytest.raises(ValueError):
        Compound("f", ())


# ---------------------------------------------------------------------------
# Property tests.

_consts = st.sampled_from([Const("a"), Const("b"), Const("c")])
_vars = st.sampled_from([X, Y, Z])
_terms = st.recursive(
    st.one_of(_consts, _vars),
    lambda kids: st.builds(
        lambda f, args: Compound(f, tuple(args)),
        st.sampled_from(["f", "g"]),
        st.lists(kids, min_size=1, max_size=2),
    ),
    max_leaves=5,
)


def _term_var_ids(term):
    if isinstance(term, Var):
        return {term.id}
    if isinstance(term, Compound):
        out = set()
        for a in term.args:
            out |= _term_var_ids(a)
        return out
    return set()


def _ground_assignments(var_ids):
    """Brute-force oracle: all maps from the variables into {a, b, c}."""
    universe = [Const("a"), Const("b"), Const("c")]
    ids = sorted(var_ids)
    for picks in itertools.product(universe, repeat=len(ids)):
        yield Substitution(dict(zip(ids, picks)))


@given(_terms, _terms)
@settings(max_examples=150, deadline=None)
def test_unify_symmetry(t1, t2):
    left = unify(t1, t2)
    right = unify(t2, t1)
    assert (left is None) == (right is None)
    if left is not None:
        assert apply(left, t1) == apply(left, t2)
        assert apply(right, t1) == apply(right, t2)


@given(_terms, _terms)
@settings(max_examples=150, deadline=None)
def test_every_brute_force_unifier_is_an_instance_of_the_mgu(t1, t2):
    mgu = unify(t1, t2)
    for gamma in _ground_assignments(_term_var_ids(t1) | _term_var_ids(t2)):
        g1, g2 = apply(gamma, t1), apply(gamma, t2)
        if g1 != g2:
            continue
        assert mgu is not None, "brute force found a unifier the mgu missed"
        # the ground unifier must be reachable from the mgu image
        assert unify(apply(mgu, t1), g1) is not None


# compose models refinement: s2 binds variables from the frontier left by
# s1 (its domain and images never mention s1's domain), the way successive
# unifier extensions do
U = Var("U", 9004)
V = Var("V", 9005)
W = Var("W", 9006)
_frontier_terms = st.recursive(
    st.one_of(_consts, st.sampled_from([U, V, W])),
    lambda kids: st.builds(
        lambda f, args: Compound(f, tuple(args)),
        st.sampled_from(["f", "g"]),
        st.lists(kids, min_size=1, max_size=2),
    ),
    max_leaves=4,
)
_mixed_terms = st.recursive(
    st.one_of(_consts, st.sampled_from([X, Y, Z, U, V, W])),
    lambda kids: st.builds(
        lambda f, args: Compound(f, tuple(args)),
        st.sampled_from(["f", "g"]),
        st.lists(kids, min_size=1, max_size=2),
    ),
    max_leaves=6,
)


def _acyclic(pairs):
    # triangular by construction: a variable only maps to later variables,
    # so chains are well founded and the substitution is idempotent
    return Substitution(
        {v.id: t for v, t in pairs if all(i > v.id for i in _term_var_ids(t))}
    )


_first_substs = st.builds(_acyclic, st.lists(st.tuples(_vars, _mixed_terms), max_size=3))
_second_substs = st.builds(
    _acyclic,
    st.lists(st.tuples(st.sampled_from([U, V, W]), _frontier_terms), max_size=3),
)


@given(_first_substs, _second_substs, _mixed_terms)
@settings(max_examples=200, deadline=None)
def test_apply_compose_coherence(s1, s2, t):
    assert apply(compose(s1, s2), t) == apply(s2, apply(s1, t))


@given(st.integers(1, 50), st.integers(1, 50))
@settings(max_examples=60, deadline=None)
def test_unknown_opacity(i, j):
    u1, u2 = Unknown(i, "m"), Unknown(j, "m")
    s = unify(u1, u2)
    if i == j:
        assert s == Substitution()
    else:
        assert s is None
