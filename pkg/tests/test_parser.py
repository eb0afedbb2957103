"""Concrete syntax: parsing, error reporting, and round-tripping."""

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from prologtheta.terms import Compound, Const, Star, Var
from prologtheta.syntax import Atom, Conj, Exists, Fact, Forall, Rule
from prologtheta.parser import (
    ParseError,
    format_clause,
    format_goal,
    format_term,
    parse_module,
    parse_query,
    parse_term,
)

EMP = """\
module emp.
unknown X, Y.
phone(tom, 434433).
phone(pete, 200312).
phone(sue, X).
phone(john, X).
phone(tim, Y).
"""


def test_parse_emp_module():
    m = parse_module(EMP)
    assert m.name == "emp"
    assert m.unknown_decls == ("X", "Y")
    assert len(m.raw_clauses) == 5
    assert len(m.source_spans) == 5
    assert all(isinstance(c, Fact) for c in m.raw_clauses)


def test_empty_module_after_header():
    m = parse_module("module nothing.")
    assert m.name == "nothing"
    assert m.raw_clauses == ()


def test_header_is_optional():
    m = parse_module("p(a).")
    assert m.name == "main"
    assert not m.had_header
    assert len(m.raw_clauses) == 1


def test_star_argument_in_fact():
    m = parse_module("phone(sue, *).")
    fact = m.raw_clauses[0]
    assert isinstance(fact.head.args[1], Star)


def test_star_rejected_outside_facts():
    with pytest.raises(ParseError, match="fact"):
        parse_module("p(*) :- q(a).")
    with pytest.raises(ParseError, match="fact"):
        parse_query("p(*)")


def test_comments_are_stripped():
    m = parse_module("% a comment line\np(a). % trailing\n% done\n")
    assert len(m.raw_clauses) == 1


def test_query_nested_binders():
    g = parse_query("some X : some* Y : phone(tom, X, Y)")
    assert isinstance(g, Exists) and not g.noisy
    assert isinstance(g.body, Exists) and g.body.noisy
    assert isinstance(g.body.body, Atom)


def test_binder_scopes_to_end_of_group():
    g = parse_query("p(a), some X : q(X), r(X)")
    assert isinstance(g, Conj)
    assert isinstance(g.right, Exists)
    assert isinstance(g.right.body, Conj)


def test_parenthesized_group_limits_binder_scope():
    g = parse_query("(some X : q(X)), r(a)")
    assert isinstance(g, Conj)
    assert isinstance(g.left, Exists)
    assert isinstance(g.right, Atom)


def test_query_with_anonymous_and_free_vars():
    g = parse_query("phone(tom, _, Y)")
    assert isinstance(g, Atom)
    anon, named = g.args[1], g.args[2]
    assert isinstance(anon, Var) and anon.name == "_"
    assert isinstance(named, Var) and named.name == "Y"


def test_each_underscore_is_distinct():
    g = parse_query("p(_, _)")
    assert g.args[0] != g.args[1]


def test_malformed_argument_list_is_an_error():
    with pytest.raises(ParseError):
        parse_query("p(,)")


def test_reserved_unknown_token():
    with pytest.raises(ParseError, match="reserved token"):
        parse_module("p(?k1).")


def test_reserved_words_cannot_name_predicates():
    with pytest.raises(ParseError, match="reserved word"):
        parse_query("p(some)")


def test_prefix_clause_shapes():
    m = parse_module("all X, Y : p(X, Y).\nall* Z : q(Z) :- p(Z, Z).")
    first, second = m.raw_clauses
    assert isinstance(first, Forall) and not first.noisy
    assert isinstance(first.inner, Forall)
    assert isinstance(second, Forall) and second.noisy
    assert isinstance(second.inner, Rule)


def test_duplicate_header_rejected():
    with pytest.raises(ParseError, match="header"):
        parse_module("module a.\nmodule b.\np(a).")


def test_duplicate_unknown_name_rejected():
    with pytest.raises(ParseError, match="duplicate unknown"):
        parse_module("unknown X, X.\np(a).")


def test_error_recovery_reports_every_bad_clause():
    bad = "p(a.\nq(b).\nr(].\ns(c)."
    with pytest.raises(ParseError) as exc:
        parse_module(bad)
    assert len(exc.value.issues) >= 2
    # positions point at real lines
    assert {i.line for i in exc.value.issues} >= {1}


def test_error_positions_are_line_and_column():
    try:
        parse_query("p(a), q(")
    except ParseError as err:
        issue = err.issues[0]
        assert issue.line == 1 and issue.col >= 8
    else:
        pytest.fail("expected a parse error")


# ---------------------------------------------------------------------------
# Round-tripping.

_tnames = st.sampled_from(["tom", "cs", "f", "g", "a"])
_tvars = st.sampled_from(["X", "Y", "Zed"])
_source_terms = st.recursive(
    st.one_of(
        _tnames.map(Const),
        st.sampled_from(["0", "7", "4450"]).map(Const),
        _tvars.map(lambda n: Var(n, 0)),
    ),
    lambda kids: st.builds(
        lambda f, args: Compound(f, tuple(args)),
        st.sampled_from(["f", "g", "phone"]),
        st.lists(kids, min_size=1, max_size=3),
    ),
    max_leaves=8,
)


@given(_source_terms)
@settings(max_examples=200, deadline=None)
def test_term_round_trip(term):
    text = format_term(term)
    assert format_term(parse_term(text)) == text


def test_clause_round_trip_on_source_corpus():
    texts = [
        "phone(tom, cs, 4450)",
        "p(a) :- q(a), r(b)",
        "all X : p(X) :- q(X)",
        "all* X : all Y : p(X, Y) :- q(X), r(Y)",
        "p(_, _)",
        "p(f(g(a), X))",
        "p :- q, r",
    ]
    for text in texts:
        parsed = parse_module(text + ".").raw_clauses[0]
        assert format_clause(parsed) == text


def test_goal_round_trip_on_source_corpus():
    texts = [
        "phone(tom, _, Y)",
        "some X : some* Y : phone(tom, X, Y)",
        "(some X : q(X)), r(a)",
        "p(a), q(b), r(c)",
        "p",
    ]
    for text in texts:
        assert format_goal(parse_query(text)) == text


def test_unknowns_format_reserved():
    from prologtheta.terms import Unknown

    assert format_term(Unknown(3, "emp")) == "?k3"
