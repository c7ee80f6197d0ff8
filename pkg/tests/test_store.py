import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import brute_force_matches
from hornchase.store import FactStore, match_body
from hornchase.terms import Constant, Var, atom, fact


def as_set(subs):
    return {frozenset(s.items()) for s in subs}


def test_join_example():
    store = FactStore([fact("R", "a", "b"), fact("R", "b", "c")])
    got = list(match_body([atom("R", "x", "y"), atom("R", "y", "z")], store))
    a, b, c = Constant("a"), Constant("b"), Constant("c")
    assert got == [{Var("x"): a, Var("y"): b, Var("z"): c}]


def test_repeated_variable_and_init():
    store = FactStore([fact("R", "a", "a"), fact("R", "a", "b")])
    assert as_set(match_body([atom("R", "x", "x")], store)) == {frozenset({(Var("x"), Constant("a"))})}
    got = list(match_body([atom("R", "x", "y")], store, init={Var("y"): Constant("b")}))
    assert got == [{Var("x"): Constant("a"), Var("y"): Constant("b")}]


def test_edge_cases():
    assert list(match_body([atom("A", "x")], FactStore())) == []
    with pytest.raises(ValueError):
        list(match_body([], FactStore([fact("A", "a")])))


def test_indexes():
    s = FactStore([fact("R", "a", "b"), fact("A", "a")])
    assert s.with_term("R", 1, Constant("b")) == {fact("R", "a", "b")}
    assert s.with_pred("A") == {fact("A", "a")}
    assert s.add(fact("A", "a")) is False
    assert len(s) == 2 and s == {fact("R", "a", "b"), fact("A", "a")}


consts = st.sampled_from("abcd")
facts_st = st.sets(
    st.one_of(
        st.builds(lambda p, a: fact(p, a), st.sampled_from("AB"), consts),
        st.builds(lambda p, a, b: fact(p, a, b), st.sampled_from("RS"), consts, consts),
    ),
    max_size=14,
)
vars_st = st.sampled_from("xyz")
body_st = st.lists(
    st.one_of(
        st.builds(lambda p, v: atom(p, v), st.sampled_from("AB"), vars_st),
        st.builds(lambda p, v, w: atom(p, v, w), st.sampled_from("RS"), vars_st, vars_st),
    ),
    min_size=1,
    max_size=3,
)


@settings(max_examples=150)
@given(body_st, facts_st)
def test_matches_agree_with_brute_force(body, facts):
    assert as_set(match_body(body, FactStore(facts))) == brute_force_matches(body, facts)


@settings(max_examples=150)
@given(body_st, facts_st, facts_st)
def test_delta_matches_are_new_and_unique(body, old, extra):
    store = FactStore(old | extra)
    delta = FactStore(extra - old)
    got = [frozenset(s.items()) for s in store.match(body, delta=delta)]
    assert len(got) == len(set(got))
    expected = brute_force_matches(body, old | extra) - brute_force_matches(body, old)
    assert set(got) == expected
