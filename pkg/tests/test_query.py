import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import AI, FILM_TEXT, brute_force_matches, f_rho
from hornchase.acyclicity import Verdict
from hornchase.chase import Budget, Mode, run_chase
from hornchase.ontology import build_program, parse_ontology
from hornchase.query import (
    ConjunctiveQuery,
    QueryParseError,
    answers,
    entails,
    evaluate_cq,
    parse_query,
)
from hornchase.store import FactStore
from hornchase.terms import BOT, STAR, Atom, Constant, Var, atom, fact


@pytest.fixture
def film_store():
    return run_chase(build_program(parse_ontology(FILM_TEXT))).facts


def test_parse_query_shapes():
    q = parse_query("q(x) <- Film(x)")
    assert q.answer_vars == (Var("x"),) and q.body == (atom("Film", "x"),)
    q = parse_query("q() <- prod(x,y)")
    assert q.is_boolean and q.body == (atom("prod", "x", "y"),)
    q = parse_query("q(w,y) <- pE(w,z), pE(y,z)")
    assert q.answer_vars == (Var("w"), Var("y"))
    assert q.body == (atom("pE", "w", "z"), atom("pE", "y", "z"))
    assert str(q) == "q(w,y) <- pE(w,z), pE(y,z)"


@pytest.mark.parametrize(
    "text",
    [
        "q(x) <- ",
        "q(x) <- A(y)",
        "q(x) <- A(x), x = y",
        "q(x,x) <- R(x,x)",
        "q(x) <- A(x) B(x)",
        "A(x)",
    ],
)
def test_parse_errors(text):
    with pytest.raises(QueryParseError):
        parse_query(text)


def test_parse_checks_signature():
    sig = {"Film": 1, "prod": 2}
    assert parse_query("q(x) <- Film(x)", sig).body == (atom("Film", "x"),)
    with pytest.raises(QueryParseError):
        parse_query("q(x) <- Film(x,y)", sig)
    with pytest.raises(QueryParseError):
        parse_query("q(x) <- Movie(x)", sig)


def test_evaluate_on_film_chase(film_store):
    assert evaluate_cq(parse_query("q(x) <- Film(x)"), film_store).tuples == {(AI,)}
    assert evaluate_cq(parse_query("q(x) <- prod(x,y)"), film_store).tuples == frozenset()
    assert evaluate_cq(parse_query("q(y) <- prod(x,y)"), film_store).tuples == {(AI,)}
    assert bool(evaluate_cq(parse_query("q() <- prod(x,y)"), film_store))


def test_answers_never_contain_skolem_or_star():
    store = FactStore([Atom("A", (STAR,)), Atom("A", (f_rho(AI),)), Atom("A", (AI,))])
    assert evaluate_cq(parse_query("q(x) <- A(x)"), store).tuples == {(AI,)}


def test_entails_verdicts():
    o = parse_ontology(FILM_TEXT)
    assert entails(o, parse_query("q() <- prod(x,y)")) is Verdict.YES
    assert entails(o, ConjunctiveQuery((), (atom(BOT, "x"),))) is Verdict.NO
    bad = parse_ontology("TBOX:\nA AND B SUBCLASSOF Bot\nABOX:\nA(a)\nB(a)\n")
    assert entails(bad, parse_query("q() <- R(x,y)")) is Verdict.YES


def test_entails_unknown_on_budget():
    o = parse_ontology(FILM_TEXT)
    q = parse_query("q() <- Director(x)")
    assert entails(o, q, Mode.OBLIVIOUS, Budget(max_depth=4)) is Verdict.UNKNOWN
    assert entails(o, q, Mode.RESTRICTED) is Verdict.NO
    assert not answers(o, parse_query("q(x) <- Film(x)"), Mode.OBLIVIOUS, Budget(max_depth=4)).complete


consts = st.sampled_from("abcde")
store_st = st.sets(
    st.one_of(
        st.builds(lambda p, a: fact(p, a), st.sampled_from("AB"), consts),
        st.builds(lambda p, a, b: fact(p, a, b), st.sampled_from("RS"), consts, consts),
    ),
    max_size=20,
)
query_body = st.lists(
    st.one_of(
        st.builds(lambda p, v: atom(p, v), st.sampled_from("AB"), st.sampled_from("xyz")),
        st.builds(lambda p, v, w: atom(p, v, w), st.sampled_from("RS"), st.sampled_from("xyzw"), st.sampled_from("xyzw")),
    ),
    min_size=1,
    max_size=4,
)


def oracle_answers(q, facts):
    out = set()
    for s in brute_force_matches(q.body, facts):
        s = dict(s)
        out.add(tuple(s[v] for v in q.answer_vars))
    return out


@settings(max_examples=100)
@given(query_body, store_st, st.data())
def test_evaluate_matches_oracle(body, facts, data):
    vs = sorted({v for a in body for v in a.variables()}, key=lambda v: v.name)
    head = data.draw(st.lists(st.sampled_from(vs), unique=True, max_size=len(vs)))
    q = ConjunctiveQuery(tuple(head), tuple(body))
    assert set(evaluate_cq(q, FactStore(facts)).tuples) == oracle_answers(q, facts)


@settings(max_examples=60)
@given(query_body, store_st, store_st)
def test_answers_are_monotone(body, f1, f2):
    vs = tuple(sorted({v for a in body for v in a.variables()}, key=lambda v: v.name))
    q = ConjunctiveQuery(vs[:1], tuple(body))
    assert evaluate_cq(q, FactStore(f1)).tuples <= evaluate_cq(q, FactStore(f1 | f2)).tuples


def test_random_queries_with_skolem_terms():
    rng = random.Random(11)
    terms = [Constant(c) for c in "abcd"] + [f_rho(Constant("a")), f_rho(f_rho(Constant("b"))), STAR]
    for _ in range(20):
        facts = {
            Atom(rng.choice("RS"), (rng.choice(terms), rng.choice(terms))) for _ in range(rng.randint(1, 40))
        }
        q = ConjunctiveQuery((Var("x"),), (atom("R", "x", "y"), atom("S", "y", "z")))
        expected = {t for t in oracle_answers(q, facts) if isinstance(t[0], Constant)}
        assert set(evaluate_cq(q, FactStore(facts)).tuples) == expected
