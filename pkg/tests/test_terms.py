import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import AI, f_rho, f_ups, ground_terms
from hornchase.terms import (
    STAR,
    Atom,
    Constant,
    Func,
    SkolemFn,
    UnboundVariable,
    Var,
    abstract_constants,
    apply_substitution,
    atom,
    compare_terms,
    depth,
    is_n_cyclic,
    is_proper_subterm,
    is_subterm,
    subterms,
    term_key,
)


def test_depth_examples():
    assert depth(STAR) == 0
    assert depth(f_rho(AI)) == 1
    assert depth(f_ups(f_rho(STAR))) == 2


@pytest.mark.parametrize(
    "term,n,expected",
    [
        (f_rho(f_rho(STAR)), 1, True),
        (f_rho(f_ups(STAR)), 1, False),
        (f_rho(f_rho(f_rho(STAR))), 2, True),
        (f_rho(f_rho(f_rho(STAR))), 3, False),
        (f_rho(f_ups(f_rho(STAR))), 1, True),
        (STAR, 1, False),
    ],
)
def test_is_n_cyclic(term, n, expected):
    assert is_n_cyclic(term, n) is expected


def test_n_cyclic_with_binary_symbol():
    g = SkolemFn("r9", "y")
    t = Func(g, (f_rho(AI), Func(g, (AI, AI))))
    assert is_n_cyclic(t, 1)
    assert not is_n_cyclic(t, 2)


def test_abstract_constants():
    f, g = SkolemFn("f", "y"), SkolemFn("g", "y")
    c = Constant("c")
    t = Func(f, (Constant("d"), Func(g, (Constant("e"),))))
    assert abstract_constants(t, c) == Func(f, (c, Func(g, (c,))))
    assert abstract_constants(AI, STAR) is STAR
    assert abstract_constants(f_rho(AI), STAR) == f_rho(STAR)


def test_compare_terms_examples():
    a, b, c = Constant("a"), Constant("b"), Constant("c")
    assert compare_terms(a, f_rho(a)) == -1
    assert compare_terms(b, c) == -1
    assert compare_terms(f_rho(a), f_rho(a)) == 0
    assert compare_terms(STAR, a) == -1


def test_apply_substitution():
    x, y = Var("x"), Var("y")
    assert apply_substitution(atom("R", "x", "y"), {x: AI, y: f_rho(AI)}) == Atom("R", (AI, f_rho(AI)))
    assert apply_substitution(atom("A", "x"), {}) == atom("A", "x")
    assert apply_substitution(atom("Eq", "x", "x"), {x: STAR}) == Atom("Eq", (STAR, STAR))
    with pytest.raises(UnboundVariable):
        apply_substitution(atom("A", "x"), {}, ground=True)


def test_serialization():
    assert str(STAR) == "*"
    assert str(f_rho(AI)) == "f[r1:y](AI)"
    assert str(f_ups(f_rho(STAR))) == "f[r2:y](f[r1:y](*))"


@given(ground_terms, st.sampled_from([STAR, Constant("k")]))
def test_abstraction_preserves_depth(t, c):
    assert depth(abstract_constants(t, c)) == depth(t)


@given(ground_terms, st.integers(1, 4))
def test_cyclicity_is_downward_closed(t, n):
    if is_n_cyclic(t, n + 1):
        assert is_n_cyclic(t, n)


@given(ground_terms, ground_terms, ground_terms)
def test_order_is_total_transitive_and_depth_respecting(t, u, v):
    c = compare_terms(t, u)
    assert c == -compare_terms(u, t)
    assert (c == 0) == (t == u)
    if c < 0:
        assert depth(t) <= depth(u)
    if compare_terms(t, u) < 0 and compare_terms(u, v) < 0:
        assert compare_terms(t, v) < 0


@given(ground_terms)
def test_subterm_relation(t):
    assert is_subterm(t, t)
    assert not is_proper_subterm(t, t)
    for s in subterms(t):
        assert is_subterm(s, t)
        for r in subterms(s):
            assert is_subterm(r, t)


@given(ground_terms)
def test_hash_consistency(t):
    rebuilt = abstract_constants(t, STAR)
    assert abstract_constants(rebuilt, STAR) == rebuilt
    assert hash(abstract_constants(rebuilt, STAR)) == hash(rebuilt)
    assert term_key(rebuilt) == term_key(abstract_constants(rebuilt, STAR))
