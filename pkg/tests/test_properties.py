"""Cross-module invariants checked over the bundled corpus with random ABoxes."""

import functools

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from conftest import load_corpus, random_abox, seeded
from hornchase.acyclicity import TBoxRules, Verdict, check_mfa_union, check_rca
from hornchase.chase import Mode, Status, run_chase
from hornchase.ontology import tbox_rules
from hornchase.rules import Program, predicates
from hornchase.terms import TOP, abstract_fact

CORPUS = load_corpus()
NAMES = [o.name for o in CORPUS]


@functools.lru_cache(maxsize=None)
def analysed(name):
    o = next(o for o in CORPUS if o.name == name)
    rules = tbox_rules(o.tbox)
    ctx = TBoxRules(rules)
    rca = check_rca(ctx, 1)
    mfa = check_mfa_union(rules).verdict
    return rules, rca, mfa


def rca_positive():
    return [n for n in NAMES if analysed(n)[1].verdict is Verdict.YES]


def sample_program(name, seed):
    rules, _, _ = analysed(name)
    abox = random_abox(seeded(seed), predicates(rules), max_facts=20, max_consts=4)
    return Program(rules, frozenset(abox))


common = settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow])


@common
@given(st.sampled_from(rca_positive()), st.integers(0, 10**6))
def test_rca_programs_terminate_inside_the_overchase(name, seed):
    _, rca, _ = analysed(name)
    res = run_chase(sample_program(name, seed), Mode.RESTRICTED, stop_on_bottom=False)
    assert res.status is Status.TERMINATED
    V = rca.overchase.facts
    for f in res.facts:
        if f.pred != TOP:
            assert abstract_fact(f) in V, (name, f)


@common
@given(st.sampled_from(NAMES), st.integers(0, 10**6))
def test_chase_result_is_a_fixpoint(name, seed):
    p = sample_program(name, seed)
    res = run_chase(p, Mode.RESTRICTED, stop_on_bottom=False)
    if res.status is not Status.TERMINATED:
        return
    again = run_chase(Program(p.rules, res.facts.facts()), Mode.RESTRICTED, stop_on_bottom=False)
    assert again.facts == res.facts
    assert again.stats.steps == 0


@common
@given(st.sampled_from([n for n in NAMES if analysed(n)[2] is Verdict.YES]), st.integers(0, 10**6))
def test_restricted_chase_is_contained_in_oblivious_chase(name, seed):
    p = sample_program(name, seed)
    if p.egds:
        return
    obl = run_chase(p, Mode.OBLIVIOUS, stop_on_bottom=False)
    res = run_chase(p, Mode.RESTRICTED, stop_on_bottom=False)
    assert obl.status is Status.TERMINATED
    assert res.facts.facts() <= obl.facts.facts()


@common
@given(st.sampled_from(NAMES), st.integers(0, 10**6))
def test_rewrites_never_deepen(name, seed):
    res = run_chase(sample_program(name, seed), Mode.RESTRICTED)
    for t, u in res.rewrites.items():
        assert u.depth <= t.depth
        assert res.rewrites.resolve(u) == u


@pytest.mark.parametrize("name", NAMES)
def test_mfa_union_implies_rca(name):
    rules, _, mfa = analysed(name)
    if mfa is Verdict.YES:
        n = TBoxRules(rules).existential_count + 1
        assert check_rca(TBoxRules(rules), n).verdict is Verdict.YES
