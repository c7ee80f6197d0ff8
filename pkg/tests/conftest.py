import itertools
import random
from pathlib import Path

import pytest
from hypothesis import strategies as st

from hornchase.ontology import load_ontology, parse_ontology
from hornchase.rules import predicates
from hornchase.terms import BOT, EQ, STAR, TOP, Atom, Constant, Func, SkolemFn, Var, fact

ROOT = Path(__file__).resolve().parent.parent
CORPUS = ROOT / "corpus"

FILM_TEXT = """\
TBOX:
Film SUBCLASSOF SOME isProdBy . Producer
Producer SUBCLASSOF SOME prod . Film
INV(isProdBy) SUBROLEOF prod
INV(prod) SUBROLEOF isProdBy
ABOX:
Film(AI)
"""

AI = Constant("AI")
F_RHO = SkolemFn("r1", "y")
F_UPS = SkolemFn("r2", "y")


def f_rho(t):
    return Func(F_RHO, (t,))


def f_ups(t):
    return Func(F_UPS, (t,))


@pytest.fixture
def film():
    return parse_ontology(FILM_TEXT, name="film")


def corpus_files():
    return sorted(CORPUS.glob("*.ont"))


def load_corpus():
    return [load_ontology(p) for p in corpus_files()]


# -- oracles: deliberately naive, sharing nothing with the engine --------------


def brute_force_matches(body, facts):
    """All substitutions (as frozensets of items) mapping body into facts."""
    facts = set(facts)
    vs = sorted({v for a in body for v in a.variables()}, key=lambda v: v.name)
    terms = sorted({t for f in facts for t in f.args}, key=str)
    out = set()
    for values in itertools.product(terms, repeat=len(vs)):
        s = dict(zip(vs, values))
        if all(Atom(a.pred, tuple(s.get(t, t) for t in a.args)) in facts for a in body):
            out.add(frozenset(s.items()))
    return out


def naive_datalog(rules, facts):
    facts = set(facts)
    while True:
        new = set()
        for r in rules:
            for s in brute_force_matches(r.body, facts):
                s = dict(s)
                for h in r.head:
                    new.add(Atom(h.pred, tuple(s[t] for t in h.args)))
        if new <= facts:
            return facts
        facts |= new


def oracle_order_key(t):
    if t is STAR:
        return (0, "", "")
    if isinstance(t, Constant):
        return (0, "c", t.name)
    return (t.depth, "f", t.fn.rule_id, t.fn.var, tuple(oracle_order_key(a) for a in t.args))


def _all_subterms(t):
    out = {t}
    if isinstance(t, Func):
        for a in t.args:
            out |= _all_subterms(a)
    return out


def naive_congruence_rewrite(egds, facts):
    """Repeatedly: collect EGD pairs by brute force, close under congruence, rewrite."""
    facts = set(facts)
    log = {}
    while True:
        pairs = []
        for r in egds:
            for s in brute_force_matches(r.body, facts):
                s = dict(s)
                if s[r.lhs] != s[r.rhs]:
                    pairs.append((s[r.lhs], s[r.rhs]))
        if not pairs:
            return facts, log
        terms = set()
        for f in facts:
            for t in f.args:
                terms |= _all_subterms(t)
        classes = {t: {t} for t in terms}

        def merge(a, b):
            if classes[a] is classes[b]:
                return False
            joined = classes[a] | classes[b]
            for t in joined:
                classes[t] = joined
            return True

        for a, b in pairs:
            merge(a, b)
        changed = True
        while changed:
            changed = False
            funcs = [t for t in terms if isinstance(t, Func)]
            for s, t in itertools.combinations(funcs, 2):
                if s.fn == t.fn and all(classes[x] is classes[y] for x, y in zip(s.args, t.args)):
                    changed |= merge(s, t)

        def canon(t):
            r = min(classes[t], key=oracle_order_key) if t in classes else t
            if isinstance(r, Func):
                r = Func(r.fn, tuple(canon(a) for a in r.args))
            return r

        mapping = {t: canon(t) for t in terms if canon(t) != t}
        for k in list(log):
            log[k] = mapping.get(log[k], log[k])
        log.update(mapping)
        facts = {Atom(f.pred, tuple(mapping.get(t, t) for t in f.args)) for f in facts}


# -- random instances -------------------------------------------------------------


def random_abox(rng, preds, max_facts=50, max_consts=6):
    preds = {p: k for p, k in preds.items() if p not in (TOP, BOT, EQ)}
    if not preds:
        return set()
    names = sorted(preds)
    consts = [f"c{i}" for i in range(rng.randint(1, max_consts))]
    out = set()
    for _ in range(rng.randint(1, max_facts)):
        p = rng.choice(names)
        out.add(fact(p, *[rng.choice(consts) for _ in range(preds[p])]))
    return out


def tbox_signature(rules):
    return predicates(rules)


constants = st.sampled_from([Constant(n) for n in "abcde"]) | st.just(STAR)
skolem_fns = st.builds(SkolemFn, st.sampled_from(["r1", "r2", "r3"]), st.sampled_from(["y", "z"]))
ground_terms = st.recursive(
    constants,
    lambda children: st.builds(lambda fn, a: Func(fn, (a,)), skolem_fns, children),
    max_leaves=6,
)
variables = st.sampled_from([Var(n) for n in ("x", "y", "z", "w")])


def seeded(seed):
    return random.Random(seed)


# -- acceptance reporting ---------------------------------------------------------

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    entry = _CRITERIA.setdefault(number, {"title": title, "failed": [], "passed": 0})
    if report.failed:
        entry["failed"].append(item.name)
    elif report.when == "call" and report.passed:
        entry["passed"] += 1


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        e = _CRITERIA[number]
        status = "FAIL" if e["failed"] else "PASS"
        line = f"criterion {number:>2}: {status}  {e['title']}"
        if e["failed"]:
            line += f"  (failing: {', '.join(e['failed'])})"
        terminalreporter.write_line(line)
