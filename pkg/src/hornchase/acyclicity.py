"""Chase-termination acyclicity: MFA and its singularization variants, and RCA_n."""

from __future__ import annotations

import enum
import itertools
import logging
import time
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .chase import Budget, ChaseStats, Mode, Status, apply_tgds, run_chase
from .ontology import Ontology, tbox_rules
from .rules import EGD, TGD, Program, Rule, partition, predicates, with_top_rules
from .store import FactStore
from .terms import (
    BOT,
    EQ,
    STAR,
    TOP,
    Atom,
    Func,
    Term,
    Var,
    abstract_constants,
    max_nesting,
    replace_term,
    term_key,
)

log = logging.getLogger(__name__)


class Verdict(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"

    def __bool__(self):
        return self is Verdict.YES


ANALYSIS_BUDGET = Budget(max_depth=None)

_x, _y, _z = Var("x"), Var("y"), Var("z")
EQ_AXIOMS: Tuple[TGD, ...] = (
    TGD("eq_refl", (Atom(TOP, (_x,)),), (Atom(EQ, (_x, _x)),)),
    TGD("eq_sym", (Atom(EQ, (_x, _y)),), (Atom(EQ, (_y, _x)),)),
    TGD("eq_trans", (Atom(EQ, (_x, _z)), Atom(EQ, (_z, _y))), (Atom(EQ, (_x, _y)),)),
)


def critical_instance(rules: Iterable[Rule]) -> FactStore:
    """Every atom over the rules' predicates (Bot excepted) built from the star constant."""
    preds = predicates(rules)
    if preds:
        preds.setdefault(TOP, 1)
    return FactStore(Atom(p, (STAR,) * k) for p, k in preds.items() if p != BOT)


# -- singularization ----------------------------------------------------------


def _fresh(base: str, i: int, taken: set) -> str:
    name = f"{base}{i}"
    sep = "_"
    while name in taken:
        name = f"{base}{sep}{i}"
        sep += "_"
    return name


def singularizations(rule: Rule) -> List[TGD]:
    """All singularizations of a rule; EGD heads become Eq atoms.

    Each repeated body variable gets one fresh variable per occurrence; one of
    them is picked as pivot and the others are linked to it by Eq atoms.
    """
    occurrences: Dict[Var, List[Tuple[int, int]]] = {}
    for i, a in enumerate(rule.body):
        for j, t in enumerate(a.args):
            if isinstance(t, Var):
                occurrences.setdefault(t, []).append((i, j))
    taken = {v.name for v in occurrences}
    if isinstance(rule, TGD):
        taken |= {v.name for v in rule.existentials}
    repeated = [v for v, occ in occurrences.items() if len(occ) > 1]
    renamed = {}
    for v in repeated:
        names = []
        for k in range(1, len(occurrences[v]) + 1):
            n = _fresh(v.name, k, taken)
            taken.add(n)
            names.append(Var(n))
        renamed[v] = names

    body_args = [list(a.args) for a in rule.body]
    for v in repeated:
        for (i, j), nv in zip(occurrences[v], renamed[v]):
            body_args[i][j] = nv
    base_body = tuple(Atom(a.pred, tuple(args)) for a, args in zip(rule.body, body_args))

    if isinstance(rule, EGD):
        head = (Atom(EQ, (rule.lhs, rule.rhs)),)
    else:
        head = rule.head

    out = []
    choices = list(itertools.product(*(range(len(renamed[v])) for v in repeated)))
    for n, pivots in enumerate(choices):
        links = []
        sub = {}
        for v, p in zip(repeated, pivots):
            names = renamed[v]
            links += [Atom(EQ, (names[k], names[p])) for k in range(len(names)) if k != p]
            sub[v] = names[p]
        new_head = tuple(Atom(a.pred, tuple(sub.get(t, t) for t in a.args)) for a in head)
        rid = rule.id if len(choices) == 1 else f"{rule.id}_s{n}"
        out.append(TGD(rid, base_body + tuple(links), new_head))
    return out


def count_singularizations(rules: Iterable[Rule]) -> int:
    total = 1
    for r in rules:
        counts: Dict[Var, int] = {}
        for a in r.body:
            for t in a.args:
                if isinstance(t, Var):
                    counts[t] = counts.get(t, 0) + 1
        for c in counts.values():
            total *= c
    return total


@dataclass(frozen=True)
class SingularizedRuleSet:
    rules: Tuple[TGD, ...]

    def __iter__(self):
        return iter(self.rules)

    def __len__(self):
        return len(self.rules)


def singularization_union(rules: Iterable[Rule]) -> SingularizedRuleSet:
    out: List[TGD] = []
    seen = set()
    for r in rules:
        if isinstance(r, TGD) and r.id.startswith("top_"):
            continue
        for s in singularizations(r):
            if s not in seen:
                seen.add(s)
                out.append(s)
    out.extend(EQ_AXIOMS)
    return SingularizedRuleSet(tuple(out))


def axiomatize_equality(rules: Iterable[Rule]) -> List[TGD]:
    """Plain equality axiomatization: EGDs to Eq-headed TGDs, Eq axioms and replacement rules."""
    out: List[TGD] = []
    for r in rules:
        if isinstance(r, EGD):
            out.append(TGD(r.id, r.body, (Atom(EQ, (r.lhs, r.rhs)),)))
        else:
            out.append(r)
    out.extend(EQ_AXIOMS)
    for p, k in sorted(predicates(out).items()):
        if p == EQ:
            continue
        for i in range(k):
            xs = [Var(f"x{j}") for j in range(1, k + 1)]
            z = Var("z")
            new = list(xs)
            new[i] = z
            out.append(
                TGD(
                    f"repl_{p}_{i + 1}",
                    (Atom(p, tuple(xs)), Atom(EQ, (xs[i], z))),
                    (Atom(p, tuple(new)),),
                )
            )
    return out


# -- MFA ----------------------------------------------------------------------


@dataclass
class MfaResult:
    verdict: Verdict
    witness: Optional[Term] = None
    stats: ChaseStats = field(default_factory=ChaseStats)


def _cyclic_in(facts, n: int) -> Optional[Term]:
    found = [t for f in facts for t in f.args if isinstance(t, Func) and max_nesting(t) >= n + 1]
    return min(found, key=term_key) if found else None


def check_mfa(rules: Iterable[Rule], budget: Budget = ANALYSIS_BUDGET) -> MfaResult:
    """Oblivious chase over the critical instance, stopping at the first cyclic term."""
    rules = list(rules)
    if any(isinstance(r, EGD) for r in rules):
        raise ValueError("check_mfa needs equality-free TGDs; singularize or axiomatize first")
    rules = with_top_rules(rules)
    program = Program(rules, critical_instance(rules))
    res = run_chase(
        program,
        Mode.OBLIVIOUS,
        budget,
        stop_on_bottom=False,
        stop_when=lambda added: _cyclic_in(added, 1),
    )
    if res.witness is not None:
        return MfaResult(Verdict.NO, res.witness, res.stats)
    if res.status is Status.TERMINATED:
        return MfaResult(Verdict.YES, None, res.stats)
    return MfaResult(Verdict.UNKNOWN, None, res.stats)


def check_mfa_union(rules: Iterable[Rule], budget: Budget = ANALYSIS_BUDGET) -> MfaResult:
    return check_mfa(singularization_union(rules).rules, budget)


DEFAULT_SING_CAP = 4096


def check_mfa_variants(
    rules: Iterable[Rule],
    cap: int = DEFAULT_SING_CAP,
    budget: Budget = ANALYSIS_BUDGET,
    union: bool = True,
) -> Dict[str, Verdict]:
    """Verdicts for MFA-exists, MFA-forall (by enumeration up to ``cap``) and MFA-union."""
    rules = [r for r in rules if not (isinstance(r, TGD) and r.id.startswith("top_"))]
    out: Dict[str, Verdict] = {}
    if count_singularizations(rules) > cap:
        out["exists"] = out["forall"] = Verdict.UNKNOWN
    else:
        verdicts = []
        for choice in itertools.product(*(singularizations(r) for r in rules)):
            verdicts.append(check_mfa(list(choice) + list(EQ_AXIOMS), budget).verdict)
        out["exists"] = (
            Verdict.YES
            if Verdict.YES in verdicts
            else (Verdict.NO if all(v is Verdict.NO for v in verdicts) else Verdict.UNKNOWN)
        )
        out["forall"] = (
            Verdict.NO
            if Verdict.NO in verdicts
            else (Verdict.YES if all(v is Verdict.YES for v in verdicts) else Verdict.UNKNOWN)
        )
    if union:
        out["union"] = check_mfa_union(rules, budget).verdict
    return out


# -- restricted terms and the overchase ----------------------------------------


class TBoxRules:
    """The rule translation of a TBox, with its existential axioms indexed by rule id."""

    def __init__(self, rules: Iterable[Rule]):
        self.rules = with_top_rules(rules)
        exists, forall, egds = partition(self.rules)
        self.datalog = forall
        self.egds = egds
        self.existential: Dict[str, Tuple[TGD, str, str, str]] = {}
        for r in exists:
            self.existential[r.id] = (r,) + _existential_shape(r)

    @classmethod
    def of(cls, tbox) -> "TBoxRules":
        if isinstance(tbox, TBoxRules):
            return tbox
        if isinstance(tbox, Ontology):
            return cls(tbox_rules(tbox.tbox))
        tbox = list(tbox)
        if all(isinstance(r, (TGD, EGD)) for r in tbox):
            return cls(tbox)
        return cls(tbox_rules(tbox))

    @property
    def existential_count(self) -> int:
        return len(self.existential)


def _existential_shape(r: TGD) -> Tuple[str, str, str]:
    """Return (A, R, B) for a rule A(x) -> exists y. R(x,y) & B(y)."""
    ok = len(r.body) == 1 and len(r.head) == 2 and len(r.existentials) == 1
    if ok:
        (a,), y = r.body, r.existentials[0]
        x = a.args[0] if a.arity == 1 else None
        role = next((h for h in r.head if h.arity == 2), None)
        filler = next((h for h in r.head if h.arity == 1), None)
        ok = (
            isinstance(x, Var)
            and role is not None
            and filler is not None
            and role.args == (x, y)
            and filler.args == (y,)
        )
        if ok:
            return a.pred, role.pred, filler.pred
    raise ValueError(f"rule {r.id} is not of the form A(x) -> exists y. R(x,y) & B(y)")


class MalformedTerm(ValueError):
    pass


def term_instance(t: Term, tbox) -> FactStore:
    """Facts that must hold wherever the skolem term ``t`` was created."""
    ctx = TBoxRules.of(tbox)
    facts = []
    while isinstance(t, Func):
        entry = ctx.existential.get(t.fn.rule_id)
        if entry is None or len(t.args) != 1:
            raise MalformedTerm(f"{t} does not stem from an existential axiom")
        _, a, r, b = entry
        s = t.args[0]
        facts += [Atom(a, (s,)), Atom(r, (s, t)), Atom(b, (t,))]
        t = s
    return FactStore(facts)


def restricted_program(tbox, t: Term) -> Program:
    ctx = TBoxRules.of(tbox)
    return Program(tuple(ctx.datalog) + tuple(ctx.egds), term_instance(t, ctx).facts())


class RestrictedTermChecker:
    """Decides whether skolem terms are restricted, memoized per star-abstracted term."""

    def __init__(self, tbox, budget: Budget = ANALYSIS_BUDGET):
        self.ctx = TBoxRules.of(tbox)
        self.budget = budget
        self.cache: Dict[Term, bool] = {}

    def __call__(self, t: Term) -> bool:
        if not isinstance(t, Func) or len(t.args) != 1 or t.fn.rule_id not in self.ctx.existential:
            raise MalformedTerm(f"{t} is not a term created by an existential axiom")
        key = abstract_constants(t, STAR)
        hit = self.cache.get(key)
        if hit is None:
            hit = self.cache[key] = self._decide(key)
        return hit

    def _decide(self, t: Func) -> bool:
        _, _, role, filler = self.ctx.existential[t.fn.rule_id]
        s = t.args[0]
        res = run_chase(restricted_program(self.ctx, s), Mode.RESTRICTED, self.budget, stop_on_bottom=False)
        s = res.rewrites.resolve(s)
        return any(Atom(filler, (f.args[1],)) in res.facts for f in res.facts.with_term(role, 0, s))


def is_restricted(t: Term, tbox) -> bool:
    return RestrictedTermChecker(tbox)(t)


class OverchaseStatus(str, enum.Enum):
    COMPLETE = "complete"
    N_CYCLIC = "n-cyclic-witness"
    BUDGET_EXHAUSTED = "budget-exhausted"


@dataclass
class OverchaseResult:
    facts: FactStore
    status: OverchaseStatus
    witness: Optional[Term] = None
    restricted_cache: Dict[Term, bool] = field(default_factory=dict)
    rounds: int = 0


def _eq_rule(V: FactStore, eq_facts: Iterable[Atom]) -> set:
    new = set()
    for e in eq_facts:
        t, u = e.args
        if t == u or t.depth > u.depth:
            continue
        for p in V.predicates():
            if p == EQ:
                continue
            for pos in range(len(next(iter(V.with_pred(p))).args)):
                for f in list(V.with_term(p, pos, u)):
                    g = Atom(p, tuple(replace_term(a, u, t) for a in f.args))
                    if g not in V:
                        new.add(g)
    return new


def build_overchase(tbox, n: Optional[int] = None, budget: Budget = ANALYSIS_BUDGET) -> OverchaseResult:
    """Saturate the critical instance under the four overchase expansion rules.

    With ``n`` set, expansion stops at the first n-cyclic term.
    """
    start = time.monotonic()
    ctx = TBoxRules.of(tbox)
    restricted = RestrictedTermChecker(ctx, budget)
    V = critical_instance(ctx.rules)
    done_exists = set()
    rounds = 0

    def result(status, witness=None):
        return OverchaseResult(V, status, witness, restricted.cache, rounds)

    changed = True
    while changed:
        changed = False
        rounds += 1
        if budget.timeout is not None and time.monotonic() - start > budget.timeout:
            return result(OverchaseStatus.BUDGET_EXHAUSTED)
        # forall-rule
        while True:
            new = apply_tgds(ctx.datalog, V, Mode.RESTRICTED)
            if not new:
                break
            V.update(new)
            changed = True
        # equality-rule: record equalities as Eq facts, no merging
        new = set()
        for egd in ctx.egds:
            for s in V.match(egd.body):
                a, b = s[egd.lhs], s[egd.rhs]
                new.add(Atom(EQ, (a, b)))
                new.add(Atom(EQ, (b, a)))
        if V.update(new):
            changed = True
        # Eq-rule
        while True:
            new = _eq_rule(V, list(V.with_pred(EQ)))
            if not new:
                break
            V.update(new)
            changed = True
        # exists-rule
        created = set()
        for rid in sorted(ctx.existential):
            rule, a, r, b = ctx.existential[rid]
            for f in sorted(V.with_pred(a), key=lambda f: term_key(f.args[0])):
                s = f.args[0]
                if (rid, s) in done_exists:
                    continue
                done_exists.add((rid, s))
                t = Func(rule_fn(rule), (s,))
                if restricted(t):
                    continue
                if budget.max_depth is not None and t.depth > budget.max_depth:
                    return result(OverchaseStatus.BUDGET_EXHAUSTED)
                created.add(Atom(r, (s, t)))
                created.add(Atom(b, (t,)))
        if created:
            V.update(created)
            changed = True
            if n is not None:
                w = _cyclic_in(created, n)
                if w is not None:
                    return result(OverchaseStatus.N_CYCLIC, w)
        if budget.max_facts is not None and len(V) > budget.max_facts:
            return result(OverchaseStatus.BUDGET_EXHAUSTED)
    return result(OverchaseStatus.COMPLETE)


def rule_fn(rule: TGD):
    from .terms import SkolemFn

    return SkolemFn(rule.id, rule.existentials[0].name)


@dataclass
class RcaResult:
    verdict: Verdict
    witness: Optional[Term] = None
    overchase: Optional[OverchaseResult] = None


def check_rca(tbox, n: int, budget: Budget = ANALYSIS_BUDGET) -> RcaResult:
    if n < 1:
        raise ValueError("n must be >= 1")
    oc = build_overchase(tbox, n, budget)
    if oc.status is OverchaseStatus.COMPLETE:
        w = _cyclic_in(oc.facts, n)
        if w is None:
            return RcaResult(Verdict.YES, None, oc)
        return RcaResult(Verdict.NO, w, oc)
    if oc.status is OverchaseStatus.N_CYCLIC:
        return RcaResult(Verdict.NO, oc.witness, oc)
    return RcaResult(Verdict.UNKNOWN, None, oc)


# -- reports --------------------------------------------------------------------


@dataclass
class AcyclicityReport:
    name: str
    axioms: int
    existential_axioms: int
    mfa_union: Optional[Verdict] = None
    rca: Dict[int, Verdict] = field(default_factory=dict)
    mfa: Optional[Verdict] = None
    mfa_exists: Optional[Verdict] = None
    mfa_forall: Optional[Verdict] = None
    witnesses: List[str] = field(default_factory=list)
    millis: float = 0.0
    error: Optional[str] = None

    def to_json(self) -> dict:
        out = {
            "name": self.name,
            "axioms": self.axioms,
            "existential_axioms": self.existential_axioms,
        }
        if self.mfa_union is not None:
            out["mfa_union"] = self.mfa_union.value
        if self.rca:
            out["rca"] = {str(k): v.value for k, v in sorted(self.rca.items())}
        for key in ("mfa", "mfa_exists", "mfa_forall"):
            v = getattr(self, key)
            if v is not None:
                out[key] = v.value
        out["witnesses"] = list(self.witnesses)
        out["millis"] = round(self.millis, 3)
        if self.error is not None:
            out["error"] = self.error
        return out


ALL_CHECKS = ("mfa", "mfa-union", "mfa-exists", "mfa-forall", "rca")


def analyze(
    o: Ontology,
    checks: Sequence[str] = ("mfa-union", "rca"),
    ns: Sequence[int] = (1,),
    budget: Budget = ANALYSIS_BUDGET,
    cap: int = DEFAULT_SING_CAP,
) -> AcyclicityReport:
    start = time.perf_counter()
    rules = tbox_rules(o.tbox)
    rep = AcyclicityReport(o.name, len(o.tbox), len(o.existential_axioms))
    witnesses = []
    if "mfa" in checks:
        r = check_mfa(axiomatize_equality(rules), budget)
        rep.mfa = r.verdict
        witnesses.append(r.witness)
    if "mfa-union" in checks:
        r = check_mfa_union(rules, budget)
        rep.mfa_union = r.verdict
        witnesses.append(r.witness)
    if "mfa-exists" in checks or "mfa-forall" in checks:
        v = check_mfa_variants(rules, cap, budget, union=False)
        if "mfa-exists" in checks:
            rep.mfa_exists = v["exists"]
        if "mfa-forall" in checks:
            rep.mfa_forall = v["forall"]
    if "rca" in checks:
        ctx = TBoxRules(rules)
        for n in sorted(set(ns)):
            r = check_rca(ctx, n, budget)
            rep.rca[n] = r.verdict
            witnesses.append(r.witness)
    rep.witnesses = sorted({str(w) for w in witnesses if w is not None})
    rep.millis = (time.perf_counter() - start) * 1000
    return rep
