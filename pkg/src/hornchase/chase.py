"""Oblivious and restricted chase with prioritized, set-at-a-time rule application."""

from __future__ import annotations

import enum
import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, Iterable, List, Optional, Tuple

from .rules import EGD, TGD, Program, skolemize
from .store import FactStore
from .terms import BOT, Atom, Func, Term, apply_substitution, fact_key, min_term, subterms, term_key

log = logging.getLogger(__name__)


class Mode(str, enum.Enum):
    RESTRICTED = "restricted"
    OBLIVIOUS = "oblivious"


class Status(str, enum.Enum):
    TERMINATED = "terminated"
    BUDGET_EXHAUSTED = "budget-exhausted"
    # run ended on purpose before a fixpoint (bottom derived, or a caller's stop condition)
    STOPPED = "stopped"


@dataclass(frozen=True)
class Budget:
    max_facts: Optional[int] = 10**7
    max_depth: Optional[int] = 20
    max_steps: Optional[int] = None
    timeout: Optional[float] = None

    def __post_init__(self):
        for name in ("max_facts", "max_depth", "max_steps", "timeout"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"{name} must be positive")


DEFAULT_BUDGET = Budget()


class CongruenceClasses:
    """Union-find over ground terms closed under function congruence.

    The representative of a class is its least member in the canonical term
    order, so rewriting never increases depth.
    """

    def __init__(self, terms: Iterable[Term] = ()):
        self._parent: Dict[Term, Term] = {}
        self._best: Dict[Term, Term] = {}
        self._funcs: List[Func] = []
        for t in terms:
            self.add(t)

    def add(self, t: Term):
        for u in subterms(t):
            if u not in self._parent:
                self._parent[u] = u
                self._best[u] = u
                if isinstance(u, Func):
                    self._funcs.append(u)

    def find(self, t: Term) -> Term:
        root = t
        while self._parent[root] != root:
            root = self._parent[root]
        while self._parent[t] != root:
            self._parent[t], t = root, self._parent[t]
        return root

    def union(self, a: Term, b: Term) -> bool:
        self.add(a)
        self.add(b)
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return False
        self._parent[ra] = rb
        if term_key(self._best[ra]) < term_key(self._best[rb]):
            self._best[rb] = self._best[ra]
        return True

    def close(self):
        """Merge f(s1..sn) and f(t1..tn) whenever every si ~ ti."""
        changed = True
        while changed:
            changed = False
            table: Dict[tuple, Func] = {}
            for t in self._funcs:
                sig = (t.fn, tuple(self.find(a) for a in t.args))
                other = table.setdefault(sig, t)
                if other is not t and self.union(other, t):
                    changed = True

    def representative(self, t: Term) -> Term:
        if t not in self._parent:
            return t
        return self._best[self.find(t)]

    def canonical(self, t: Term) -> Term:
        r = self.representative(t)
        if isinstance(r, Func):
            args = tuple(self.canonical(a) for a in r.args)
            if args != r.args:
                r = Func(r.fn, args)
        return r

    def same(self, a: Term, b: Term) -> bool:
        if a == b:
            return True
        if a not in self._parent or b not in self._parent:
            return False
        return self.find(a) == self.find(b)

    def terms(self):
        return list(self._parent)


class RewriteLog(dict):
    """Replaced term -> its current representative; kept idempotent."""

    def compose(self, mapping: Dict[Term, Term]):
        for k, v in self.items():
            if v in mapping:
                self[k] = mapping[v]
        for k, v in mapping.items():
            if k != v:
                self[k] = v

    def resolve(self, t: Term) -> Term:
        return self.get(t, t)


@dataclass
class ChaseStats:
    steps: int = 0
    facts: int = 0
    max_depth: int = 0
    seconds: float = 0.0
    egd_steps: int = 0
    datalog_steps: int = 0
    existential_steps: int = 0


@dataclass
class ChaseResult:
    facts: FactStore
    status: Status
    unsatisfiable: bool
    rewrites: RewriteLog = field(default_factory=RewriteLog)
    stats: ChaseStats = field(default_factory=ChaseStats)
    witness: Optional[Term] = None

    @property
    def terminated(self) -> bool:
        return self.status is Status.TERMINATED


@dataclass
class StepOutcome:
    kind: str  # "egd", "datalog", "existential" or "fixpoint"
    store: FactStore
    new_facts: List[Atom] = field(default_factory=list)
    rewrites: Dict[Term, Term] = field(default_factory=dict)

    @property
    def is_fixpoint(self) -> bool:
        return self.kind == "fixpoint"


_SKOLEM_CACHE: Dict[TGD, tuple] = {}


def _skolem_head(rule: TGD) -> tuple:
    head = _SKOLEM_CACHE.get(rule)
    if head is None:
        head = _SKOLEM_CACHE[rule] = skolemize(rule).head
    return head


def apply_tgd(rule: TGD, store: FactStore, mode=Mode.RESTRICTED, delta: Optional[FactStore] = None) -> set:
    """Consequences of ``rule`` on ``store`` that are not yet in it."""
    mode = Mode(mode)
    head = _skolem_head(rule)
    check = mode is Mode.RESTRICTED and rule.is_existential
    frontier = rule.frontier
    out = set()
    for s in list(store.match(rule.body, delta=delta)):
        if check:
            partial = {v: s[v] for v in frontier}
            if next(store.match(rule.head, init=partial), None) is not None:
                continue
        for h in head:
            f = apply_substitution(h, s)
            if f not in store:
                out.add(f)
    return out


def apply_tgds(rules: Iterable[TGD], store: FactStore, mode=Mode.RESTRICTED, delta=None) -> set:
    out = set()
    for r in rules:
        out |= apply_tgd(r, store, mode, delta)
    return out


def egd_pairs(egds: Iterable[EGD], store: FactStore) -> List[Tuple[Term, Term]]:
    pairs = []
    for r in egds:
        for s in store.match(r.body):
            a, b = s[r.lhs], s[r.rhs]
            if a != b:
                pairs.append((a, b))
    return pairs


def merge_terms(store: FactStore, pairs) -> Tuple[FactStore, Dict[Term, Term]]:
    """Rewrite ``store`` modulo the least congruence containing ``pairs``."""
    cc = CongruenceClasses()
    for f in store:
        for t in f.args:
            cc.add(t)
    for a, b in pairs:
        cc.union(a, b)
    cc.close()
    mapping = {}
    for t in cc.terms():
        c = cc.canonical(t)
        if c != t:
            mapping[t] = c
    new = FactStore(
        Atom(f.pred, tuple(mapping.get(t, t) for t in f.args)) for f in store
    )
    return new, mapping


def apply_egds(egds: Iterable[EGD], store: FactStore) -> Tuple[FactStore, RewriteLog]:
    """Apply the EGDs until no body match equates two distinct terms."""
    egds = list(egds)
    rewrites = RewriteLog()
    while True:
        pairs = egd_pairs(egds, store)
        if not pairs:
            return store, rewrites
        store, mapping = merge_terms(store, pairs)
        rewrites.compose(mapping)


def chase_step(p: Program, store: FactStore, mode=Mode.RESTRICTED) -> StepOutcome:
    """One step of the chase sequence, with EGDs before datalog rules before existential rules."""
    mode = Mode(mode)
    if p.egds:
        new, rewrites = apply_egds(p.egds, store)
        if rewrites:
            return StepOutcome("egd", new, rewrites=dict(rewrites))
    new_facts = apply_tgds(p.datalog_rules, store, mode)
    kind = "datalog"
    if not new_facts:
        new_facts = apply_tgds(p.existential_rules, store, mode)
        kind = "existential"
    if not new_facts:
        return StepOutcome("fixpoint", store)
    out = FactStore(store)
    added = out.update(sorted(new_facts, key=fact_key))
    return StepOutcome(kind, out, added)


def _max_depth(facts) -> int:
    return max((t.depth for f in facts for t in f.args), default=0)


class Chase:
    """Stateful driver for a chase sequence with delta tracking.

    Facts added since a rule group was last evaluated form its delta; any EGD
    rewrite resets both deltas to the whole store.
    """

    def __init__(self, program: Program, mode=Mode.RESTRICTED):
        self.program = program
        self.mode = Mode(mode)
        self.store = FactStore(program.instance)
        self.rewrites = RewriteLog()
        self.stats = ChaseStats()
        self._delta_forall: Optional[FactStore] = None  # None means everything
        self._delta_exists: Optional[FactStore] = None

    def _note(self, added):
        for attr in ("_delta_forall", "_delta_exists"):
            d = getattr(self, attr)
            if d is not None:
                d.update(added)

    def propose(self) -> StepOutcome:
        """Compute the next step without committing it."""
        p, store = self.program, self.store
        if p.egds:
            pairs = egd_pairs(p.egds, store)
            if pairs:
                new, mapping = merge_terms(store, pairs)
                return StepOutcome("egd", new, rewrites=mapping)
        new = apply_tgds(p.datalog_rules, store, self.mode, self._delta_forall)
        if new:
            return StepOutcome("datalog", store, sorted(new, key=fact_key))
        self._delta_forall = FactStore()
        new = apply_tgds(p.existential_rules, store, self.mode, self._delta_exists)
        if new:
            return StepOutcome("existential", store, sorted(new, key=fact_key))
        self._delta_exists = FactStore()
        return StepOutcome("fixpoint", store)

    def commit(self, step: StepOutcome) -> List[Atom]:
        self.stats.steps += 1
        if step.kind == "egd":
            self.stats.egd_steps += 1
            self.store = step.store
            self.rewrites.compose(step.rewrites)
            self._delta_forall = self._delta_exists = None
            return []
        if step.kind == "datalog":
            self.stats.datalog_steps += 1
            self._delta_forall = FactStore()
        else:
            self.stats.existential_steps += 1
            self._delta_exists = FactStore()
        added = self.store.update(step.new_facts)
        self._note(added)
        return added


def run_chase(
    p: Program,
    mode=Mode.RESTRICTED,
    budget: Budget = DEFAULT_BUDGET,
    stop_on_bottom: bool = True,
    stop_when: Optional[Callable[[List[Atom]], Optional[Term]]] = None,
) -> ChaseResult:
    """Run the chase to a fixpoint or until a budget is exhausted.

    ``stop_when`` is called with the facts added by each step; a non-None
    return value ends the run with status STOPPED and is kept as the witness.
    A step that would exceed ``max_depth`` or ``max_facts`` is not committed.
    A sequence that revisits a store after an EGD step can never reach a
    fixpoint; it is reported as BUDGET_EXHAUSTED.
    """
    start = time.monotonic()
    chase = Chase(p, mode)
    status = Status.TERMINATED
    witness = None
    depth = _max_depth(chase.store)
    after_egd = set()
    unsat = any(f.pred == BOT for f in chase.store)
    if stop_when is not None and len(chase.store):
        witness = stop_when(list(chase.store))
    while not (witness is not None or (unsat and stop_on_bottom)):
        if budget.max_steps is not None and chase.stats.steps >= budget.max_steps:
            status = Status.BUDGET_EXHAUSTED
            break
        if budget.timeout is not None and time.monotonic() - start > budget.timeout:
            status = Status.BUDGET_EXHAUSTED
            break
        step = chase.propose()
        if step.is_fixpoint:
            break
        if step.kind != "egd":
            d = _max_depth(step.new_facts)
            if budget.max_depth is not None and d > budget.max_depth:
                status = Status.BUDGET_EXHAUSTED
                break
            if budget.max_facts is not None and len(chase.store) + len(step.new_facts) > budget.max_facts:
                status = Status.BUDGET_EXHAUSTED
                break
            depth = max(depth, d)
        added = chase.commit(step)
        if step.kind == "egd":
            state = chase.store.facts()
            if state in after_egd:
                log.info("chase revisits a store after %d steps; no fixpoint is reachable", chase.stats.steps)
                status = Status.BUDGET_EXHAUSTED
                break
            after_egd.add(state)
        if any(f.pred == BOT for f in added):
            unsat = True
        if stop_when is not None and added:
            witness = stop_when(added)
    if status is Status.TERMINATED and (witness is not None or (unsat and stop_on_bottom)):
        status = Status.STOPPED
        # a bottom fact found exactly at the fixpoint still counts as terminated
        if witness is None and chase.propose().is_fixpoint:
            status = Status.TERMINATED
    if any(f.pred == BOT for f in chase.store):
        unsat = True
    stats = chase.stats
    stats.facts = len(chase.store)
    stats.max_depth = _max_depth(chase.store)
    stats.seconds = time.monotonic() - start
    log.debug("chase %s after %d steps, %d facts", status.value, stats.steps, stats.facts)
    return ChaseResult(chase.store, status, unsat, chase.rewrites, stats, witness)


def format_fact_tsv(f: Atom) -> str:
    return "\t".join([f.pred] + [str(t) for t in f.args])


def dump_facts(facts: Iterable[Atom], include_top: bool = True) -> str:
    from .terms import TOP

    rows = sorted((f for f in facts if include_top or f.pred != TOP), key=fact_key)
    return "".join(format_fact_tsv(f) + "\n" for f in rows)


__all__ = [
    "Budget",
    "Chase",
    "ChaseResult",
    "ChaseStats",
    "CongruenceClasses",
    "DEFAULT_BUDGET",
    "Mode",
    "RewriteLog",
    "Status",
    "StepOutcome",
    "apply_egds",
    "apply_tgd",
    "chase_step",
    "dump_facts",
    "merge_terms",
    "min_term",
    "run_chase",
]
