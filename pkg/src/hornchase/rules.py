"""Existential rules: TGDs, EGDs, programs and skolemization."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, List, Tuple, Union

from .terms import TOP, Atom, Func, SkolemFn, Var, apply_substitution


def _ordered_vars(atoms: Iterable[Atom]) -> Tuple[Var, ...]:
    seen = {}
    for a in atoms:
        for v in a.variables():
            seen.setdefault(v, None)
    return tuple(seen)


@dataclass(frozen=True)
class TGD:
    id: str
    body: Tuple[Atom, ...]
    head: Tuple[Atom, ...]

    def __post_init__(self):
        if not self.body or not self.head:
            raise ValueError(f"rule {self.id}: body and head must be non-empty")
        object.__setattr__(self, "body", tuple(self.body))
        object.__setattr__(self, "head", tuple(self.head))

    @property
    def body_vars(self) -> Tuple[Var, ...]:
        return _ordered_vars(self.body)

    @property
    def frontier(self) -> Tuple[Var, ...]:
        head_vars = set(_ordered_vars(self.head))
        return tuple(v for v in self.body_vars if v in head_vars)

    @property
    def existentials(self) -> Tuple[Var, ...]:
        body = set(self.body_vars)
        return tuple(v for v in _ordered_vars(self.head) if v not in body)

    @property
    def is_existential(self) -> bool:
        return bool(self.existentials)

    def __str__(self):
        head = ", ".join(map(str, self.head))
        ex = self.existentials
        if ex:
            head = f"EXISTS {','.join(map(str, ex))}. {head}"
        return f"{head} <- {', '.join(map(str, self.body))}"


@dataclass(frozen=True)
class EGD:
    id: str
    body: Tuple[Atom, ...]
    lhs: Var
    rhs: Var

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        vs = set(_ordered_vars(self.body))
        if self.lhs not in vs or self.rhs not in vs:
            raise ValueError(f"rule {self.id}: equated variables must occur in the body")

    @property
    def body_vars(self) -> Tuple[Var, ...]:
        return _ordered_vars(self.body)

    def __str__(self):
        return f"{self.lhs} = {self.rhs} <- {', '.join(map(str, self.body))}"


Rule = Union[TGD, EGD]


@dataclass(frozen=True)
class SkolemizedTGD:
    base: TGD
    head: Tuple[Atom, ...]

    @property
    def id(self):
        return self.base.id

    @property
    def body(self):
        return self.base.body

    def __str__(self):
        return f"{', '.join(map(str, self.head))} <- {', '.join(map(str, self.body))}"


def skolem_term(rule: TGD, y: Var) -> Func:
    return Func(SkolemFn(rule.id, y.name), rule.frontier)


def skolemize(rule: TGD) -> SkolemizedTGD:
    sk = {y: skolem_term(rule, y) for y in rule.existentials}
    return SkolemizedTGD(rule, tuple(apply_substitution(a, sk) for a in rule.head))


def partition(rules: Iterable[Rule]) -> Tuple[List[TGD], List[TGD], List[EGD]]:
    """Split into (existential TGDs, datalog TGDs, EGDs), keeping input order."""
    exists, forall, egds = [], [], []
    for r in rules:
        if isinstance(r, EGD):
            egds.append(r)
        elif r.is_existential:
            exists.append(r)
        else:
            forall.append(r)
    return exists, forall, egds


def predicates(rules: Iterable[Rule], facts: Iterable[Atom] = ()) -> dict:
    """Map predicate name -> arity for everything mentioned."""
    out = {}
    for r in rules:
        atoms = list(r.body) + (list(r.head) if isinstance(r, TGD) else [])
        for a in atoms:
            out.setdefault(a.pred, a.arity)
    for f in facts:
        out.setdefault(f.pred, f.arity)
    return out


def top_rule(pred: str, arity: int) -> TGD:
    xs = tuple(Var(f"x{i}") for i in range(1, arity + 1))
    return TGD(f"top_{pred}", (Atom(pred, xs),), tuple(Atom(TOP, (x,)) for x in xs))


def top_rules_for(preds: dict) -> List[TGD]:
    return [top_rule(p, k) for p, k in sorted(preds.items()) if p != TOP and k > 0]


@dataclass(frozen=True)
class Program:
    rules: Tuple[Rule, ...]
    instance: FrozenSet[Atom] = frozenset()
    _parts: tuple = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        object.__setattr__(self, "instance", frozenset(self.instance))
        object.__setattr__(self, "_parts", partition(self.rules))

    @property
    def existential_rules(self) -> List[TGD]:
        return self._parts[0]

    @property
    def datalog_rules(self) -> List[TGD]:
        return self._parts[1]

    @property
    def egds(self) -> List[EGD]:
        return self._parts[2]


def add_top_rules(p: Program) -> Program:
    preds = predicates(p.rules, p.instance)
    have = {r.id for r in p.rules}
    extra = [r for r in top_rules_for(preds) if r.id not in have]
    if not extra:
        return p
    return Program(p.rules + tuple(extra), p.instance)


def with_top_rules(rules: Iterable[Rule]) -> List[Rule]:
    rules = list(rules)
    return list(add_top_rules(Program(rules)).rules)
