"""Conjunctive queries over materialized chase results."""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

from .acyclicity import Verdict
from .chase import DEFAULT_BUDGET, Budget, ChaseResult, Mode, Status, run_chase
from .ontology import Ontology, build_program
from .store import FactStore
from .terms import BOT, Atom, Constant, Var


class QueryParseError(ValueError):
    pass


@dataclass(frozen=True)
class ConjunctiveQuery:
    answer_vars: Tuple[Var, ...]
    body: Tuple[Atom, ...]

    def __post_init__(self):
        if not self.body:
            raise QueryParseError("query body must be non-empty")
        body_vars = {v for a in self.body for v in a.variables()}
        for a in self.body:
            if not all(isinstance(t, Var) for t in a.args):
                raise QueryParseError(f"query atoms may only contain variables: {a}")
        missing = [v.name for v in self.answer_vars if v not in body_vars]
        if missing:
            raise QueryParseError(f"answer variables not in body: {', '.join(missing)}")

    @property
    def is_boolean(self) -> bool:
        return not self.answer_vars

    def __str__(self):
        head = ",".join(v.name for v in self.answer_vars)
        return f"q({head}) <- {', '.join(map(str, self.body))}"


@dataclass(frozen=True)
class AnswerSet:
    tuples: frozenset
    complete: bool = True

    def __bool__(self):
        return bool(self.tuples)

    def __len__(self):
        return len(self.tuples)

    def __contains__(self, item):
        return item in self.tuples

    def sorted(self):
        return sorted(self.tuples, key=lambda tup: tuple(c.name for c in tup))


_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_HEAD = re.compile(rf"^\s*({_NAME})\s*\(\s*((?:{_NAME}\s*(?:,\s*{_NAME}\s*)*)?)\)\s*<-\s*(.+?)\s*$")
_ATOM = re.compile(rf"\s*({_NAME})\s*\(\s*({_NAME}\s*(?:,\s*{_NAME}\s*)*)\)\s*(,|$)")


def parse_query(text: str, signature: Optional[Dict[str, int]] = None) -> ConjunctiveQuery:
    """Parse ``q(x,...) <- P(x), R(x,y)``; ``signature`` maps predicate to arity."""
    if "=" in text.replace("<-", "") or "≈" in text:
        raise QueryParseError("equality atoms are not allowed in queries")
    m = _HEAD.match(text)
    if not m:
        raise QueryParseError(f"malformed query: {text!r}")
    head = [v.strip() for v in m.group(2).split(",") if v.strip()]
    rest = m.group(3)
    atoms = []
    pos = 0
    while pos < len(rest):
        am = _ATOM.match(rest, pos)
        if not am:
            raise QueryParseError(f"malformed atom at {rest[pos:]!r}")
        pred = am.group(1)
        args = tuple(Var(a.strip()) for a in am.group(2).split(","))
        if signature is not None:
            if pred not in signature:
                raise QueryParseError(f"unknown predicate {pred}")
            if signature[pred] != len(args):
                raise QueryParseError(f"{pred} has arity {signature[pred]}, got {len(args)}")
        atoms.append(Atom(pred, args))
        pos = am.end()
        if am.group(3) == "":
            break
    if len(set(head)) != len(head):
        raise QueryParseError("repeated answer variable")
    return ConjunctiveQuery(tuple(Var(v) for v in head), tuple(atoms))


def evaluate_cq(q: ConjunctiveQuery, store: FactStore, complete: bool = True) -> AnswerSet:
    """Answer tuples of constants; existential variables may bind to any term."""
    out = set()
    if q.is_boolean:
        if next(store.match(q.body), None) is not None:
            out.add(())
        return AnswerSet(frozenset(out), complete)
    for s in store.match(q.body):
        tup = tuple(s[v] for v in q.answer_vars)
        if all(isinstance(t, Constant) for t in tup):
            out.add(tup)
    return AnswerSet(frozenset(out), complete)


@functools.lru_cache(maxsize=32)
def materialize(o: Ontology, mode=Mode.RESTRICTED, budget: Budget = DEFAULT_BUDGET) -> ChaseResult:
    return run_chase(build_program(o), Mode(mode), budget)


def answers(o: Ontology, q: ConjunctiveQuery, mode=Mode.RESTRICTED, budget: Budget = DEFAULT_BUDGET) -> AnswerSet:
    res = materialize(o, Mode(mode), budget)
    return evaluate_cq(q, res.facts, complete=res.status is not Status.BUDGET_EXHAUSTED)


def entails(o: Ontology, q: ConjunctiveQuery, mode=Mode.RESTRICTED, budget: Budget = DEFAULT_BUDGET) -> Verdict:
    res = materialize(o, Mode(mode), budget)
    if res.unsatisfiable or any(f.pred == BOT for f in res.facts):
        return Verdict.YES
    if next(res.facts.match(q.body), None) is not None:
        return Verdict.YES
    if res.status is Status.BUDGET_EXHAUSTED:
        return Verdict.UNKNOWN
    return Verdict.NO
