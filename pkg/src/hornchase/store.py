"""Indexed fact storage and conjunctive pattern matching."""

from __future__ import annotations

from collections import defaultdict
from typing import Dict, Iterable, Iterator, List, Optional, Sequence

from .terms import TOP, Atom, Func, Substitution, Var, fact_key


class FactStore:
    """A set of facts indexed by predicate and by (predicate, position, term)."""

    def __init__(self, facts: Iterable[Atom] = ()):
        self._facts = set()
        self._by_pred: Dict[str, set] = defaultdict(set)
        self._by_pos: Dict[tuple, set] = defaultdict(set)
        self.update(facts)

    def add(self, f: Atom) -> bool:
        if f in self._facts:
            return False
        self._facts.add(f)
        self._by_pred[f.pred].add(f)
        for i, t in enumerate(f.args):
            self._by_pos[(f.pred, i, t)].add(f)
        return True

    def update(self, facts: Iterable[Atom]) -> List[Atom]:
        return [f for f in facts if self.add(f)]

    def __contains__(self, f) -> bool:
        return f in self._facts

    def __len__(self) -> int:
        return len(self._facts)

    def __iter__(self) -> Iterator[Atom]:
        return iter(self._facts)

    def __eq__(self, other):
        if isinstance(other, FactStore):
            return self._facts == other._facts
        if isinstance(other, (set, frozenset)):
            return self._facts == other
        return NotImplemented

    def __repr__(self):
        return f"FactStore({len(self)} facts)"

    def facts(self) -> frozenset:
        return frozenset(self._facts)

    def with_pred(self, pred: str) -> set:
        return self._by_pred.get(pred, set())

    def with_term(self, pred: str, pos: int, term) -> set:
        return self._by_pos.get((pred, pos, term), set())

    def predicates(self) -> set:
        return {p for p, fs in self._by_pred.items() if fs}

    def without_top(self) -> frozenset:
        return frozenset(f for f in self._facts if f.pred != TOP)

    def sorted(self) -> List[Atom]:
        return sorted(self._facts, key=fact_key)

    def candidates(self, a: Atom, s: Substitution) -> set:
        """Facts that could match ``a`` given bindings in ``s`` (a superset)."""
        best = None
        for i, t in enumerate(a.args):
            if isinstance(t, Var):
                t = s.get(t)
                if t is None:
                    continue
            elif isinstance(t, Func) and not _ground(t):
                continue
            c = self._by_pos.get((a.pred, i, t))
            if not c:
                return set()
            if best is None or len(c) < len(best):
                best = c
        return self._by_pred.get(a.pred, set()) if best is None else best

    def match(
        self,
        body: Sequence[Atom],
        init: Optional[Substitution] = None,
        delta: Optional["FactStore"] = None,
    ) -> Iterator[Substitution]:
        """Enumerate substitutions mapping every atom of ``body`` into the store.

        With ``delta`` only matches using at least one fact of ``delta`` are
        produced (each exactly once); ``delta`` must be a subset of the store.
        """
        init = dict(init or {})
        if delta is None:
            yield from _match(list(body), [(self, None)] * len(body), init)
            return
        for i in range(len(body)):
            sources = [(self, delta) if j < i else (self, None) for j in range(len(body))]
            sources[i] = (delta, None)
            yield from _match(list(body), sources, dict(init))


def _ground(t) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Func):
        return all(_ground(a) for a in t.args)
    return True


def _unify(pattern, term, s: Substitution, trail: list) -> bool:
    if isinstance(pattern, Var):
        bound = s.get(pattern)
        if bound is None:
            s[pattern] = term
            trail.append(pattern)
            return True
        return bound == term
    if isinstance(pattern, Func):
        if not isinstance(term, Func) or term.fn != pattern.fn or len(term.args) != len(pattern.args):
            return False
        return all(_unify(p, t, s, trail) for p, t in zip(pattern.args, term.args))
    return pattern == term


def _match(atoms: list, sources: list, s: Substitution) -> Iterator[Substitution]:
    if not atoms:
        yield dict(s)
        return
    # choose the atom with the fewest candidate facts
    best_i, best_c = 0, None
    for i, a in enumerate(atoms):
        c = sources[i][0].candidates(a, s)
        if best_c is None or len(c) < len(best_c):
            best_i, best_c = i, c
            if not c:
                return
    a = atoms[best_i]
    src, exclude = sources[best_i]
    rest = atoms[:best_i] + atoms[best_i + 1 :]
    rest_sources = sources[:best_i] + sources[best_i + 1 :]
    for f in list(best_c):
        if exclude is not None and f in exclude:
            continue
        if len(f.args) != len(a.args):
            continue
        trail = []
        if all(_unify(p, t, s, trail) for p, t in zip(a.args, f.args)):
            yield from _match(rest, rest_sources, s)
        for v in trail:
            del s[v]


def match_body(body: Sequence[Atom], store: FactStore, init=None) -> Iterator[Substitution]:
    if not body:
        raise ValueError("body must be non-empty")
    return store.match(body, init)
