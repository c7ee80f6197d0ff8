"""Terms, atoms and substitutions.

Terms are immutable and hash-consed by value: ``Constant``, the critical
constant ``STAR`` and skolem terms ``Func``. Variables (``Var``) only occur
inside rule and query patterns.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Iterator, NamedTuple, Tuple, Union

TOP = "Top"
BOT = "Bot"
EQ = "Eq"


@dataclass(frozen=True, order=True)
class SkolemFn:
    rule_id: str
    var: str

    def __str__(self):
        return f"f[{self.rule_id}:{self.var}]"


class Var:
    __slots__ = ("name", "_hash")

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("var", name))

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"?{self.name}"

    def __str__(self):
        return self.name

    def __reduce__(self):
        return (Var, (self.name,))


class Constant:
    __slots__ = ("name", "_hash")
    depth = 0

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("const", name))

    def __eq__(self, other):
        return isinstance(other, Constant) and other.name == self.name

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Constant({self.name!r})"

    def __str__(self):
        return self.name

    def __reduce__(self):
        return (Constant, (self.name,))


class _Star:
    __slots__ = ()
    depth = 0
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "STAR"

    def __str__(self):
        return "*"

    def __reduce__(self):
        return (_Star, ())


STAR = _Star()


class Func:
    """A skolem term ``fn(args)``; args may hold variables inside rule heads."""

    __slots__ = ("fn", "args", "depth", "_hash", "_nest")

    def __init__(self, fn: SkolemFn, args: Iterable["Term"]):
        self.fn = fn
        self.args = tuple(args)
        self.depth = 1 + max((_depth(a) for a in self.args), default=0)
        self._hash = hash((fn, self.args))
        self._nest = None

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, Func)
            and self._hash == other._hash
            and self.fn == other.fn
            and self.args == other.args
        )

    def __hash__(self):
        return self._hash

    def __repr__(self):
        return f"Func({self.fn!s}, {list(self.args)!r})"

    def __str__(self):
        return f"{self.fn}({','.join(str(a) for a in self.args)})"

    def __reduce__(self):
        return (Func, (self.fn, self.args))


Term = Union[Constant, _Star, Func]
AnyTerm = Union[Constant, _Star, Func, Var]


def _depth(t) -> int:
    return getattr(t, "depth", 0)


def depth(t: AnyTerm) -> int:
    return _depth(t)


def is_ground(t: AnyTerm) -> bool:
    if isinstance(t, Var):
        return False
    if isinstance(t, Func):
        return all(is_ground(a) for a in t.args)
    return True


def subterms(t: AnyTerm) -> Iterator[AnyTerm]:
    """Yield ``t`` and every subterm of it (pre-order, repeats possible)."""
    yield t
    if isinstance(t, Func):
        for a in t.args:
            yield from subterms(a)


def is_subterm(s: AnyTerm, t: AnyTerm) -> bool:
    return any(s == u for u in subterms(t))


def is_proper_subterm(s: AnyTerm, t: AnyTerm) -> bool:
    return s != t and is_subterm(s, t)


def _nesting(t: Func) -> Dict[SkolemFn, int]:
    # longest chain of properly nested occurrences of each function symbol
    if t._nest is None:
        nest: Dict[SkolemFn, int] = {}
        for a in t.args:
            if isinstance(a, Func):
                for fn, k in _nesting(a).items():
                    if k > nest.get(fn, 0):
                        nest[fn] = k
        nest[t.fn] = nest.get(t.fn, 0) + 1
        t._nest = nest
    return t._nest


def max_nesting(t: AnyTerm) -> int:
    """Largest number of nested occurrences of a single function symbol in ``t``."""
    if not isinstance(t, Func):
        return 0
    return max(_nesting(t).values())


def is_n_cyclic(t: AnyTerm, n: int) -> bool:
    if n < 1:
        raise ValueError("n must be >= 1")
    return max_nesting(t) >= n + 1


def abstract_constants(t: AnyTerm, c: Term = STAR) -> AnyTerm:
    if isinstance(t, (Constant, _Star)):
        return c
    if isinstance(t, Func):
        return Func(t.fn, (abstract_constants(a, c) for a in t.args))
    return t


def term_key(t: AnyTerm) -> tuple:
    """Sort key realising the canonical term order (depth first)."""
    if isinstance(t, _Star):
        return (0, 0, "")
    if isinstance(t, Constant):
        return (0, 1, t.name)
    if isinstance(t, Func):
        return (t.depth, 2, t.fn.rule_id, t.fn.var, tuple(term_key(a) for a in t.args))
    # variables sort after everything; they never meet ground terms in practice
    return (1 << 30, 3, t.name)


def compare_terms(t: AnyTerm, u: AnyTerm) -> int:
    """Return -1, 0 or 1; the smaller term is the preferred representative."""
    if t == u:
        return 0
    kt, ku = term_key(t), term_key(u)
    return -1 if kt < ku else (1 if kt > ku else 0)


def min_term(terms: Iterable[AnyTerm]) -> AnyTerm:
    return min(terms, key=term_key)


class Atom(NamedTuple):
    pred: str
    args: Tuple[AnyTerm, ...]

    @property
    def arity(self) -> int:
        return len(self.args)

    def variables(self) -> Iterator[Var]:
        for a in self.args:
            yield from _vars(a)

    def is_ground(self) -> bool:
        return all(is_ground(a) for a in self.args)

    def __str__(self):
        return f"{self.pred}({','.join(str(a) for a in self.args)})"


Fact = Atom


def atom(pred: str, *args) -> Atom:
    """Build an atom; strings become variables, use ``Constant`` for constants."""
    return Atom(pred, tuple(Var(a) if isinstance(a, str) else a for a in args))


def fact(pred: str, *args) -> Atom:
    """Build a fact; strings become constants, ``"*"`` becomes ``STAR``."""
    return Atom(
        pred,
        tuple((STAR if a == "*" else Constant(a)) if isinstance(a, str) else a for a in args),
    )


def _vars(t: AnyTerm) -> Iterator[Var]:
    if isinstance(t, Var):
        yield t
    elif isinstance(t, Func):
        for a in t.args:
            yield from _vars(a)


Substitution = Dict[Var, AnyTerm]


class UnboundVariable(KeyError):
    pass


def substitute_term(t: AnyTerm, s: Substitution, ground: bool = False) -> AnyTerm:
    if isinstance(t, Var):
        if t in s:
            return s[t]
        if ground:
            raise UnboundVariable(t.name)
        return t
    if isinstance(t, Func):
        return Func(t.fn, (substitute_term(a, s, ground) for a in t.args))
    return t


def apply_substitution(a: Atom, s: Substitution, ground: bool = False) -> Atom:
    return Atom(a.pred, tuple(substitute_term(t, s, ground) for t in a.args))


def replace_term(t: AnyTerm, old: AnyTerm, new: AnyTerm) -> AnyTerm:
    """Replace every occurrence of ``old`` in ``t`` (nested ones included)."""
    if t == old:
        return new
    if isinstance(t, Func) and t.depth > _depth(old):
        return Func(t.fn, (replace_term(a, old, new) for a in t.args))
    return t


def abstract_fact(f: Atom, c: Term = STAR) -> Atom:
    return Atom(f.pred, tuple(abstract_constants(a, c) for a in f.args))


def abstract_facts(facts: Iterable[Atom], c: Term = STAR) -> set:
    return {abstract_fact(f, c) for f in facts}


def fact_key(f: Atom) -> tuple:
    return (f.pred, tuple(term_key(a) for a in f.args))


def terms_of(facts: Iterable[Atom]) -> set:
    out = set()
    for f in facts:
        out.update(f.args)
    return out
