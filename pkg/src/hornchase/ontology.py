"""Normal-form Horn-SRIQ ontologies: parsing, printing and translation to rules.

Document format (line oriented, ``#`` starts a comment)::

    TBOX:
    A1 AND A2 SUBCLASSOF B
    A SUBCLASSOF ALL R . B
    A SUBCLASSOF MAX1 R . B
    A SUBCLASSOF SOME R . B
    S SUBROLEOF R
    INV(S) SUBROLEOF R
    S COMP V SUBROLEOF R
    ABOX:
    A(a)
    R(a,b)
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import List, Tuple, Union

from .rules import EGD, TGD, Program, add_top_rules
from .terms import BOT, EQ, TOP, Atom, Constant, Var

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class ConjSubsumption:
    lhs: Tuple[str, ...]
    rhs: str


@dataclass(frozen=True)
class ValueRestriction:
    lhs: str
    role: str
    filler: str


@dataclass(frozen=True)
class AtMostOne:
    lhs: str
    role: str
    filler: str


@dataclass(frozen=True)
class Existential:
    lhs: str
    role: str
    filler: str


@dataclass(frozen=True)
class RoleSub:
    sub: str
    sup: str


@dataclass(frozen=True)
class InvRoleSub:
    sub: str
    sup: str


@dataclass(frozen=True)
class RoleComposition:
    first: str
    second: str
    sup: str


TBoxAxiom = Union[
    ConjSubsumption, ValueRestriction, AtMostOne, Existential, RoleSub, InvRoleSub, RoleComposition
]


@dataclass(frozen=True)
class Ontology:
    tbox: Tuple[TBoxAxiom, ...] = ()
    abox: Tuple[Atom, ...] = ()
    name: str = field(default="", compare=False)

    @property
    def concepts(self) -> set:
        out = {a.pred for a in self.abox if a.arity == 1}
        for ax in self.tbox:
            if isinstance(ax, ConjSubsumption):
                out.update(ax.lhs)
                out.add(ax.rhs)
            elif isinstance(ax, (ValueRestriction, AtMostOne, Existential)):
                out.update((ax.lhs, ax.filler))
        return out

    @property
    def roles(self) -> set:
        out = {a.pred for a in self.abox if a.arity == 2}
        for ax in self.tbox:
            if isinstance(ax, (ValueRestriction, AtMostOne, Existential)):
                out.add(ax.role)
            elif isinstance(ax, (RoleSub, InvRoleSub)):
                out.update((ax.sub, ax.sup))
            elif isinstance(ax, RoleComposition):
                out.update((ax.first, ax.second, ax.sup))
        return out

    @property
    def individuals(self) -> set:
        return {t.name for a in self.abox for t in a.args}

    @property
    def existential_axioms(self) -> List[Existential]:
        return [ax for ax in self.tbox if isinstance(ax, Existential)]


class OntologyParseError(ValueError):
    def __init__(self, msg, line=0, column=0):
        super().__init__(f"line {line}, column {column}: {msg}" if line else msg)
        self.line = line
        self.column = column


_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_KEYWORDS = {"AND", "SUBCLASSOF", "SUBROLEOF", "ALL", "SOME", "MAX1", "COMP", "INV", "TBOX", "ABOX"}
_FORMS = [
    (re.compile(rf"^({_NAME})\s+SUBCLASSOF\s+ALL\s+({_NAME})\s*\.\s*({_NAME})$"), ValueRestriction),
    (re.compile(rf"^({_NAME})\s+SUBCLASSOF\s+MAX1\s+({_NAME})\s*\.\s*({_NAME})$"), AtMostOne),
    (re.compile(rf"^({_NAME})\s+SUBCLASSOF\s+SOME\s+({_NAME})\s*\.\s*({_NAME})$"), Existential),
    (re.compile(rf"^INV\(\s*({_NAME})\s*\)\s+SUBROLEOF\s+({_NAME})$"), InvRoleSub),
    (re.compile(rf"^({_NAME})\s+COMP\s+({_NAME})\s+SUBROLEOF\s+({_NAME})$"), RoleComposition),
    (re.compile(rf"^({_NAME})\s+SUBROLEOF\s+({_NAME})$"), RoleSub),
]
_CONJ = re.compile(rf"^({_NAME}(?:\s+AND\s+{_NAME})*)\s+SUBCLASSOF\s+({_NAME})$")
_FACT = re.compile(rf"^({_NAME})\(\s*({_NAME})\s*(?:,\s*({_NAME})\s*)?\)$")


def _parse_axiom(text: str, lineno: int, col: int) -> TBoxAxiom:
    for rx, cls in _FORMS:
        m = rx.match(text)
        if m:
            return cls(*m.groups())
    m = _CONJ.match(text)
    if m:
        return ConjSubsumption(tuple(re.split(r"\s+AND\s+", m.group(1))), m.group(2))
    raise OntologyParseError(f"unknown axiom form: {text!r}", lineno, col)


def _parse_fact(text: str, lineno: int, col: int) -> Atom:
    m = _FACT.match(text)
    if not m:
        raise OntologyParseError(f"malformed ABox fact: {text!r}", lineno, col)
    pred, *args = [g for g in m.groups() if g is not None]
    return Atom(pred, tuple(Constant(a) for a in args))


def _names_in(ax: TBoxAxiom):
    """Yield (name, arity) pairs mentioned by an axiom."""
    if isinstance(ax, ConjSubsumption):
        for a in ax.lhs:
            yield a, 1
        yield ax.rhs, 1
    elif isinstance(ax, (ValueRestriction, AtMostOne, Existential)):
        yield ax.lhs, 1
        yield ax.role, 2
        yield ax.filler, 1
    elif isinstance(ax, (RoleSub, InvRoleSub)):
        yield ax.sub, 2
        yield ax.sup, 2
    else:
        yield ax.first, 2
        yield ax.second, 2
        yield ax.sup, 2


def parse_ontology(text: str, name: str = "") -> Ontology:
    tbox: List[TBoxAxiom] = []
    abox: List[Atom] = []
    arity = {TOP: 1, BOT: 1}
    section = None

    def check_arity(sym, k, lineno, col):
        if sym == EQ:
            raise OntologyParseError("the predicate Eq is reserved", lineno, col)
        if sym in _KEYWORDS:
            raise OntologyParseError(f"keyword {sym} used as a name", lineno, col)
        if arity.setdefault(sym, k) != k:
            raise OntologyParseError(
                f"{sym} used with arity {k} but previously with arity {arity[sym]}", lineno, col
            )

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        stripped = line.strip()
        if not stripped:
            continue
        col = len(line) - len(line.lstrip()) + 1
        header = stripped.upper().replace(" ", "")
        if header in ("TBOX:", "ABOX:"):
            section = header[:-1]
            continue
        is_axiom = "SUBCLASSOF" in stripped or "SUBROLEOF" in stripped
        if section == "ABOX" and is_axiom:
            raise OntologyParseError("TBox axiom inside ABOX section", lineno, col)
        if section == "TBOX" and not is_axiom:
            raise OntologyParseError(f"unknown axiom form: {stripped!r}", lineno, col)
        if is_axiom:
            ax = _parse_axiom(stripped, lineno, col)
            for sym, k in _names_in(ax):
                check_arity(sym, k, lineno, col)
            tbox.append(ax)
        else:
            f = _parse_fact(stripped, lineno, col)
            check_arity(f.pred, f.arity, lineno, col)
            abox.append(f)
    return Ontology(tuple(tbox), tuple(abox), name=name)


def serialize_axiom(ax: TBoxAxiom) -> str:
    if isinstance(ax, ConjSubsumption):
        return f"{' AND '.join(ax.lhs)} SUBCLASSOF {ax.rhs}"
    if isinstance(ax, ValueRestriction):
        return f"{ax.lhs} SUBCLASSOF ALL {ax.role} . {ax.filler}"
    if isinstance(ax, AtMostOne):
        return f"{ax.lhs} SUBCLASSOF MAX1 {ax.role} . {ax.filler}"
    if isinstance(ax, Existential):
        return f"{ax.lhs} SUBCLASSOF SOME {ax.role} . {ax.filler}"
    if isinstance(ax, RoleSub):
        return f"{ax.sub} SUBROLEOF {ax.sup}"
    if isinstance(ax, InvRoleSub):
        return f"INV({ax.sub}) SUBROLEOF {ax.sup}"
    return f"{ax.first} COMP {ax.second} SUBROLEOF {ax.sup}"


def serialize_ontology(o: Ontology) -> str:
    lines = ["TBOX:"]
    lines += [serialize_axiom(ax) for ax in o.tbox]
    lines.append("ABOX:")
    lines += [f"{f.pred}({','.join(str(a) for a in f.args)})" for f in o.abox]
    return "\n".join(lines) + "\n"


def rule_id(ordinal: int) -> str:
    return f"r{ordinal}"


def translate_axiom(ax: TBoxAxiom, rid: str):
    x, y, z = Var("x"), Var("y"), Var("z")
    if isinstance(ax, ConjSubsumption):
        return TGD(rid, tuple(Atom(a, (x,)) for a in ax.lhs), (Atom(ax.rhs, (x,)),))
    if isinstance(ax, ValueRestriction):
        return TGD(rid, (Atom(ax.lhs, (x,)), Atom(ax.role, (x, y))), (Atom(ax.filler, (y,)),))
    if isinstance(ax, AtMostOne):
        body = (
            Atom(ax.lhs, (x,)),
            Atom(ax.role, (x, y)),
            Atom(ax.filler, (y,)),
            Atom(ax.role, (x, z)),
            Atom(ax.filler, (z,)),
        )
        return EGD(rid, body, y, z)
    if isinstance(ax, Existential):
        return TGD(rid, (Atom(ax.lhs, (x,)),), (Atom(ax.role, (x, y)), Atom(ax.filler, (y,))))
    if isinstance(ax, RoleSub):
        return TGD(rid, (Atom(ax.sub, (x, y)),), (Atom(ax.sup, (x, y)),))
    if isinstance(ax, InvRoleSub):
        return TGD(rid, (Atom(ax.sub, (y, x)),), (Atom(ax.sup, (x, y)),))
    if isinstance(ax, RoleComposition):
        return TGD(
            rid, (Atom(ax.first, (x, y)), Atom(ax.second, (y, z))), (Atom(ax.sup, (x, z)),)
        )
    raise TypeError(f"not a TBox axiom: {ax!r}")


def translate_tbox(tbox) -> list:
    return [translate_axiom(ax, rule_id(i)) for i, ax in enumerate(tbox, start=1)]


def tbox_rules(tbox) -> list:
    """The translated TBox plus the Top-propagation rules."""
    return list(add_top_rules(Program(translate_tbox(tbox))).rules)


def build_program(o: Ontology) -> Program:
    return add_top_rules(Program(translate_tbox(o.tbox), frozenset(o.abox)))


def side_condition_warnings(o: Ontology) -> List[str]:
    """Syntactic checks of the SRIQ role conditions; never fatal."""
    warnings = []
    complex_roles = {ax.sup for ax in o.tbox if isinstance(ax, RoleComposition)}
    # a role is non-simple if some non-simple role is a subrole of it
    changed = True
    while changed:
        changed = False
        for ax in o.tbox:
            if isinstance(ax, (RoleSub, InvRoleSub)) and ax.sub in complex_roles:
                if ax.sup not in complex_roles:
                    complex_roles.add(ax.sup)
                    changed = True
    for ax in o.tbox:
        if isinstance(ax, AtMostOne) and ax.role in complex_roles:
            warnings.append(f"non-simple role {ax.role} used in MAX1 restriction")
    # regularity: a composition chain that feeds back into one of its own roles
    edges = {}
    for ax in o.tbox:
        if isinstance(ax, RoleComposition):
            for r in (ax.first, ax.second):
                if r != ax.sup:
                    edges.setdefault(r, set()).add(ax.sup)
        elif isinstance(ax, (RoleSub, InvRoleSub)):
            edges.setdefault(ax.sub, set()).add(ax.sup)
    for ax in o.tbox:
        if isinstance(ax, RoleComposition):
            stack, seen = [ax.sup], set()
            while stack:
                r = stack.pop()
                if r in seen:
                    continue
                seen.add(r)
                stack.extend(edges.get(r, ()))
            bad = {ax.first, ax.second} - {ax.sup}
            if seen & bad:
                warnings.append(f"role hierarchy may be irregular around {serialize_axiom(ax)!r}")
    for w in warnings:
        log.warning(w)
    return warnings


def load_ontology(path) -> Ontology:
    from pathlib import Path

    p = Path(path)
    return parse_ontology(p.read_text(encoding="utf-8"), name=p.stem)
