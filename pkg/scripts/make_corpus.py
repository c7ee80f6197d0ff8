"""Generate seeded random normal-form TBoxes into corpus/ (gen_*.ont)."""

import argparse
import random
from pathlib import Path

from hornchase.ontology import (
    AtMostOne,
    ConjSubsumption,
    Existential,
    InvRoleSub,
    Ontology,
    RoleComposition,
    RoleSub,
    ValueRestriction,
    serialize_ontology,
)

CONCEPTS = ["A", "B", "C", "D"]
ROLES = ["R", "S", "T"]
FORMS = [
    (Existential, 4),
    (ConjSubsumption, 3),
    (InvRoleSub, 2),
    (ValueRestriction, 2),
    (RoleSub, 1),
    (AtMostOne, 1),
    (RoleComposition, 1),
]


def random_axiom(rng):
    cls = rng.choices([f for f, _ in FORMS], weights=[w for _, w in FORMS])[0]
    c, r = lambda: rng.choice(CONCEPTS), lambda: rng.choice(ROLES)
    if cls is ConjSubsumption:
        return ConjSubsumption(tuple(sorted(set(c() for _ in range(rng.randint(1, 2))))), c())
    if cls in (ValueRestriction, AtMostOne, Existential):
        return cls(c(), r(), c())
    if cls in (RoleSub, InvRoleSub):
        return cls(r(), r())
    return RoleComposition(r(), r(), r())


def random_tbox(rng, size):
    axioms = []
    while len(axioms) < size:
        ax = random_axiom(rng)
        if ax not in axioms:
            axioms.append(ax)
    return Ontology(tuple(axioms))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="corpus")
    ap.add_argument("--count", type=int, default=12)
    ap.add_argument("--seed", type=int, default=2016)
    args = ap.parse_args()
    rng = random.Random(args.seed)
    out = Path(args.out)
    out.mkdir(exist_ok=True)
    for i in range(args.count):
        o = random_tbox(rng, rng.randint(3, 7))
        (out / f"gen_{i:02d}.ont").write_text(serialize_ontology(o), encoding="utf-8")


if __name__ == "__main__":
    main()
