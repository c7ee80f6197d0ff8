"""Run the film ontology through every stage: both chase modes, MFA-union, the overchase and RCA_1."""

from pathlib import Path

from hornchase.acyclicity import build_overchase, check_mfa_union, check_rca
from hornchase.chase import Budget, Mode, dump_facts, run_chase
from hornchase.ontology import build_program, load_ontology, tbox_rules

HERE = Path(__file__).resolve().parent.parent


def main():
    o = load_ontology(HERE / "examples_data" / "film.ont")
    p = build_program(o)

    res = run_chase(p, Mode.RESTRICTED)
    print(f"restricted chase: {res.status.value}, {len(res.facts.without_top())} facts")
    print(dump_facts(res.facts, include_top=False), end="")

    res = run_chase(p, Mode.OBLIVIOUS, Budget(max_depth=5))
    print(f"\noblivious chase (max depth 5): {res.status.value}, {res.stats.facts} facts")

    mfa = check_mfa_union(tbox_rules(o.tbox))
    print(f"\nMFA-union: {mfa.verdict.value} (witness {mfa.witness})")

    oc = build_overchase(o)
    print(f"overchase: {oc.status.value}, {len(oc.facts.without_top())} facts")
    print(dump_facts(oc.facts, include_top=False), end="")
    print(f"RCA_1: {check_rca(o, 1).verdict.value}")


if __name__ == "__main__":
    main()
