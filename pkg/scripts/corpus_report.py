"""Acyclicity table for a directory of ontologies, grouped by number of existential axioms."""

import argparse
from pathlib import Path

from hornchase.cli import corpus_report, make_config, build_parser

HERE = Path(__file__).resolve().parent.parent


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("directory", nargs="?", default=str(HERE / "corpus"))
    ap.add_argument("--n", type=int, action="append", default=None)
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()

    argv = ["report", args.directory, "--jobs", str(args.jobs), "--no-timings"]
    for n in args.n or [1, 2]:
        argv += ["--n", str(n)]
    cfg = make_config(build_parser().parse_args(argv))
    reports, brackets = corpus_report(cfg)

    cols = ["mfa_union"] + [f"rca{n}" for n in cfg.rca_n]
    print(f"{'name':28}{'|T∃|':>6}" + "".join(f"{c:>11}" for c in cols))
    for r in reports:
        if r.error:
            print(f"{r.name:28}  error: {r.error}")
            continue
        vals = [r.mfa_union.value] + [r.rca[n].value for n in cfg.rca_n]
        print(f"{r.name:28}{r.existential_axioms:>6}" + "".join(f"{v:>11}" for v in vals))
    print()
    print(f"{'bracket':10}{'count':>7}{'avg size':>10}" + "".join(f"{c + ' %':>12}" for c in cols))
    for b in brackets:
        print(
            f"{b['bracket']:10}{b['count']:>7}{b['avg_size']:>10}"
            + "".join(f"{b[c + '_pct']:>12}" for c in cols)
        )


if __name__ == "__main__":
    main()
