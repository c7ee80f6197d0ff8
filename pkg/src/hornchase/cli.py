"""Command line entry point: ``hornchase {chase,acyclicity,query,report}``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

from .acyclicity import ALL_CHECKS, AcyclicityReport, Verdict, analyze
from .chase import Budget, Mode, Status, dump_facts, run_chase
from .ontology import OntologyParseError, build_program, load_ontology, side_condition_warnings
from .query import QueryParseError, answers, entails, parse_query
from .rules import predicates

log = logging.getLogger("hornchase")

EXIT_OK, EXIT_USAGE, EXIT_BUDGET, EXIT_UNSAT = 0, 1, 2, 3

DEFAULTS = {
    "mode": "restricted",
    "max_facts": 10**7,
    "max_depth": 20,
    "max_steps": None,
    "timeout": None,
    "n": [1],
    "check": ["mfa-union", "rca"],
    "out": None,
    "format": None,
    "jobs": 1,
    "no_timings": False,
}


@dataclass
class RunConfig:
    inputs: List[str]
    mode: Mode = Mode.RESTRICTED
    budget: Budget = field(default_factory=Budget)
    rca_n: List[int] = field(default_factory=lambda: [1])
    checks: List[str] = field(default_factory=lambda: ["mfa-union", "rca"])
    out: Optional[str] = None
    format: Optional[str] = None
    jobs: int = 1
    timings: bool = True
    query: Optional[str] = None


def _positive_int(text):
    v = int(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_float(text):
    v = float(text)
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file with option values; flags override it")
    common.add_argument("--mode", choices=[m.value for m in Mode])
    common.add_argument("--max-facts", type=_positive_int)
    common.add_argument("--max-depth", type=_positive_int)
    common.add_argument("--max-steps", type=_positive_int)
    common.add_argument("--timeout", type=_positive_float, help="seconds")
    common.add_argument("--out", help="output file (default: stdout)")
    common.add_argument("--format", choices=["tsv", "csv", "json"])
    common.add_argument("--jobs", type=_positive_int)

    checks = argparse.ArgumentParser(add_help=False)
    checks.add_argument("--check", action="append", choices=ALL_CHECKS)
    checks.add_argument("--n", action="append", type=_positive_int, help="RCA_n level (repeatable)")
    checks.add_argument("--no-timings", action="store_true", default=None, help="report 0 millis")

    p = argparse.ArgumentParser(prog="hornchase", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)
    c = sub.add_parser("chase", parents=[common], help="materialize an ontology")
    c.add_argument("ontology")
    a = sub.add_parser("acyclicity", parents=[common, checks], help="MFA / RCA_n checks")
    a.add_argument("ontology")
    q = sub.add_parser("query", parents=[common], help="answer a conjunctive query")
    q.add_argument("ontology")
    q.add_argument("query", help="query text, or @file")
    r = sub.add_parser("report", parents=[common, checks], help="acyclicity report over a directory")
    r.add_argument("directory")
    return p


def make_config(args: argparse.Namespace) -> RunConfig:
    values = dict(DEFAULTS)
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            from_file = json.load(fh)
        values.update({k.replace("-", "_"): v for k, v in from_file.items()})
    for key in DEFAULTS:
        v = getattr(args, key, None)
        if v is not None:
            values[key] = v
    inputs = [getattr(args, k) for k in ("ontology", "directory") if getattr(args, k, None)]
    ns = values["n"] if isinstance(values["n"], list) else [values["n"]]
    checks = values["check"] if isinstance(values["check"], list) else [values["check"]]
    if not ns:
        raise ValueError("at least one --n is required")
    query = getattr(args, "query", None)
    if query and query.startswith("@"):
        query = Path(query[1:]).read_text(encoding="utf-8")
    return RunConfig(
        inputs=inputs,
        mode=Mode(values["mode"]),
        budget=Budget(values["max_facts"], values["max_depth"], values["max_steps"], values["timeout"]),
        rca_n=sorted(set(ns)),
        checks=list(dict.fromkeys(checks)),
        out=values["out"],
        format=values["format"],
        jobs=values["jobs"],
        timings=not values["no_timings"],
        query=query,
    )


def _write(cfg: RunConfig, text: str):
    if cfg.out:
        Path(cfg.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def cmd_chase(cfg: RunConfig) -> int:
    o = load_ontology(cfg.inputs[0])
    side_condition_warnings(o)
    res = run_chase(build_program(o), cfg.mode, cfg.budget)
    _write(cfg, dump_facts(res.facts))
    s = res.stats
    status = "unsatisfiable" if res.unsatisfiable else res.status.value
    print(
        f"facts={s.facts} steps={s.steps} max_depth={s.max_depth} status={status}",
        file=sys.stderr,
    )
    if res.unsatisfiable:
        return EXIT_UNSAT
    if res.status is Status.BUDGET_EXHAUSTED:
        return EXIT_BUDGET
    return EXIT_OK


def _analyze_file(path: str, checks, ns, budget, timings: bool) -> AcyclicityReport:
    try:
        o = load_ontology(path)
    except (OntologyParseError, OSError, UnicodeDecodeError) as e:
        return AcyclicityReport(Path(path).stem, 0, 0, error=str(e))
    rep = analyze(o, checks, ns, budget)
    if not timings:
        rep.millis = 0.0
    return rep


def cmd_acyclicity(cfg: RunConfig) -> int:
    o = load_ontology(cfg.inputs[0])
    side_condition_warnings(o)
    rep = analyze(o, cfg.checks, cfg.rca_n, cfg.budget)
    if not cfg.timings:
        rep.millis = 0.0
    if cfg.format == "csv":
        _write(cfg, _reports_csv([rep], cfg))
    else:
        _write(cfg, json.dumps(rep.to_json(), indent=2, sort_keys=False) + "\n")
    return EXIT_OK


def cmd_query(cfg: RunConfig) -> int:
    o = load_ontology(cfg.inputs[0])
    program = build_program(o)
    q = parse_query(cfg.query, predicates(program.rules, program.instance))
    if q.is_boolean:
        v = entails(o, q, cfg.mode, cfg.budget)
        _write(cfg, {Verdict.YES: "true", Verdict.NO: "false", Verdict.UNKNOWN: "unknown"}[v] + "\n")
        return EXIT_BUDGET if v is Verdict.UNKNOWN else EXIT_OK
    ans = answers(o, q, cfg.mode, cfg.budget)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow([v.name for v in q.answer_vars])
    for tup in ans.sorted():
        w.writerow([c.name for c in tup])
    _write(cfg, buf.getvalue())
    if not ans.complete:
        print("warning: chase budget exhausted, answers may be incomplete", file=sys.stderr)
        return EXIT_BUDGET
    return EXIT_OK


BRACKETS = [(0, 0), (1, 5), (6, 10), (11, 25), (26, 100), (101, 500), (501, None)]


def bracket_of(k: int) -> str:
    for lo, hi in BRACKETS:
        if hi is None and k >= lo:
            return f"{lo}+"
        if lo <= k <= hi:
            return f"{lo}-{hi}" if lo != hi else str(lo)
    raise ValueError(k)


def _columns(cfg: RunConfig) -> List[str]:
    cols = []
    for c in ("mfa", "mfa-union", "mfa-exists", "mfa-forall"):
        if c in cfg.checks:
            cols.append(c.replace("-", "_"))
    if "rca" in cfg.checks:
        cols += [f"rca{n}" for n in cfg.rca_n]
    return cols


def _verdicts(rep: AcyclicityReport, cols) -> dict:
    out = {}
    for c in cols:
        if c.startswith("rca"):
            v = rep.rca.get(int(c[3:]))
        else:
            v = getattr(rep, c)
        out[c] = v.value if v is not None else ""
    return out


def _reports_csv(reports, cfg: RunConfig) -> str:
    cols = _columns(cfg)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["name", "axioms", "existential_axioms", "bracket"] + cols + ["millis", "error"])
    for rep in reports:
        v = _verdicts(rep, cols)
        w.writerow(
            [rep.name, rep.axioms, rep.existential_axioms, bracket_of(rep.existential_axioms)]
            + [v[c] for c in cols]
            + [round(rep.millis, 3), rep.error or ""]
        )
    return buf.getvalue()


def aggregate(reports, cfg: RunConfig) -> List[dict]:
    """Per-bracket counts and percentage of 'yes' verdicts for each check."""
    cols = _columns(cfg)
    rows = []
    ok = [r for r in reports if r.error is None]
    for lo, hi in BRACKETS:
        name = bracket_of(lo)
        group = [r for r in ok if bracket_of(r.existential_axioms) == name]
        if not group:
            continue
        row = {
            "bracket": name,
            "count": len(group),
            "avg_size": round(sum(r.axioms for r in group) / len(group), 1),
        }
        for c in cols:
            vs = [_verdicts(r, [c])[c] for r in group]
            row[f"{c}_pct"] = round(100.0 * vs.count("yes") / len(group), 1)
            row[f"{c}_unknown"] = vs.count("unknown")
        rows.append(row)
    return rows


def corpus_report(cfg: RunConfig) -> tuple:
    d = Path(cfg.inputs[0])
    files = sorted(str(p) for p in d.iterdir() if p.is_file() and not p.name.startswith("."))
    args = (cfg.checks, cfg.rca_n, cfg.budget, cfg.timings)
    if cfg.jobs > 1 and len(files) > 1:
        with ProcessPoolExecutor(max_workers=cfg.jobs) as ex:
            reports = list(ex.map(_analyze_file, files, *[[a] * len(files) for a in args]))
    else:
        reports = [_analyze_file(f, *args) for f in files]
    return reports, aggregate(reports, cfg)


def cmd_corpus_report(cfg: RunConfig) -> int:
    reports, brackets = corpus_report(cfg)
    errors = [{"name": r.name, "error": r.error} for r in reports if r.error]
    if cfg.format == "csv":
        text = _reports_csv(reports, cfg)
        if brackets:
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=list(brackets[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(brackets)
            text += "\n" + buf.getvalue()
    else:
        doc = {
            "ontologies": [r.to_json() for r in reports],
            "brackets": brackets,
            "errors": errors,
        }
        text = json.dumps(doc, indent=2) + "\n"
    _write(cfg, text)
    if errors:
        print(f"{len(errors)} error(s) while reading the corpus", file=sys.stderr)
    return EXIT_OK


COMMANDS = {
    "chase": cmd_chase,
    "acyclicity": cmd_acyclicity,
    "query": cmd_query,
    "report": cmd_corpus_report,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    logging.basicConfig(
        level=os.environ.get("HORNCHASE_LOG", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = make_config(args)
        return COMMANDS[args.command](cfg)
    except (OntologyParseError, QueryParseError, ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
