"""Restricted/oblivious chase, acyclicity analysis and query answering for Horn-SRIQ."""

from .acyclicity import (
    AcyclicityReport,
    Verdict,
    analyze,
    build_overchase,
    check_mfa,
    check_mfa_union,
    check_mfa_variants,
    check_rca,
    critical_instance,
    is_restricted,
    singularization_union,
    singularizations,
    term_instance,
)
from .chase import Budget, ChaseResult, Mode, Status, apply_egds, apply_tgd, chase_step, run_chase
from .ontology import Ontology, build_program, load_ontology, parse_ontology, translate_tbox
from .query import entails, evaluate_cq, parse_query
from .rules import EGD, TGD, Program, add_top_rules, partition, skolemize
from .store import FactStore, match_body
from .terms import STAR, Atom, Constant, Func, SkolemFn, Var, depth, is_n_cyclic

__version__ = "0.1.0"
