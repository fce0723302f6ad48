"""Covariate adjustment for causal effects under missing data and selection bias."""

from .criteria import (
    Query,
    Verdict,
    check_adjustment,
    check_backdoor,
    check_m_criterion,
    check_m_criterion_math,
    check_m_sufficient,
    check_ms_criterion,
    make_query,
)
from .dsep import d_separated, d_separated_oracle
from .enumeration import find_min_adj_set, find_min_cost_sep, find_sep, iter_madj, list_madj
from .estimate import (
    Dataset,
    DistTable,
    EffectEstimate,
    estimate_ipw,
    estimate_m_adjustment,
    estimate_ms_adjustment,
    load_csv,
    manifest_freq,
    to_csv,
)
from .mgraph import (
    MGraph,
    NodeKind,
    canonicalize,
    dpcp,
    mutilate,
    parse_mgraph,
    proper_backdoor,
    relatives,
    serialize_mgraph,
)
from .simulate import Scm, parse_scm, random_scm, sample, serialize_scm, true_effect

__version__ = "0.1.0"

__all__ = [
    "Query", "Verdict", "make_query",
    "check_adjustment", "check_backdoor", "check_m_criterion", "check_m_criterion_math",
    "check_m_sufficient", "check_ms_criterion",
    "d_separated", "d_separated_oracle",
    "find_min_adj_set", "find_min_cost_sep", "find_sep", "iter_madj", "list_madj",
    "Dataset", "DistTable", "EffectEstimate", "estimate_ipw", "estimate_m_adjustment",
    "estimate_ms_adjustment", "load_csv", "manifest_freq", "to_csv",
    "MGraph", "NodeKind", "canonicalize", "dpcp", "mutilate", "parse_mgraph",
    "proper_backdoor", "relatives", "serialize_mgraph",
    "Scm", "parse_scm", "random_scm", "sample", "serialize_scm", "true_effect",
]
