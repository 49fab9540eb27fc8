"""Constructible sheaf complexes on stratified posets.

Thin wrapper over the compiled core: fixtures, sheaf constructors, exact
cohomology tables, and the perversity reports (returned as dicts).
"""

import json as _json

from persheaf._core import (
    Poset,
    Sheaf,
    circle,
    cone,
    constant_sheaf,
    costalk_cohomology,
    deligne_ic,
    direct_sum,
    dump_document,
    hypercohomology,
    is_constructible,
    load_document,
    merge_strata,
    node,
    plane_line,
    point,
    point_costalk_cohomology,
    random_constructible,
    shift_sheaf,
    skyscraper,
    stalk_cohomology,
    supported_sections_cohomology,
    suspension,
    validate_sheaf,
    zero_sheaf,
)
from persheaf import _core

__all__ = [
    "Poset",
    "Sheaf",
    "check",
    "circle",
    "cone",
    "constant_sheaf",
    "costalk_cohomology",
    "deligne_ic",
    "direct_sum",
    "dump_document",
    "hypercohomology",
    "is_constructible",
    "load_document",
    "merge_strata",
    "node",
    "plane_line",
    "point",
    "point_costalk_cohomology",
    "random_constructible",
    "shift_sheaf",
    "skyscraper",
    "stalk_cohomology",
    "supported_sections_cohomology",
    "suspension",
    "validate_sheaf",
    "verify_lemma",
    "verify_proposition",
    "zero_sheaf",
]


def check(sheaf, method="all"):
    """Perversity report for one characterization ("stalkwise", "stratum",
    "filtration") or "all", as a dict."""
    return _json.loads(_core.perversity_report_json(sheaf, method))


def verify_lemma(sheaf):
    """Agreement of the stratum and filtration characterizations, as a dict."""
    return _json.loads(_core.lemma_report_json(sheaf))


def verify_proposition(sheaf, m):
    """Rank table for restriction to the open filtration piece, as a dict."""
    return _json.loads(_core.proposition_report_json(sheaf, m))
