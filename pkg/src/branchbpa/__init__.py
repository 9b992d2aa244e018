"""Branching bisimilarity, redundant sets and regularity for normed BPA."""
from __future__ import annotations

__version__ = "0.1.0"

from .core import (EPSILON, TAU, BpaSystem, Rule, compute_norms, format_process, parse_process,
                   parse_system, print_system)
from .equivalence import CapExceeded, Mode, Outcome, Verdict, build_closure, decide
from .redundancy import branching_norm, build_rd_tree, rd_step, redundant_set
from .regularity import build_rd_graph, decide_regular, growing_nodes

__all__ = [
    "EPSILON", "TAU", "BpaSystem", "Rule", "compute_norms", "format_process", "parse_process",
    "parse_system", "print_system", "CapExceeded", "Mode", "Outcome", "Verdict", "build_closure",
    "decide", "branching_norm", "build_rd_tree", "rd_step", "redundant_set", "build_rd_graph",
    "decide_regular", "growing_nodes",
]
