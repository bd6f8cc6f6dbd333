"""Choreographies with multicom and multisel grouping.

Parse, check, run (sequentially, concurrently, or as a projected network)
and test the correspondence results between these semantics.
"""
from .conc import all_traces, apply_redex, enabled_conc, run_conc
from .epp import MergeError, ProjectionError, annotate, merge, project, project_behaviour, prunes
from .labels import ComL, ElseL, GroupL, SelL, ThenL, Trace
from .network import NetConfig, apply_net, enabled_net, is_terminated_net, normalize_net, run_net
from .oracle import confirms, equiv_oracle
from .seq import SeqConfig, is_terminated, normalize, run_seq, step_seq
from .surface import (
    ParseError, parse_chor, parse_expr, parse_network, parse_state, print_chor, print_network,
    print_state,
)
from .syntax import Network, State, eval_expr, free_vars, pn_chor, pn_multicom, tn_multisel
from .wellformed import Violation, check_chor, check_multicom, check_multisel

__version__ = "0.1.0"
