"""Probability-guided logic locking for gate-level bench netlists."""

from .bench import (
    BenchError,
    Gate,
    GateType,
    KeyGateRecord,
    KeyMetadata,
    Netlist,
    count_nodes,
    parse_bench,
    validate,
    write_bench,
)
from .dependency import ControlProfile, control_profile, low_dependent_filter
from .graph import (
    CircuitGraph,
    LongestPathSubset,
    build_graph,
    longest_path_length,
    longest_path_subset,
    unroll_once,
)
from .pipeline import (
    ConstraintChain,
    LockConfig,
    LockingResult,
    PipelineError,
    default_key_length,
    insert_key_gates,
    lock,
    report_row,
    run_chain,
)
from .probability import BiasSelection, propagate, select_biased
from .sim import (
    SimVector,
    VerificationReport,
    brute_force_key,
    check_equivalence,
    simulate,
)
from .timing import DelayModel, TimingReport, analyze_timing, remove_critical

__version__ = "0.1.0"
