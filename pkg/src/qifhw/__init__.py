"""Two-dimensional information-leakage analysis for gate-level netlists.

Quantifies, per secret input bit, a [common, advanced] leakage pair under
three attack models and classifies each bit as Detected, Warning, or
Negligible against configurable thresholds.
"""

__version__ = "0.1.0"

from .attack import apply_model, compute_controllability
from .channel import (
    AbstractChannelStats,
    Behavior,
    ChannelMultipliers,
    abstract_channel_stats,
    advanced_channel_value,
    classify_behavior,
    composition_multipliers,
    low_assignment_profiles,
)
from .cluster import (
    ChannelComposition,
    ClusterGraph,
    RegisterLink,
    build_truth_table,
    cluster,
    truth_table_hex,
)
from .errors import (
    BadArity,
    BadProbability,
    BadThresholdOrder,
    BitOutOfRange,
    BudgetExceeded,
    CombinationalLoop,
    ConfigError,
    MalformedInput,
    MultipleDrivers,
    NetlistError,
    OverlappingLabels,
    PathUnavailable,
    SequentialUnsupported,
    UndrivenNet,
    UnknownPort,
)
from .graph import FlowGraph, build_graph, estimate_probs, propagate_taint
from .netlist import (
    AnalysisConfig,
    BitRef,
    Cell,
    Netlist,
    Port,
    parse_config,
    parse_netlist,
    replace_config,
    serialize_netlist,
)
from .oracle import (
    EnumerationBudget,
    exact_bayes_vulnerability,
    exact_behavior_partition,
    oracle_multipliers,
)
from .pipeline import AnalysisBundle, analyze_design, multiplier_table
from .propagate import (
    LeakageVector,
    PathStep,
    SecretResult,
    propagate,
    worst_path,
)
from .report import (
    DETECTED,
    NEGLIGIBLE,
    WARNING,
    AnalysisReport,
    classify,
    emit_plot_data,
    emit_report,
    report_from_json,
)
