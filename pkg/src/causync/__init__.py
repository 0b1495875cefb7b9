"""Master-slave chaotic synchronization and compression-complexity causality."""

from .ccc import DEFAULT_PARAMS, CccMatrix, CccParams, NetEntry, cc_conditional, ccc_conditional, ccc_matrix, ccc_net, ccc_pairwise
from .dynsys import (
    SYSTEM_NAMES,
    CouplingSpec,
    DivergenceError,
    SystemSpec,
    Trajectory,
    UnknownSystemError,
    builtin_system,
    integrate,
    integrate_slave,
    simulate_pair,
    sync_distance,
)
from .etc import EtcResult, SymbolSequence, etc, etc_joint, symbolize
from .experiments import (
    StabilityConfig,
    StabilityReport,
    SyncClassification,
    check_causal_stability,
    classify_sync_variables,
    ground_truth_sync,
    run_stability,
)

__version__ = "0.1.0"
