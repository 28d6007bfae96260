"""Simulated quantum-cloud benchmarking: circuits, devices, billing, analysis."""

from .analysis import (
    SUCCESS_THRESHOLD,
    FidelityScore,
    TwoQubitGateEstimate,
    aggregate,
    benchmark_fidelity,
    classify_success,
    debias_uniform_floor,
    hellinger_fidelity,
    infer_f2qg,
    queue_prediction,
    write_report,
)
from .circuit import (
    Circuit,
    Gate,
    GateCensus,
    GateKind,
    build_benchmark,
    census,
    circuit_from_json,
    circuit_to_json,
    ideal_output,
    random_input,
)
from .costing import (
    CreditBilling,
    GateRateBilling,
    Money,
    PerShotBilling,
    credit_charge,
    format_credits,
)
from .providers import (
    DAY,
    AlwaysSchedule,
    DailyWindowSchedule,
    DegradedKind,
    JobHandle,
    JobStatus,
    PollResult,
    PRESET_NAMES,
    QueueModel,
    RecurringOutageSchedule,
    SimProvider,
    TargetProfile,
    TargetState,
    TargetStatus,
    target_profile,
)
from .rng import derive_seed
from .simulator import (
    MAX_WIDTH,
    GlobalDepolarizing,
    PauliTrajectory,
    circuit_unitary,
    ideal_distribution,
    run_noisy,
    run_statevector,
    sample,
)
from .store import JobRecord, JobStore, StoreError, default_store_path
from .transpiler import (
    EFFICIENT,
    PROFILES,
    REDUNDANT,
    GateSetProfile,
    TranspileResult,
    check_gate_limit,
    default_gate_limit,
    euler_zyz,
    transpile,
    verify_equivalence,
)

__version__ = "0.1.0"

__all__ = [
    "SUCCESS_THRESHOLD",
    "FidelityScore",
    "TwoQubitGateEstimate",
    "aggregate",
    "benchmark_fidelity",
    "classify_success",
    "debias_uniform_floor",
    "hellinger_fidelity",
    "infer_f2qg",
    "queue_prediction",
    "write_report",
    "Circuit",
    "Gate",
    "GateCensus",
    "GateKind",
    "build_benchmark",
    "census",
    "circuit_from_json",
    "circuit_to_json",
    "ideal_output",
    "random_input",
    "CreditBilling",
    "GateRateBilling",
    "Money",
    "PerShotBilling",
    "credit_charge",
    "format_credits",
    "DAY",
    "AlwaysSchedule",
    "DailyWindowSchedule",
    "DegradedKind",
    "JobHandle",
    "JobStatus",
    "PollResult",
    "PRESET_NAMES",
    "QueueModel",
    "RecurringOutageSchedule",
    "SimProvider",
    "TargetProfile",
    "TargetState",
    "TargetStatus",
    "target_profile",
    "derive_seed",
    "MAX_WIDTH",
    "GlobalDepolarizing",
    "PauliTrajectory",
    "circuit_unitary",
    "ideal_distribution",
    "run_noisy",
    "run_statevector",
    "sample",
    "JobRecord",
    "JobStore",
    "StoreError",
    "default_store_path",
    "EFFICIENT",
    "PROFILES",
    "REDUNDANT",
    "GateSetProfile",
    "TranspileResult",
    "check_gate_limit",
    "default_gate_limit",
    "euler_zyz",
    "transpile",
    "verify_equivalence",
]
