"""Detected-jump-correcting quantum codes for qubits decaying into independent reservoirs."""

__version__ = "0.1.0"

from .codes import (
    Codebook,
    ConditionReport,
    KnillReport,
    build_1jc,
    dfs_basis,
    dimension_bound,
    logical_qubit_count,
    verify_detected_jump,
    verify_full_knill,
)
from .designs import (
    C0_933_BLOCKS,
    SeedDesign,
    affine_plane,
    build_1seed_complementary,
    search_2seed_933,
    seed_to_code,
    verify_seed,
)
from .dynamics import (
    DecayModel,
    DensityMatrix,
    apply_jump,
    apply_pattern,
    conditional_evolve,
    master_rk4,
)
from .qstate import CNOT, H, StateVector, X, apply_gate, fidelity, inner_product, make_state
from .recovery import (
    CodeRecovery,
    RecoveryMap,
    recovery_circuit,
    synthesize_recovery,
    verify_left_inverse,
)
from .trajectory import (
    TrajectoryConfig,
    ensemble_fidelity,
    run_trajectory,
    sample_next_jump,
    trajectory_average_density,
)
