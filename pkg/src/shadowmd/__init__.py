"""Shadow-estimated Car-Parrinello-style molecular dynamics for H2.

Library layers, bottom up: ``statevector`` (dense simulation), ``pauli``
(observable algebra and the dense oracle), ``shadows`` (randomized
measurement estimation), ``hamiltonian`` (bond-length coefficient table),
``dynamics`` (the damped integrator, forces, VQE baseline), ``presets`` and
``cli`` (experiment drivers and file outputs).
"""

from .constants import (
    ANGSTROM_TO_BOHR,
    FS_TO_AU_TIME,
    H2_REDUCED_MASS_ME,
    KB_HARTREE_PER_K,
    inverse_temperature,
)
from .dynamics import (
    AdaptiveDissipation,
    DirectEstimator,
    DynamicsConfig,
    ExactEstimator,
    FixedDissipation,
    MDState,
    SampleBudget,
    ShadowEstimator,
    TrajectoryRecord,
    TrajectorySummary,
    dissipation_coefficients,
    initial_state,
    nuclear_force,
    parameter_force,
    qcpmd_step,
    run_trajectory,
    sample_budget,
    vqe_optimize,
)
from .errors import (
    BondRangeError,
    CapacityError,
    ConfigurationError,
    ConvergenceError,
    DimensionError,
    TableError,
)
from .hamiltonian import (
    HamiltonianTable,
    default_table_path,
    force_observable,
    ground_state_curve_point,
    hamiltonian_at,
    load_default_table,
    load_table,
)
from .pauli import (
    Observable,
    PauliWord,
    expectation_exact,
    ground_state_exact,
    identity_word,
    observable_from_strings,
    to_dense,
)
from .presets import RunConfig, build_run_config, run_preset
from .shadows import (
    ShadowBatch,
    Snapshot,
    collect_snapshots,
    direct_pauli_estimate,
    estimate_observable,
    estimate_pauli_mom,
    median_of_means,
    snapshot_density,
    snapshot_pauli_estimate,
)
from .statevector import (
    AnsatzConfig,
    StateVector,
    apply_basis_rotation,
    prepare_ansatz_state,
    sample_bitstrings,
)
from .streams import stream

__version__ = "0.1.0"
