"""Bang-bang dynamical decoupling simulator for spin-1/2 Heisenberg chains."""

from .aht import (
    CycleDescription,
    decay_bound,
    effective_hamiltonian,
    magnus0,
    magnus1,
    residual_terms,
)
from .errors import (
    BranchAmbiguityError,
    DimensionError,
    NumericalError,
    ResourceError,
    ValidationError,
)
from .fidelity import (
    EnsembleResult,
    EnsembleTask,
    entanglement_fidelity,
    fit_decay_exponent,
    merge_results,
    pure_state_fidelity,
    run_ensemble,
)
from .groups import (
    DecouplingGroup,
    PulsePath,
    build_collective_group,
    build_nested_group,
    group_average,
    q_r_counts,
)
from .hamiltonian import (
    ChainSpec,
    HamiltonianMatrix,
    build_lab_frame,
    build_rotating_frame,
    convergence_check,
    kappa,
)
from .pauli import (
    PauliDecomposition,
    PauliString,
    adjoint,
    conjugate_matrix,
    conjugate_sign,
    decompose,
    multiply,
)
from .propagation import FreeStep, PropagationState, propagate, renormalize, step
from .schedules import (
    ProtocolConfig,
    Schedule,
    derandomize,
    export_schedule,
    import_schedule,
    make_schedule,
    schedule_cdd,
    schedule_emd,
    schedule_free,
    schedule_hybrid,
    schedule_nrd,
    schedule_pdd,
    schedule_rpd,
    schedule_sdd,
)

__version__ = "0.1.0"
