"""rankgauge: certify entanglement levels of quantum states and subspaces
by minimizing the complement overlap over a bounded-rank manifold."""

from .errors import (
    InputError,
    OptimizationError,
    RankgaugeError,
    SingularParameterError,
    UsageError,
)
from .tensor_core import (
    Bipartition,
    HermitianOp,
    PureState,
    basis_state,
    canonical_bipartitions,
    haar_random_state,
    hermitian_eig,
    inner_product,
    kron_chain,
    reshape_bipartite,
    schmidt_coefficients,
    schmidt_rank,
    svd_complex,
    trace_norm,
    unitary_from_hamiltonian,
)
from .subspace import (
    MixedState,
    Subspace,
    apply_unitary_to_subspace,
    complement_basis,
    complement_overlap_sq,
    from_spanning_set,
    load_state,
    load_subspace,
    pure_density,
    span_of,
    state_from_dict,
    state_to_dict,
    subspace_from_dict,
    subspace_to_dict,
    support_space,
)
from .rank_param import (
    RankParams,
    TrialConfig,
    build_product_term,
    build_state,
    params_length,
    random_init,
    softplus,
)
from .objective import (
    LossEvaluation,
    central_difference,
    finite_diff_gradient,
    loss,
    loss_and_gradient,
)
from .optimizer import (
    LbfgsResult,
    OptimConfig,
    OptimReport,
    TrialDiagnostics,
    lbfgs_minimize,
    minimize_trial,
    run_certification,
)
from .measures import (
    ZERO_THRESHOLD,
    CertificateScan,
    RobustnessResult,
    ScanEntry,
    border_rank_scan,
    er_bipartite_pure_oracle,
    er_pure,
    er_subspace,
    genuine_entanglement_scan,
    is_genuinely_entangled,
    minimal_rank_scan,
    random_hermitian_with_trace_norm,
    robustness_experiment,
    support_bound_er,
)
from . import catalog

__version__ = "0.1.0"

__all__ = [
    "Bipartition",
    "CertificateScan",
    "HermitianOp",
    "InputError",
    "LbfgsResult",
    "LossEvaluation",
    "MixedState",
    "OptimConfig",
    "OptimReport",
    "OptimizationError",
    "PureState",
    "RankParams",
    "RankgaugeError",
    "RobustnessResult",
    "ScanEntry",
    "SingularParameterError",
    "Subspace",
    "TrialConfig",
    "TrialDiagnostics",
    "UsageError",
    "ZERO_THRESHOLD",
    "apply_unitary_to_subspace",
    "basis_state",
    "border_rank_scan",
    "build_product_term",
    "build_state",
    "canonical_bipartitions",
    "catalog",
    "central_difference",
    "complement_basis",
    "complement_overlap_sq",
    "er_bipartite_pure_oracle",
    "er_pure",
    "er_subspace",
    "finite_diff_gradient",
    "from_spanning_set",
    "genuine_entanglement_scan",
    "haar_random_state",
    "hermitian_eig",
    "inner_product",
    "is_genuinely_entangled",
    "kron_chain",
    "lbfgs_minimize",
    "load_state",
    "load_subspace",
    "loss",
    "loss_and_gradient",
    "minimal_rank_scan",
    "minimize_trial",
    "params_length",
    "pure_density",
    "random_hermitian_with_trace_norm",
    "random_init",
    "reshape_bipartite",
    "robustness_experiment",
    "run_certification",
    "schmidt_coefficients",
    "schmidt_rank",
    "softplus",
    "span_of",
    "state_from_dict",
    "state_to_dict",
    "subspace_from_dict",
    "subspace_to_dict",
    "support_space",
    "svd_complex",
    "trace_norm",
    "unitary_from_hamiltonian",
]
