"""Unsharp qubit measurements: POVMs, joint measurability, entropic uncertainty and moment matrices."""

__version__ = "0.1.0"

from ._jit import NUMBA_ENABLED, backend_name
from .compat import (
    BlochEffect,
    FeasibilityReport,
    GrandPovm,
    GrandPovmProblem,
    SolverConfig,
    Verdict,
    canonical_pair_grand_povm,
    marginal_constraints,
    pair_criterion_unbiased,
    problem_for_axes,
    solve_feasibility,
    threshold,
)
from .linalg import HermitianOp, eig_hermitian, kron, partial_trace, sqrt_psd, trace_norm
from .moments import (
    CorrelationTriple,
    MomentMatrix,
    build_moment_matrix,
    lgi_value,
    moment_eigenvalues,
    pair_correlation,
    positivity_threshold,
    sequential_pair_table,
    trine_axes,
)
from .povm import X, Y, Z, Axis, Effect, Povm, expectation, luders_update, noisy_spin, outcome_distribution, sharp_spin, validate
from .sampling import SampleRun, empirical_conditional_entropy, empirical_correlation, sample_table
from .states import (
    CqState,
    DensityOp,
    conditional_vn_entropy,
    cq_post_measurement,
    measured_conditional_entropy,
    singlet,
    von_neumann_entropy,
)
from .uncertainty import (
    GameReport,
    JointProbTable,
    beating_threshold,
    binary_entropy,
    conditional_shannon,
    joint_table,
    memory_bound,
    mu_bound,
    overlap_c,
    run_game,
)
