"""Teleportation fidelity and resource diagnostics of non-Gaussian two-mode states."""

from .errors import (
    ConvergenceError,
    InvalidCovarianceError,
    InvalidSpecError,
    NGTeleportError,
    TruncationError,
    ZeroNormError,
)
from .fock import (
    Family,
    SingleModeState,
    StateSpec,
    TwoModeState,
    apply_ladder,
    beam_splitter,
    build_input,
    build_resource,
    build_tmsv_family,
    fock_state,
    squeezed_vacuum,
    two_mode_fock,
)
from .gaussian import (
    CovarianceMatrix,
    SymmetricGaussianSpec,
    bs_output_covariance,
    bs_transform_covariance,
    covariance_of,
    gaussian_fidelity,
    is_bona_fide,
    least_eigenvalue,
    symmetric_gaussian_conditions,
    symplectic_eigenvalues,
    tmsv_family_lambda_min,
)
from .measures import (
    MeasureReport,
    entanglement_entropy,
    epr_analytic,
    epr_from_input_moments,
    epr_uncertainty,
    squeezing_degree,
    sva,
    two_mode_ng,
    two_mode_ng_direct,
    wehrl_entropy,
    wehrl_ng,
)
from .sweep import SweepConfig, evaluate, reproduce_figure, run_sweep
from .teleport import CharacteristicFunction, chi, displacement_matrix, fidelity_coherent, fidelity_sum_oracle

__all__ = [name for name in dir() if not name.startswith("_")]
