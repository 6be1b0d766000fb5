"""Eigenvalue bounds for block-diagonally preconditioned multiple saddle-point systems."""
from .bounds import (
    ContainmentReport,
    EigenvalueBounds,
    bounds_for,
    bounds_n2_closed,
    bounds_n2_rect,
    compute_bounds,
    compute_bounds_bruteforce,
    containment,
    corner_assignments,
)
from .errors import (
    ConfigError,
    MatrixMarketError,
    NotARootError,
    NumericalFailure,
    ParameterError,
    RankDeficiencyError,
    SaddleBoundsError,
    SingularApproximationError,
    SpectralError,
    StructuralError,
    ZeroGapWarning,
)
from .estimators import MinresSolver, SchurPreconditioner, SpectralBoundEstimator
from .indicators import IndicatorSet, compute_E_interval, compute_R_interval, compute_indicator_set
from .minres import SolveReport, convergence_envelope, equalize_widths, minres, minres_operator
from .mmio import load_matrix, load_system, save_matrix, save_system
from .polynomials import (
    GammaAssignment,
    RootSet,
    eval_U,
    eval_U_sequence,
    partial_derivative_U,
    root_sensitivity_sign,
    roots_U,
    tridiagonal_eigvalsh,
    wronskian_a,
)
from .randgen import SuiteConfig, SuiteResult, random_rect_system, random_system, run_suite
from .saddle_core import (
    ApproxStrategy,
    BlockSaddleSystem,
    SchurChain,
    apply_preconditioner,
    assemble_full,
    build_exact_schur_chain,
    build_inexact_chain,
    validate_system,
)
from .spectrum import SpectrumReport, extremal_eigs, preconditioned_spectrum

__version__ = "0.1.0"
