"""Fitting algebraic hypersurfaces to noisy point clouds.

The package estimates the coefficient vector of a multivariate polynomial
whose zero set passes near a set of points.  Alongside the classical
least squares fit it implements bias-corrected variants for points observed
under additive noise, with the noise level either known or estimated as part
of the fit.
"""

from .errors import ClosureError, HyperfitError, NoSolutionError, SupportError
from .estimators import (
    FitDiagnostics,
    FitResult,
    NoiseModelSpec,
    NormWeights,
    bombieri_weights,
    custom_weights,
    euclidean_weights,
    fit_als,
    fit_als_known_sigma,
    fit_ols,
    psi_polynomial,
    reduce_covariance,
)
from .experiments import (
    SPECIAL_DATA,
    CurveSpec,
    ExperimentResult,
    NoiseSpec,
    SweepRow,
    add_noise,
    consistency_sweep,
    generate_true_points,
    sigma_sweep,
    spread,
    true_theta,
)
from .moments import (
    AdjustedMomentBasis,
    HermiteCoefficientTable,
    MomentArray,
    adjusted_basis,
    adjusted_moment,
    hermite_eval,
    hermite_shift,
    hermite_table,
    moment_array,
)
from .multidegree import (
    MonomialBasis,
    Multidegree,
    box_set,
    degree_set,
    eval_monomials,
    is_lower_set,
    lower_closure,
    minkowski_sum,
    parse_basis_spec,
    total_degree,
    triangular_set,
)
from .quasihankel import QuasiHankelMatrix, adjusted_psi, build, psi_coefficients, psi_matrix
from .spectral import PepSolution, SymmetricEigenResult, smallest_eig_min, solve_pep, sym_eig
from .transforms import (
    AffineTransform,
    InducedCoefficientMap,
    InvarianceReport,
    check_invariance,
    classify,
    composition_matrix,
    induced_map,
    sin_angle,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "HyperfitError", "SupportError", "ClosureError", "NoSolutionError",
    "Multidegree", "MonomialBasis", "total_degree", "degree_set", "triangular_set",
    "box_set", "minkowski_sum", "lower_closure", "is_lower_set", "eval_monomials",
    "parse_basis_spec",
    "hermite_eval", "hermite_table", "HermiteCoefficientTable", "MomentArray",
    "moment_array", "hermite_shift", "AdjustedMomentBasis", "adjusted_basis",
    "adjusted_moment",
    "QuasiHankelMatrix", "build", "psi_matrix", "adjusted_psi", "psi_coefficients",
    "SymmetricEigenResult", "sym_eig", "smallest_eig_min", "PepSolution", "solve_pep",
    "NormWeights", "euclidean_weights", "bombieri_weights", "custom_weights",
    "NoiseModelSpec", "reduce_covariance", "FitDiagnostics", "FitResult",
    "fit_ols", "fit_als_known_sigma", "fit_als", "psi_polynomial",
    "AffineTransform", "classify", "composition_matrix", "InducedCoefficientMap",
    "induced_map", "sin_angle", "InvarianceReport", "check_invariance",
    "SPECIAL_DATA", "CurveSpec", "generate_true_points", "true_theta", "NoiseSpec",
    "add_noise", "spread", "SweepRow", "ExperimentResult", "consistency_sweep",
    "sigma_sweep",
]
