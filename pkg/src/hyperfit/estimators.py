"""Hypersurface fitting by ordinary and adjusted least squares.

All three estimators return the coefficient vector of the polynomial
``R(d) = sum_k theta_k d**alpha^(k)`` whose zero set best matches the data:

* :func:`fit_ols` minimizes the plain sum of squared residuals over unit
  coefficient vectors, which is the smallest eigenvector of the monomial Gram
  matrix.  It is biased when the points carry additive noise.
* :func:`fit_als_known_sigma` replaces the Gram matrix by its bias-corrected
  version at a known noise scale.
* :func:`fit_als` also estimates the noise scale as the smallest level at
  which the corrected matrix becomes singular.

Noise enters through a covariance shape ``sigma0`` (the overall scale stays
free).  A factorization ``sigma0 = K J_s K^T`` reduces the general case to
independent unit noise in the first ``s`` coordinates of the transformed data
``K^(-1) d``; the fitted polynomial is mapped back through the induced basis
change.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoSolutionError
from .moments import adjusted_basis, moment_array
from .multidegree import MonomialBasis, lower_closure
from .quasihankel import psi_coefficients, psi_matrix
from .spectral import MULTIPLICITY_REL_TOL, solve_pep, sym_eig
from .transforms import composition_matrix

__all__ = [
    "NormWeights",
    "euclidean_weights",
    "bombieri_weights",
    "custom_weights",
    "NoiseModelSpec",
    "reduce_covariance",
    "FitDiagnostics",
    "FitResult",
    "fit_ols",
    "fit_als_known_sigma",
    "fit_als",
    "psi_polynomial",
]

# Eigenvalues of sigma0 below this times the largest are treated as exact zeros.
RANK_TOL_REL = 1e-10


@dataclass(frozen=True)
class NormWeights:
    """Positive weights defining the norm ``||theta||^2 = sum_k w_k theta_k**2``."""

    w: np.ndarray
    kind: str

    def __post_init__(self):
        w = np.asarray(self.w, dtype=float).reshape(-1)
        if w.size == 0 or np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("norm weights must be positive finite numbers")
        object.__setattr__(self, "w", w)

    def scaling(self) -> np.ndarray:
        """Diagonal of the matrix mapping unit euclidean vectors to unit weighted ones."""
        return 1.0 / np.sqrt(self.w)


def euclidean_weights(m: int) -> NormWeights:
    return NormWeights(np.ones(int(m)), "euclidean")


def bombieri_weights(basis: MonomialBasis) -> NormWeights:
    """Weights ``alpha_1! ... alpha_q! / |alpha|!`` making the norm rotation invariant."""
    w = [
        math.prod(math.factorial(a) for a in alpha) / math.factorial(sum(alpha))
        for alpha in basis.columns
    ]
    return NormWeights(np.array(w), "bombieri")


def custom_weights(w) -> NormWeights:
    return NormWeights(np.asarray(w, dtype=float), "custom")


@dataclass(frozen=True)
class NoiseModelSpec:
    """Noise covariance shape with its reducing factorization.

    ``sigma0 = k_factor @ diag(1,...,1,0,...,0) @ k_factor.T`` with ``rank``
    ones.  Transforming points by ``k_factor^(-1)`` turns the noise into
    independent unit-shape noise in the first ``rank`` coordinates.
    """

    sigma0: np.ndarray
    k_factor: np.ndarray
    rank: int

    @property
    def q(self) -> int:
        return self.sigma0.shape[0]

    @property
    def is_identity(self) -> bool:
        return self.rank == self.q and np.array_equal(self.k_factor, np.eye(self.q))


def reduce_covariance(sigma0) -> NoiseModelSpec:
    """Factor a symmetric positive semidefinite covariance shape.

    Diagonal matrices keep axis-aligned factors (coordinates reordered by
    decreasing variance), so monomial bases stay closed under the transform.
    Dense matrices are factored by eigendecomposition.  Eigenvalues below
    ``1e-10`` of the largest count as zero; the rank must be at least one.
    """
    sig = np.asarray(sigma0, dtype=float)
    if sig.ndim != 2 or sig.shape[0] != sig.shape[1]:
        raise ValueError(f"covariance must be square, got shape {sig.shape}")
    if not np.all(np.isfinite(sig)):
        raise ValueError("covariance has non-finite entries")
    scale = np.linalg.norm(sig)
    if np.linalg.norm(sig - sig.T) > 1e-12 * max(scale, 1e-300):
        raise ValueError("covariance must be symmetric")
    q = sig.shape[0]
    if np.array_equal(sig, np.diag(np.diag(sig))):
        d = np.diag(sig).astype(float)
        if np.any(d < 0):
            raise ValueError("covariance has a negative diagonal entry")
        dmax = d.max()
        if dmax <= 0:
            raise ValueError("covariance is zero; at least one coordinate must carry noise")
        order = sorted(range(q), key=lambda j: -d[j])
        s = int(np.sum(d > RANK_TOL_REL * dmax))
        k = np.zeros((q, q))
        for pos, j in enumerate(order):
            k[j, pos] = math.sqrt(d[j]) if pos < s else 1.0
        return NoiseModelSpec(sig, k, s)
    vals, vecs = np.linalg.eigh(0.5 * (sig + sig.T))
    vals, vecs = vals[::-1], vecs[:, ::-1]
    if vals[0] <= 0:
        raise ValueError("covariance is zero; at least one coordinate must carry noise")
    if vals[-1] < -RANK_TOL_REL * vals[0]:
        raise ValueError("covariance is not positive semidefinite")
    s = int(np.sum(vals > RANK_TOL_REL * vals[0]))
    cols = [vecs[:, i] * math.sqrt(vals[i]) if i < s else vecs[:, i] for i in range(q)]
    return NoiseModelSpec(sig, np.column_stack(cols), s)


@dataclass(frozen=True)
class FitDiagnostics:
    smallest_eigenvalue: float
    eigen_gap: float | None
    residual: float | None = None
    solver: str | None = None
    warnings: tuple[str, ...] = ()
    sign_flipped: bool = False


@dataclass(frozen=True)
class FitResult:
    """Fitted coefficient vector, unit length in the declared norm.

    The sign is fixed so the largest-magnitude entry is positive.
    ``sigma_sq_hat`` is filled only by the noise-estimating fit.
    """

    theta: np.ndarray
    sigma_sq_hat: float | None
    method: str
    norm: str
    diagnostics: FitDiagnostics = field(
        default_factory=lambda: FitDiagnostics(float("nan"), None)
    )


def _as_points(points, basis: MonomialBasis) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise ValueError(f"points must be a nonempty (N, q) array, got shape {pts.shape}")
    if pts.shape[1] != basis.q:
        raise ValueError(
            f"points have {pts.shape[1]} coordinates but the basis is over {basis.q}"
        )
    if not np.all(np.isfinite(pts)):
        raise ValueError("points contain non-finite values")
    return pts


def _as_noise(noise, q: int) -> NoiseModelSpec:
    if noise is None:
        eye = np.eye(q)
        return NoiseModelSpec(eye, eye.copy(), q)
    if not isinstance(noise, NoiseModelSpec):
        noise = reduce_covariance(noise)
    if noise.q != q:
        raise ValueError(f"noise covariance is {noise.q}-dimensional, points are {q}-dimensional")
    return noise


def _default_weights(basis: MonomialBasis, combination: np.ndarray | None) -> NormWeights:
    if combination is not None:
        return euclidean_weights(combination.shape[0])
    return bombieri_weights(basis)


def _as_combination(combination, basis: MonomialBasis) -> np.ndarray | None:
    if combination is None:
        return None
    f = np.asarray(combination, dtype=float)
    if f.ndim != 2 or f.shape[1] != basis.m:
        raise ValueError(
            f"combination matrix must have {basis.m} columns (one per basis monomial)"
        )
    return f


def psi_polynomial(points, basis: MonomialBasis, noise=None, combination=None) -> list[np.ndarray]:
    """Coefficient matrices of the corrected Gram matrix in powers of ``sigma**2``.

    The matrices live on the requested basis (after the optional ``combination``
    rows); noise with a non-identity covariance shape is handled by transforming
    the data and conjugating back through the induced basis change.
    """
    pts = _as_points(points, basis)
    nm = _as_noise(noise, basis.q)
    f = _as_combination(combination, basis)
    if not nm.is_identity:
        pts = np.linalg.solve(nm.k_factor, pts.T).T
        f_k = composition_matrix(basis, nm.k_factor, np.zeros(basis.q))
        f = f_k if f is None else f @ f_k
    support = basis.pair_support()
    marr = moment_array(pts, lower_closure(support))
    adj = adjusted_basis(marr, nm.rank, basis.sub_degree(nm.rank), support)
    mats = [qh.matrix for qh in psi_coefficients(basis, adj)]
    if f is not None:
        mats = [f @ p @ f.T for p in mats]
    return mats


def _eig_fit(psi: np.ndarray, weights: NormWeights, method: str) -> FitResult:
    lam = weights.scaling()
    smat = psi * lam[:, None] * lam[None, :]
    eig = sym_eig(smat)
    m = smat.shape[0]
    theta = lam * eig.eigenvectors[:, 0]
    i = int(np.argmax(np.abs(theta)))
    flipped = theta[i] < 0
    if flipped:
        theta = -theta
    gap = float(eig.eigenvalues[1] - eig.eigenvalues[0]) if m > 1 else None
    warnings: tuple[str, ...] = ()
    if gap is not None and gap <= MULTIPLICITY_REL_TOL * np.linalg.norm(smat):
        warnings = (
            "smallest eigenvalue is nearly repeated; the fitted coefficient "
            "vector may not be unique",
        )
    diag = FitDiagnostics(
        smallest_eigenvalue=float(eig.eigenvalues[0]),
        eigen_gap=gap,
        warnings=warnings,
        sign_flipped=bool(flipped),
    )
    return FitResult(theta, None, method, weights.kind, diag)


def fit_ols(points, basis: MonomialBasis, weights: NormWeights | None = None,
            combination=None) -> FitResult:
    """Ordinary least squares fit: smallest eigenvector of the monomial Gram matrix."""
    pts = _as_points(points, basis)
    f = _as_combination(combination, basis)
    if weights is None:
        weights = _default_weights(basis, f)
    psi = psi_matrix(basis, pts).matrix
    if f is not None:
        psi = f @ psi @ f.T
    return _eig_fit(psi, weights, "ols")


def fit_als_known_sigma(points, basis: MonomialBasis, noise=None, sigma: float = 0.0,
                        weights: NormWeights | None = None, combination=None) -> FitResult:
    """Adjusted least squares fit at a known noise scale ``sigma``."""
    if sigma < 0:
        raise ValueError("sigma must be >= 0")
    f = _as_combination(combination, basis)
    if weights is None:
        weights = _default_weights(basis, f)
    mats = psi_polynomial(points, basis, noise, combination)
    s2 = float(sigma) ** 2
    psi = np.zeros_like(mats[0])
    for c in reversed(mats):
        psi = psi * s2 + c
    return _eig_fit(psi, weights, "als-sigma")


def fit_als(points, basis: MonomialBasis, noise=None, weights: NormWeights | None = None,
            combination=None) -> FitResult:
    """Adjusted least squares fit with the noise scale estimated from the data.

    The estimate is the smallest noise level at which the corrected Gram
    matrix becomes singular; the coefficient vector spans the corresponding
    null direction.  Raises :class:`~hyperfit.errors.NoSolutionError` when no
    such level exists for this basis and covariance shape.
    """
    f = _as_combination(combination, basis)
    if weights is None:
        weights = _default_weights(basis, f)
    mats = psi_polynomial(points, basis, noise, combination)
    pep = solve_pep(mats, weights.w)
    lam = weights.scaling()
    smats = [c * lam[:, None] * lam[None, :] for c in mats]
    s2 = pep.sigma_sq_hat
    smat = np.zeros_like(smats[0])
    for c in reversed(smats):
        smat = smat * s2 + c
    vals = np.linalg.eigvalsh(smat)
    gap = float(vals[1] - vals[0]) if vals.size > 1 else None
    diag = FitDiagnostics(
        smallest_eigenvalue=float(vals[0]),
        eigen_gap=gap,
        residual=pep.residual,
        solver=pep.method,
        warnings=pep.warnings,
        sign_flipped=pep.sign_flipped,
    )
    return FitResult(pep.theta_hat, pep.sigma_sq_hat, "als", weights.kind, diag)
