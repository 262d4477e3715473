"""Symmetric eigenvalue helpers and the noise-level eigenvalue problem.

The corrected Gram matrix of a dataset is an even matrix polynomial in the
noise scale, ``P(sigma) = C_0 + sigma**2 C_1 + ... + sigma**(2r) C_r`` with
symmetric coefficients.  The noise level estimate is the smallest
``sigma >= 0`` at which the smallest eigenvalue of ``P(sigma)`` reaches zero;
below that level the matrix is positive semidefinite, above it the smallest
eigenvalue is negative.  In the variable ``lam = sigma**2`` this is a real
polynomial eigenvalue problem, solved here by companion linearization with a
guarded bisection fallback.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg
from scipy.optimize import brentq

from .errors import NoSolutionError

__all__ = [
    "RESIDUAL_TOL_REL",
    "BISECTION_REL_WIDTH",
    "MULTIPLICITY_REL_TOL",
    "SymmetricEigenResult",
    "sym_eig",
    "smallest_eig_min",
    "PepSolution",
    "solve_pep",
]

# Acceptable |lambda_min(P(sigma_hat))| relative to ||C_0||_F.
RESIDUAL_TOL_REL = 1e-9
# Bisection terminates when the bracket is narrower than this times sigma_hi.
BISECTION_REL_WIDTH = 1e-12
# A second eigenvalue below this times ||C_0||_F marks a near-degenerate null space.
MULTIPLICITY_REL_TOL = 1e-6

_SCAN_POINTS = 33


@dataclass(frozen=True)
class SymmetricEigenResult:
    """Ascending eigenvalues and orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray


def _checked_symmetric(matrix: np.ndarray, name: str = "matrix") -> np.ndarray:
    mat = np.asarray(matrix, dtype=float)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValueError(f"{name} must be square, got shape {mat.shape}")
    if not np.all(np.isfinite(mat)):
        raise ValueError(f"{name} has non-finite entries")
    scale = np.linalg.norm(mat)
    if np.linalg.norm(mat - mat.T) > 1e-12 * max(scale, 1e-300):
        raise ValueError(f"{name} is not symmetric within 1e-12 relative tolerance")
    return 0.5 * (mat + mat.T)


def sym_eig(matrix: np.ndarray) -> SymmetricEigenResult:
    """Eigendecomposition of a symmetric matrix with a deterministic sign convention.

    Each eigenvector is flipped so that its largest-magnitude entry is
    positive (first such entry on ties).
    """
    mat = _checked_symmetric(matrix)
    vals, vecs = np.linalg.eigh(mat)
    for k in range(vecs.shape[1]):
        i = int(np.argmax(np.abs(vecs[:, k])))
        if vecs[i, k] < 0:
            vecs[:, k] = -vecs[:, k]
    return SymmetricEigenResult(vals, vecs)


def _poly_eval(coeffs: Sequence[np.ndarray], lam: float) -> np.ndarray:
    acc = np.zeros_like(coeffs[0])
    for c in reversed(coeffs):
        acc = acc * lam + c
    return acc


def smallest_eig_min(coeffs: Sequence[np.ndarray], sigma: float) -> float:
    """Smallest eigenvalue of the matrix polynomial at noise scale ``sigma``."""
    mats = [np.asarray(c, dtype=float) for c in coeffs]
    val = _poly_eval(mats, float(sigma) ** 2)
    return float(np.linalg.eigvalsh(0.5 * (val + val.T))[0])


@dataclass(frozen=True)
class PepSolution:
    """Smallest validated root of the noise-level eigenvalue problem.

    ``sigma_sq_hat`` is the root in the squared variable, ``theta_hat`` the
    corresponding null direction (unit length in the declared norm, largest
    entry positive), ``residual`` the left-over ``|lambda_min|`` relative to
    ``||C_0||_F``, and ``method`` records which solver produced the root.
    """

    sigma_sq_hat: float
    theta_hat: np.ndarray
    residual: float
    method: str
    warnings: tuple[str, ...] = ()
    sign_flipped: bool = False


def _linearization_candidates(mats: list[np.ndarray]) -> list[float]:
    """Real nonnegative eigenvalues of the companion pencil in ``lam = sigma**2``."""
    r = len(mats) - 1
    m = mats[0].shape[0]
    n = m * r
    a = np.zeros((n, n))
    b = np.eye(n)
    if r > 1:
        a[: n - m, m:] = np.eye(n - m)
    a[n - m:, :] = -np.column_stack(mats[:-1])
    b[n - m:, n - m:] = mats[-1]
    vals = scipy.linalg.eig(a, b, right=False)
    finite = vals[np.isfinite(vals)]
    if finite.size == 0:
        return []
    lam_scale = float(np.max(np.abs(finite)))
    if lam_scale == 0.0:
        return [0.0]
    real = finite[np.abs(finite.imag) <= 1e-6 * np.maximum(np.abs(finite), lam_scale * 1e-9)]
    lams = np.real(real)
    lams = lams[lams >= -1e-8 * lam_scale]
    lams = np.clip(lams, 0.0, None)
    lams = np.unique(lams)
    out: list[float] = []
    for lam in lams:
        if out and lam - out[-1] <= 1e-10 * max(lam, 1.0):
            continue
        out.append(float(lam))
    return out


def _scan_clear(g, sigma: float, tol: float) -> float | None:
    """Return a grid point in (0, sigma) where g dips below -tol, else None."""
    if sigma <= 0:
        return None
    for t in np.linspace(0.0, sigma, _SCAN_POINTS)[1:-1]:
        if g(t) < -tol:
            return float(t)
    return None


def _polish(g, sigma: float) -> float:
    """Tighten a root of g by bracketed root finding near ``sigma``."""
    if sigma <= 0:
        return sigma
    eps4 = 4 * np.finfo(float).eps
    for widen in (1e-6, 1e-4, 1e-2):
        lo, hi = sigma * (1 - widen), sigma * (1 + widen)
        glo, ghi = g(lo), g(hi)
        if glo == 0.0:
            return lo
        if glo > 0.0 > ghi:
            return float(brentq(g, lo, hi, xtol=1e-15 * max(sigma, 1.0), rtol=eps4))
    return sigma


def _grow_bracket(g, sigma0: float) -> tuple[float, float]:
    lo, hi = 0.0, sigma0
    for _ in range(200):
        if g(hi) < 0.0:
            return lo, hi
        lo = hi
        hi *= 2.0
    raise NoSolutionError(
        f"smallest eigenvalue stayed positive for every noise scale up to {hi:.3e}; "
        f"the corrected matrix never becomes singular, so no noise level is "
        f"consistent with this dataset and basis"
    )


def _bisect(g, sigma0: float, tol: float) -> float:
    lo, hi = _grow_bracket(g, sigma0)
    for _ in range(8):
        width = BISECTION_REL_WIDTH * hi
        a, b = lo, hi
        while b - a > width:
            mid = 0.5 * (a + b)
            if g(mid) < 0.0:
                b = mid
            else:
                a = mid
        root = 0.5 * (a + b)
        dip = _scan_clear(g, root, tol)
        if dip is None:
            return root
        lo, hi = 0.0, dip
    return root


def solve_pep(coeffs: Sequence[np.ndarray], weights: np.ndarray | None = None) -> PepSolution:
    """Smallest noise scale making the matrix polynomial singular.

    ``coeffs`` are the symmetric coefficient matrices of the even polynomial
    ``P(sigma) = sum_k sigma**(2k) coeffs[k]``.  ``weights`` (positive, one per
    row) declare the norm for the returned null direction; the root itself is
    invariant under that rescaling.  Candidate roots from the companion
    linearization are validated against the sign structure of the smallest
    eigenvalue (nonnegative below the root) and polished; if no candidate
    survives, a guarded bisection takes over.  Raises
    :class:`~hyperfit.errors.NoSolutionError` when no root exists.
    """
    if len(coeffs) == 0:
        raise ValueError("need at least one coefficient matrix")
    mats = [_checked_symmetric(c, f"coefficient {k}") for k, c in enumerate(coeffs)]
    m = mats[0].shape[0]
    for c in mats:
        if c.shape != (m, m):
            raise ValueError("coefficient matrices must share one shape")
    lam_w = None
    if weights is not None:
        w = np.asarray(weights, dtype=float).reshape(-1)
        if w.shape[0] != m or np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise ValueError("weights must be m positive finite numbers")
        lam_w = 1.0 / np.sqrt(w)
        mats = [c * lam_w[:, None] * lam_w[None, :] for c in mats]

    scale = float(np.linalg.norm(mats[0]))
    if scale == 0.0:
        raise ValueError("constant coefficient matrix is zero")
    tol = RESIDUAL_TOL_REL * scale
    while len(mats) > 1 and np.linalg.norm(mats[-1]) == 0.0:
        mats = mats[:-1]

    def g(sig: float) -> float:
        val = _poly_eval(mats, sig * sig)
        return float(np.linalg.eigvalsh(val)[0])

    warnings: list[str] = []
    sigma_hat = None
    method = "linearization"
    if len(mats) == 1:
        if g(0.0) <= tol:
            sigma_hat = 0.0
        else:
            raise NoSolutionError(
                "the corrected matrix does not depend on the noise level (every "
                "coefficient beyond the constant term vanishes) and is positive "
                "definite; check that some basis monomial has odd total degree "
                "in the noisy coordinates"
            )
    else:
        for lam in _linearization_candidates(mats):
            sig = float(np.sqrt(lam))
            if abs(g(sig)) > tol:
                continue
            if _scan_clear(g, sig, tol) is not None:
                continue
            sigma_hat = _polish(g, sig)
            break
        if sigma_hat is None:
            sigma0_candidates = [
                (scale / float(np.linalg.norm(c))) ** (1.0 / (2 * k))
                for k, c in enumerate(mats)
                if k >= 1 and np.linalg.norm(c) > 0
            ]
            if g(0.0) <= tol:
                sigma_hat = 0.0
            else:
                sigma_hat = _bisect(g, min(sigma0_candidates), tol)
            method = "bisection"

    residual = abs(g(sigma_hat)) / scale
    if residual > RESIDUAL_TOL_REL:
        warnings.append(
            f"smallest eigenvalue at the estimated noise level is {residual:.2e} "
            f"of ||C_0||_F, above the residual tolerance"
        )
    final = _poly_eval(mats, sigma_hat * sigma_hat)
    vals, vecs = np.linalg.eigh(final)
    if m > 1 and vals[1] < MULTIPLICITY_REL_TOL * scale:
        warnings.append(
            "second-smallest eigenvalue is close to zero at the estimated noise "
            "level; the fitted coefficient vector may not be unique"
        )
    v = vecs[:, 0]
    theta = lam_w * v if lam_w is not None else v.copy()
    i = int(np.argmax(np.abs(theta)))
    flipped = theta[i] < 0
    if flipped:
        theta = -theta
    return PepSolution(
        sigma_sq_hat=float(sigma_hat) ** 2,
        theta_hat=theta,
        residual=residual,
        method=method,
        warnings=tuple(warnings),
        sign_flipped=bool(flipped),
    )
