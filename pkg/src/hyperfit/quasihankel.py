"""Quasi-Hankel matrices: moment arrays folded over a monomial basis.

For an ordered basis with columns ``alpha^(1), ..., alpha^(m)`` and an array
``B`` indexed by multidegrees, the quasi-Hankel matrix has entries
``H[k, l] = B[alpha^(k) + alpha^(l)]``.  Folding the raw moments of a dataset
gives the Gram matrix of the basis monomials; folding the noise-corrected
arrays gives its bias-corrected counterpart, a matrix polynomial in
``sigma**2``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .moments import AdjustedMomentBasis, MomentArray, moment_array
from .multidegree import MonomialBasis

__all__ = ["QuasiHankelMatrix", "build", "psi_matrix", "adjusted_psi", "psi_coefficients"]


@dataclass(frozen=True)
class QuasiHankelMatrix:
    """Symmetric (m, m) matrix tied to the basis that indexed it."""

    basis: MonomialBasis
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=float)
        if mat.shape != (self.basis.m, self.basis.m):
            raise ValueError(f"matrix shape {mat.shape} does not match basis size {self.basis.m}")
        object.__setattr__(self, "matrix", mat)


def _fill(basis: MonomialBasis, lookup) -> np.ndarray:
    """Fill the matrix with one lookup per distinct column-pair sum."""
    m = basis.m
    cols = basis.columns
    cache: dict[tuple[int, ...], float] = {}
    out = np.empty((m, m))
    for k in range(m):
        for l in range(k, m):
            sum_alpha = tuple(x + y for x, y in zip(cols[k], cols[l]))
            if sum_alpha not in cache:
                cache[sum_alpha] = lookup(sum_alpha)
            out[k, l] = out[l, k] = cache[sum_alpha]
    return out


def build(basis: MonomialBasis, array: MomentArray) -> QuasiHankelMatrix:
    """Fold an array over the basis; equal index sums share one stored value."""
    return QuasiHankelMatrix(basis, _fill(basis, array.value))


def psi_matrix(basis: MonomialBasis, points: np.ndarray) -> QuasiHankelMatrix:
    """Gram matrix of the basis monomials summed over the dataset."""
    arr = moment_array(points, basis.pair_support())
    return build(basis, arr)


def adjusted_psi(basis: MonomialBasis, adjusted: AdjustedMomentBasis, sigma: float) -> QuasiHankelMatrix:
    """Bias-corrected Gram matrix at a fixed noise scale."""
    return QuasiHankelMatrix(basis, _fill(basis, lambda a: adjusted.evaluate(sigma, a)))


def psi_coefficients(basis: MonomialBasis, adjusted: AdjustedMomentBasis) -> list[QuasiHankelMatrix]:
    """Coefficient matrices of the corrected Gram matrix in powers of ``sigma**2``."""
    return [build(basis, arr) for arr in adjusted.arrays]
