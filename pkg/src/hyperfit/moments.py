"""Moment arrays and their Hermite-type noise correction.

The raw moment of a point set ``D = {d^(1), ..., d^(N)}`` at multidegree
``alpha`` is the power sum ``M_alpha = sum_n prod_j d_j^(n)**alpha_j``.  When
the points carry additive Gaussian noise of scale ``sigma`` in their first
``s`` coordinates, replacing each plain power ``z**k`` by the polynomial
``h_k(z)`` defined through

    h_0 = 1,   h_1 = z,   h_k(z) = z * h_{k-1}(z) - (k - 1) * sigma**2 * h_{k-2}(z)

removes the noise bias in expectation: ``E h_k(a + eps) = a**k`` for
``eps ~ N(0, sigma**2)``.  Collecting powers of ``sigma`` turns the corrected
moments into even polynomials in ``sigma`` whose coefficient arrays are built
once per dataset and evaluated at any noise level.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import SupportError
from .multidegree import Multidegree, as_multidegree, degree_set

__all__ = [
    "hermite_eval",
    "hermite_table",
    "HermiteCoefficientTable",
    "MomentArray",
    "moment_array",
    "hermite_shift",
    "AdjustedMomentBasis",
    "adjusted_basis",
    "adjusted_moment",
]


def hermite_eval(sigma: float, k: int, z: float) -> float:
    """Evaluate ``h_k(z)`` for noise scale ``sigma`` via the three-term recursion."""
    if k < 0:
        raise ValueError("k must be >= 0")
    prev2, prev1 = 1.0, float(z)
    if k == 0:
        return prev2
    if k == 1:
        return prev1
    s2 = float(sigma) ** 2
    for i in range(2, k + 1):
        prev2, prev1 = prev1, z * prev1 - (i - 1) * s2 * prev2
    return prev1


@dataclass(frozen=True)
class HermiteCoefficientTable:
    """Integer coefficients ``c[i, j]`` with ``h_k(z) = sum_{i+j=k} c[i, j] sigma**i z**j``.

    Only even ``i`` rows are nonzero, the sign of row ``i = 2t`` is ``(-1)**t``,
    and row 0 is identically 1, so each table entry is the exact integer
    produced by the recursion (no floating point is involved).
    """

    degree_bound: int
    coefficients: Mapping[tuple[int, int], int]

    def coefficient(self, i: int, j: int) -> int:
        if i < 0 or j < 0:
            return 0
        if i + j > self.degree_bound:
            raise ValueError(
                f"table was built for degree <= {self.degree_bound}, asked for i+j={i + j}"
            )
        return self.coefficients.get((i, j), 0)


@lru_cache(maxsize=None)
def hermite_table(degree_bound: int) -> HermiteCoefficientTable:
    """Build the coefficient table for all ``h_k`` with ``k <= degree_bound``."""
    if degree_bound < 0:
        raise ValueError("degree_bound must be >= 0")
    coef: dict[tuple[int, int], int] = {(0, 0): 1}
    if degree_bound >= 1:
        coef[(0, 1)] = 1
    for k in range(2, degree_bound + 1):
        for i in range(0, k + 1):
            j = k - i
            val = coef.get((i, j - 1), 0) - (k - 1) * coef.get((i - 2, j), 0)
            if val:
                coef[(i, j)] = val
    return HermiteCoefficientTable(degree_bound, coef)


@dataclass(frozen=True)
class MomentArray:
    """Finite slice of a moment array: values indexed by multidegree.

    ``values`` must hold an entry for every multidegree in ``support``; it may
    hold more (extra entries are legal and are used by the noise-correction
    shifts, which reach below the declared support).
    """

    values: Mapping[Multidegree, float]
    support: frozenset[Multidegree]

    def __post_init__(self):
        missing = [a for a in self.support if a not in self.values]
        if missing:
            raise SupportError(sorted(missing)[0])

    def value(self, alpha: Sequence[int]) -> float:
        alpha = as_multidegree(alpha)
        try:
            return self.values[alpha]
        except KeyError:
            raise SupportError(alpha) from None

    def restricted(self, support: Iterable[Multidegree]) -> "MomentArray":
        support = frozenset(as_multidegree(a) for a in support)
        vals = {}
        for a in support:
            if a not in self.values:
                raise SupportError(a)
            vals[a] = self.values[a]
        return MomentArray(vals, support)

    def to_records(self) -> list[dict]:
        """JSON-friendly listing sorted by degree then reverse-lex exponents."""
        order = sorted(self.support, key=lambda a: (sum(a), tuple(-x for x in a)))
        return [{"alpha": list(a), "value": float(self.values[a])} for a in order]


def moment_array(points: np.ndarray, support: Iterable[Multidegree]) -> MomentArray:
    """Power sums of a dataset on an explicit support.

    ``points`` is an (N, q) array with one point per row.  The entry at the
    zero multidegree always equals N.
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError(f"points must be a 2-d array, got shape {pts.shape}")
    n, q = pts.shape
    if n == 0:
        raise ValueError("dataset is empty")
    support = frozenset(as_multidegree(a) for a in support)
    for a in support:
        if len(a) != q:
            raise ValueError(f"multidegree {a} has {len(a)} entries, points have {q}")
    maxdeg = max((max(a) for a in support), default=0)
    pows = np.empty((q, maxdeg + 1, n))
    pows[:, 0, :] = 1.0
    for e in range(1, maxdeg + 1):
        pows[:, e, :] = pows[:, e - 1, :] * pts.T
    vals: dict[Multidegree, float] = {}
    for a in support:
        row = np.ones(n)
        for j, e in enumerate(a):
            if e:
                row = row * pows[j, e, :]
        vals[a] = float(row.sum())
    return MomentArray(vals, support)


def hermite_shift(
    m: MomentArray,
    nu: Sequence[int],
    table: HermiteCoefficientTable | None = None,
    support: Iterable[Multidegree] | None = None,
) -> MomentArray:
    """Shift a moment array by ``nu`` with Hermite coefficient weights.

    The output entry at ``alpha`` is ``m[alpha - nu] * prod_j c[nu_j, alpha_j - nu_j]``
    when ``alpha >= nu`` coordinatewise and zero otherwise.  Any odd entry in
    ``nu`` makes the whole result zero, because odd coefficient rows vanish.
    """
    nu = as_multidegree(nu)
    if support is None:
        support = m.support
    support = frozenset(as_multidegree(a) for a in support)
    for a in support:
        if len(a) != len(nu):
            raise ValueError(f"shift {nu} and multidegree {a} have different lengths")
    if any(v % 2 for v in nu):
        return MomentArray({a: 0.0 for a in support}, support)
    if table is None:
        bound = max((max(a) for a in support), default=0)
        table = hermite_table(bound)
    vals: dict[Multidegree, float] = {}
    for a in support:
        if any(x < v for x, v in zip(a, nu)):
            vals[a] = 0.0
            continue
        base = tuple(x - v for x, v in zip(a, nu))
        if base not in m.values:
            raise SupportError(base)
        weight = 1
        for v, b in zip(nu, base):
            if v:
                weight *= table.coefficient(v, b)
        vals[a] = m.values[base] * weight
    return MomentArray(vals, support)


@dataclass(frozen=True)
class AdjustedMomentBasis:
    """Coefficient arrays of the noise-corrected moments in powers of ``sigma**2``.

    ``arrays[k]`` holds the coefficient of ``sigma**(2k)``; all arrays share
    one support.  ``s`` is the number of leading coordinates carrying noise.
    """

    arrays: tuple[MomentArray, ...]
    s: int
    support: frozenset[Multidegree]

    @property
    def order(self) -> int:
        return len(self.arrays) - 1

    def evaluate(self, sigma: float, alpha: Sequence[int]) -> float:
        return adjusted_moment(self, sigma, alpha)


def adjusted_basis(
    m: MomentArray,
    s: int,
    r: int,
    support: Iterable[Multidegree],
    table: HermiteCoefficientTable | None = None,
) -> AdjustedMomentBasis:
    """Build the coefficient arrays of the corrected moments on ``support``.

    The order-k array sums the Hermite shifts of ``m`` by ``2 * beta`` over all
    multidegrees ``beta`` of the first ``s`` coordinates with total degree k.
    ``m`` must hold every entry those shifts reach (its downward closure over
    ``support`` suffices); a missing entry raises :class:`SupportError` naming
    the offending multidegree.
    """
    support = frozenset(as_multidegree(a) for a in support)
    if not support:
        raise ValueError("support must be nonempty")
    q = len(next(iter(support)))
    if not 1 <= s <= q:
        raise ValueError(f"s must be in 1..{q}, got {s}")
    if r < 0:
        raise ValueError("r must be >= 0")
    if table is None:
        bound = max((max(a) for a in support), default=0)
        table = hermite_table(bound)
    pad = (0,) * (q - s)
    arrays = []
    for k in range(r + 1):
        acc = {a: 0.0 for a in support}
        for beta in degree_set(s, k):
            nu = tuple(2 * b for b in beta) + pad
            shifted = hermite_shift(m, nu, table, support)
            for a in support:
                acc[a] += shifted.values[a]
        arrays.append(MomentArray(acc, support))
    return AdjustedMomentBasis(tuple(arrays), s, support)


def adjusted_moment(basis: AdjustedMomentBasis, sigma: float, alpha: Sequence[int]) -> float:
    """Evaluate a corrected moment at noise scale ``sigma`` (Horner in ``sigma**2``)."""
    alpha = as_multidegree(alpha)
    s2 = float(sigma) ** 2
    acc = 0.0
    for arr in reversed(basis.arrays):
        acc = acc * s2 + arr.value(alpha)
    return acc
