"""Multidegrees, multidegree sets, and ordered monomial bases.

A multidegree is a tuple of non-negative integer exponents ``alpha = (a_1,
..., a_q)``; it labels the monomial ``d_1**a_1 * ... * d_q**a_q`` in the
coordinates of a point ``d``.  Finite sets of multidegrees describe which
monomials span a family of polynomials, and an ordered tuple of multidegrees
(a :class:`MonomialBasis`) fixes the coordinate system used for coefficient
vectors throughout the package.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

Multidegree = tuple[int, ...]


def as_multidegree(alpha: Sequence[int]) -> Multidegree:
    """Validate and normalize one exponent tuple."""
    out = tuple(int(a) for a in alpha)
    if len(out) == 0:
        raise ValueError("multidegree must have at least one coordinate")
    for orig, val in zip(alpha, out):
        if val != orig or val < 0:
            raise ValueError(f"multidegree entries must be integers >= 0, got {alpha!r}")
    return out


def total_degree(alpha: Sequence[int], s: int | None = None) -> int:
    """Sum of the first ``s`` exponents of ``alpha`` (all of them if ``s`` is None)."""
    alpha = as_multidegree(alpha)
    if s is None:
        s = len(alpha)
    if not 1 <= s <= len(alpha):
        raise ValueError(f"s must be in 1..{len(alpha)}, got {s}")
    return sum(alpha[:s])


def degree_set(q: int, ell: int) -> set[Multidegree]:
    """All multidegrees in ``q`` variables with total degree exactly ``ell``."""
    if q < 1:
        raise ValueError("q must be >= 1")
    if ell < 0:
        raise ValueError("ell must be >= 0")
    out: set[Multidegree] = set()
    # Stars and bars: choose q-1 cut positions among ell + q - 1 slots.
    for cuts in itertools.combinations(range(ell + q - 1), q - 1):
        prev = -1
        alpha = []
        for c in (*cuts, ell + q - 1):
            alpha.append(c - prev - 1)
            prev = c
        out.add(tuple(alpha))
    return out


def triangular_set(q: int, ell: int) -> set[Multidegree]:
    """All multidegrees in ``q`` variables with total degree at most ``ell``."""
    out: set[Multidegree] = set()
    for k in range(ell + 1):
        out |= degree_set(q, k)
    return out


def box_set(gamma: Sequence[int]) -> set[Multidegree]:
    """All multidegrees with ``alpha_j <= gamma_j`` coordinatewise."""
    gamma = as_multidegree(gamma)
    return set(itertools.product(*(range(g + 1) for g in gamma)))


def _check_common_q(aset: Iterable[Multidegree]) -> int:
    qs = {len(a) for a in aset}
    if len(qs) > 1:
        raise ValueError(f"multidegrees mix different variable counts: {sorted(qs)}")
    return qs.pop() if qs else 0


def minkowski_sum(aset: Iterable[Multidegree], bset: Iterable[Multidegree]) -> set[Multidegree]:
    """Elementwise sums ``{alpha + beta}`` of two multidegree sets."""
    aset = {as_multidegree(a) for a in aset}
    bset = {as_multidegree(b) for b in bset}
    qa, qb = _check_common_q(aset), _check_common_q(bset)
    if aset and bset and qa != qb:
        raise ValueError(f"cannot add multidegrees of lengths {qa} and {qb}")
    return {tuple(x + y for x, y in zip(a, b)) for a in aset for b in bset}


def lower_closure(aset: Iterable[Multidegree]) -> set[Multidegree]:
    """All multidegrees lying coordinatewise below some member of ``aset``."""
    aset = {as_multidegree(a) for a in aset}
    _check_common_q(aset)
    out: set[Multidegree] = set()
    for a in aset:
        out |= set(itertools.product(*(range(x + 1) for x in a)))
    return out


def is_lower_set(aset: Iterable[Multidegree]) -> bool:
    """True if ``aset`` is downward closed (closed under decrementing one exponent)."""
    aset = {as_multidegree(a) for a in aset}
    _check_common_q(aset)
    for a in aset:
        for j, x in enumerate(a):
            if x > 0 and a[:j] + (x - 1,) + a[j + 1:] not in aset:
                return False
    return True


def _canonical_key(alpha: Multidegree):
    # Ascending total degree, then descending lexicographic within a degree,
    # so (1, 0) sorts before (0, 1).
    return (sum(alpha), tuple(-a for a in alpha))


def eval_monomials(basis: "MonomialBasis", point: Sequence[float]) -> np.ndarray:
    """Evaluate every basis monomial at a single point."""
    pt = np.asarray(point, dtype=float).reshape(-1)
    if pt.shape[0] != basis.q:
        raise ValueError(f"point has {pt.shape[0]} coordinates, basis needs {basis.q}")
    return basis.vandermonde(pt.reshape(1, -1))[:, 0]


@dataclass(frozen=True)
class MonomialBasis:
    """Ordered tuple of distinct multidegrees fixing a monomial basis.

    The column order is the coordinate order of every coefficient vector,
    weight vector, and matrix row/column built on this basis.
    """

    columns: tuple[Multidegree, ...]

    def __post_init__(self):
        cols = tuple(as_multidegree(a) for a in self.columns)
        if not cols:
            raise ValueError("a monomial basis needs at least one multidegree")
        _check_common_q(cols)
        if len(set(cols)) != len(cols):
            raise ValueError("monomial basis has repeated multidegrees")
        object.__setattr__(self, "columns", cols)

    @classmethod
    def from_set(cls, aset: Iterable[Multidegree]) -> "MonomialBasis":
        """Canonically ordered basis: ascending degree, descending lex inside a degree."""
        return cls(tuple(sorted({as_multidegree(a) for a in aset}, key=_canonical_key)))

    @classmethod
    def triangular(cls, q: int, ell: int) -> "MonomialBasis":
        return cls.from_set(triangular_set(q, ell))

    @classmethod
    def degree(cls, q: int, ell: int) -> "MonomialBasis":
        return cls.from_set(degree_set(q, ell))

    @classmethod
    def box(cls, gamma: Sequence[int]) -> "MonomialBasis":
        return cls.from_set(box_set(gamma))

    @property
    def q(self) -> int:
        return len(self.columns[0])

    @property
    def m(self) -> int:
        return len(self.columns)

    def support(self) -> frozenset[Multidegree]:
        return frozenset(self.columns)

    def pair_support(self) -> set[Multidegree]:
        """Sums ``alpha_k + alpha_l`` over all ordered column pairs."""
        return minkowski_sum(self.columns, self.columns)

    def index_of(self, alpha: Sequence[int]) -> int:
        alpha = as_multidegree(alpha)
        try:
            return self.columns.index(alpha)
        except ValueError:
            raise KeyError(f"multidegree {alpha} is not a column of this basis") from None

    def sub_degree(self, s: int) -> int:
        """Largest total degree of the first ``s`` coordinates over all columns."""
        return max(total_degree(a, s) for a in self.columns)

    def vandermonde(self, points: np.ndarray) -> np.ndarray:
        """Monomial evaluations, one basis row per column of the returned (m, N) array."""
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.q:
            raise ValueError(f"points must be an (N, {self.q}) array, got shape {pts.shape}")
        n = pts.shape[0]
        maxdeg = max((max(a) for a in self.columns), default=0)
        pows = np.empty((self.q, maxdeg + 1, n))
        pows[:, 0, :] = 1.0
        for e in range(1, maxdeg + 1):
            pows[:, e, :] = pows[:, e - 1, :] * pts.T
        out = np.empty((self.m, n))
        for k, alpha in enumerate(self.columns):
            row = np.ones(n)
            for j, a in enumerate(alpha):
                if a:
                    row = row * pows[j, a, :]
            out[k] = row
        return out

    def to_json(self) -> str:
        return json.dumps([list(a) for a in self.columns])

    @classmethod
    def from_json(cls, text: str) -> "MonomialBasis":
        data = json.loads(text)
        if not isinstance(data, list):
            raise ValueError("basis JSON must be a list of integer lists")
        return cls(tuple(as_multidegree(a) for a in data))


def parse_basis_spec(spec: str) -> MonomialBasis:
    """Parse a compact basis description.

    Accepted forms: ``triangular:q:l``, ``degree:q:l``, and ``box:g1,...,gq``.
    """
    head, _, rest = spec.partition(":")
    try:
        if head == "triangular":
            q, ell = (int(x) for x in rest.split(":"))
            return MonomialBasis.triangular(q, ell)
        if head == "degree":
            q, ell = (int(x) for x in rest.split(":"))
            return MonomialBasis.degree(q, ell)
        if head == "box":
            gamma = [int(x) for x in rest.split(",")]
            return MonomialBasis.box(gamma)
    except (ValueError, TypeError) as exc:
        raise ValueError(f"malformed basis spec {spec!r}: {exc}") from None
    raise ValueError(
        f"unknown basis spec {spec!r}; expected 'triangular:q:l', 'degree:q:l', "
        f"or 'box:g1,...,gq'"
    )
