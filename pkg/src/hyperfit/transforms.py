"""Affine changes of coordinates and their action on fitted polynomials.

An invertible affine map ``T(d) = K d + h`` acts on a polynomial written over
a monomial basis through an induced linear map ``L`` on coefficient vectors:
``R_theta(d) = R_{L theta}(T(d))`` for every point ``d``.  The map exists
whenever the span of the basis is closed under composition with ``T^{-1}``
(for example, any basis under a pure scaling, a union of total-degree sets
under a rotation, a downward-closed basis under a translation).  Comparing a
fit of transformed data against the mapped fit of the original data checks
whether an estimator respects the transform.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import ClosureError
from .multidegree import MonomialBasis, Multidegree

__all__ = [
    "AffineTransform",
    "classify",
    "composition_matrix",
    "InducedCoefficientMap",
    "induced_map",
    "sin_angle",
    "InvarianceReport",
    "check_invariance",
]

# Declaring a leftover expansion coefficient "outside the basis" uses this
# tolerance relative to the Frobenius norm of the full expansion.
ESCAPE_TOL_REL = 1e-12


@dataclass(frozen=True)
class AffineTransform:
    """Invertible map ``d -> matrix @ d + offset`` acting on row-point arrays."""

    matrix: np.ndarray
    offset: np.ndarray

    def __post_init__(self):
        k = np.asarray(self.matrix, dtype=float)
        h = np.asarray(self.offset, dtype=float).reshape(-1)
        if k.ndim != 2 or k.shape[0] != k.shape[1]:
            raise ValueError(f"transform matrix must be square, got shape {k.shape}")
        if h.shape[0] != k.shape[0]:
            raise ValueError("offset length does not match the matrix size")
        if not (np.all(np.isfinite(k)) and np.all(np.isfinite(h))):
            raise ValueError("transform has non-finite entries")
        scale = np.linalg.norm(k, 2)
        if abs(np.linalg.det(k)) <= 1e-12 * max(scale, 1e-300) ** k.shape[0]:
            raise ValueError("transform matrix is singular or too close to singular")
        object.__setattr__(self, "matrix", k)
        object.__setattr__(self, "offset", h)

    @property
    def q(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def rotation(cls, angle: float) -> "AffineTransform":
        c, s = np.cos(angle), np.sin(angle)
        return cls(np.array([[c, -s], [s, c]]), np.zeros(2))

    @classmethod
    def translation(cls, offset: Sequence[float]) -> "AffineTransform":
        h = np.asarray(offset, dtype=float).reshape(-1)
        return cls(np.eye(h.shape[0]), h)

    @classmethod
    def scaling(cls, rho: float, q: int) -> "AffineTransform":
        return cls(float(rho) * np.eye(q), np.zeros(q))

    @classmethod
    def identity(cls, q: int) -> "AffineTransform":
        return cls(np.eye(q), np.zeros(q))

    def apply(self, points) -> np.ndarray:
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.q:
            raise ValueError(f"points must be an (N, {self.q}) array, got shape {pts.shape}")
        return pts @ self.matrix.T + self.offset

    def inverse(self) -> "AffineTransform":
        kinv = np.linalg.inv(self.matrix)
        return AffineTransform(kinv, -kinv @ self.offset)

    def compose(self, other: "AffineTransform") -> "AffineTransform":
        """The map ``d -> self(other(d))``."""
        if other.q != self.q:
            raise ValueError("cannot compose transforms of different dimensions")
        return AffineTransform(
            self.matrix @ other.matrix, self.matrix @ other.offset + self.offset
        )


def classify(transform: AffineTransform, tol: float = 1e-12) -> set[str]:
    """Which structured families the transform belongs to.

    Returns a subset of ``{"orthogonal", "scaling", "translation"}`` or
    ``{"general"}`` when it matches none of them.  Each family comes with its
    own invariance guarantee: orthogonal maps need a basis that is a union of
    total-degree sets, uniform scalings work with any basis, translations need
    a downward-closed basis.
    """
    k, h = transform.matrix, transform.offset
    q = transform.q
    kscale = max(np.linalg.norm(k), 1.0)
    has_offset = np.linalg.norm(h) > tol * kscale
    is_identity = np.linalg.norm(k - np.eye(q)) <= tol * kscale
    kinds: set[str] = set()
    if is_identity and has_offset:
        return {"translation"}
    if np.linalg.norm(k.T @ k - np.eye(q)) <= tol * kscale**2:
        kinds.add("orthogonal")
    rho = float(np.trace(k)) / q
    if rho > 0 and np.linalg.norm(k - rho * np.eye(q)) <= tol * kscale:
        kinds.add("scaling")
    if not kinds:
        kinds.add("general")
    if has_offset:
        kinds.add("translation")
    return kinds


def _poly_mul(p: dict[Multidegree, float], q_: dict[Multidegree, float]) -> dict[Multidegree, float]:
    out: dict[Multidegree, float] = {}
    for a, ca in p.items():
        for b, cb in q_.items():
            key = tuple(x + y for x, y in zip(a, b))
            out[key] = out.get(key, 0.0) + ca * cb
    return out


def composition_matrix(basis: MonomialBasis, matrix, offset) -> np.ndarray:
    """Matrix ``C`` with ``phi(K x + h) = C phi(x)`` over the basis monomials.

    Each basis monomial is expanded by repeated polynomial multiplication of
    the substituted linear forms.  A nonzero coefficient (above
    ``1e-12`` of the full expansion's norm) on a monomial outside the basis
    raises :class:`~hyperfit.errors.ClosureError` naming the multidegree.
    """
    k = np.asarray(matrix, dtype=float)
    q = basis.q
    h = np.asarray(offset, dtype=float).reshape(-1)
    if k.shape != (q, q) or h.shape[0] != q:
        raise ValueError("matrix/offset dimensions do not match the basis")
    zero = (0,) * q
    unit = {zero: 1.0}
    # Powers of each substituted coordinate form, built once per coordinate.
    max_exp = [max(alpha[j] for alpha in basis.columns) for j in range(q)]
    powers: list[list[dict[Multidegree, float]]] = []
    for j in range(q):
        form: dict[Multidegree, float] = {}
        for i in range(q):
            if k[j, i] != 0.0:
                e = tuple(1 if t == i else 0 for t in range(q))
                form[e] = k[j, i]
        if h[j] != 0.0:
            form[zero] = h[j]
        pows = [unit]
        for _ in range(max_exp[j]):
            pows.append(_poly_mul(pows[-1], form))
        powers.append(pows)

    index = {alpha: i for i, alpha in enumerate(basis.columns)}
    c = np.zeros((basis.m, basis.m))
    escapes: dict[Multidegree, float] = {}
    total_sq = 0.0
    for row, alpha in enumerate(basis.columns):
        poly = unit
        for j, e in enumerate(alpha):
            if e:
                poly = _poly_mul(poly, powers[j][e])
        for beta, coef in poly.items():
            total_sq += coef * coef
            col = index.get(beta)
            if col is None:
                if abs(coef) > abs(escapes.get(beta, 0.0)):
                    escapes[beta] = coef
            else:
                c[row, col] = coef
    if escapes:
        norm = float(np.sqrt(total_sq))
        worst = max(escapes, key=lambda b: abs(escapes[b]))
        if abs(escapes[worst]) > ESCAPE_TOL_REL * norm:
            raise ClosureError(worst)
    return c


@dataclass(frozen=True)
class InducedCoefficientMap:
    """Linear action of a point transform on coefficient vectors.

    ``R_theta(d) = R_{matrix @ theta}(transform(d))`` for all points ``d``.
    """

    basis: MonomialBasis
    transform: AffineTransform
    matrix: np.ndarray


def induced_map(basis: MonomialBasis, transform: AffineTransform) -> InducedCoefficientMap:
    """Coefficient map induced by an affine point transform over the basis."""
    if transform.q != basis.q:
        raise ValueError("transform dimension does not match the basis")
    inv = transform.inverse()
    c = composition_matrix(basis, inv.matrix, inv.offset)
    return InducedCoefficientMap(basis, transform, c.T)


def sin_angle(u, v) -> float:
    """Sine of the angle between the lines spanned by two vectors.

    Computed as the norm of the component of one unit vector orthogonal to
    the other; unlike sqrt(1 - cos^2) this stays accurate down to machine
    precision for nearly parallel directions.
    """
    u = np.asarray(u, dtype=float).reshape(-1)
    v = np.asarray(v, dtype=float).reshape(-1)
    nu, nv = float(np.linalg.norm(u)), float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        raise ValueError("angle with a zero vector is undefined")
    u = u / nu
    v = v / nv
    if float(u @ v) < 0.0:
        v = -v
    rejection = u - float(u @ v) * v
    return min(float(np.linalg.norm(rejection)), 1.0)


@dataclass(frozen=True)
class InvarianceReport:
    passed: bool
    angle: float
    tol: float
    kinds: frozenset[str]
    base_fit: object
    transformed_fit: object
    mapped_theta: np.ndarray


def check_invariance(
    fit: Callable,
    points,
    transform: AffineTransform,
    basis: MonomialBasis,
    weights=None,
    tol: float = 1e-8,
) -> InvarianceReport:
    """Compare a fit of transformed data with the mapped fit of the original data.

    ``fit(points, basis, weights)`` must return an object with a ``theta``
    attribute.  The report's angle is the sine of the angle between the
    transformed-data fit and the original fit pushed through the induced
    coefficient map.
    """
    imap = induced_map(basis, transform)
    base = fit(points, basis, weights)
    moved = fit(transform.apply(np.asarray(points, dtype=float)), basis, weights)
    mapped = imap.matrix @ base.theta
    angle = sin_angle(mapped, moved.theta)
    return InvarianceReport(
        passed=bool(angle <= tol),
        angle=angle,
        tol=float(tol),
        kinds=frozenset(classify(transform)),
        base_fit=base,
        transformed_fit=moved,
        mapped_theta=mapped,
    )
