"""Synthetic experiments: curve sampling, noise, and consistency sweeps.

The sweeps reproduce the standard way of comparing the estimators: fix exact
points on a known hypersurface, add noise at a known scale, fit repeatedly,
and summarize each estimator by the spread of its fitted directions around
the true coefficient vector and by the root mean squared error of its noise
level estimate.  All randomness is derived from one master seed through
per-cell, per-realization substreams, so results are reproducible and
independent of evaluation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import NoSolutionError
from .estimators import fit_als, fit_als_known_sigma, fit_ols, reduce_covariance
from .multidegree import MonomialBasis, Multidegree

__all__ = [
    "SPECIAL_DATA",
    "DEFAULT_PLANE_NORMALS",
    "CurveSpec",
    "generate_true_points",
    "true_theta",
    "NoiseSpec",
    "add_noise",
    "spread",
    "SweepRow",
    "ExperimentResult",
    "consistency_sweep",
    "sigma_sweep",
]

# Small 2-d demo dataset used throughout the invariance examples.
SPECIAL_DATA = np.array(
    [[1.0, 7.0], [2.0, 6.0], [5.0, 8.0], [7.0, 7.0], [9.0, 5.0], [3.0, 7.0], [6.0, 2.0], [8.0, 4.0]]
)

# Default plane normals for the three-plane union demo.
DEFAULT_PLANE_NORMALS = (
    (0.0, 1.0, 0.0),
    (math.sqrt(2.0), math.sqrt(2.0), 0.0),
    (math.sqrt(3.0), math.sqrt(3.0), math.sqrt(3.0)),
)

_CURVE_KINDS = ("special_data", "parabola_conic", "eight_curve", "hyperplane_union", "custom_parametric")


@dataclass(frozen=True)
class CurveSpec:
    """A named family of true point configurations.

    Kinds: ``special_data`` (the fixed 8-point demo set), ``parabola_conic``
    (graph of a quadratic), ``eight_curve`` (the figure-eight quartic sampled
    by its trigonometric parametrization), ``hyperplane_union`` (random points
    on a union of planes through the origin), and ``custom_parametric``
    (user-supplied parametrization, library use only).
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in _CURVE_KINDS:
            raise ValueError(f"unknown curve kind {self.kind!r}; expected one of {_CURVE_KINDS}")

    @classmethod
    def special_data(cls) -> "CurveSpec":
        return cls("special_data")

    @classmethod
    def parabola(cls, a: float = 1.0, b: float = 0.0, c: float = 0.0,
                 x_min: float = -1.0, x_max: float = 1.0) -> "CurveSpec":
        return cls("parabola_conic", {"a": float(a), "b": float(b), "c": float(c),
                                      "x_min": float(x_min), "x_max": float(x_max)})

    @classmethod
    def eight_curve(cls) -> "CurveSpec":
        return cls("eight_curve")

    @classmethod
    def hyperplane_union(cls, normals: Sequence[Sequence[float]] | None = None) -> "CurveSpec":
        if normals is None:
            normals = DEFAULT_PLANE_NORMALS
        normals = tuple(tuple(float(x) for x in n) for n in normals)
        for n in normals:
            if len(n) != 3:
                raise ValueError("plane normals must be 3-dimensional")
            if all(x == 0 for x in n):
                raise ValueError("plane normal must be nonzero")
        return cls("hyperplane_union", {"normals": normals})

    @classmethod
    def parametric(cls, fn: Callable[[float], Sequence[float]],
                   theta: Mapping[Multidegree, float] | None = None) -> "CurveSpec":
        params: dict = {"fn": fn}
        if theta is not None:
            params["theta"] = {tuple(int(x) for x in a): float(c) for a, c in theta.items()}
        return cls("custom_parametric", params)


def _plane_frame(normal: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic orthonormal basis of the plane orthogonal to ``normal``."""
    n = normal / np.linalg.norm(normal)
    pick = int(np.argmin(np.abs(n)))
    axis = np.zeros(3)
    axis[pick] = 1.0
    e1 = np.cross(n, axis)
    e1 = e1 / np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    e2 = e2 / np.linalg.norm(e2)
    return e1, e2


def generate_true_points(spec: CurveSpec, n: int, rng: np.random.Generator | None = None) -> np.ndarray:
    """Exact points on the configuration described by ``spec``.

    Deterministic kinds ignore ``rng``; ``hyperplane_union`` requires it and
    draws each point uniformly from a unit square inside a uniformly chosen
    plane.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if spec.kind == "special_data":
        if n != SPECIAL_DATA.shape[0]:
            raise ValueError(f"special_data has exactly {SPECIAL_DATA.shape[0]} points")
        return SPECIAL_DATA.copy()
    if spec.kind == "parabola_conic":
        p = spec.params
        x = np.linspace(p.get("x_min", -1.0), p.get("x_max", 1.0), n)
        y = p.get("a", 1.0) * x**2 + p.get("b", 0.0) * x + p.get("c", 0.0)
        return np.column_stack([x, y])
    if spec.kind == "eight_curve":
        t = 2.0 * np.pi * np.arange(n) / n
        x = np.sin(t)
        return np.column_stack([x, x * np.cos(t)])
    if spec.kind == "hyperplane_union":
        if rng is None:
            raise ValueError("hyperplane_union needs a random generator")
        normals = [np.asarray(v, dtype=float) for v in spec.params["normals"]]
        frames = [_plane_frame(v) for v in normals]
        which = rng.integers(0, len(normals), size=n)
        uv = rng.random((n, 2))
        pts = np.empty((n, 3))
        for i in range(n):
            e1, e2 = frames[which[i]]
            pts[i] = uv[i, 0] * e1 + uv[i, 1] * e2
        return pts
    if spec.kind == "custom_parametric":
        fn = spec.params["fn"]
        t = np.arange(n) / n
        return np.array([fn(float(ti)) for ti in t], dtype=float)
    raise ValueError(f"unknown curve kind {spec.kind!r}")


def _poly_mul(p: dict, q_: dict) -> dict:
    out: dict = {}
    for a, ca in p.items():
        for b, cb in q_.items():
            key = tuple(x + y for x, y in zip(a, b))
            out[key] = out.get(key, 0.0) + ca * cb
    return out


def _theta_dict(spec: CurveSpec) -> dict[Multidegree, float]:
    if spec.kind == "parabola_conic":
        p = spec.params
        return {(2, 0): p.get("a", 1.0), (1, 0): p.get("b", 0.0),
                (0, 0): p.get("c", 0.0), (0, 1): -1.0}
    if spec.kind == "eight_curve":
        return {(4, 0): 1.0, (2, 0): -1.0, (0, 2): 1.0}
    if spec.kind == "hyperplane_union":
        poly: dict = {(0, 0, 0): 1.0}
        for n in spec.params["normals"]:
            form = {}
            for i, x in enumerate(n):
                if x != 0.0:
                    form[tuple(1 if t == i else 0 for t in range(3))] = float(x)
            poly = _poly_mul(poly, form)
        return poly
    if spec.kind == "custom_parametric" and "theta" in spec.params:
        return dict(spec.params["theta"])
    raise ValueError(f"curve kind {spec.kind!r} has no coefficient vector")


def true_theta(spec: CurveSpec, basis: MonomialBasis) -> np.ndarray:
    """True coefficient vector of the curve over ``basis`` (unnormalized)."""
    poly = _theta_dict(spec)
    vec = np.zeros(basis.m)
    for alpha, coef in poly.items():
        if coef == 0.0:
            continue
        vec[basis.index_of(alpha)] = coef
    return vec


@dataclass(frozen=True)
class NoiseSpec:
    """Additive noise description: distribution kind, scale, and master seed."""

    kind: str
    sigma: float
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("gaussian", "uniform"):
            raise ValueError(f"noise kind must be 'gaussian' or 'uniform', got {self.kind!r}")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")


def _draw_noise(rng: np.random.Generator, n: int, q: int, kind: str, sigma: float,
                sigma0=None) -> np.ndarray:
    """One (n, q) noise draw with covariance ``sigma**2 * sigma0``.

    Uniform noise is scaled to match the same covariance (width
    ``2*sqrt(3)*sigma`` per unit-variance direction).
    """
    if sigma0 is None:
        cols, s = None, q
    else:
        nm = sigma0 if hasattr(sigma0, "k_factor") else reduce_covariance(sigma0)
        cols, s = nm.k_factor[:, : nm.rank], nm.rank
    if kind == "gaussian":
        base = rng.standard_normal((n, s))
    elif kind == "uniform":
        base = rng.uniform(-math.sqrt(3.0), math.sqrt(3.0), size=(n, s))
    else:
        raise ValueError(f"unknown noise kind {kind!r}")
    base = sigma * base
    return base if cols is None else base @ cols.T


def add_noise(points, noise: NoiseSpec, sigma0=None) -> np.ndarray:
    """Add one seeded noise draw to exact points; same spec, same output."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError(f"points must be a 2-d array, got shape {pts.shape}")
    rng = np.random.default_rng(np.random.SeedSequence(noise.seed))
    return pts + _draw_noise(rng, pts.shape[0], pts.shape[1], noise.kind, noise.sigma, sigma0)


def spread(theta_hats, theta_true) -> float:
    """Mean squared sine of the angles between fitted directions and the truth."""
    hats = np.asarray(theta_hats, dtype=float)
    if hats.ndim != 2 or hats.shape[0] == 0:
        raise ValueError("theta_hats must be a nonempty (M, m) array")
    tt = np.asarray(theta_true, dtype=float).reshape(-1)
    tt_nrm = float(tt @ tt)
    if tt_nrm == 0.0:
        raise ValueError("theta_true must be nonzero")
    vals = []
    for row in hats:
        rr = float(row @ row)
        if rr == 0.0:
            raise ValueError("fitted coefficient vector is zero")
        c2 = float(row @ tt) ** 2 / (rr * tt_nrm)
        vals.append(max(0.0, 1.0 - min(c2, 1.0)))
    return math.fsum(vals) / len(vals)


@dataclass(frozen=True)
class SweepRow:
    """One summary cell: sweep value, method, spread, noise-level RMSE."""

    x: float
    method: str
    spread: float
    rmse_sigma2: float | None
    realizations: int
    failures: int = 0


@dataclass(frozen=True)
class ExperimentResult:
    """Rows of a sweep plus the CSV rendering used by the command line."""

    kind: str
    rows: tuple[SweepRow, ...]

    def to_csv(self) -> str:
        def num(v) -> str:
            return "" if v is None else repr(float(v))

        if self.kind == "n":
            lines = ["N,method,spread,rmse_sigma2"]
            for r in self.rows:
                lines.append(f"{int(r.x)},{r.method},{num(r.spread)},{num(r.rmse_sigma2)}")
        elif self.kind == "sigma":
            lines = ["sigma,method,rel_spread,rel_rmse_sigma2"]
            for r in self.rows:
                rel_s = r.spread / r.x
                rel_r = None if r.rmse_sigma2 is None else r.rmse_sigma2 / r.x**2
                lines.append(f"{num(r.x)},{r.method},{num(rel_s)},{num(rel_r)}")
        else:
            raise ValueError(f"unknown sweep kind {self.kind!r}")
        return "\n".join(lines) + "\n"


_METHODS = ("ols", "als", "als-sigma")


def _fit_by_method(method: str, points, basis: MonomialBasis, sigma: float):
    if method == "ols":
        return fit_ols(points, basis)
    if method == "als":
        return fit_als(points, basis)
    if method == "als-sigma":
        return fit_als_known_sigma(points, basis, sigma=sigma)
    raise ValueError(f"unknown method {method!r}; expected one of {_METHODS}")


def _sweep_cells(spec, basis, noise_kind, sigma_of_cell, n_of_cell, x_of_cell, cells,
                 methods, realizations, seed, fixed_points):
    theta_bar = true_theta(spec, basis)
    rows = []
    for ci in range(cells):
        n = n_of_cell(ci)
        sigma = sigma_of_cell(ci)
        if fixed_points is not None:
            pts = fixed_points
        else:
            true_rng = np.random.default_rng(np.random.SeedSequence([seed, 1, ci]))
            pts = generate_true_points(spec, n, true_rng)
        hats: dict[str, list[np.ndarray]] = {m: [] for m in methods}
        sqerr: dict[str, list[float]] = {m: [] for m in methods}
        failures: dict[str, int] = {m: 0 for m in methods}
        for j in range(realizations):
            rng = np.random.default_rng(np.random.SeedSequence([seed, 2, ci, j]))
            noisy = pts + _draw_noise(rng, n, basis.q, noise_kind, sigma)
            for method in methods:
                try:
                    fr = _fit_by_method(method, noisy, basis, sigma)
                except NoSolutionError:
                    failures[method] += 1
                    continue
                hats[method].append(fr.theta)
                if fr.sigma_sq_hat is not None:
                    sqerr[method].append((fr.sigma_sq_hat - sigma**2) ** 2)
        for method in methods:
            ok = len(hats[method])
            if ok == 0:
                raise NoSolutionError(
                    f"method {method!r} failed on every realization at cell {ci}"
                )
            rmse = math.sqrt(math.fsum(sqerr[method]) / len(sqerr[method])) if sqerr[method] else None
            rows.append(SweepRow(
                x=float(x_of_cell(ci)),
                method=method,
                spread=spread(np.array(hats[method]), theta_bar),
                rmse_sigma2=rmse,
                realizations=realizations,
                failures=failures[method],
            ))
    return rows


def consistency_sweep(spec: CurveSpec, noise: NoiseSpec, basis: MonomialBasis,
                      methods: Sequence[str], n_list: Sequence[int],
                      realizations: int) -> ExperimentResult:
    """Spread and noise-level RMSE of each method as the sample size grows.

    True points are drawn once per sample size (for random configurations)
    and reused across all noise realizations of that cell.  Individual fit
    failures are counted per cell; a cell only fails if no realization fits.
    """
    methods = _checked_methods(methods)
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    n_list = [int(n) for n in n_list]
    if not n_list or any(n < 1 for n in n_list):
        raise ValueError("n_list must be nonempty positive integers")
    rows = _sweep_cells(
        spec, basis, noise.kind,
        sigma_of_cell=lambda ci: noise.sigma,
        n_of_cell=lambda ci: n_list[ci],
        x_of_cell=lambda ci: n_list[ci],
        cells=len(n_list), methods=methods, realizations=realizations,
        seed=noise.seed, fixed_points=None,
    )
    return ExperimentResult("n", tuple(rows))


def sigma_sweep(spec: CurveSpec, basis: MonomialBasis, n: int, sigma_list: Sequence[float],
                realizations: int, methods: Sequence[str] = ("ols", "als"),
                noise_kind: str = "uniform", seed: int = 0) -> ExperimentResult:
    """Relative spread and relative noise-level RMSE across noise scales.

    One fixed set of true points is reused for every noise scale; the CSV
    reports spread divided by sigma and RMSE divided by sigma squared.
    """
    methods = _checked_methods(methods)
    if realizations < 1:
        raise ValueError("realizations must be >= 1")
    sigma_list = [float(s) for s in sigma_list]
    if not sigma_list or any(s <= 0 for s in sigma_list):
        raise ValueError("sigma_list must be nonempty positive numbers")
    true_rng = np.random.default_rng(np.random.SeedSequence([seed, 1, 0]))
    pts = generate_true_points(spec, int(n), true_rng)
    rows = _sweep_cells(
        spec, basis, noise_kind,
        sigma_of_cell=lambda ci: sigma_list[ci],
        n_of_cell=lambda ci: int(n),
        x_of_cell=lambda ci: sigma_list[ci],
        cells=len(sigma_list), methods=methods, realizations=realizations,
        seed=seed, fixed_points=pts,
    )
    return ExperimentResult("sigma", tuple(rows))


def _checked_methods(methods: Sequence[str]) -> list[str]:
    out = [str(m) for m in methods]
    if not out:
        raise ValueError("methods must be nonempty")
    for m in out:
        if m not in _METHODS:
            raise ValueError(f"unknown method {m!r}; expected one of {_METHODS}")
    if len(set(out)) != len(out):
        raise ValueError("methods must be distinct")
    return out
