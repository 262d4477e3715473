"""FastAPI service wrapping the fitting library.

Every endpoint is a thin route over a plain handler function taking a request
model and returning a response model.  The command line client calls the same
handlers in process, so local and remote runs share one code path.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI
from fastapi.responses import JSONResponse

from .. import __version__
from ..errors import HyperfitError, NoSolutionError
from ..estimators import (
    bombieri_weights,
    euclidean_weights,
    fit_als,
    fit_als_known_sigma,
    fit_ols,
    psi_polynomial,
)
from ..experiments import (
    CurveSpec,
    NoiseSpec,
    consistency_sweep,
    sigma_sweep,
)
from ..moments import moment_array
from ..multidegree import MonomialBasis, lower_closure, parse_basis_spec
from ..quasihankel import psi_matrix
from ..transforms import AffineTransform, check_invariance
from . import models

__all__ = [
    "create_app",
    "handle_fit",
    "handle_invariance",
    "handle_sweep_n",
    "handle_sweep_sigma",
    "handle_moments",
    "handle_psi",
]


def _basis_of(spec: str | list[list[int]]) -> MonomialBasis:
    if isinstance(spec, str):
        return parse_basis_spec(spec)
    return MonomialBasis(tuple(tuple(int(x) for x in a) for a in spec))


def _weights_of(norm: str, basis: MonomialBasis):
    return bombieri_weights(basis) if norm == "bombieri" else euclidean_weights(basis.m)


def _sigma0_of(sigma0):
    return None if sigma0 is None else np.asarray(sigma0, dtype=float)


def _points_of(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be a list of equal-length coordinate rows")
    return pts


def _run_fit(pts, basis, method, weights, sigma, sigma0):
    if method == "ols":
        return fit_ols(pts, basis, weights=weights)
    if method == "als-sigma":
        return fit_als_known_sigma(pts, basis, noise=sigma0, sigma=float(sigma), weights=weights)
    return fit_als(pts, basis, noise=sigma0, weights=weights)


def _diag_model(fr) -> models.DiagnosticsModel:
    d = fr.diagnostics
    return models.DiagnosticsModel(
        smallest_eigenvalue=d.smallest_eigenvalue,
        eigen_gap=d.eigen_gap,
        residual=d.residual,
        solver=d.solver,
        warnings=list(d.warnings),
        sign_flipped=d.sign_flipped,
    )


def handle_fit(req: models.FitRequest) -> models.FitResponse:
    basis = _basis_of(req.basis)
    pts = _points_of(req.points)
    fr = _run_fit(pts, basis, req.method, _weights_of(req.norm, basis), req.sigma,
                  _sigma0_of(req.sigma0))
    raw = -fr.theta if fr.diagnostics.sign_flipped else fr.theta
    return models.FitResponse(
        theta=[float(x) for x in fr.theta],
        theta_raw=[float(x) for x in raw],
        sigma_sq_hat=fr.sigma_sq_hat,
        method=req.method,
        norm=req.norm,
        basis=[list(a) for a in basis.columns],
        diagnostics=_diag_model(fr),
    )


def _transform_of(model: models.TransformModel, q: int) -> AffineTransform:
    if model.rotate is not None:
        if q != 2:
            raise ValueError("rotate is only defined for 2-d data")
        return AffineTransform.rotation(float(model.rotate))
    if model.translate is not None:
        return AffineTransform.translation(model.translate)
    if model.scale is not None:
        return AffineTransform.scaling(float(model.scale), q)
    offset = model.offset if model.offset is not None else [0.0] * q
    return AffineTransform(np.asarray(model.matrix, dtype=float), np.asarray(offset, dtype=float))


def handle_invariance(req: models.InvarianceRequest) -> models.InvarianceResponse:
    basis = _basis_of(req.basis)
    pts = _points_of(req.points)
    transform = _transform_of(req.transform, basis.q)
    weights = _weights_of(req.norm, basis)
    sigma0 = _sigma0_of(req.sigma0)

    def fit(points, basis_, w):
        return _run_fit(points, basis_, req.method, w, req.sigma, sigma0)

    report = check_invariance(fit, pts, transform, basis, weights, tol=req.tol)
    return models.InvarianceResponse(
        passed=report.passed,
        angle=report.angle,
        tol=report.tol,
        kinds=sorted(report.kinds),
        method=req.method,
        theta_base=[float(x) for x in report.base_fit.theta],
        theta_transformed=[float(x) for x in report.transformed_fit.theta],
        theta_mapped=[float(x) for x in report.mapped_theta],
        sigma_sq_base=report.base_fit.sigma_sq_hat,
        sigma_sq_transformed=report.transformed_fit.sigma_sq_hat,
    )


def _curve_of(model: models.CurveModel) -> CurveSpec:
    params = dict(model.params)
    if model.kind == "special_data":
        _reject_extra(params, ())
        return CurveSpec.special_data()
    if model.kind == "parabola_conic":
        _reject_extra(params, ("a", "b", "c", "x_min", "x_max"))
        return CurveSpec.parabola(**params)
    if model.kind == "eight_curve":
        _reject_extra(params, ())
        return CurveSpec.eight_curve()
    _reject_extra(params, ("normals",))
    return CurveSpec.hyperplane_union(params.get("normals"))


def _reject_extra(params: dict, allowed) -> None:
    extra = set(params) - set(allowed)
    if extra:
        raise ValueError(f"unknown curve parameters: {sorted(extra)}")


def _sweep_response(result) -> models.SweepResponse:
    return models.SweepResponse(
        kind=result.kind,
        rows=[
            models.SweepRowModel(
                x=r.x, method=r.method, spread=r.spread, rmse_sigma2=r.rmse_sigma2,
                realizations=r.realizations, failures=r.failures,
            )
            for r in result.rows
        ],
        csv=result.to_csv(),
    )


def handle_sweep_n(req: models.SweepNRequest) -> models.SweepResponse:
    result = consistency_sweep(
        _curve_of(req.curve),
        NoiseSpec(req.noise.kind, req.noise.sigma, seed=req.seed),
        _basis_of(req.basis),
        req.methods,
        req.n_list,
        req.realizations,
    )
    return _sweep_response(result)


def handle_sweep_sigma(req: models.SweepSigmaRequest) -> models.SweepResponse:
    result = sigma_sweep(
        _curve_of(req.curve),
        _basis_of(req.basis),
        req.n,
        req.sigma_list,
        req.realizations,
        methods=req.methods,
        noise_kind=req.noise_kind,
        seed=req.seed,
    )
    return _sweep_response(result)


def handle_moments(req: models.MomentsRequest) -> models.MomentsResponse:
    basis = _basis_of(req.basis)
    pts = _points_of(req.points)
    support = basis.pair_support()
    if req.closure:
        support = lower_closure(support)
    arr = moment_array(pts, support)
    return models.MomentsResponse(
        moments=[models.MomentEntry(**rec) for rec in arr.to_records()]
    )


def _matrix_rows(mat: np.ndarray) -> list[list[float]]:
    return [[float(x) for x in row] for row in mat]


def _psi_csv(matrices: list[models.PsiMatrixModel]) -> str:
    lines = []
    for entry in matrices:
        if entry.power is not None:
            lines.append(f"# k={entry.power}")
        lines.extend(",".join(repr(v) for v in row) for row in entry.rows)
    return "\n".join(lines) + "\n"


def handle_psi(req: models.PsiRequest) -> models.PsiResponse:
    basis = _basis_of(req.basis)
    pts = _points_of(req.points)
    sigma0 = _sigma0_of(req.sigma0)
    if req.coefficients:
        mats = psi_polynomial(pts, basis, noise=sigma0)
        entries = [models.PsiMatrixModel(power=k, rows=_matrix_rows(m)) for k, m in enumerate(mats)]
    elif req.sigma is not None:
        mats = psi_polynomial(pts, basis, noise=sigma0)
        s2 = float(req.sigma) ** 2
        acc = np.zeros_like(mats[0])
        for c in reversed(mats):
            acc = acc * s2 + c
        entries = [models.PsiMatrixModel(power=None, rows=_matrix_rows(acc))]
    else:
        if sigma0 is not None:
            raise ValueError(
                "sigma0 only affects the corrected matrices; pass sigma or coefficients"
            )
        entries = [models.PsiMatrixModel(power=None, rows=_matrix_rows(psi_matrix(basis, pts).matrix))]
    return models.PsiResponse(
        basis=[list(a) for a in basis.columns],
        matrices=entries,
        csv=_psi_csv(entries),
    )


def create_app() -> FastAPI:
    app = FastAPI(title="hyperfit", version=__version__)

    @app.exception_handler(NoSolutionError)
    async def _no_solution(request, exc):
        return JSONResponse(status_code=409, content={"detail": str(exc)})

    @app.exception_handler(HyperfitError)
    async def _domain_error(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(ValueError)
    async def _value_error(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.exception_handler(KeyError)
    async def _key_error(request, exc):
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health", response_model=models.HealthResponse)
    async def health():
        return models.HealthResponse(status="ok", version=__version__)

    @app.post("/fit", response_model=models.FitResponse)
    async def fit(req: models.FitRequest):
        return handle_fit(req)

    @app.post("/invariance", response_model=models.InvarianceResponse)
    async def invariance(req: models.InvarianceRequest):
        return handle_invariance(req)

    @app.post("/sweep/n", response_model=models.SweepResponse)
    async def sweep_n(req: models.SweepNRequest):
        return handle_sweep_n(req)

    @app.post("/sweep/sigma", response_model=models.SweepResponse)
    async def sweep_sigma(req: models.SweepSigmaRequest):
        return handle_sweep_sigma(req)

    @app.post("/moments", response_model=models.MomentsResponse)
    async def moments(req: models.MomentsRequest):
        return handle_moments(req)

    @app.post("/psi", response_model=models.PsiResponse)
    async def psi(req: models.PsiRequest):
        return handle_psi(req)

    return app
