"""Request and response schemas for the fitting service."""

from __future__ import annotations

from typing import Any, Literal

from pydantic import BaseModel, Field, model_validator

Method = Literal["ols", "als", "als-sigma"]
Norm = Literal["bombieri", "euclidean"]


class DiagnosticsModel(BaseModel):
    smallest_eigenvalue: float
    eigen_gap: float | None = None
    residual: float | None = None
    solver: str | None = None
    warnings: list[str] = []
    sign_flipped: bool = False


class FitRequest(BaseModel):
    points: list[list[float]] = Field(min_length=1)
    basis: str | list[list[int]]
    method: Method = "als"
    norm: Norm = "bombieri"
    sigma: float | None = None
    sigma0: list[list[float]] | None = None

    @model_validator(mode="after")
    def _check_sigma(self):
        if self.method == "als-sigma" and self.sigma is None:
            raise ValueError("method 'als-sigma' needs a sigma value")
        if self.method != "als-sigma" and self.sigma is not None:
            raise ValueError("sigma is only meaningful with method 'als-sigma'")
        return self


class FitResponse(BaseModel):
    theta: list[float]
    theta_raw: list[float]
    sigma_sq_hat: float | None
    method: Method
    norm: Norm
    basis: list[list[int]]
    diagnostics: DiagnosticsModel


class TransformModel(BaseModel):
    """Exactly one of rotate / translate / scale / matrix; offset rides with matrix."""

    rotate: float | None = None
    translate: list[float] | None = None
    scale: float | None = None
    matrix: list[list[float]] | None = None
    offset: list[float] | None = None

    @model_validator(mode="after")
    def _check_one(self):
        chosen = [
            name
            for name, val in (
                ("rotate", self.rotate),
                ("translate", self.translate),
                ("scale", self.scale),
                ("matrix", self.matrix),
            )
            if val is not None
        ]
        if len(chosen) != 1:
            raise ValueError(
                f"specify exactly one of rotate, translate, scale, matrix; got {chosen or 'none'}"
            )
        if self.offset is not None and self.matrix is None:
            raise ValueError("offset is only valid together with matrix")
        return self


class InvarianceRequest(BaseModel):
    points: list[list[float]] = Field(min_length=1)
    basis: str | list[list[int]]
    method: Method = "als"
    norm: Norm = "bombieri"
    sigma: float | None = None
    sigma0: list[list[float]] | None = None
    transform: TransformModel
    tol: float = 1e-8

    @model_validator(mode="after")
    def _check_sigma(self):
        if self.method == "als-sigma" and self.sigma is None:
            raise ValueError("method 'als-sigma' needs a sigma value")
        return self


class InvarianceResponse(BaseModel):
    passed: bool
    angle: float
    tol: float
    kinds: list[str]
    method: Method
    theta_base: list[float]
    theta_transformed: list[float]
    theta_mapped: list[float]
    sigma_sq_base: float | None = None
    sigma_sq_transformed: float | None = None


class CurveModel(BaseModel):
    kind: Literal["special_data", "parabola_conic", "eight_curve", "hyperplane_union"]
    params: dict[str, Any] = {}


class NoiseModel(BaseModel):
    kind: Literal["gaussian", "uniform"]
    sigma: float = Field(gt=0)


class SweepNRequest(BaseModel):
    model_config = {"extra": "forbid"}

    curve: CurveModel
    basis: str | list[list[int]]
    methods: list[Method] = ["ols", "als"]
    noise: NoiseModel
    n_list: list[int] = Field(min_length=1)
    realizations: int = Field(ge=1)
    seed: int = 0


class SweepSigmaRequest(BaseModel):
    model_config = {"extra": "forbid"}

    curve: CurveModel
    basis: str | list[list[int]]
    methods: list[Method] = ["ols", "als"]
    n: int = Field(ge=1)
    sigma_list: list[float] = Field(min_length=1)
    noise_kind: Literal["gaussian", "uniform"] = "uniform"
    realizations: int = Field(ge=1)
    seed: int = 0


class SweepRowModel(BaseModel):
    x: float
    method: Method
    spread: float
    rmse_sigma2: float | None
    realizations: int
    failures: int


class SweepResponse(BaseModel):
    kind: Literal["n", "sigma"]
    rows: list[SweepRowModel]
    csv: str


class MomentsRequest(BaseModel):
    points: list[list[float]] = Field(min_length=1)
    basis: str | list[list[int]]
    closure: bool = False


class MomentEntry(BaseModel):
    alpha: list[int]
    value: float


class MomentsResponse(BaseModel):
    moments: list[MomentEntry]


class PsiRequest(BaseModel):
    points: list[list[float]] = Field(min_length=1)
    basis: str | list[list[int]]
    sigma: float | None = None
    sigma0: list[list[float]] | None = None
    coefficients: bool = False

    @model_validator(mode="after")
    def _check(self):
        if self.coefficients and self.sigma is not None:
            raise ValueError("choose either a fixed sigma or the coefficient stack, not both")
        return self


class PsiMatrixModel(BaseModel):
    power: int | None = None
    rows: list[list[float]]


class PsiResponse(BaseModel):
    basis: list[list[int]]
    matrices: list[PsiMatrixModel]
    csv: str


class HealthResponse(BaseModel):
    status: str
    version: str
