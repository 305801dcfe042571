"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field

from ..spaces import SpaceSpec


class SpaceModel(BaseModel):
    kind: Literal["real", "euclidean", "ell_q", "ell_r"] = "real"
    d: int = 1
    q: Optional[float] = None
    r: float = 2.0
    D: float = 1.0
    convention: Literal["paper_eq7", "pinelis_squared"] = "paper_eq7"

    def to_spec(self) -> SpaceSpec:
        return SpaceSpec(**self.model_dump())

    @staticmethod
    def from_spec(space: SpaceSpec) -> "SpaceModel":
        return SpaceModel(**space.to_json_dict())


class CertConfigModel(BaseModel):
    exp_alpha: Optional[float] = None
    p1: Optional[float] = None
    p2: Optional[float] = None
    lv_p: Optional[float] = None
    corollary_p: Optional[float] = None
    q: Optional[float] = None


class ModelSpecModel(BaseModel):
    variant: str
    d: Optional[int] = None
    q: Optional[float] = None
    p: Optional[float] = None
    scale: Optional[float] = None
    alpha: Optional[float] = None
    space: Optional[SpaceModel] = None
    certificates: Optional[CertConfigModel] = None

    def to_spec_dict(self) -> dict:
        out = self.model_dump(exclude_none=True)
        if self.space is not None:
            out["space"] = self.space.model_dump(exclude_none=True)
        if self.certificates is not None:
            out["certificates"] = self.certificates.model_dump(exclude_none=True)
        return out


BOUND_SELECTOR = Literal[
    "theorem1", "theorem2", "corollary", "lv", "fan", "pinelis", "pretrunc", "general_q"
]


class BoundRequest(BaseModel):
    selector: BOUND_SELECTOR
    space: SpaceModel = Field(default_factory=SpaceModel)
    n: Optional[int] = None
    x: Optional[float] = None
    x_abs: Optional[float] = None
    total_x: Optional[float] = None
    t: Optional[float] = None
    u: Optional[float] = None
    q: Optional[float] = None
    alpha: Optional[float] = None
    C1: Optional[float] = None
    C2: Optional[float] = None
    p1: Optional[float] = None
    p2: Optional[float] = None
    p: Optional[float] = None
    C: Optional[float] = None
    sup_moment: Optional[float] = None
    M: Optional[float] = None
    b: Optional[float] = None


class BoundResponse(BaseModel):
    value: float
    trivial: bool
    constants: dict[str, float]


class ExactRequest(BaseModel):
    n: int
    x: float


class ExactResponse(BaseModel):
    p: str
    hits: int
    total: int
    n: int
    x: float


class SimulateRequest(BaseModel):
    model_spec: ModelSpecModel = Field(alias="model")
    n: int
    x: float
    paths: int
    seed: int = 0

    model_config = {"populate_by_name": True}


class McModel(BaseModel):
    p_hat: float
    paths: int
    hits: int
    ci_low: float
    ci_high: float
    seed: int
    n: int
    x: float


class SimulateResponse(McModel):
    model_spec: dict = Field(alias="model")

    model_config = {"populate_by_name": True}


class RatePoint(BaseModel):
    n: float
    p_hat: float


class RateRequest(BaseModel):
    family: Literal["log_linear_in_n_alpha", "log_log"]
    alpha: Optional[float] = None
    points: Optional[list[RatePoint]] = None
    model_spec: Optional[ModelSpecModel] = Field(default=None, alias="model")
    n_grid: Optional[list[int]] = None
    x: Optional[float] = None
    paths: Optional[int] = None
    seed: int = 0

    model_config = {"populate_by_name": True}


class RateResponse(BaseModel):
    slope: float
    stderr: float
    intercept: float
    family: str
    alpha: Optional[float] = None
    seed: int = 0
    used: list[float]
    dropped: list[float]
    points: list[RatePoint]


class OptimizeRequest(BaseModel):
    kind: Literal["theorem1", "theorem2_q"]
    space: SpaceModel = Field(default_factory=SpaceModel)
    n: int
    x: float
    alpha: Optional[float] = None
    C1: Optional[float] = None
    C2: Optional[float] = None
    p1: Optional[float] = None
    p2: Optional[float] = None
    t_points: int = 24
    u_points: int = 24
    u_max: Optional[float] = None
    q_lo: Optional[float] = None
    q_hi: Optional[float] = None
    trace: bool = False


class OptimizeResponse(BaseModel):
    kind: str
    n: int
    x: float
    params: dict[str, float]
    value: float
    paper_value: float
    iterations: int
    trace: Optional[list[list[float]]] = None


class GridModel(BaseModel):
    n: list[int]
    x: list[float]


class OutputModel(BaseModel):
    path: Optional[str] = None
    format: str = "csv"


class CampaignModel(BaseModel):
    models: list[ModelSpecModel]
    grid: GridModel
    paths: int
    seed: int
    bounds: list[str]
    output: Optional[OutputModel] = None

    def to_campaign_dict(self) -> dict:
        out = {
            "models": [m.to_spec_dict() for m in self.models],
            "grid": {"n": self.grid.n, "x": self.grid.x},
            "paths": self.paths,
            "seed": self.seed,
            "bounds": self.bounds,
        }
        if self.output is not None:
            out["output"] = self.output.model_dump(exclude_none=True)
        return out


class VerifyResponse(BaseModel):
    all_dominate: bool
    rows: list[dict]
    csv: str
    output_path: Optional[str] = None
