"""Request/response models for the HTTP service.

Requests embed a full RunConfig; responses mirror the CLI file formats so a
thin client can reproduce records.jsonl / cdf.csv / sweep.csv byte-for-byte
from a response body.
"""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field

from ..config import RunConfig


class SolveRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: RunConfig = Field(default_factory=RunConfig)
    seed: int = 0
    oracle: bool = False


class SolveResponse(BaseModel):
    status: str
    feasible: bool
    iterations: int
    eta: float                       # achieved min overall sensing SINR, linear
    eta_db: float | None
    eta_trace: list[float]
    rho_dbm: list[float]
    sinr_comm_db: list[float]
    sinr_sensing_db: list[float]
    range_std_m: list[float]
    mean_range_std_m: float | None
    infeasibility_certificate: float | None = None
    oracle_eta: float | None = None
    oracle_gap_rel: float | None = None


class CampaignRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: RunConfig = Field(default_factory=RunConfig)


class RecordModel(BaseModel):
    realization_id: int
    sweep_value: float | None
    policy: str
    rho_dbm: list[float]
    sinr_comm_db: list[float]
    sinr_sensing_db: list[float]
    range_std_m: list[float]
    mean_range_std_m: float | None
    iterations: int
    status: str
    censored: bool


class CdfRowModel(BaseModel):
    sweep_value: float | None
    policy: str
    value_m: float
    cum_prob: float


class SweepRowModel(BaseModel):
    sweep_value: float | None
    policy: str
    bs_index: int
    mean_range_std_m: float
    mean_power_dbm: float


class CampaignResponse(BaseModel):
    num_records: int
    censored_count: int
    records: list[RecordModel]
    cdf: list[CdfRowModel]
    sweep: list[SweepRowModel]


class ValidateRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: RunConfig = Field(default_factory=RunConfig)
    instances: int = 100


class ValidateResponse(BaseModel):
    instances: int
    comm_infeasible: int
    sensing_infeasible: int
    compared: int
    max_rel_gap: float | None
    num_sca_above_oracle: int        # eta_sca > eta_oracle * (1 + 1e-6)
    num_constraint_violations: int   # returned rho violating P-constraints
    passed: bool


class PreviewRequest(BaseModel):
    model_config = ConfigDict(extra="forbid")

    config: RunConfig = Field(default_factory=RunConfig)
    seed: int = 0


class PreviewResponse(BaseModel):
    bs_positions: list[list[float]]
    ue_positions: list[list[float]]
    target_position: list[float]
    sensing_region_vertices: list[list[float]]
    sensing_region_area_m2: float
    comm_radius_m: float


class HealthResponse(BaseModel):
    status: str
    version: str
