"""Run configuration: the single structured file behind the CLI and service.

Every log-scale quantity carries its unit in the key name (p_max_dbm,
si_level_db, rcs_dbsm, ...) and is converted to linear exactly once, here.
Unknown keys are rejected so typos fail loudly at load time.

The field defaults reproduce the reference setup: 3.5 GHz carrier, 30 kHz
subcarrier spacing with 3264 active subcarriers and 28 symbols, 100 MHz per
BS, 23 dBm power budget, a -90 dBm residual self-interference level, 0 dB
communication floor, 5 dB Rician K-factor, path-loss exponents 2.5 (comm) /
2.0 (sensing), 7 dBsm target and 10 m / 1 m / 1 m heights.
"""

from __future__ import annotations

from typing import Literal

import numpy as np
import yaml
from pydantic import BaseModel, ConfigDict, Field

from .channel import ChannelParams
from .montecarlo import CampaignConfig, SweepSpec
from .optimizer import OptConstraints
from .scenario import DeploymentConfig


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) * 1e-3


def watts_to_dbm(watts: float) -> float:
    if watts <= 0:
        return float("-inf")
    return float(10.0 * np.log10(watts / 1e-3))


def linear_to_db(value: float) -> float:
    if value <= 0:
        return float("-inf")
    return float(10.0 * np.log10(value))


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class DeploymentSettings(_Strict):
    num_bs: int = 3
    bs_height_m: float = 10.0
    ue_height_m: float = 1.0
    target_height_m: float = 1.0
    inter_bs_distance_m: float = 150.0
    comm_coverage_radius_m: float = 75.0
    sector_width_deg: float = 120.0
    sector_boresights_deg: list[float] | None = None

    def to_deployment_config(self) -> DeploymentConfig:
        boresights = (tuple(self.sector_boresights_deg)
                      if self.sector_boresights_deg is not None else None)
        return DeploymentConfig(
            num_bs=self.num_bs,
            bs_height=self.bs_height_m,
            ue_height=self.ue_height_m,
            target_height=self.target_height_m,
            inter_bs_distance=self.inter_bs_distance_m,
            comm_coverage_radius=self.comm_coverage_radius_m,
            sector_width_deg=self.sector_width_deg,
            sector_boresights_deg=boresights,
        )


class ChannelSettings(_Strict):
    carrier_frequency_hz: float = 3.5e9
    bandwidth_hz: float = 100e6
    bandwidth_per_bs_hz: list[float] | None = None
    subcarrier_spacing_hz: float = 30e3
    num_subcarriers: int = 3264
    num_symbols: int = 28
    k_factor_db: float = 5.0
    comm_pathloss_exponent: float = 2.5
    sensing_pathloss_exponent: float = 2.0
    rcs_dbsm: float = 7.0
    antenna_gain_tx_dbi: float = 0.0
    antenna_gain_rx_dbi: float = 0.0
    si_level_db: float = -90.0
    si_mode: Literal["attenuation", "absolute-at-pmax"] = "absolute-at-pmax"
    noise_figure_ue_db: float = 8.0
    noise_figure_bs_db: float = 8.0
    reference_distance_m: float = 1.0
    bs_bs_pathloss_exponent: float | None = None
    bs_bs_k_factor_db: float | None = None
    adc_saturation_limit_dbm: float | None = None

    def to_channel_params(self, num_bs: int) -> ChannelParams:
        if self.bandwidth_per_bs_hz is not None:
            if len(self.bandwidth_per_bs_hz) != num_bs:
                raise ValueError("bandwidth_per_bs_hz must list one value per BS")
            bw = tuple(self.bandwidth_per_bs_hz)
        else:
            bw = (self.bandwidth_hz,) * num_bs
        return ChannelParams(
            carrier_frequency=self.carrier_frequency_hz,
            bandwidth_per_bs=bw,
            subcarrier_spacing=self.subcarrier_spacing_hz,
            num_subcarriers=self.num_subcarriers,
            num_symbols=self.num_symbols,
            rician_k_factor=db_to_linear(self.k_factor_db),
            comm_pathloss_exponent=self.comm_pathloss_exponent,
            sensing_pathloss_exponent=self.sensing_pathloss_exponent,
            target_rcs=db_to_linear(self.rcs_dbsm),
            antenna_gain_tx=db_to_linear(self.antenna_gain_tx_dbi),
            antenna_gain_rx=db_to_linear(self.antenna_gain_rx_dbi),
            si_level=self.si_level_db,
            si_mode=self.si_mode,
            noise_figure_ue_db=self.noise_figure_ue_db,
            noise_figure_bs_db=self.noise_figure_bs_db,
            reference_distance=self.reference_distance_m,
            bs_bs_pathloss_exponent=self.bs_bs_pathloss_exponent,
            bs_bs_k_factor=(db_to_linear(self.bs_bs_k_factor_db)
                            if self.bs_bs_k_factor_db is not None else None),
            adc_saturation_limit=(dbm_to_watts(self.adc_saturation_limit_dbm)
                                  if self.adc_saturation_limit_dbm is not None
                                  else None),
        )


class SolverSettings(_Strict):
    p_max_dbm: float = 23.0
    gamma_comm_db: float | list[float] = 0.0
    epsilon: float = 1e-4
    max_iterations: int = 50

    def to_constraints(self, num_bs: int) -> OptConstraints:
        if isinstance(self.gamma_comm_db, list):
            if len(self.gamma_comm_db) != num_bs:
                raise ValueError("gamma_comm_db must list one value per UE")
            gamma = np.array([db_to_linear(g) for g in self.gamma_comm_db])
        else:
            gamma = np.full(num_bs, db_to_linear(self.gamma_comm_db))
        return OptConstraints(gamma_comm=gamma,
                              p_max=dbm_to_watts(self.p_max_dbm),
                              epsilon=self.epsilon,
                              max_iterations=self.max_iterations)


class SweepSettings(_Strict):
    axis: Literal["si_level_db", "gamma_comm_db"]
    values: list[float] = Field(min_length=1)

    def to_sweep_spec(self) -> SweepSpec:
        return SweepSpec(axis=self.axis, values=tuple(self.values))


class CampaignSettings(_Strict):
    num_realizations: int = 500
    master_seed: int = 12345
    workers: int = 1
    sweep: SweepSettings | None = None


class OutputSettings(_Strict):
    directory: str = "campaign_out"
    verbosity: int = 1


class RunConfig(_Strict):
    deployment: DeploymentSettings = DeploymentSettings()
    channel: ChannelSettings = ChannelSettings()
    solver: SolverSettings = SolverSettings()
    campaign: CampaignSettings = CampaignSettings()
    output: OutputSettings = OutputSettings()

    def to_campaign_config(self) -> CampaignConfig:
        dep = self.deployment.to_deployment_config()
        return CampaignConfig(
            deployment=dep,
            channel=self.channel.to_channel_params(dep.num_bs),
            constraints=self.solver.to_constraints(dep.num_bs),
            num_realizations=self.campaign.num_realizations,
            master_seed=self.campaign.master_seed,
            sweep=(self.campaign.sweep.to_sweep_spec()
                   if self.campaign.sweep is not None else None),
            workers=self.campaign.workers,
        )


class ConfigError(ValueError):
    """Malformed or invalid run configuration."""


def default_config() -> RunConfig:
    return RunConfig()


def config_from_dict(data: dict) -> RunConfig:
    try:
        return RunConfig.model_validate(data)
    except Exception as exc:  # pydantic ValidationError formats field paths
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> RunConfig:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = yaml.safe_load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML in {path}: {exc}") from exc
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"config root must be a mapping, got {type(data).__name__}")
    return config_from_dict(data)


def dump_config_yaml(cfg: RunConfig) -> str:
    return yaml.safe_dump(cfg.model_dump(), sort_keys=False)
