"""Seeded Monte-Carlo campaigns over scenario realizations.

Each realization gets its own rng derived from the master seed by hashing
the index tuple, so the record stream is a pure function of the campaign
config: reordering execution or changing the worker count cannot change a
single bit of the output.  Sweep points share realizations (common random
numbers): realization i uses the same placements and fading at every sweep
value, so sweep curves reflect the swept parameter rather than resampling
noise.

Every realization is evaluated under two policies: the full-power initial
condition (IC) and the optimized allocation.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .channel import ChannelParams, realize_channels
from .metrics import evaluate_all
from .optimizer import (OptConstraints, sca_solve, STATUS_CONVERGED,
                        STATUS_MAX_ITER)
from .scenario import DeploymentConfig, DeploymentTemplate, build_deployment, \
    sample_realization

SWEEP_SI_LEVEL = "si_level_db"
SWEEP_GAMMA_COMM = "gamma_comm_db"

POLICY_IC = "ic"
POLICY_OPTIMIZED = "optimized"


@dataclass(frozen=True)
class SweepSpec:
    axis: str                     # SWEEP_SI_LEVEL | SWEEP_GAMMA_COMM
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if self.axis not in (SWEEP_SI_LEVEL, SWEEP_GAMMA_COMM):
            raise ValueError(f"unknown sweep axis {self.axis!r}")
        if not self.values:
            raise ValueError("sweep needs at least one value")
        if not np.all(np.isfinite(self.values)):
            raise ValueError("sweep values must be finite")


@dataclass(frozen=True)
class CampaignConfig:
    deployment: DeploymentConfig
    channel: ChannelParams
    constraints: OptConstraints
    num_realizations: int = 500
    master_seed: int = 12345
    sweep: SweepSpec | None = None
    workers: int = 1

    def __post_init__(self) -> None:
        if self.num_realizations < 1:
            raise ValueError("num_realizations must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass(frozen=True)
class PolicyResult:
    rho: np.ndarray
    sinr_comm: np.ndarray         # overall comm SINRs, linear
    sinr_sensing: np.ndarray      # overall sensing SINRs, linear
    range_std: np.ndarray         # meters
    mean_range_std: float


@dataclass(frozen=True)
class CampaignRecord:
    realization_id: int
    sweep_value: float | None
    ic: PolicyResult
    optimized: PolicyResult | None
    iterations: int
    status: str
    censored: bool
    ic_feasible: bool
    # Residual self-interference exceeded the configured ADC limit at either
    # policy's powers (diagnostic; False when the check is disabled).
    adc_saturated: bool = False


@dataclass(frozen=True)
class _RecordTask:
    template: DeploymentTemplate
    channel: ChannelParams
    constraints: OptConstraints
    master_seed: int
    sweep_value: float | None
    realization_id: int


def campaign_rng(master_seed: int, realization_id: int) -> np.random.Generator:
    """Child rng derived by hashing (seed, index); order-independent and
    shared across sweep points."""
    return np.random.default_rng(
        np.random.SeedSequence((master_seed, realization_id)))


def _apply_sweep(channel: ChannelParams, cons: OptConstraints,
                 axis: str | None, value: float | None
                 ) -> tuple[ChannelParams, OptConstraints]:
    if axis is None or value is None:
        return channel, cons
    if axis == SWEEP_SI_LEVEL:
        return dataclasses.replace(channel, si_level=value), cons
    if axis == SWEEP_GAMMA_COMM:
        gamma = np.full(cons.gamma_comm.shape, 10.0 ** (value / 10.0))
        return channel, dataclasses.replace(cons, gamma_comm=gamma)
    raise ValueError(f"unknown sweep axis {axis!r}")


def _policy_result(rho: np.ndarray, ch) -> PolicyResult:
    rep = evaluate_all(rho, ch)
    return PolicyResult(rho=rho, sinr_comm=rep.comm_overall,
                        sinr_sensing=rep.sensing_overall,
                        range_std=rep.range_std,
                        mean_range_std=float(np.mean(rep.range_std)))


def _compute_record(task: _RecordTask) -> CampaignRecord:
    # task.channel/task.constraints arrive with the sweep already applied
    cons = task.constraints
    rng = campaign_rng(task.master_seed, task.realization_id)
    scenario = sample_realization(task.template, rng)
    ch = realize_channels(scenario, task.channel, rng, cons.p_max)

    K = task.template.num_bs
    rho_ic = np.full(K, cons.p_max)
    ic = _policy_result(rho_ic, ch)
    ic_feasible = bool(np.all(ic.sinr_comm >= cons.gamma_comm * (1.0 - 1e-9)))

    res = sca_solve(ch, cons)
    solved = res.status in (STATUS_CONVERGED, STATUS_MAX_ITER)
    optimized = _policy_result(res.rho_opt, ch) if solved else None
    censored = (not solved) or (not np.isfinite(optimized.mean_range_std))

    saturated = False
    limit = task.channel.adc_saturation_limit
    if limit is not None:
        residual = rho_ic * ch.beta_sq
        if optimized is not None:
            residual = np.maximum(residual, optimized.rho * ch.beta_sq)
        saturated = bool(np.any(residual > limit))

    return CampaignRecord(
        realization_id=task.realization_id,
        sweep_value=task.sweep_value,
        ic=ic,
        optimized=optimized,
        iterations=res.iterations,
        status=res.status,
        censored=censored,
        ic_feasible=ic_feasible,
        adc_saturated=saturated,
    )


def run_campaign(cfg: CampaignConfig) -> Iterator[CampaignRecord]:
    """Yield one record per (sweep value, realization), in index order.

    Records are computed in parallel when cfg.workers > 1; ordering and
    content are identical for any worker count.
    """
    template = build_deployment(cfg.deployment)
    if cfg.sweep is None:
        pairs = [(0, None)]
        axis = None
    else:
        pairs = list(enumerate(cfg.sweep.values))
        axis = cfg.sweep.axis

    tasks = []
    for _, sweep_value in pairs:
        channel, cons = _apply_sweep(cfg.channel, cfg.constraints, axis, sweep_value)
        for rid in range(cfg.num_realizations):
            tasks.append(_RecordTask(
                template=template, channel=channel, constraints=cons,
                master_seed=cfg.master_seed,
                sweep_value=sweep_value, realization_id=rid))

    if cfg.workers == 1:
        for task in tasks:
            yield _compute_record(task)
    else:
        chunk = max(1, len(tasks) // (cfg.workers * 8))
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            yield from pool.map(_compute_record, tasks, chunksize=chunk)


class EmptyCdfError(ValueError):
    """Raised when every record of a group is censored."""


def aggregate_cdf(records: list[CampaignRecord], policy: str,
                  field: str = "mean_range_std"
                  ) -> tuple[np.ndarray, np.ndarray]:
    """Empirical CDF of a scalar per-record field, censored records excluded.

    Returns (sorted values, cumulative probabilities ending at 1).
    """
    values = []
    for rec in records:
        if rec.censored:
            continue
        pol = rec.ic if policy == POLICY_IC else rec.optimized
        values.append(float(getattr(pol, field)))
    if not values:
        raise EmptyCdfError(f"no non-censored records for policy {policy!r}")
    values = np.sort(np.asarray(values))
    probs = np.arange(1, len(values) + 1) / len(values)
    return values, probs


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float | None
    policy: str
    bs_index: int
    mean_range_std: float         # meters
    mean_power: float             # watts


def aggregate_sweep(records: list[CampaignRecord]) -> list[SweepRow]:
    """Per-(sweep value, policy, BS) means of range STD and transmit power,
    over non-censored records."""
    groups: dict[float | None, list[CampaignRecord]] = {}
    for rec in records:
        if rec.censored:
            continue
        groups.setdefault(rec.sweep_value, []).append(rec)

    rows: list[SweepRow] = []
    for sweep_value, recs in sorted(groups.items(),
                                    key=lambda kv: (kv[0] is not None, kv[0] or 0.0)):
        K = recs[0].ic.rho.shape[0]
        for policy in (POLICY_IC, POLICY_OPTIMIZED):
            sigma = np.mean([getattr(r, "ic" if policy == POLICY_IC else "optimized").range_std
                             for r in recs], axis=0)
            power = np.mean([getattr(r, "ic" if policy == POLICY_IC else "optimized").rho
                             for r in recs], axis=0)
            for b in range(K):
                rows.append(SweepRow(sweep_value=sweep_value, policy=policy,
                                     bs_index=b, mean_range_std=float(sigma[b]),
                                     mean_power=float(power[b])))
    return rows


def censoring_counts(records: list[CampaignRecord]) -> dict:
    """censored / total per sweep value; the two always sum to the number of
    realizations per sweep point."""
    out: dict = {}
    for rec in records:
        c, t = out.get(rec.sweep_value, (0, 0))
        out[rec.sweep_value] = (c + (1 if rec.censored else 0), t + 1)
    return out
