"""Service operations: pure functions behind both the HTTP endpoints and the
in-process CLI path, so the two surfaces cannot drift apart."""

from __future__ import annotations

import numpy as np

from ..channel import realize_channels
from ..config import RunConfig, linear_to_db, watts_to_dbm
from ..metrics import evaluate_all
from ..montecarlo import (CampaignRecord, POLICY_IC, POLICY_OPTIMIZED,
                          aggregate_sweep, campaign_rng, run_campaign)
from ..optimizer import (STATUS_CONVERGED, STATUS_INFEASIBLE, STATUS_MAX_ITER,
                         STATUS_SENSING_INFEASIBLE, bisection_oracle,
                         check_comm_feasible, sca_solve)
from ..outputs import cdf_rows
from ..scenario import build_deployment, sample_realization
from .schemas import (CampaignRequest, CampaignResponse, CdfRowModel,
                      PreviewRequest, PreviewResponse, RecordModel,
                      SolveRequest, SolveResponse, SweepRowModel,
                      ValidateRequest, ValidateResponse)

ORACLE_REL_MARGIN = 1e-6
CONSTRAINT_REL_TOL = 1e-6


def _instance(config: RunConfig, seed: int, realization_id: int = 0):
    campaign = config.to_campaign_config()
    template = build_deployment(campaign.deployment)
    rng = campaign_rng(seed, realization_id)
    scenario = sample_realization(template, rng)
    ch = realize_channels(scenario, campaign.channel, rng,
                          campaign.constraints.p_max)
    return scenario, ch, campaign.constraints


def run_solve(req: SolveRequest) -> SolveResponse:
    """One realization: sample, realize channels, optimize, report metrics."""
    scenario, ch, cons = _instance(req.config, req.seed)
    res = sca_solve(ch, cons)
    solved = res.status in (STATUS_CONVERGED, STATUS_MAX_ITER)
    if solved:
        rep = evaluate_all(res.rho_opt, ch)
        rho_dbm = [watts_to_dbm(w) for w in res.rho_opt]
        sinr_comm = [linear_to_db(v) for v in rep.comm_overall]
        sinr_sens = [linear_to_db(v) for v in rep.sensing_overall]
        sigma = [float(v) for v in rep.range_std]
        mean_sigma = float(np.mean(rep.range_std))
    else:
        rho_dbm, sinr_comm, sinr_sens, sigma, mean_sigma = [], [], [], [], None

    oracle_eta = None
    oracle_gap = None
    if req.oracle and res.status != STATUS_INFEASIBLE:
        oracle_eta, _ = bisection_oracle(ch, cons)
        if oracle_eta > 0:
            oracle_gap = (oracle_eta - res.eta_opt) / oracle_eta

    return SolveResponse(
        status=res.status,
        feasible=res.status != STATUS_INFEASIBLE,
        iterations=res.iterations,
        eta=res.eta_opt,
        eta_db=(linear_to_db(res.eta_opt) if res.eta_opt > 0 else None),
        eta_trace=[float(v) for v in res.eta_trace],
        rho_dbm=rho_dbm,
        sinr_comm_db=sinr_comm,
        sinr_sensing_db=sinr_sens,
        range_std_m=sigma,
        mean_range_std_m=mean_sigma,
        infeasibility_certificate=res.infeasibility_certificate,
        oracle_eta=oracle_eta,
        oracle_gap_rel=oracle_gap,
    )


def _record_models(rec: CampaignRecord) -> list[RecordModel]:
    out = []
    for policy in (POLICY_IC, POLICY_OPTIMIZED):
        result = rec.ic if policy == POLICY_IC else rec.optimized
        if result is not None:
            out.append(RecordModel(
                realization_id=rec.realization_id,
                sweep_value=rec.sweep_value,
                policy=policy,
                rho_dbm=[watts_to_dbm(w) for w in result.rho],
                sinr_comm_db=[linear_to_db(v) for v in result.sinr_comm],
                sinr_sensing_db=[linear_to_db(v) for v in result.sinr_sensing],
                range_std_m=[float(v) for v in result.range_std],
                mean_range_std_m=result.mean_range_std,
                iterations=rec.iterations,
                status=rec.status,
                censored=rec.censored,
            ))
        else:
            out.append(RecordModel(
                realization_id=rec.realization_id, sweep_value=rec.sweep_value,
                policy=policy, rho_dbm=[], sinr_comm_db=[], sinr_sensing_db=[],
                range_std_m=[], mean_range_std_m=None,
                iterations=rec.iterations, status=rec.status,
                censored=rec.censored))
    return out


def run_campaign_request(req: CampaignRequest) -> CampaignResponse:
    """Full campaign; aggregates computed server-side from the same records."""
    campaign = req.config.to_campaign_config()
    records = list(run_campaign(campaign))
    record_models = [m for rec in records for m in _record_models(rec)]
    cdf = [CdfRowModel(sweep_value=sv, policy=p, value_m=v, cum_prob=c)
           for sv, p, v, c in cdf_rows(records)]
    sweep = [SweepRowModel(sweep_value=row.sweep_value, policy=row.policy,
                           bs_index=row.bs_index,
                           mean_range_std_m=row.mean_range_std,
                           mean_power_dbm=watts_to_dbm(row.mean_power))
             for row in aggregate_sweep(records)]
    return CampaignResponse(
        num_records=len(records),
        censored_count=sum(1 for r in records if r.censored),
        records=record_models,
        cdf=cdf,
        sweep=sweep,
    )


def run_validation(req: ValidateRequest) -> ValidateResponse:
    """Compare the iterative solver against the bisection oracle on N seeded
    instances; flags soundness or feasibility violations."""
    campaign = req.config.to_campaign_config()
    template = build_deployment(campaign.deployment)
    cons = campaign.constraints

    comm_infeasible = 0
    sensing_infeasible = 0
    compared = 0
    max_gap: float | None = None
    above = 0
    violations = 0

    for i in range(req.instances):
        rng = campaign_rng(campaign.master_seed, i)
        scenario = sample_realization(template, rng)
        ch = realize_channels(scenario, campaign.channel, rng, cons.p_max)

        feas = check_comm_feasible(ch, cons)
        res = sca_solve(ch, cons)
        if not feas.feasible:
            comm_infeasible += 1
            if res.status != STATUS_INFEASIBLE:
                violations += 1
            continue
        if res.status == STATUS_INFEASIBLE:
            violations += 1
            continue
        if res.status not in (STATUS_CONVERGED, STATUS_MAX_ITER):
            if res.status == STATUS_SENSING_INFEASIBLE:
                sensing_infeasible += 1
                continue
            violations += 1
            continue

        eta_oracle, _ = bisection_oracle(ch, cons)
        compared += 1
        if eta_oracle > 0:
            gap = (eta_oracle - res.eta_opt) / eta_oracle
            max_gap = gap if max_gap is None else max(max_gap, gap)
            if res.eta_opt > eta_oracle * (1.0 + ORACLE_REL_MARGIN):
                above += 1

        rep = evaluate_all(res.rho_opt, ch)
        comm_ok = np.all(rep.comm_overall >= cons.gamma_comm * (1 - CONSTRAINT_REL_TOL))
        box_ok = np.all((res.rho_opt >= -CONSTRAINT_REL_TOL * cons.p_max)
                        & (res.rho_opt <= cons.p_max * (1 + CONSTRAINT_REL_TOL)))
        if not (comm_ok and box_ok):
            violations += 1

    return ValidateResponse(
        instances=req.instances,
        comm_infeasible=comm_infeasible,
        sensing_infeasible=sensing_infeasible,
        compared=compared,
        max_rel_gap=max_gap,
        num_sca_above_oracle=above,
        num_constraint_violations=violations,
        passed=(above == 0 and violations == 0),
    )


def run_preview(req: PreviewRequest) -> PreviewResponse:
    """Sample one placement and return the geometry."""
    campaign = req.config.to_campaign_config()
    template = build_deployment(campaign.deployment)
    rng = campaign_rng(req.seed, 0)
    scenario = sample_realization(template, rng)
    verts = [[float(x), float(y)]
             for x, y in scenario.template.sensing_region.exterior.coords[:-1]]
    return PreviewResponse(
        bs_positions=[[float(v) for v in p] for p in scenario.bs_positions],
        ue_positions=[[float(v) for v in p] for p in scenario.ue_positions],
        target_position=[float(v) for v in scenario.target_position],
        sensing_region_vertices=verts,
        sensing_region_area_m2=float(scenario.template.sensing_region.area),
        comm_radius_m=float(scenario.template.comm_radius),
    )
