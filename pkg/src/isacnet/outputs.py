"""File formats for campaign results.

Records go to JSON-lines (one object per policy per realization); aggregates
go to two CSVs (empirical CDFs and sweep means).  Floats are serialized with
Python's shortest round-trip repr, so re-parsing an output reproduces every
value bit-exactly, and rewriting the same campaign reproduces the same bytes.
"""

from __future__ import annotations

import json
from typing import Iterable, TextIO

from .config import linear_to_db, watts_to_dbm
from .montecarlo import (CampaignRecord, PolicyResult, SweepRow, POLICY_IC,
                         POLICY_OPTIMIZED, aggregate_cdf, EmptyCdfError)

RECORD_KEYS = ("realization_id", "sweep_value", "policy", "rho_dbm",
               "sinr_comm_db", "sinr_sensing_db", "range_std_m",
               "mean_range_std_m", "iterations", "status", "censored")

CDF_HEADER = ("sweep_value", "policy", "value_m", "cum_prob")
SWEEP_HEADER = ("sweep_value", "policy", "bs_index", "mean_range_std_m",
                "mean_power_dbm")


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _policy_line(rec: CampaignRecord, policy: str,
                 result: PolicyResult | None) -> str:
    if result is not None:
        payload = {
            "realization_id": rec.realization_id,
            "sweep_value": rec.sweep_value,
            "policy": policy,
            "rho_dbm": [watts_to_dbm(w) for w in result.rho],
            "sinr_comm_db": [linear_to_db(v) for v in result.sinr_comm],
            "sinr_sensing_db": [linear_to_db(v) for v in result.sinr_sensing],
            "range_std_m": [float(v) for v in result.range_std],
            "mean_range_std_m": result.mean_range_std,
            "iterations": rec.iterations,
            "status": rec.status,
            "censored": rec.censored,
        }
    else:
        payload = {
            "realization_id": rec.realization_id,
            "sweep_value": rec.sweep_value,
            "policy": policy,
            "rho_dbm": [],
            "sinr_comm_db": [],
            "sinr_sensing_db": [],
            "range_std_m": [],
            "mean_range_std_m": None,
            "iterations": rec.iterations,
            "status": rec.status,
            "censored": rec.censored,
        }
    return json.dumps(payload)


def write_records_jsonl(records: Iterable[CampaignRecord], fh: TextIO) -> int:
    """Two lines per record (IC, optimized); returns the line count."""
    n = 0
    for rec in records:
        fh.write(_policy_line(rec, POLICY_IC, rec.ic) + "\n")
        fh.write(_policy_line(rec, POLICY_OPTIMIZED, rec.optimized) + "\n")
        n += 2
    return n


def read_records_jsonl(fh: TextIO) -> list[dict]:
    return [json.loads(line) for line in fh if line.strip()]


def cdf_rows(records: list[CampaignRecord]) -> list[tuple]:
    """CDF of the per-record mean range STD, per (sweep value, policy)."""
    by_sweep: dict = {}
    for rec in records:
        by_sweep.setdefault(rec.sweep_value, []).append(rec)
    rows = []
    for sweep_value in sorted(by_sweep, key=lambda v: (v is not None, v or 0.0)):
        group = by_sweep[sweep_value]
        for policy in (POLICY_IC, POLICY_OPTIMIZED):
            try:
                values, probs = aggregate_cdf(group, policy)
            except EmptyCdfError:
                continue
            rows += [(sweep_value, policy, float(v), float(p))
                     for v, p in zip(values, probs)]
    return rows


def write_cdf_csv(rows: list[tuple], fh: TextIO) -> None:
    fh.write(",".join(CDF_HEADER) + "\n")
    for sweep_value, policy, value_m, cum_prob in rows:
        fh.write(f"{_fmt(sweep_value)},{policy},{_fmt(value_m)},{_fmt(cum_prob)}\n")


def write_sweep_csv(rows: list[SweepRow], fh: TextIO) -> None:
    fh.write(",".join(SWEEP_HEADER) + "\n")
    for row in rows:
        fh.write(f"{_fmt(row.sweep_value)},{row.policy},{row.bs_index},"
                 f"{_fmt(row.mean_range_std)},{_fmt(watts_to_dbm(row.mean_power))}\n")
