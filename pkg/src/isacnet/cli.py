"""Command-line client.

All heavy lifting lives in the service layer; each subcommand builds the
same request model the HTTP endpoints accept and either calls the handler
in-process (default) or posts it to a running server (--server URL).

Exit codes: 0 success, 1 usage/config error, 2 infeasible instance,
3 validation failure.
"""

from __future__ import annotations

import argparse
import os
import sys

from .config import ConfigError, RunConfig, default_config, dump_config_yaml, \
    load_config

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_INFEASIBLE = 2
EXIT_VALIDATION = 3


def _load(args) -> RunConfig:
    if args.config is None:
        return default_config()
    return load_config(args.config)


def _post(server: str, path: str, payload: dict, response_model):
    import httpx

    url = server.rstrip("/") + path
    resp = httpx.post(url, json=payload, timeout=3600.0)
    resp.raise_for_status()
    return response_model.model_validate(resp.json())


def _print_solve(resp) -> None:
    print(f"status: {resp.status}  iterations: {resp.iterations}")
    if not resp.feasible:
        print("instance is comm-infeasible; max-slack certificate "
              f"{resp.infeasibility_certificate:.6g} (< 0 proves infeasibility)")
        return
    if resp.rho_dbm:
        print(f"{'BS':>3} {'rho dBm':>10} {'comm SINR dB':>13} "
              f"{'sens SINR dB':>13} {'sigma_R m':>12}")
        for i, (p, c, s, r) in enumerate(zip(resp.rho_dbm, resp.sinr_comm_db,
                                             resp.sinr_sensing_db, resp.range_std_m)):
            print(f"{i:>3} {p:>10.3f} {c:>13.3f} {s:>13.3f} {r:>12.4f}")
        print(f"mean sigma_R: {resp.mean_range_std_m:.4f} m")
    eta_db = f" ({resp.eta_db:.3f} dB)" if resp.eta_db is not None else ""
    print(f"min sensing SINR eta*: {resp.eta:.6e}{eta_db}")
    print("eta trace:", " ".join(f"{v:.6e}" for v in resp.eta_trace))
    if resp.oracle_eta is not None:
        print(f"oracle eta*: {resp.oracle_eta:.6e}  "
              f"relative gap: {resp.oracle_gap_rel:.3e}")


def cmd_solve(args) -> int:
    from .service.schemas import SolveRequest, SolveResponse

    req = SolveRequest(config=_load(args), seed=args.seed, oracle=args.oracle)
    if args.server:
        resp = _post(args.server, "/solve", req.model_dump(mode="json"),
                     SolveResponse)
    elif args.dump_subproblems:
        resp = _solve_with_dumps(req, args.dump_subproblems)
    else:
        from .service import ops
        resp = ops.run_solve(req)
    _print_solve(resp)
    return EXIT_OK if resp.feasible else EXIT_INFEASIBLE


def _solve_with_dumps(req, dump_dir: str):
    """In-process solve that also writes each subproblem in CBF format."""
    from .channel import realize_channels
    from .montecarlo import campaign_rng
    from .optimizer import dump_subproblem_cbf, sca_solve
    from .scenario import build_deployment, sample_realization
    from .service.ops import run_solve
    from .service.schemas import SolveRequest

    os.makedirs(dump_dir, exist_ok=True)
    campaign = req.config.to_campaign_config()
    template = build_deployment(campaign.deployment)
    rng = campaign_rng(req.seed, 0)
    scenario = sample_realization(template, rng)
    ch = realize_channels(scenario, campaign.channel, rng,
                          campaign.constraints.p_max)

    def writer(iteration, prog):
        dump_subproblem_cbf(prog, os.path.join(dump_dir, f"subproblem_{iteration:03d}.cbf"))

    sca_solve(ch, campaign.constraints, on_subproblem=writer)
    # metrics/printing go through the standard path for consistency
    return run_solve(SolveRequest(config=req.config, seed=req.seed,
                                  oracle=req.oracle))


def cmd_campaign(args) -> int:
    cfg = _load(args)
    out_dir = args.out or cfg.output.directory
    os.makedirs(out_dir, exist_ok=True)
    records_path = os.path.join(out_dir, "records.jsonl")
    cdf_path = os.path.join(out_dir, "cdf.csv")
    sweep_path = os.path.join(out_dir, "sweep.csv")

    if args.server:
        from .service.schemas import CampaignRequest, CampaignResponse

        req = CampaignRequest(config=cfg)
        resp = _post(args.server, "/campaign", req.model_dump(mode="json"),
                     CampaignResponse)
        _write_campaign_response(resp, records_path, cdf_path, sweep_path)
        censored = resp.censored_count
        n_records = resp.num_records
    else:
        from .montecarlo import aggregate_sweep, run_campaign
        from .outputs import cdf_rows, write_cdf_csv, write_records_jsonl, \
            write_sweep_csv

        campaign = cfg.to_campaign_config()
        records = []
        with open(records_path, "w", encoding="utf-8") as fh:
            for rec in run_campaign(campaign):
                write_records_jsonl([rec], fh)
                records.append(rec)
        with open(cdf_path, "w", encoding="utf-8") as fh:
            write_cdf_csv(cdf_rows(records), fh)
        with open(sweep_path, "w", encoding="utf-8") as fh:
            write_sweep_csv(aggregate_sweep(records), fh)
        censored = sum(1 for r in records if r.censored)
        n_records = len(records)

    if cfg.output.verbosity > 0:
        print(f"{n_records} realizations ({censored} censored)")
        print(f"wrote {records_path}, {cdf_path}, {sweep_path}")
    return EXIT_OK


def _write_campaign_response(resp, records_path, cdf_path, sweep_path) -> None:
    import json

    from .outputs import CDF_HEADER, SWEEP_HEADER, _fmt

    with open(records_path, "w", encoding="utf-8") as fh:
        for rec in resp.records:
            fh.write(json.dumps(rec.model_dump(mode="python")) + "\n")
    with open(cdf_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(CDF_HEADER) + "\n")
        for row in resp.cdf:
            fh.write(f"{_fmt(row.sweep_value)},{row.policy},"
                     f"{_fmt(row.value_m)},{_fmt(row.cum_prob)}\n")
    with open(sweep_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(SWEEP_HEADER) + "\n")
        for row in resp.sweep:
            fh.write(f"{_fmt(row.sweep_value)},{row.policy},{row.bs_index},"
                     f"{_fmt(row.mean_range_std_m)},{_fmt(row.mean_power_dbm)}\n")


def cmd_validate(args) -> int:
    from .service.schemas import ValidateRequest, ValidateResponse

    req = ValidateRequest(config=_load(args), instances=args.instances)
    if args.server:
        resp = _post(args.server, "/validate", req.model_dump(mode="json"),
                     ValidateResponse)
    else:
        from .service import ops
        resp = ops.run_validation(req)

    gap = "n/a" if resp.max_rel_gap is None else f"{resp.max_rel_gap:.3e}"
    print(f"instances: {resp.instances}  compared: {resp.compared}  "
          f"comm-infeasible: {resp.comm_infeasible}  "
          f"sensing-infeasible: {resp.sensing_infeasible}")
    print(f"max relative gap vs oracle: {gap}")
    print(f"solver above oracle: {resp.num_sca_above_oracle}  "
          f"constraint violations: {resp.num_constraint_violations}")
    print("PASS" if resp.passed else "FAIL")
    return EXIT_OK if resp.passed else EXIT_VALIDATION


def cmd_preview(args) -> int:
    from .service.schemas import PreviewRequest, PreviewResponse

    req = PreviewRequest(config=_load(args), seed=args.seed)
    if args.server:
        resp = _post(args.server, "/scenario/preview",
                     req.model_dump(mode="json"), PreviewResponse)
    else:
        from .service import ops
        resp = ops.run_preview(req)

    print(f"{'BS':>3} {'x':>10} {'y':>10} {'z':>6}    "
          f"{'UE x':>10} {'UE y':>10} {'UE z':>6}")
    for i, (bs, ue) in enumerate(zip(resp.bs_positions, resp.ue_positions)):
        print(f"{i:>3} {bs[0]:>10.2f} {bs[1]:>10.2f} {bs[2]:>6.2f}    "
              f"{ue[0]:>10.2f} {ue[1]:>10.2f} {ue[2]:>6.2f}")
    t = resp.target_position
    print(f"target: ({t[0]:.2f}, {t[1]:.2f}, {t[2]:.2f})")
    print(f"sensing region: {len(resp.sensing_region_vertices)} vertices, "
          f"area {resp.sensing_region_area_m2:.1f} m^2; "
          f"comm radius {resp.comm_radius_m:.1f} m")
    return EXIT_OK


def cmd_show_config(args) -> int:
    print(dump_config_yaml(_load(args)), end="")
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="isacnet",
        description="Simulate and optimize power allocation in a "
                    "monostatic-sensing ISAC network.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, server=True):
        p.add_argument("--config", help="YAML run config (defaults built in)")
        if server:
            p.add_argument("--server", help="base URL of a running service; "
                                            "default runs in-process")

    p = sub.add_parser("solve", help="solve one seeded realization")
    add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--oracle", action="store_true",
                   help="also run the bisection oracle and report the gap")
    p.add_argument("--dump-subproblems", metavar="DIR",
                   help="write each convex subproblem in CBF format")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("campaign", help="run a Monte-Carlo campaign")
    add_common(p)
    p.add_argument("--out", help="output directory (default from config)")
    p.set_defaults(func=cmd_campaign)

    p = sub.add_parser("validate", help="cross-check the solver against the "
                                        "exact bisection oracle")
    add_common(p)
    p.add_argument("--instances", type=int, default=100)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("preview", help="print one sampled scenario")
    add_common(p)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_preview)

    p = sub.add_parser("show-config", help="print the effective config YAML")
    add_common(p, server=False)
    p.set_defaults(func=cmd_show_config)

    p = sub.add_parser("serve", help="start the HTTP service")
    add_common(p, server=False)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
