"""Command-line entry point.

Each subcommand writes its artifacts and the effective ``config.json`` into
the output directory and prints a one-line summary.  Exit codes: 0 success,
1 invalid input or configuration, 2 non-convergence (tuning failed where the
run needs it, or any failure under ``--strict``).
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import config as cfgmod
from .coupler import AntennaModel, ChannelScenario
from .experiments import (
    Specs,
    TuningError,
    config_hash,
    coverage_export,
    fine_cloud_export,
    montecarlo_cdf,
    offset_sweep,
    trial_rng,
    tuning_overhead,
    write_cdf_csv,
    write_overhead_csv,
    write_sweep_csv,
)
from .network import CapCodes
from .receiver import (
    carrier_cancellation_requirement,
    offset_cancellation_needed,
    offset_cancellation_requirement,
    reciprocal_mixing_limit,
    thermal_noise_dbm_hz,
)
from .tuner import tune, write_trace_csv

EXIT_OK, EXIT_INVALID, EXIT_NOT_CONVERGED = 0, 1, 2


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _complex(text: str) -> complex:
    vals = _floats(text)
    if len(vals) != 2:
        raise argparse.ArgumentTypeError(f"expected RE,IM, got {text!r}")
    return complex(vals[0], vals[1])


def _codes(text: str) -> CapCodes:
    try:
        return CapCodes.from_sequence(int(x) for x in text.split(","))
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", type=Path, help="JSON run configuration")
    common.add_argument("--seed", type=int, help="master seed (overrides the config)")
    common.add_argument("--out", type=Path, help="output directory (overrides the config)")
    common.add_argument("--jobs", type=int, default=1, help="worker processes (default 1)")
    common.add_argument("--strict", action="store_true", help="exit 2 when any tuning run fails to converge")
    common.add_argument("--random-leak", action="store_true", help="draw the coupler leakage phase per trial")

    p = argparse.ArgumentParser(prog="sicancel", description="Self-interference cancellation network simulator.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("requirements", parents=[common], help="cancellation requirements")
    s.add_argument("--sen", type=float, default=-137.0, help="receiver sensitivity (dBm)")
    s.add_argument("--bt", type=float, default=94.0, help="blocker tolerance above sensitivity (dB)")
    s.add_argument("--lo-pn", type=float, default=-128.0, help="receiver LO phase noise (dBc/Hz)")
    s.add_argument("--margin", type=float, default=6.0, help="reciprocal-mixing margin (dB)")
    s.add_argument("--noise-floor", type=float, default=-170.0, help="receiver noise floor for reciprocal mixing (dBm/Hz)")
    s.add_argument("--temperature", type=float, default=290.0, help="noise temperature (K)")

    s = sub.add_parser("coverage", parents=[common], help="stage-1 coverage set (CSV)")
    s.add_argument("--stride", type=int, default=6)
    s.add_argument("--f0", type=float, default=915e6)

    s = sub.add_parser("cloud", parents=[common], help="fine-tuning cloud around a state (CSV)")
    s.add_argument("--stride", type=int, default=10)
    s.add_argument("--f0", type=float, default=915e6)
    s.add_argument("--initial", type=_codes, help="eight comma-separated codes (default: midpoint)")

    s = sub.add_parser("tune", parents=[common], help="one annealing run")
    s.add_argument("--antenna", type=_complex, default=complex(0.2 * np.cos(np.pi / 6), 0.2 * np.sin(np.pi / 6)), help="antenna reflection RE,IM")
    s.add_argument("--f0", type=float, default=915e6)

    s = sub.add_parser("montecarlo", parents=[common], help="cancellation CDF over random antennas")
    s.add_argument("--n", type=int, default=400)
    s.add_argument("--gamma-max", type=float, default=0.4)
    s.add_argument("--mode", choices=("ideal", "sa"), default="ideal")
    s.add_argument("--f0", type=float, default=915e6)

    s = sub.add_parser("sweep", parents=[common], help="offset-frequency sweep of a frozen tuning")
    s.add_argument("--antenna", type=_complex, default=complex(0.2, 0.0), help="antenna reflection RE,IM")
    s.add_argument("--f0", type=float, default=915e6)
    s.add_argument("--span", type=float, default=20e6, help="total sweep width (Hz)")
    s.add_argument("--step", type=float, default=100e3)
    s.add_argument("--selection", choices=("flattest", "deepest"), default="flattest")

    s = sub.add_parser("overhead", parents=[common], help="tuning steps versus threshold")
    s.add_argument("--thresholds", type=_floats, default=[70.0, 75.0, 80.0, 85.0])
    s.add_argument("--n", type=int, default=200, help="trials per threshold")
    s.add_argument("--gamma-max", type=float, default=0.4)
    s.add_argument("--f0", type=float, default=915e6)
    return p


def _specs(cfg: cfgmod.RunConfig) -> Specs:
    return Specs(cfg.network, cfg.coupler, cfg.receiver, cfg.source, cfg.schedule, cfg.thresholds)


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _run(args, cfg: cfgmod.RunConfig, out: Path) -> tuple[int, str]:
    specs = _specs(cfg)
    h = config_hash(specs, {k: v for k, v in vars(args).items() if k not in ("config", "out", "jobs")})
    cmd = args.command

    if cmd == "requirements":
        p = cfg.source.power_dbm
        nf = cfg.receiver.noise_figure_db
        budget = offset_cancellation_requirement(p, nf, args.temperature)
        blocker, recip = reciprocal_mixing_limit(args.lo_pn, nf, args.margin, p, args.temperature, args.noise_floor)
        blocker_kt, recip_kt = reciprocal_mixing_limit(args.lo_pn, nf, args.margin, p, args.temperature)
        res = {
            "seed": cfg.seed,
            "config_hash": h,
            "carrier_req_db": round(carrier_cancellation_requirement(p, args.sen, args.bt), 6),
            "offset_budget_db": round(budget, 6),
            "offset_req_db": round(offset_cancellation_needed(p, nf, cfg.source.phase_noise_dbc_hz, args.temperature), 6),
            "reciprocal_max_blocker_dbm": round(blocker, 6),
            "reciprocal_req_db": round(recip, 6),
            "thermal_floor_dbm_hz": round(thermal_noise_dbm_hz(args.temperature) + nf, 6),
            "reciprocal_req_db_thermal_floor": round(recip_kt, 6),
        }
        _write_json(out / "requirements.json", res)
        return EXIT_OK, (
            f"requirements: carrier {res['carrier_req_db']:.1f} dB, offset budget {res['offset_budget_db']:.1f} dB, "
            f"offset {res['offset_req_db']:.1f} dB, reciprocal mixing {res['reciprocal_req_db']:.1f} dB"
        )

    if cmd == "coverage":
        n = coverage_export(out / "coverage.csv", args.stride, args.f0, cfg.network)
        return EXIT_OK, f"coverage: {n} states written to {out / 'coverage.csv'}"

    if cmd == "cloud":
        n = fine_cloud_export(out / "cloud.csv", args.initial, args.stride, args.f0, cfg.network)
        return EXIT_OK, f"cloud: {n} points written to {out / 'cloud.csv'}"

    if cmd == "tune":
        rng = trial_rng(cfg.seed, 0)
        coupler = cfg.coupler
        if args.random_leak:
            coupler = replace(coupler, leak_phase=float(2 * np.pi * rng.random()))
        scen = ChannelScenario(AntennaModel(args.antenna, f_ref=args.f0), args.f0)
        res = tune(scen, cfg.network, coupler, cfg.receiver, cfg.thresholds, cfg.schedule, rng, cfg.source)
        write_trace_csv(out / "trace.csv", res)
        _write_json(out / "tune.json", {
            "seed": cfg.seed,
            "config_hash": h,
            "converged": res.converged,
            "reason": res.reason,
            "achieved_db": round(res.achieved_db, 6),
            "steps": res.steps_taken,
            "measurements": res.measurements,
            "codes": list(res.codes.all),
        })
        code = EXIT_NOT_CONVERGED if args.strict and not res.converged else EXIT_OK
        state = "converged" if res.converged else f"not converged ({res.reason})"
        return code, f"tune: {state}, {res.achieved_db:.1f} dB after {res.steps_taken} steps"

    if cmd == "montecarlo":
        rep = montecarlo_cdf(args.n, args.gamma_max, args.mode, cfg.seed, specs, args.random_leak, args.f0, args.jobs)
        write_cdf_csv(out / "cdf.csv", rep)
        _write_json(out / "cdf.json", rep.summary())
        below = int(np.sum(rep.achieved < cfg.thresholds.total_db))
        code = EXIT_NOT_CONVERGED if args.strict and below else EXIT_OK
        return code, f"montecarlo: n={rep.n} p01={rep.percentiles['p01']:.1f} dB p50={rep.percentiles['p50']:.1f} dB"

    if cmd == "sweep":
        half = args.span / 2
        try:
            rep = offset_sweep(
                AntennaModel(args.antenna, f_ref=args.f0), specs, args.f0, args.f0 - half, args.f0 + half, args.step,
                args.selection, cfg.source.offset_hz, cfg.thresholds.total_db,
            )
        except TuningError as exc:
            return EXIT_NOT_CONVERGED, f"sweep: {exc}"
        write_sweep_csv(out / "sweep.csv", rep)
        off = cfg.source.offset_hz
        worst = min(rep.at(args.f0 - off), rep.at(args.f0 + off)) if args.f0 - off >= rep.freqs[0] and args.f0 + off <= rep.freqs[-1] else float("nan")
        _write_json(out / "sweep.json", {
            "seed": cfg.seed,
            "config_hash": h,
            "codes": list(rep.codes.all),
            "at_f0_db": round(rep.at(args.f0), 6),
            "worst_offset_db": round(worst, 6),
            "points": len(rep.freqs),
        })
        return EXIT_OK, f"sweep: {len(rep.freqs)} points, {rep.at(args.f0):.1f} dB at f0, {worst:.1f} dB worst at +-{off / 1e6:g} MHz"

    if cmd == "overhead":
        rep = tuning_overhead(args.thresholds, args.n, cfg.seed, specs, args.gamma_max, args.f0, args.jobs)
        write_overhead_csv(out / "overhead.csv", rep)
        _write_json(out / "overhead.json", rep.summary())
        table = rep.by_threshold()
        code = EXIT_NOT_CONVERGED if args.strict and any(v["success_rate"] < 1 for v in table.values()) else EXIT_OK
        parts = ", ".join(f"{t:g} dB: median {v['median_steps']:g} steps, {100 * v['success_rate']:.1f}%" for t, v in table.items())
        return code, f"overhead: {parts}"

    raise AssertionError(cmd)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = cfgmod.load(args.config) if args.config else cfgmod.RunConfig()
        cfg = cfg.with_overrides(seed=args.seed, output_dir=str(args.out) if args.out else None)
        if args.jobs < 1:
            raise ValueError("--jobs must be >= 1")
        out = Path(cfg.output_dir)
        out.mkdir(parents=True, exist_ok=True)
        code, line = _run(args, cfg, out)
        cfgmod.dump(cfg, out / "config.json")
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(line)
    return code


if __name__ == "__main__":
    sys.exit(main())
