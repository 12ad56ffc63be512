"""Simulation studies: coverage exports, cancellation CDFs, offset sweeps, tuning overhead.

Every study is reproducible from a master seed.  Trial ``i`` draws from its
own generator seeded with ``(seed, i)``, so results do not depend on the
execution order or on how many worker processes run the trials.
"""
from __future__ import annotations

import csv
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, is_dataclass, replace
from functools import partial
from pathlib import Path

import numpy as np

from .coupler import AntennaModel, ChannelScenario, CouplerSpec, antenna_gamma, cancellation_db
from .network import CapCodes, NetworkSpec, balance_gamma, coverage_enumeration, fine_cloud
from .receiver import REQUIRED_CANCELLATION_DB, ReceiverSpec, SourceSpec
from .search import flattest_tune, ideal_tune
from .tuner import AnnealSchedule, TuneThresholds, tune

PERCENTILES = (1, 10, 50, 90, 99)


class TuningError(RuntimeError):
    """The network could not be tuned to the required cancellation."""


@dataclass(frozen=True)
class Specs:
    """Bundle of every model parameter a study depends on."""

    network: NetworkSpec = NetworkSpec()
    coupler: CouplerSpec = CouplerSpec()
    receiver: ReceiverSpec = ReceiverSpec()
    source: SourceSpec = SourceSpec()
    schedule: AnnealSchedule = AnnealSchedule()
    thresholds: TuneThresholds = TuneThresholds()


def _plain(obj):
    if is_dataclass(obj):
        return {k: _plain(v) for k, v in asdict(obj).items()}
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def config_hash(*parts) -> str:
    """SHA-256 over a canonical JSON rendering of the given configuration objects."""
    blob = json.dumps([_plain(p) for p in parts], sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([int(seed), int(trial)]))


def sample_disk(n: int, gamma_max: float, rng: np.random.Generator) -> np.ndarray:
    """``n`` reflection coefficients uniform over the disk ``|gamma| <= gamma_max``."""
    r = gamma_max * np.sqrt(rng.random(n))
    theta = 2 * np.pi * rng.random(n)
    return r * np.exp(1j * theta)


def _map(fn, items, jobs: int):
    if jobs <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _fmt(x) -> str:
    return repr(float(x))


# -- Monte Carlo CDF ---------------------------------------------------------


@dataclass
class CdfReport:
    samples: np.ndarray  # sorted ascending (dB)
    percentiles: dict
    n: int
    seed: int
    mode: str
    config_hash: str
    antennas: np.ndarray  # per trial, trial order
    achieved: np.ndarray  # per trial, trial order

    def summary(self) -> dict:
        return {
            "seed": self.seed,
            "config_hash": self.config_hash,
            "mode": self.mode,
            "n": self.n,
            **{k: round(v, 6) for k, v in self.percentiles.items()},
        }


def _cdf_trial(trial, seed, gamma_max, mode, specs: Specs, random_leak, f):
    rng = trial_rng(seed, trial)
    g_ant = complex(sample_disk(1, gamma_max, rng)[0])
    coupler = specs.coupler
    if random_leak:
        coupler = replace(coupler, leak_phase=float(2 * np.pi * rng.random()))
    if mode == "ideal":
        return g_ant, ideal_tune(g_ant, specs.network, coupler, f).cancellation_db
    res = tune(
        ChannelScenario(AntennaModel(g_ant, f_ref=f), f),
        specs.network, coupler, specs.receiver, specs.thresholds, specs.schedule, rng, specs.source,
    )
    return g_ant, res.achieved_db


def percentile_table(samples) -> dict:
    return {f"p{p:02d}": float(np.percentile(samples, p)) for p in PERCENTILES}


def montecarlo_cdf(
    n: int = 400,
    gamma_max: float = 0.4,
    mode: str = "ideal",
    seed: int = 0,
    specs: Specs | None = None,
    random_leak: bool = False,
    f: float = 915e6,
    jobs: int = 1,
) -> CdfReport:
    """Cancellation CDF over antennas drawn uniformly from ``|gamma| <= gamma_max``.

    ``mode`` is ``"ideal"`` (deterministic noiseless search) or ``"sa"`` (the
    annealing tuner with the configured RSSI noise).
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not 0 <= gamma_max <= 1:
        raise ValueError("gamma_max must lie in [0, 1]")
    if mode not in ("ideal", "sa"):
        raise ValueError(f"mode must be 'ideal' or 'sa', got {mode!r}")
    specs = specs or Specs()
    fn = partial(_cdf_trial, seed=seed, gamma_max=gamma_max, mode=mode, specs=specs, random_leak=random_leak, f=f)
    out = _map(fn, list(range(n)), jobs)
    antennas = np.array([o[0] for o in out])
    achieved = np.array([o[1] for o in out])
    h = config_hash(specs, {"n": n, "gamma_max": gamma_max, "mode": mode, "seed": seed, "random_leak": random_leak, "f": f})
    return CdfReport(np.sort(achieved), percentile_table(achieved), n, seed, mode, h, antennas, achieved)


def write_cdf_csv(path, report: CdfReport) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["trial", "gamma_re", "gamma_im", "achieved_db"])
        for i, (g, a) in enumerate(zip(report.antennas, report.achieved)):
            w.writerow([i, _fmt(g.real), _fmt(g.imag), _fmt(a)])


# -- offset-frequency sweep --------------------------------------------------


@dataclass
class SweepReport:
    freqs: np.ndarray
    cancellation: np.ndarray
    codes: CapCodes
    antenna: AntennaModel
    f0: float

    def at(self, f: float) -> float:
        i = int(np.argmin(np.abs(self.freqs - f)))
        if abs(self.freqs[i] - f) > 1e-3:
            raise KeyError(f"{f} Hz not on the sweep grid")
        return float(self.cancellation[i])


def frequency_grid(f_lo: float, f_hi: float, step: float) -> np.ndarray:
    if not step > 0:
        raise ValueError("step must be positive")
    n = int(round((f_hi - f_lo) / step)) + 1
    return f_lo + step * np.arange(n)


def offset_sweep(
    antenna: AntennaModel,
    specs: Specs | None = None,
    f0: float = 915e6,
    f_lo: float = 905e6,
    f_hi: float = 925e6,
    step: float = 100e3,
    selection: str = "flattest",
    offset: float = 3e6,
    required_db: float = REQUIRED_CANCELLATION_DB,
) -> SweepReport:
    """Tune at ``f0`` without noise, freeze the codes, and sweep the carrier.

    ``selection="deepest"`` keeps the deepest null at ``f0``;
    ``"flattest"`` keeps, among states meeting ``required_db`` at ``f0``, the
    one with the best worst-side cancellation at ``f0 +- offset``.
    """
    if not f_lo <= f0 <= f_hi:
        raise ValueError("need f_lo <= f0 <= f_hi")
    specs = specs or Specs()
    g0 = antenna_gamma(antenna, f0)
    if selection == "deepest":
        res = ideal_tune(g0, specs.network, specs.coupler, f0)
    elif selection == "flattest":
        res = flattest_tune(g0, specs.network, specs.coupler, f0, offset, required_db)
    else:
        raise ValueError(f"selection must be 'deepest' or 'flattest', got {selection!r}")
    if res.cancellation_db < required_db:
        raise TuningError(f"tuning reached {res.cancellation_db:.1f} dB at f0, below {required_db} dB")
    freqs = frequency_grid(f_lo, f_hi, step)
    g_bal = balance_gamma(np.broadcast_to(res.codes.as_array(), (len(freqs), 8)), specs.network, freqs)
    can = cancellation_db(antenna_gamma(antenna, freqs), g_bal, specs.coupler)
    return SweepReport(freqs, np.atleast_1d(can), res.codes, antenna, f0)


def write_sweep_csv(path, report: SweepReport) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["freq_hz", "cancellation_db"])
        for fr, c in zip(report.freqs, report.cancellation):
            w.writerow([_fmt(fr), _fmt(c)])


# -- Smith-chart exports -----------------------------------------------------


def _write_points(path, codes8, gammas, parents) -> int:
    path = Path(path)
    try:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([*(f"c{i}" for i in range(1, 9)), "gamma_re", "gamma_im", "parent_index"])
            for c, g, p in zip(codes8, gammas, parents):
                w.writerow([*(int(x) for x in c), _fmt(g.real), _fmt(g.imag), int(p)])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc}") from exc
    return len(gammas)


def coverage_export(path, stride: int = 6, f: float = 915e6, net: NetworkSpec | None = None) -> int:
    """Write the stage-1 coverage set; stage 2 sits at its midpoint, parent_index is -1."""
    net = net or NetworkSpec()
    codes, gammas = coverage_enumeration(net, f, stride)
    mid = np.full((len(codes), 4), net.cap.steps // 2)
    return _write_points(path, np.hstack([codes, mid]), gammas, np.full(len(codes), -1))


def fine_cloud_export(path, initial: CapCodes | None = None, stride2: int = 10, f: float = 915e6, net: NetworkSpec | None = None) -> int:
    """Write the fine-tuning cloud around ``initial``; returns the row count."""
    net = net or NetworkSpec()
    initial = initial or CapCodes.midpoint(net.cap.steps)
    codes, gammas, parent = fine_cloud(initial, net, f, stride2)
    return _write_points(path, codes, gammas, parent)


# -- tuning overhead ---------------------------------------------------------


@dataclass
class OverheadReport:
    rows: list = field(default_factory=list)  # (threshold_db, trial, steps, converged, achieved_db)
    seed: int = 0
    config_hash: str = ""

    def by_threshold(self) -> dict:
        out = {}
        for thr in sorted({r[0] for r in self.rows}):
            sel = [r for r in self.rows if r[0] == thr]
            steps = np.array([r[2] for r in sel])
            ok = np.array([r[3] for r in sel])
            out[thr] = {
                "trials": len(sel),
                "success_rate": float(ok.mean()),
                "median_steps": float(np.median(steps[ok])) if ok.any() else float("nan"),
                "mean_steps": float(np.mean(steps[ok])) if ok.any() else float("nan"),
                "steps_cdf": percentile_table(steps[ok]) if ok.any() else {},
                "achieved_rate": float(np.mean([r[4] >= thr for r in sel])),
            }
        return out

    def summary(self) -> dict:
        return {"seed": self.seed, "config_hash": self.config_hash, "thresholds": {repr(float(k)): v for k, v in self.by_threshold().items()}}


def _overhead_trial(args, seed, gamma_max, specs: Specs, f):
    threshold, trial = args
    rng = trial_rng(seed, trial)
    g_ant = complex(sample_disk(1, gamma_max, rng)[0])
    thr = TuneThresholds(min(specs.thresholds.stage1_db, threshold), threshold, specs.thresholds.max_retries)
    res = tune(
        ChannelScenario(AntennaModel(g_ant, f_ref=f), f),
        specs.network, specs.coupler, specs.receiver, thr, specs.schedule, rng, specs.source,
    )
    return threshold, trial, res.steps_taken, res.converged, res.achieved_db


def tuning_overhead(
    thresholds=(70.0, 75.0, 80.0, 85.0),
    trials: int = 200,
    seed: int = 0,
    specs: Specs | None = None,
    gamma_max: float = 0.4,
    f: float = 915e6,
    jobs: int = 1,
) -> OverheadReport:
    """Steps to converge and success rate per cancellation threshold.

    Trial ``i`` sees the same antenna for every threshold.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    specs = specs or Specs()
    items = [(float(t), i) for t in thresholds for i in range(trials)]
    fn = partial(_overhead_trial, seed=seed, gamma_max=gamma_max, specs=specs, f=f)
    rows = _map(fn, items, jobs)
    h = config_hash(specs, {"thresholds": list(thresholds), "trials": trials, "seed": seed, "gamma_max": gamma_max, "f": f})
    return OverheadReport(rows, seed, h)


def write_overhead_csv(path, report: OverheadReport) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["threshold_db", "trial", "steps", "converged"])
        for thr, trial, steps, ok, _ in report.rows:
            w.writerow([_fmt(thr), trial, steps, int(ok)])
