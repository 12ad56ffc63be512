"""Two-stage simulated-annealing tuner driven by noisy RSSI feedback.

Each stage anneals its own four capacitor codes: every step adds a bounded
random integer to each code, takes one (averaged) RSSI reading of the residual
self-interference, and accepts the move when the reading went down or, when
it went up, with probability ``exp(-delta_db * accept_scale / T)``.  The
temperature starts at 512 and halves each round down to 1, with ten steps
per round.  A stage stops as soon as its cancellation threshold is measured.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field, replace
from typing import Callable

import numpy as np

from .coupler import ChannelScenario, CouplerSpec, antenna_gamma, si_to_db, si_transfer
from .network import N_CAPS, CapCodes, NetworkSpec, balance_gamma
from .receiver import ReceiverSpec, SourceSpec, measure_rssi


@dataclass(frozen=True)
class AnnealSchedule:
    t_initial: float = 512.0
    t_final: float = 1.0
    cooling_divisor: float = 2.0
    steps_per_temp: int = 10
    accept_scale: float = 4096.0
    step_gain: int = 4

    def __post_init__(self):
        if not self.t_initial >= self.t_final >= 1:
            raise ValueError("need t_initial >= t_final >= 1")
        if not self.cooling_divisor > 1:
            raise ValueError("cooling_divisor must exceed 1")
        if self.steps_per_temp < 1:
            raise ValueError("steps_per_temp must be >= 1")

    def temperatures(self) -> list[float]:
        temps = []
        t = self.t_initial
        while t >= self.t_final:
            temps.append(t)
            t /= self.cooling_divisor
        return temps

    def step_size(self, temperature: float) -> int:
        return max(1, round(self.step_gain * temperature / self.t_initial))

    def accept_probability(self, delta_db: float, temperature: float) -> float:
        if delta_db <= 0:
            return 1.0
        return math.exp(-delta_db * self.accept_scale / temperature)


@dataclass(frozen=True)
class TuneThresholds:
    stage1_db: float = 50.0
    total_db: float = 78.0
    max_retries: int = 5  # extra anneals per stage, from the stage's best state
    max_restarts: int = 3  # full restarts from the initial codes

    def __post_init__(self):
        if self.total_db < self.stage1_db:
            raise ValueError("total_db must be >= stage1_db")
        if self.max_retries < 0 or self.max_restarts < 0:
            raise ValueError("max_retries and max_restarts must be >= 0")


@dataclass(frozen=True)
class TraceRow:
    step: int
    stage: int
    temperature: float
    codes: tuple[int, ...]
    measured_dbm: float
    accepted: bool


@dataclass
class TuneResult:
    codes: CapCodes
    achieved_db: float
    steps_taken: int
    measurements: int
    converged: bool
    reason: str = ""
    trace: list[TraceRow] = field(default_factory=list)


@dataclass
class StageOutcome:
    codes: tuple[int, ...]
    measured_dbm: float
    steps: int
    met: bool
    trace: list[TraceRow]


def anneal_stage(
    stage_indices,
    start,
    objective: Callable[[tuple[int, ...]], float],
    schedule: AnnealSchedule,
    threshold_dbm: float,
    rng: np.random.Generator,
    steps: int = 32,
    start_measured: float | None = None,
    stage_label: int = 1,
    step_offset: int = 0,
) -> StageOutcome:
    """Anneal the codes at ``stage_indices`` of ``start`` to minimise ``objective``.

    ``objective`` returns measured SI power in dBm (lower is better); the
    stage succeeds once a reading is at or below ``threshold_dbm``.  The
    best-measured state is returned, not the last one.  ``start_measured``
    reuses an existing reading of ``start`` instead of taking a new one.
    """
    idx = np.asarray(stage_indices)
    current = np.array(start, dtype=np.int64)
    trace = []
    n = 0
    if start_measured is None:
        current_val = objective(tuple(current))
        n += 1
        trace.append(TraceRow(step_offset + n, stage_label, schedule.t_initial, tuple(current), current_val, True))
    else:
        current_val = start_measured
    best, best_val = current.copy(), current_val
    if best_val <= threshold_dbm:
        return StageOutcome(tuple(best), best_val, n, True, trace)

    for temp in schedule.temperatures():
        s = schedule.step_size(temp)
        for _ in range(schedule.steps_per_temp):
            cand = current.copy()
            cand[idx] = np.clip(cand[idx] + rng.integers(-s, s + 1, size=idx.size), 0, steps - 1)
            val = objective(tuple(cand))
            n += 1
            delta = val - current_val
            accepted = delta <= 0 or rng.random() < schedule.accept_probability(delta, temp)
            trace.append(TraceRow(step_offset + n, stage_label, temp, tuple(cand), val, accepted))
            if accepted:
                current, current_val = cand, val
            if val < best_val:
                best, best_val = cand, val
            if best_val <= threshold_dbm:
                return StageOutcome(tuple(best), best_val, n, True, trace)
    return StageOutcome(tuple(best), best_val, n, False, trace)


def make_objective(g_ant: complex, net: NetworkSpec, coupler: CouplerSpec, rx: ReceiverSpec, source: SourceSpec, f: float, rng):
    """Measured residual SI power (dBm) as a function of the eight codes."""

    def objective(codes):
        si = si_transfer(g_ant, balance_gamma(np.asarray(codes), net, f), coupler)
        true_dbm = source.power_dbm - si_to_db(si)
        return measure_rssi(true_dbm, rx, rng)

    return objective


def tune(
    scenario: ChannelScenario,
    net: NetworkSpec | None = None,
    coupler: CouplerSpec | None = None,
    rx: ReceiverSpec | None = None,
    thresholds: TuneThresholds | None = None,
    schedule: AnnealSchedule | None = None,
    rng: np.random.Generator | None = None,
    source: SourceSpec | None = None,
    start: CapCodes | None = None,
) -> TuneResult:
    """Tune stage 1 to ``stage1_db``, then stage 2 to ``total_db``.

    Both stages retry from their best state; when either still falls short
    the whole procedure restarts from ``start``, up to ``max_restarts`` times.
    A reading passes a threshold only with half an RSSI step to spare.
    """
    net = net or NetworkSpec()
    coupler = coupler or CouplerSpec()
    rx = rx or ReceiverSpec()
    thresholds = thresholds or TuneThresholds()
    schedule = schedule or AnnealSchedule()
    source = source or SourceSpec()
    rng = rng if rng is not None else np.random.default_rng(0)
    start = (start or CapCodes.midpoint(net.cap.steps)).validate(net.cap.steps)

    f = scenario.carrier_freq
    g_ant = antenna_gamma(scenario.antenna, f)
    objective = make_objective(g_ant, net, coupler, rx, source, f, rng)
    # Half an RSSI step of guard: a passing reading then guarantees the true level.
    guard = rx.rssi_quant_db / 2
    stage1_dbm = source.power_dbm - thresholds.stage1_db - guard
    total_dbm = source.power_dbm - thresholds.total_db - guard
    steps = net.cap.steps

    trace: list[TraceRow] = []
    n_steps = 0
    best_codes, best_measured = start.all, np.inf
    for _ in range(thresholds.max_restarts + 1):
        codes, measured = start.all, None
        # Each stage re-anneals from its best state until the retry budget runs out.
        for stage, indices, target in ((1, range(N_CAPS), stage1_dbm), (2, range(N_CAPS, 2 * N_CAPS), total_dbm)):
            for _ in range(thresholds.max_retries + 1):
                if measured is not None and measured <= target:
                    break
                out = anneal_stage(
                    indices, codes, objective, schedule, target, rng, steps,
                    start_measured=measured, stage_label=stage, step_offset=n_steps,
                )
                trace += out.trace
                n_steps += out.steps
                codes, measured = out.codes, out.measured_dbm
            if measured > target:
                break
        if measured < best_measured:
            best_codes, best_measured = codes, measured
        if best_measured <= total_dbm:
            break
    codes, measured = best_codes, best_measured
    converged = measured <= total_dbm
    reason = ""
    if measured > stage1_dbm:
        reason = "stage1 below threshold"
    elif not converged:
        reason = "stage2 below threshold"

    final = CapCodes.from_sequence(codes)
    achieved = si_to_db(si_transfer(g_ant, balance_gamma(final, net, f), coupler))
    return TuneResult(final, achieved, n_steps, n_steps * rx.rssi_avg_count, converged, reason, trace)


def retune_on_perturbation(
    scenario: ChannelScenario,
    net: NetworkSpec | None = None,
    coupler: CouplerSpec | None = None,
    rx: ReceiverSpec | None = None,
    thresholds: TuneThresholds | None = None,
    schedule: AnnealSchedule | None = None,
    rng: np.random.Generator | None = None,
    source: SourceSpec | None = None,
) -> list[TuneResult]:
    """Tune for the initial antenna, then re-tune (warm start) after each perturbation."""
    rng = rng if rng is not None else np.random.default_rng(0)
    antennas = [scenario.antenna] + [ant for _, ant in scenario.perturbations]
    results = []
    start = None
    for ant in antennas:
        epoch = replace(scenario, antenna=ant, perturbations=())
        res = tune(epoch, net, coupler, rx, thresholds, schedule, rng, source, start=start)
        results.append(res)
        start = res.codes
    return results


def write_trace_csv(path, result: TuneResult) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["step", "temperature", *(f"c{i}" for i in range(1, 9)), "measured_dbm", "accepted", "stage"])
        for row in result.trace:
            w.writerow([row.step, repr(row.temperature), *row.codes, repr(row.measured_dbm), int(row.accepted), row.stage])
