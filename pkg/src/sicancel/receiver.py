"""RSSI feedback model and the cancellation-requirement link budgets."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.constants import k as BOLTZMANN

# Canonical carrier-cancellation target (dB).
REQUIRED_CANCELLATION_DB = 78.0


@dataclass(frozen=True)
class ReceiverSpec:
    noise_figure_db: float = 4.5
    rssi_sigma_db: float = 1.0
    rssi_quant_db: float = 0.5
    rssi_avg_count: int = 8
    rssi_floor_dbm: float = -140.0

    def __post_init__(self):
        if self.rssi_sigma_db < 0:
            raise ValueError("rssi_sigma_db must be >= 0")
        if not self.rssi_quant_db > 0:
            raise ValueError("rssi_quant_db must be > 0")
        if self.rssi_avg_count < 1:
            raise ValueError("rssi_avg_count must be >= 1")


@dataclass(frozen=True)
class SourceSpec:
    power_dbm: float = 30.0
    phase_noise_dbc_hz: float = -153.0
    offset_hz: float = 3e6

    def __post_init__(self):
        if not self.offset_hz > 0:
            raise ValueError("offset_hz must be positive")


def quantize_down_ties(x: float, step: float) -> float:
    """Round to the nearest multiple of ``step``; exact halves go toward -inf."""
    return step * math.ceil(x / step - 0.5)


def measure_rssi(true_power_dbm: float, spec: ReceiverSpec, rng: np.random.Generator) -> float:
    """One averaged, quantized RSSI reading (dBm)."""
    if spec.rssi_sigma_db > 0:
        draws = true_power_dbm + rng.normal(0.0, spec.rssi_sigma_db, spec.rssi_avg_count)
        mean = float(np.mean(draws))
    else:
        mean = float(true_power_dbm)
    return max(quantize_down_ties(mean, spec.rssi_quant_db), spec.rssi_floor_dbm)


def thermal_noise_dbm_hz(temperature_k: float = 290.0) -> float:
    """``10 log10(k T)`` expressed in dBm per Hz."""
    if not temperature_k > 0:
        raise ValueError("temperature must be positive")
    return 10 * math.log10(BOLTZMANN * temperature_k * 1000)


def carrier_cancellation_requirement(p_cr_dbm: float, rx_sen_dbm: float, rx_bt_db: float) -> float:
    """Cancellation keeping the carrier under the receiver's blocker tolerance.

    ``rx_bt_db`` is the blocker tolerance relative to sensitivity ``rx_sen_dbm``.
    """
    return p_cr_dbm - rx_sen_dbm - rx_bt_db


def offset_cancellation_requirement(p_cr_dbm: float, rx_nf_db: float, temperature_k: float = 290.0) -> float:
    """Lower bound on (offset cancellation - carrier phase noise in dBc/Hz).

    Keeps the carrier's phase-noise sideband at the subcarrier offset below
    the receiver noise floor.  No bandwidth enters: both sides scale alike.
    """
    return p_cr_dbm - thermal_noise_dbm_hz(temperature_k) - rx_nf_db


def offset_cancellation_needed(p_cr_dbm: float, rx_nf_db: float, phase_noise_dbc_hz: float, temperature_k: float = 290.0) -> float:
    """Offset cancellation required for a source with the given phase noise."""
    return offset_cancellation_requirement(p_cr_dbm, rx_nf_db, temperature_k) + phase_noise_dbc_hz


def reciprocal_mixing_limit(
    rx_lo_pn_dbc_hz: float,
    rx_nf_db: float,
    margin_db: float,
    p_cr_dbm: float,
    temperature_k: float = 290.0,
    noise_floor_dbm_hz: float | None = None,
) -> tuple[float, float]:
    """Largest blocker whose reciprocal-mixing product stays under the noise floor.

    Returns ``(max_blocker_dbm, required_cancellation_db)``.  The 1 Hz noise
    floor is ``10 log10(kT) + NF`` unless ``noise_floor_dbm_hz`` is given.
    """
    if margin_db < 0:
        raise ValueError("margin must be >= 0")
    if noise_floor_dbm_hz is None:
        noise_floor_dbm_hz = thermal_noise_dbm_hz(temperature_k) + rx_nf_db
    max_blocker = noise_floor_dbm_hz - rx_lo_pn_dbc_hz - margin_db
    return max_blocker, p_cr_dbm - max_blocker
