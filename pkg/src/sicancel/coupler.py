"""Hybrid-coupler self-interference model.

Carrier power entering the TX port reaches the RX port along three paths:
direct leakage through the coupler, reflection off the antenna, and
reflection off the balance network.  To first order the RX-port amplitude is

    SI = eps + k * (gamma_antenna - gamma_balance)

with ``eps`` the coupler leakage and ``k`` the two-pass transfer of a 3 dB
split including excess loss.  The coupler's own port phases are folded into
the sign of the balance term.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CANCELLATION_CAP_DB = 200.0


@dataclass(frozen=True)
class CouplerSpec:
    coupling_db: float = 3.0
    leak_mag_db: float = -25.0
    leak_phase: float = np.pi / 2  # radians
    excess_loss_db: float = 0.5  # per pass

    def __post_init__(self):
        if not self.leak_mag_db < 0:
            raise ValueError("leak_mag_db must be negative")
        if not self.coupling_db > 0:
            raise ValueError("coupling_db must be positive")

    @property
    def leakage(self) -> complex:
        """Complex TX-to-RX leakage amplitude (the ``eps`` term)."""
        return 10 ** (self.leak_mag_db / 20) * np.exp(1j * self.leak_phase)

    @property
    def path_gain(self) -> float:
        """Two-pass reflection path gain ``k``: an equal split on each pass, plus excess loss."""
        return 0.5 * 10 ** (-2 * self.excess_loss_db / 20)


@dataclass(frozen=True)
class AntennaModel:
    """Antenna reflection, linear in frequency around ``f_ref``."""

    gamma0: complex = 0j
    slope: complex = 0j  # per Hz
    f_ref: float = 915e6

    def __post_init__(self):
        if abs(self.gamma0) > 1:
            raise ValueError("|gamma0| must not exceed 1")


def antenna_gamma(model: AntennaModel, f):
    """Antenna reflection at ``f``, magnitude clipped to the unit disk."""
    g = model.gamma0 + model.slope * (np.asarray(f, dtype=float) - model.f_ref)
    mag = np.abs(g)
    g = np.where(mag > 1, g / np.where(mag > 0, mag, 1), g)
    return complex(g) if np.ndim(g) == 0 else g


@dataclass(frozen=True)
class ChannelScenario:
    """Antenna, carrier, and an optional schedule of ``(time_index, AntennaModel)`` changes."""

    antenna: AntennaModel = AntennaModel()
    carrier_freq: float = 915e6
    perturbations: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "perturbations", tuple(tuple(p) for p in self.perturbations))
        times = [t for t, _ in self.perturbations]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("perturbation times must be strictly increasing")


def si_transfer(g_ant, g_bal, spec: CouplerSpec | None = None):
    """First-order complex TX-to-RX gain."""
    spec = spec or CouplerSpec()
    return spec.leakage + spec.path_gain * (np.asarray(g_ant) - np.asarray(g_bal))


def si_to_db(si):
    """Cancellation in dB for a complex SI gain, capped for exact nulls."""
    mag = np.abs(si)
    with np.errstate(divide="ignore"):
        db = -20 * np.log10(mag)
    db = np.minimum(db, CANCELLATION_CAP_DB)
    return float(db) if np.ndim(db) == 0 else db


def cancellation_db(g_ant, g_bal, spec: CouplerSpec | None = None):
    """Carrier cancellation (dB) from TX port to RX port."""
    return si_to_db(si_transfer(g_ant, g_bal, spec))


def balanced_target(g_ant, spec: CouplerSpec | None = None) -> complex:
    """Balance-network reflection that nulls the SI exactly."""
    spec = spec or CouplerSpec()
    target = g_ant + spec.leakage / spec.path_gain
    if abs(target) > 1:
        raise ValueError(f"unrealizable balance point: |target| = {abs(target):.4f} > 1")
    return complex(target)


def insertion_loss_sum(spec: CouplerSpec | None = None) -> float:
    """TX-to-antenna plus antenna-to-RX loss (dB)."""
    spec = spec or CouplerSpec()
    return 2 * (spec.coupling_db + spec.excess_loss_db)
