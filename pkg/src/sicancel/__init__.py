"""Simulation of a tunable two-stage balance network for full-duplex self-interference cancellation."""

from .coupler import AntennaModel, ChannelScenario, CouplerSpec, balanced_target, cancellation_db, si_transfer
from .network import CapacitorSpec, CapCodes, NetworkSpec, balance_gamma
from .receiver import ReceiverSpec, SourceSpec
from .tuner import AnnealSchedule, TuneResult, TuneThresholds, tune

__all__ = [
    "AnnealSchedule",
    "AntennaModel",
    "CapCodes",
    "CapacitorSpec",
    "ChannelScenario",
    "CouplerSpec",
    "NetworkSpec",
    "ReceiverSpec",
    "SourceSpec",
    "TuneResult",
    "TuneThresholds",
    "balance_gamma",
    "balanced_target",
    "cancellation_db",
    "si_transfer",
    "tune",
]
