"""Two-stage digitally tunable balance network.

Each stage is a ladder of four digital capacitors and two fixed inductors.
Stage 1 is followed by a resistive divider (shunt ``r1``, then series ``r2``),
stage 2, and a termination resistor ``r3``.  Whatever stage 2 does is seen
through the divider twice, which shrinks its effect on the reflection at the
input port: stage 1 places the reflection coarsely, stage 2 fills in between.

All evaluation routines broadcast over leading code dimensions so that
coverage sweeps over millions of states run as a handful of numpy operations.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .rf import (
    TwoPortABCD,
    Z0,
    cascade_all,
    mobius,
    series_element,
    shunt_element,
)

N_CAPS = 4  # digital capacitors per stage

# Element kinds understood by :func:`stage_abcd`.  ``*_tank`` is L parallel C,
# ``*_lc`` is L in series with C; ``series_*`` sits in the signal path,
# ``shunt_*`` goes to ground.
ELEMENT_KINDS = (
    "series_c",
    "shunt_c",
    "series_l",
    "shunt_l",
    "series_tank",
    "shunt_tank",
    "series_lc",
    "shunt_lc",
)

# Port side first.  Capacitors are consumed in order (C1..C4), inductors too
# (l_a then l_b).  Stage 1 is a low-Q pi-like ladder (small dispersion over
# the carrier band); stage 2 swings its input impedance over a wide range so
# that, seen through the divider, its cloud spans a full stage-1 step.
DEFAULT_TOPOLOGY = ("shunt_c", "series_tank", "shunt_c", "series_l", "shunt_c")
STAGE2_TOPOLOGY = ("shunt_c", "series_tank", "series_l", "shunt_c", "series_c")


@dataclass(frozen=True)
class CapacitorSpec:
    """Linear digitally tunable capacitor: ``steps`` codes from c_min to c_max (F)."""

    c_min: float = 0.9e-12
    c_max: float = 4.6e-12
    steps: int = 32

    def __post_init__(self):
        if not self.c_min < self.c_max:
            raise ValueError("c_min must be below c_max")
        if self.steps < 2:
            raise ValueError("a tunable capacitor needs at least two steps")

    @property
    def lsb(self) -> float:
        return (self.c_max - self.c_min) / (self.steps - 1)

    def values(self) -> np.ndarray:
        return self.c_min + np.arange(self.steps) * self.lsb


def cap_value(spec: CapacitorSpec, code):
    """Capacitance (F) for an integer code; accepts arrays of codes."""
    code = np.asarray(code)
    if np.any(code < 0) or np.any(code > spec.steps - 1):
        raise ValueError(f"capacitor code out of range [0, {spec.steps - 1}]: {code}")
    out = spec.c_min + code * spec.lsb
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class CapCodes:
    """Codes of the eight capacitors, four per stage."""

    stage1: tuple[int, ...]
    stage2: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "stage1", tuple(int(c) for c in self.stage1))
        object.__setattr__(self, "stage2", tuple(int(c) for c in self.stage2))
        if len(self.stage1) != N_CAPS or len(self.stage2) != N_CAPS:
            raise ValueError("each stage holds exactly four capacitor codes")

    @classmethod
    def from_sequence(cls, codes) -> "CapCodes":
        codes = [int(c) for c in codes]
        if len(codes) != 2 * N_CAPS:
            raise ValueError(f"expected 8 codes, got {len(codes)}")
        return cls(tuple(codes[:N_CAPS]), tuple(codes[N_CAPS:]))

    @classmethod
    def midpoint(cls, steps: int = 32) -> "CapCodes":
        return cls((steps // 2,) * N_CAPS, (steps // 2,) * N_CAPS)

    @property
    def all(self) -> tuple[int, ...]:
        return self.stage1 + self.stage2

    def as_array(self) -> np.ndarray:
        return np.array(self.all, dtype=np.int64)

    def validate(self, steps: int) -> "CapCodes":
        if any(c < 0 or c > steps - 1 for c in self.all):
            raise ValueError(f"capacitor code out of range [0, {steps - 1}]: {self.all}")
        return self

    def with_stage(self, stage: int, codes) -> "CapCodes":
        if stage == 1:
            return CapCodes(tuple(codes), self.stage2)
        if stage == 2:
            return CapCodes(self.stage1, tuple(codes))
        raise ValueError(f"stage must be 1 or 2, got {stage}")


@dataclass(frozen=True)
class NetworkSpec:
    """Fixed component values of the balance network (H, ohm)."""

    cap: CapacitorSpec = field(default_factory=CapacitorSpec)
    l1: float = 3.9e-9
    l2: float = 3.6e-9
    l3: float = 3.9e-9
    l4: float = 3.6e-9
    r1: float = 62.0
    r2: float = 240.0
    r3: float = 50.0
    z0: float = Z0
    topology: tuple[str, ...] = DEFAULT_TOPOLOGY
    topology2: tuple[str, ...] = STAGE2_TOPOLOGY

    def __post_init__(self):
        object.__setattr__(self, "topology", tuple(self.topology))
        object.__setattr__(self, "topology2", tuple(self.topology2))
        for name in ("l1", "l2", "l3", "l4", "r1", "r2", "r3", "z0"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        _check_topology(self.topology)
        _check_topology(self.topology2)


def _check_topology(topology):
    bad = [k for k in topology if k not in ELEMENT_KINDS]
    if bad:
        raise ValueError(f"unknown element kind(s) {bad}")
    n_c = sum(k.endswith(("_c", "_tank", "_lc")) for k in topology)
    n_l = sum(k.endswith(("_l", "_tank", "_lc")) for k in topology)
    if n_c != N_CAPS or n_l != 2:
        raise ValueError(f"a stage needs 4 capacitors and 2 inductors, topology has {n_c} and {n_l}")


def _element(kind: str, c, l, w) -> TwoPortABCD:
    if kind == "series_c":
        return series_element(1 / (1j * w * c))
    if kind == "shunt_c":
        return shunt_element(1j * w * c)
    if kind == "series_l":
        return series_element(1j * w * l)
    if kind == "shunt_l":
        return shunt_element(1 / (1j * w * l))
    if kind == "series_tank":
        return series_element(1 / (1j * w * c + 1 / (1j * w * l)))
    if kind == "shunt_tank":
        return shunt_element(1j * w * c + 1 / (1j * w * l))
    if kind == "series_lc":
        return series_element(1j * w * l + 1 / (1j * w * c))
    if kind == "shunt_lc":
        return shunt_element(1 / (1j * w * l + 1 / (1j * w * c)))
    raise ValueError(f"unknown element kind {kind!r}")


def stage_elements(codes, l_a: float, l_b: float, spec: CapacitorSpec, f, topology=DEFAULT_TOPOLOGY):
    """Primitive ABCD matrices of one stage, port side first."""
    codes = np.asarray(codes)
    if codes.shape[-1] != N_CAPS:
        raise ValueError(f"a stage takes 4 codes, got shape {codes.shape}")
    if np.any(f <= 0):
        raise ValueError("frequency must be positive")
    caps = cap_value(spec, codes)
    w = 2 * np.pi * np.asarray(f, dtype=float)
    inductors = iter((l_a, l_b))
    ci = 0
    out = []
    for kind in topology:
        c = l = None
        if kind.endswith(("_c", "_tank", "_lc")):
            c = caps[..., ci]
            ci += 1
        if kind.endswith(("_l", "_tank", "_lc")):
            l = next(inductors)
        out.append(_element(kind, c, l, w))
    return out


def stage_abcd(codes, l_a: float, l_b: float, spec: CapacitorSpec, f, topology=DEFAULT_TOPOLOGY) -> TwoPortABCD:
    """ABCD matrix of one tunable stage at frequency ``f``.

    ``codes`` has trailing dimension 4 and may carry leading batch dimensions;
    ``f`` broadcasts against them.
    """
    return cascade_all(*stage_elements(codes, l_a, l_b, spec, f, topology))


def divider_abcd(net: NetworkSpec) -> TwoPortABCD:
    """Inter-stage resistive divider: shunt r1 to ground, then series r2."""
    return cascade_all(shunt_element(1 / net.r1), series_element(net.r2))


def _split(codes):
    if isinstance(codes, CapCodes):
        arr = codes.as_array()
    else:
        arr = np.asarray(codes)
    if arr.shape[-1] != 2 * N_CAPS:
        raise ValueError(f"expected trailing dimension 8, got shape {arr.shape}")
    return arr[..., :N_CAPS], arr[..., N_CAPS:]


def stage2_impedance(stage2, net: NetworkSpec, f):
    """Impedance looking into stage 2 terminated by r3.

    The stage-2 tank takes l4 and the standalone inductor l3.
    """
    m2 = stage_abcd(stage2, net.l4, net.l3, net.cap, f, net.topology2)
    return mobius(m2, net.r3)


def stage1_load(stage2, net: NetworkSpec, f):
    """Impedance terminating stage 1: divider followed by stage 2."""
    return mobius(divider_abcd(net), stage2_impedance(stage2, net, f))


def gamma_from_parts(stage1, z_load, net: NetworkSpec, f):
    """Reflection at the network input for stage-1 codes and a given stage-1 load."""
    m1 = stage_abcd(stage1, net.l1, net.l2, net.cap, f, net.topology)
    z = mobius(m1, z_load)
    return (z - net.z0) / (z + net.z0)


def balance_gamma(codes, net: NetworkSpec | None = None, f=915e6):
    """Reflection coefficient of the whole balance network.

    ``codes`` is a :class:`CapCodes` or an integer array with trailing
    dimension 8 (stage 1 first).  Returns a complex scalar or array.
    """
    net = net or NetworkSpec()
    s1, s2 = _split(codes)
    g = gamma_from_parts(s1, stage1_load(s2, net, f), net, f)
    return complex(g) if np.ndim(g) == 0 else g


def code_grid(steps: int, stride: int = 1) -> np.ndarray:
    """All 4-capacitor code tuples on ``range(0, steps, stride)``, shape (M, 4)."""
    if stride < 1:
        raise ValueError("stride must be >= 1")
    axis = np.arange(0, steps, stride)
    return np.array(list(itertools.product(axis, repeat=N_CAPS)), dtype=np.int64)


def coverage_enumeration(net: NetworkSpec | None = None, f=915e6, stride: int = 6, stage2=None):
    """Stage-1 codes on a ``stride`` grid with stage 2 fixed (midpoint by default).

    Returns ``(codes, gammas)`` with codes of shape (M, 4).
    """
    net = net or NetworkSpec()
    if stage2 is None:
        stage2 = (net.cap.steps // 2,) * N_CAPS
    codes = code_grid(net.cap.steps, stride)
    gammas = gamma_from_parts(codes, stage1_load(np.asarray(stage2), net, f), net, f)
    return codes, gammas


def stage1_neighbors(codes: CapCodes, steps: int) -> list[CapCodes]:
    """Distinct states one LSB away on a single stage-1 capacitor, clamped at the ends."""
    out = []
    for i in range(N_CAPS):
        for d in (-1, 1):
            s1 = list(codes.stage1)
            s1[i] = min(steps - 1, max(0, s1[i] + d))
            cand = CapCodes(tuple(s1), codes.stage2)
            if cand != codes and cand not in out:
                out.append(cand)
    return out


def fine_cloud(initial: CapCodes, net: NetworkSpec | None = None, f=915e6, stride2: int = 10):
    """Stage-2 sweeps around an initial state and its one-LSB stage-1 neighbours.

    Returns ``(codes, gammas, parent)``: codes of shape (N, 8), and ``parent``
    indexing the stage-1 state each row belongs to (0 is ``initial``).
    """
    net = net or NetworkSpec()
    initial.validate(net.cap.steps)
    parents = [initial] + stage1_neighbors(initial, net.cap.steps)
    grid2 = code_grid(net.cap.steps, stride2)
    z_load = stage1_load(grid2, net, f)
    codes, gammas, parent = [], [], []
    for p, state in enumerate(parents):
        s1 = np.array(state.stage1)
        gammas.append(gamma_from_parts(s1, z_load, net, f))
        codes.append(np.hstack([np.broadcast_to(s1, grid2.shape), grid2]))
        parent.append(np.full(len(grid2), p))
    return np.vstack(codes), np.concatenate(gammas), np.concatenate(parent)
