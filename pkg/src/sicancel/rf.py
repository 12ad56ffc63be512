"""Complex impedance helpers and ABCD (transmission-matrix) two-port algebra.

Every function here accepts Python scalars or numpy arrays; arrays broadcast,
which is how the balance network evaluates a million code states at once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

Z0 = 50.0


class CircuitError(ValueError):
    """Raised for degenerate circuit inputs (singular reflections, open inputs)."""


def _scalar_or_array(x):
    x = np.asarray(x, dtype=complex)
    return complex(x) if x.ndim == 0 else x


def reflection_from_impedance(z, z0: float = Z0):
    """Reflection coefficient ``(z - z0) / (z + z0)`` of a load ``z``."""
    if not z0 > 0:
        raise ValueError(f"reference impedance must be positive, got {z0}")
    z = np.asarray(z, dtype=complex)
    den = z + z0
    if np.any(den == 0):
        raise CircuitError("singular reflection: z == -z0")
    return _scalar_or_array((z - z0) / den)


def impedance_from_reflection(g, z0: float = Z0):
    """Inverse of :func:`reflection_from_impedance`."""
    g = np.asarray(g, dtype=complex)
    if np.any(g == 1):
        raise CircuitError("infinite impedance: reflection coefficient is 1")
    return _scalar_or_array(z0 * (1 + g) / (1 - g))


def element_impedance(kind: str, value, f):
    """Impedance of an ideal lumped element at frequency ``f`` (Hz).

    ``kind`` is one of ``"capacitor"``, ``"inductor"`` or ``"resistor"``;
    ``value`` is in F, H or ohm respectively.
    """
    value = np.asarray(value, dtype=float)
    f = np.asarray(f, dtype=float)
    if np.any(value <= 0):
        raise ValueError(f"{kind} value must be positive")
    if np.any(f <= 0):
        raise ValueError("frequency must be positive")
    w = 2 * np.pi * f
    if kind == "capacitor":
        z = 1 / (1j * w * value)
    elif kind == "inductor":
        z = 1j * w * value
    elif kind == "resistor":
        z = value * np.ones_like(w) + 0j
    else:
        raise ValueError(f"unknown element kind {kind!r}")
    return _scalar_or_array(z)


@dataclass(frozen=True)
class TwoPortABCD:
    """Transmission matrix ``[[a, b], [c, d]]``; a, d unitless, b in ohm, c in S.

    Entries may be arrays of identical (or broadcastable) shape.
    """

    a: complex
    b: complex
    c: complex
    d: complex

    @classmethod
    def identity(cls) -> "TwoPortABCD":
        return cls(1 + 0j, 0j, 0j, 1 + 0j)

    def __matmul__(self, other: "TwoPortABCD") -> "TwoPortABCD":
        return cascade(self, other)

    @property
    def det(self):
        return self.a * self.d - self.b * self.c

    def as_array(self) -> np.ndarray:
        """Stack to shape ``(..., 2, 2)``."""
        a, b, c, d = np.broadcast_arrays(*(np.asarray(v, dtype=complex) for v in (self.a, self.b, self.c, self.d)))
        return np.stack([np.stack([a, b], -1), np.stack([c, d], -1)], -2)


def series_element(z) -> TwoPortABCD:
    z = np.asarray(z, dtype=complex)
    one = np.ones_like(z)
    return TwoPortABCD(one, z, np.zeros_like(z), one)


def shunt_element(y) -> TwoPortABCD:
    y = np.asarray(y, dtype=complex)
    one = np.ones_like(y)
    return TwoPortABCD(one, np.zeros_like(y), y, one)


def cascade(m1: TwoPortABCD, m2: TwoPortABCD) -> TwoPortABCD:
    """``m1`` followed by ``m2`` (m1 nearest the input port)."""
    return TwoPortABCD(
        m1.a * m2.a + m1.b * m2.c,
        m1.a * m2.b + m1.b * m2.d,
        m1.c * m2.a + m1.d * m2.c,
        m1.c * m2.b + m1.d * m2.d,
    )


def cascade_all(*mats: TwoPortABCD) -> TwoPortABCD:
    out = mats[0]
    for m in mats[1:]:
        out = cascade(out, m)
    return out


def input_impedance(m: TwoPortABCD, z_load):
    """Impedance seen at port 1 when port 2 is loaded with ``z_load``."""
    z_load = np.asarray(z_load, dtype=complex)
    num = m.a * z_load + m.b
    den = m.c * z_load + m.d
    if np.any(den == 0):
        raise CircuitError("open-circuit input: c*z_load + d == 0")
    return _scalar_or_array(num / den)


def mobius(m: TwoPortABCD, z_load):
    """Like :func:`input_impedance` but without the singularity check (hot path)."""
    return (m.a * z_load + m.b) / (m.c * z_load + m.d)
