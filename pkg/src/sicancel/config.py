"""Run configuration: one JSON document with a section per model dataclass.

Units are fixed per field (F, H, ohm, Hz, dB, dBm, radians); no suffixes are
parsed.  Capacitances and inductances are stored as decimal strings so the
file carries them bit-exactly.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields, replace
from pathlib import Path

from .coupler import CouplerSpec
from .network import CapacitorSpec, NetworkSpec
from .receiver import ReceiverSpec, SourceSpec
from .tuner import AnnealSchedule, TuneThresholds

SECTIONS = {
    "network": NetworkSpec,
    "coupler": CouplerSpec,
    "receiver": ReceiverSpec,
    "source": SourceSpec,
    "schedule": AnnealSchedule,
    "thresholds": TuneThresholds,
}
# Fields written as decimal strings.
EXACT_FIELDS = {"c_min", "c_max", "l1", "l2", "l3", "l4"}
MAX_SEED = 2**64 - 1


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class RunConfig:
    network: NetworkSpec = field(default_factory=NetworkSpec)
    coupler: CouplerSpec = field(default_factory=CouplerSpec)
    receiver: ReceiverSpec = field(default_factory=ReceiverSpec)
    source: SourceSpec = field(default_factory=SourceSpec)
    schedule: AnnealSchedule = field(default_factory=AnnealSchedule)
    thresholds: TuneThresholds = field(default_factory=TuneThresholds)
    seed: int = 0
    output_dir: str = "out"

    def __post_init__(self):
        if isinstance(self.seed, bool) or not isinstance(self.seed, int) or not 0 <= self.seed <= MAX_SEED:
            raise ConfigError(f"seed: expected an integer in [0, 2**64 - 1], got {self.seed!r}")

    def with_overrides(self, **kw) -> "RunConfig":
        """Copy with the non-None keyword values replaced."""
        return replace(self, **{k: v for k, v in kw.items() if v is not None})


def _encode(name, value):
    if name in EXACT_FIELDS:
        return repr(float(value))
    if isinstance(value, tuple):
        return list(value)
    return value


def _section_to_dict(obj) -> dict:
    out = {}
    for f in fields(obj):
        v = getattr(obj, f.name)
        out[f.name] = _section_to_dict(v) if isinstance(v, CapacitorSpec) else _encode(f.name, v)
    return out


def to_dict(cfg: RunConfig) -> dict:
    d = {name: _section_to_dict(getattr(cfg, name)) for name in SECTIONS}
    d["seed"] = cfg.seed
    d["output_dir"] = cfg.output_dir
    return d


def dumps(cfg: RunConfig) -> str:
    return json.dumps(to_dict(cfg), indent=2, sort_keys=True) + "\n"


def dump(cfg: RunConfig, path) -> None:
    Path(path).write_text(dumps(cfg))


def _decode(where: str, name: str, value, default):
    if name in EXACT_FIELDS:
        if isinstance(value, bool) or not isinstance(value, (str, int, float)):
            raise ConfigError(f"{where}: expected a decimal string, got {value!r}")
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"{where}: not a decimal number: {value!r}") from None
    if isinstance(default, tuple):
        if not isinstance(value, list):
            raise ConfigError(f"{where}: expected a list, got {value!r}")
        return tuple(value)
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where}: expected true/false, got {value!r}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where}: expected an integer, got {value!r}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where}: expected a number, got {value!r}")
        return float(value)
    return value


def _build(cls, data, where: str):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    known = {f.name: f for f in fields(cls)}
    for key in data:
        if key not in known:
            raise ConfigError(f"{where}.{key}: unknown key")
    default = cls()
    kw = {}
    for key, value in data.items():
        if key == "cap":
            kw[key] = _build(CapacitorSpec, value, f"{where}.cap")
        else:
            kw[key] = _decode(f"{where}.{key}", key, value, getattr(default, key))
    try:
        return cls(**kw)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def from_dict(data) -> RunConfig:
    if not isinstance(data, dict):
        raise ConfigError("config: top level must be an object")
    allowed = set(SECTIONS) | {"seed", "output_dir"}
    for key in data:
        if key not in allowed:
            raise ConfigError(f"{key}: unknown key")
    kw = {name: _build(cls, data[name], name) for name, cls in SECTIONS.items() if name in data}
    if "seed" in data:
        kw["seed"] = data["seed"]
    if "output_dir" in data:
        if not isinstance(data["output_dir"], str):
            raise ConfigError(f"output_dir: expected a string, got {data['output_dir']!r}")
        kw["output_dir"] = data["output_dir"]
    return RunConfig(**kw)


def loads(text: str) -> RunConfig:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    return from_dict(data)


def load(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    try:
        return loads(text)
    except ConfigError as exc:
        raise ConfigError(f"{path}: {exc}") from None
