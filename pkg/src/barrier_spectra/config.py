"""Experiment configuration: a flat ``key = value`` file plus flag overrides."""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, fields, replace
from pathlib import Path

from .eigen import ZRegion
from .errors import ValidationError
from .potentials import parse_potential


@dataclass(frozen=True)
class ExperimentConfig:
    potential: str = "zero"
    gamma: float = 1.0
    R: float = 20.0
    R_list: tuple = (25.0, 50.0, 100.0, 200.0)
    region: tuple | None = None
    tol: float = 1e-10
    out: str = "out"
    seed: int = 0
    threads: int = 0
    a: float = 1.0
    fd_n: int = 6000

    def __post_init__(self):
        parse_potential(self.potential)
        if not self.gamma >= 0:
            raise ValidationError("gamma must be >= 0", "gamma")
        if not self.R > 0:
            raise ValidationError("R must be positive", "R")
        if not self.R_list or any(not r > 1 for r in self.R_list):
            raise ValidationError("R_list entries must exceed 1", "R_list")
        if self.region is not None:
            if len(self.region) != 4:
                raise ValidationError("region needs re_min,re_max,im_min,im_max", "region")
            ZRegion(*self.region)
        if not 0 < self.tol < 1:
            raise ValidationError("tol must lie in (0, 1)", "tol")
        if self.threads < 0:
            raise ValidationError("threads must be >= 0", "threads")
        if not self.a > 0:
            raise ValidationError("a must be positive", "a")
        if self.fd_n < 16:
            raise ValidationError("fd_n must be >= 16", "fd_n")

    @property
    def workers(self):
        return self.threads or (os.cpu_count() or 1)

    @property
    def q(self):
        return parse_potential(self.potential)

    def as_dict(self):
        d = asdict(self)
        d["R_list"] = list(self.R_list)
        d["region"] = list(self.region) if self.region is not None else None
        return d


def _floats(text):
    return tuple(float(v) for v in text.replace(";", ",").split(",") if v.strip())


_PARSERS = {
    "potential": str.strip,
    "gamma": float,
    "R": float,
    "R_list": _floats,
    "region": _floats,
    "tol": float,
    "out": str.strip,
    "seed": int,
    "threads": int,
    "a": float,
    "fd_n": int,
}
_ALIASES = {"r_list": "R_list", "r": "R", "R-list": "R_list", "fd-n": "fd_n"}


def _coerce(key, value):
    key = _ALIASES.get(key, key)
    if key not in _PARSERS:
        raise ValidationError(f"unknown config key {key!r}", key)
    try:
        return key, _PARSERS[key](value) if isinstance(value, str) else value
    except ValueError as exc:
        raise ValidationError(f"bad value for {key}: {value!r}", key) from exc


def read_config_file(path):
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValidationError(f"{path}:{lineno}: expected key = value", key.split()[0])
        k, v = _coerce(key.strip(), value.strip())
        out[k] = v
    return out


def build_config(path=None, overrides=None):
    """File values first, then non-None overrides."""
    values = read_config_file(path) if path else {}
    for key, value in (overrides or {}).items():
        if value is not None:
            k, v = _coerce(key, value)
            values[k] = v
    known = {f.name for f in fields(ExperimentConfig)}
    return replace(ExperimentConfig(), **{k: v for k, v in values.items() if k in known})
