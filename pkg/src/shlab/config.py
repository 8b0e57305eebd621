"""Plain-text configuration: INI-style sections with key = value lines.

Recognised keys:

    [problem]    n, p
    [grid]       s_min, s_max, points
    [time]       t0, t1, dt0, growth, theta
    [experiment] kind, ell, b, k, tolerance

Flag overrides from the command line take precedence over file values, and
the fully resolved configuration is echoed into every JSON report.
"""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass, field, replace

from .errors import ConfigError

_KNOWN = {
    "problem": {"n", "p"},
    "grid": {"s_min", "s_max", "points"},
    "time": {"t0", "t1", "dt0", "growth", "theta"},
    "experiment": {"kind", "ell", "b", "k", "tolerance"},
}


@dataclass(frozen=True)
class RunConfig:
    n: int = 11
    p: float = 7.0
    s_min: float = math.log(1e-6)
    s_max: float = math.log(1e4)
    points: int = 2048
    t0: float = 0.0
    t1: float = 1e4
    dt0: float = 1e-4
    growth: float = 1.05
    theta: float = 1.0
    kind: str | None = None
    ell: float | None = None
    b: float | None = None
    k: float = 1.0
    tolerance: float | None = None
    extras: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "problem": {"n": self.n, "p": self.p},
            "grid": {"s_min": self.s_min, "s_max": self.s_max, "points": self.points},
            "time": {
                "t0": self.t0,
                "t1": self.t1,
                "dt0": self.dt0,
                "growth": self.growth,
                "theta": self.theta,
            },
            "experiment": {
                "kind": self.kind,
                "ell": self.ell,
                "b": self.b,
                "k": self.k,
                "tolerance": self.tolerance,
                **self.extras,
            },
        }


def load_config(path: str) -> RunConfig:
    """Parse a config file; unknown sections or keys are rejected."""
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    cp = configparser.ConfigParser()
    try:
        cp.read(path)
    except configparser.Error as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc

    values: dict = {}
    for section in cp.sections():
        if section not in _KNOWN:
            raise ConfigError(f"unknown config section [{section}]")
        for key, raw in cp.items(section):
            if key not in _KNOWN[section]:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            values[key] = raw

    cfg = RunConfig()
    updates: dict = {}
    for key, raw in values.items():
        if key == "n":
            updates["n"] = int(raw)
        elif key == "points":
            updates["points"] = int(raw)
        elif key == "kind":
            updates["kind"] = raw.strip()
        else:
            try:
                updates[key] = float(raw)
            except ValueError as exc:
                raise ConfigError(f"key {key!r}: expected a number, got {raw!r}") from exc
    return replace(cfg, **updates)


def apply_overrides(cfg: RunConfig, overrides: dict) -> RunConfig:
    """Apply non-None flag values on top of a config."""
    updates = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **updates) if updates else cfg
