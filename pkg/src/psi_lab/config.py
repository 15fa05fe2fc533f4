"""Run configuration shared by the CLI and the estimator wrappers."""

from __future__ import annotations

import json
import math
import os
from dataclasses import asdict, dataclass, field

from .basis import IndexWindow
from .bells import BellProfile, get_profile, profile_from_dict


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


def check_int(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError(f"{name}: expected an integer, got {value!r}")
    return int(value)


def check_positive(name, value):
    try:
        v = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"{name}: expected a number, got {value!r}") from None
    if not (math.isfinite(v) and v > 0):
        raise ConfigError(f"{name}: must be a positive finite number, got {value!r}")
    return v


def check_window(jmin, jmax, kmax):
    jmin, jmax, kmax = (check_int("window.jmin", jmin), check_int("window.jmax", jmax),
                        check_int("window.kmax", kmax))
    if jmin > jmax:
        raise ConfigError(f"window: empty, jmin={jmin} > jmax={jmax}")
    if kmax < 0:
        raise ConfigError(f"window.kmax: must be >= 0, got {kmax}")
    return IndexWindow(jmin, jmax, kmax)


def check_interval(name, K):
    try:
        lo, hi = (float(K[0]), float(K[1]))
    except (TypeError, ValueError, IndexError):
        raise ConfigError(f"{name}: expected two numbers, got {K!r}") from None
    if not (0 < lo < hi < math.inf):
        raise ConfigError(f"{name}: need 0 < lo < hi < inf, got {K!r}")
    return lo, hi


def resolve_bell(spec):
    """A :class:`BellProfile` from a name (``shannon``, ``meyer``, ``meyerN``) or a profile JSON path."""
    if isinstance(spec, BellProfile):
        return spec
    if not isinstance(spec, str):
        raise ConfigError(f"bell: expected a name or a path, got {spec!r}")
    if spec.endswith(".json") or os.path.sep in spec:
        try:
            with open(spec) as fh:
                return profile_from_dict(json.load(fh))
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError(f"bell: cannot load profile file {spec!r}: {exc}") from None
    try:
        return get_profile(spec)
    except ValueError as exc:
        raise ConfigError(f"bell: {exc}") from None


@dataclass
class RunConfig:
    bell: str = "meyer"
    window: dict = field(default_factory=lambda: {"jmin": -4, "jmax": 4, "kmax": 64})
    tol: float = 1e-11
    grids: dict = field(default_factory=lambda: {"lambda": None, "n": [0, 1, 2, 3, 4], "T": 20})
    format: str = "json"
    output: str | None = None
    threads: int | None = None

    def validate(self):
        resolve_bell(self.bell)
        if not isinstance(self.window, dict):
            raise ConfigError("window: expected an object with jmin, jmax, kmax")
        missing = {"jmin", "jmax", "kmax"} - set(self.window)
        if missing:
            raise ConfigError(f"window: missing {sorted(missing)}")
        check_window(self.window["jmin"], self.window["jmax"], self.window["kmax"])
        check_positive("tol", self.tol)
        if self.format not in ("json", "csv", "table"):
            raise ConfigError(f"format: expected json, csv or table, got {self.format!r}")
        grids = self.grids
        if not isinstance(grids, dict):
            raise ConfigError("grids: expected an object")
        if grids.get("lambda") is not None:
            lams = grids["lambda"]
            if not isinstance(lams, list) or not lams:
                raise ConfigError("grids.lambda: expected a non-empty list")
            for v in lams:
                if not isinstance(v, (int, float)) or not math.isfinite(v):
                    raise ConfigError(f"grids.lambda: bad entry {v!r}")
        ns = grids.get("n", [0, 1, 2, 3, 4])
        if not isinstance(ns, list) or not ns:
            raise ConfigError("grids.n: expected a non-empty list")
        for v in ns:
            if check_int("grids.n", v) < 0:
                raise ConfigError(f"grids.n: entries must be >= 0, got {v}")
        if check_int("grids.T", grids.get("T", 20)) < 3:
            raise ConfigError("grids.T: need at least 3 octaves")
        if self.threads is not None and check_int("threads", self.threads) < 1:
            raise ConfigError("threads: must be >= 1")
        return self

    @property
    def index_window(self):
        w = self.window
        return check_window(w["jmin"], w["jmax"], w["kmax"])

    @property
    def profile(self):
        return resolve_bell(self.bell)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {sorted(unknown)}")
        base = cls()
        merged = {k: getattr(base, k) for k in known}
        for key, value in data.items():
            if key in ("window", "grids") and isinstance(value, dict):
                merged[key] = {**merged[key], **value}
            else:
                merged[key] = value
        return cls(**merged)
