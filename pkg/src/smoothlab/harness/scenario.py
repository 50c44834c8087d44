"""Scenario files: JSON documents describing one experiment."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np

from ..noise import Family
from ..smoothing import Mode


class ConfigError(ValueError):
    """The scenario file is malformed or inconsistent."""


class ScenarioKind(str, Enum):
    SPHERE_SWEEP = "sphere_sweep"
    ONE_DIM_CONSTRUCTION = "one_dim_construction"
    BOUND_VALIDATION = "bound_validation"
    INEXACT_LEARNING = "inexact_learning"


def _grid(start, stop, step):
    return [round(float(v), 10) for v in np.arange(start, stop + step / 2, step)]


@dataclass
class Scenario:
    kind: ScenarioKind = ScenarioKind.SPHERE_SWEEP
    domain: list = field(default_factory=lambda: [[0.0, 0.0], [100.0, 100.0]])
    family: Family = Family.GAUSSIAN
    alpha_grid: list = field(default_factory=lambda: _grid(0.0, 5.0, 0.5))
    beta_grid: list = field(default_factory=lambda: _grid(0.0, 5.0, 1.0))
    zeta_list: list = field(default_factory=lambda: [0.0, 10.0, 20.0, 30.0])
    mode: str | None = None
    mc_samples: int = 20_000
    vote_samples: int = 4096
    seed: int = 0
    radius: float = 10.0
    attempts: int = 500
    tau: float = 0.1
    n_configs: int = 2
    n_scenarios: int = 50
    eta_list: list = field(default_factory=lambda: [0.02, 0.05, 0.1])
    omega: float = 0.23
    alpha: float = 0.1
    beta: float = 0.93
    widened_gap: float | None = None
    outputs: dict = field(default_factory=dict)

    def __post_init__(self):
        try:
            self.kind = ScenarioKind(self.kind)
            self.family = Family(self.family)
            if self.mode is not None:
                self.mode = Mode(self.mode).value
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        self.validate()

    def validate(self):
        lo, hi = (np.asarray(b, dtype=float) for b in self.domain)
        if lo.shape != hi.shape or lo.ndim != 1 or np.any(hi <= lo):
            raise ConfigError("domain must be [lo, hi] with lo < hi in every coordinate")
        for name in ("alpha_grid", "beta_grid", "zeta_list", "eta_list"):
            vals = getattr(self, name)
            if not vals:
                raise ConfigError(f"{name} must be non-empty")
            if any(v < 0 for v in vals):
                raise ConfigError(f"{name} must be non-negative")
        if self.kind is ScenarioKind.SPHERE_SWEEP and (self.alpha_grid[0] != 0 or sorted(self.alpha_grid) != list(self.alpha_grid)):
            raise ConfigError("alpha_grid must be ascending and start at 0 (the reference column)")
        if any(e >= 0.5 for e in self.eta_list):
            raise ConfigError("eta values must be below 0.5")
        for name in ("mc_samples", "vote_samples", "attempts", "n_configs", "n_scenarios"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be >= 1")
        if not 0 <= self.tau < 0.5:
            raise ConfigError("tau must lie in [0, 0.5)")
        if self.radius <= 0:
            raise ConfigError("radius must be positive")
        if not 0 < self.omega <= 0.25:
            raise ConfigError("omega must lie in (0, 0.25]")
        unknown = set(self.outputs) - {"csv", "svg", "manifest", "flags"}
        if unknown:
            raise ConfigError(f"unknown output keys: {sorted(unknown)}")

    @property
    def box(self):
        return np.asarray(self.domain[0], dtype=float), np.asarray(self.domain[1], dtype=float)

    @classmethod
    def from_dict(cls, data: dict) -> "Scenario":
        if not isinstance(data, dict):
            raise ConfigError("scenario must be a JSON object")
        names = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - names
        if unknown:
            raise ConfigError(f"unknown scenario keys: {sorted(unknown)}")
        try:
            return cls(**data)
        except TypeError as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def load(cls, path) -> "Scenario":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read scenario {path}: {exc}") from None
        return cls.from_dict(data)

    def to_dict(self):
        d = dataclasses.asdict(self)
        d["kind"] = self.kind.value
        d["family"] = self.family.value
        return d

    def output_name(self, key, default):
        return self.outputs.get(key, default)
