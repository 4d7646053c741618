"""Scenario configuration, geometry and unit handling.

Everything downstream works in linear units (watts, power ratios). The dB and
dBm forms only live in :class:`ScenarioConfig` fields and at file/CLI
boundaries.
"""
from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Mapping

import numpy as np
import yaml


class DegenerateGeometryError(ValueError):
    """Two nodes of the scenario share a position."""


class ConfigError(ValueError):
    """Invalid scenario configuration or override."""


def db_to_linear(x):
    return np.power(10.0, np.divide(x, 10.0))


def linear_to_db(x):
    return 10.0 * np.log10(x)


def dbm_to_watts(x):
    return db_to_linear(x) * 1e-3


def watts_to_dbm(x):
    return linear_to_db(x) + 30.0


Point = tuple[float, float]


@dataclass(frozen=True)
class ScenarioConfig:
    """Full input of one experiment.

    Geometry defaults follow the reference simulation setup: BS at the
    origin, IRS at (50, 30) m, user at (200, 0) m, -30 dB reference loss at
    1 m and exponents 2.7 / 2.7 / 3 for the BS-IRS, IRS-user and BS-user
    links. The transmit power and noise floor defaults are this package's
    own choice.
    """

    bs_pos: Point = (0.0, 0.0)
    irs_pos: Point = (50.0, 30.0)
    user_pos: Point = (200.0, 0.0)
    pathloss_ref_db: float = -30.0
    ref_distance: float = 1.0
    exponent_g: float = 2.7
    exponent_f: float = 2.7
    exponent_h: float = 3.0
    alpha_h_sq: float = 0.5
    alpha_f_sq: float = 0.5
    alpha_g_sq: float = 0.5
    sigma_i_sq_dbm: float = -100.0
    sigma_u_sq_dbm: float = -100.0
    n_elements: int = 1024
    ps_dbm: float = 30.0
    pi_dbm: float = 20.0

    def __post_init__(self):
        for name in ("bs_pos", "irs_pos", "user_pos"):
            pos = getattr(self, name)
            if len(pos) != 2:
                raise ConfigError(f"{name} must be a 2-D point, got {pos!r}")
            object.__setattr__(self, name, (float(pos[0]), float(pos[1])))
        if isinstance(self.n_elements, bool) or int(self.n_elements) != self.n_elements:
            raise ConfigError(f"n_elements must be an integer, got {self.n_elements!r}")
        object.__setattr__(self, "n_elements", int(self.n_elements))
        if self.n_elements < 1:
            raise ConfigError("n_elements must be >= 1")
        for name in ("exponent_g", "exponent_f", "exponent_h"):
            if not getattr(self, name) >= 1:
                raise ConfigError(f"{name} must be >= 1")
        for name in ("alpha_h_sq", "alpha_f_sq", "alpha_g_sq", "ref_distance"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"{name} must be > 0")
        for f in dataclasses.fields(self):
            v = getattr(self, f.name)
            if isinstance(v, float) and not math.isfinite(v):
                raise ConfigError(f"{f.name} must be finite")

    # linear views
    @property
    def p_s(self) -> float:
        return dbm_to_watts(self.ps_dbm)

    @property
    def p_i(self) -> float:
        return dbm_to_watts(self.pi_dbm)

    @property
    def sigma_i_sq(self) -> float:
        return dbm_to_watts(self.sigma_i_sq_dbm)

    @property
    def sigma_u_sq(self) -> float:
        return dbm_to_watts(self.sigma_u_sq_dbm)

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def with_overrides(self, overrides: Mapping[str, Any]) -> "ScenarioConfig":
        """Return a copy with ``overrides`` applied; unknown keys raise."""
        known = {f.name for f in dataclasses.fields(self)}
        bad = sorted(set(overrides) - known)
        if bad:
            raise ConfigError(f"unknown config key(s): {', '.join(bad)}")
        return dataclasses.replace(self, **{k: _coerce(k, v) for k, v in overrides.items()})

    def to_dict(self) -> dict[str, Any]:
        return dataclasses.asdict(self)

    @classmethod
    def from_file(cls, path: str | Path) -> "ScenarioConfig":
        """Load a flat ``key: value`` file (YAML syntax) over the defaults."""
        data = yaml.safe_load(Path(path).read_text()) or {}
        if not isinstance(data, dict):
            raise ConfigError(f"{path}: expected a flat mapping of keys to values")
        return cls().with_overrides(data)


def _coerce(key: str, value: Any) -> Any:
    if isinstance(value, str):
        value = yaml.safe_load(value)
    if key.endswith("_pos"):
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{key} must be a pair of coordinates")
        return tuple(float(v) for v in value)
    if key == "n_elements":
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigError(f"{key} must be numeric, got {value!r}")
    return float(value)


def parse_override(text: str) -> tuple[str, Any]:
    """Split a ``key=value`` CLI override."""
    key, sep, value = text.partition("=")
    if not sep or not key.strip():
        raise ConfigError(f"override must look like key=value, got {text!r}")
    return key.strip(), value.strip()


@dataclass(frozen=True)
class LinkBudget:
    """Linear large-scale path-loss coefficients and link distances (m)."""

    l_g: float
    l_f: float
    l_h: float
    d_g: float
    d_f: float
    d_h: float


def pathloss(d, pathloss_ref_db: float, exponent: float, ref_distance: float = 1.0):
    """Linear path loss of ``PL0 - 10 a log10(d / d0)`` dB."""
    return db_to_linear(pathloss_ref_db - 10.0 * exponent * np.log10(np.asarray(d) / ref_distance))


def link_budget(cfg: ScenarioConfig) -> LinkBudget:
    d_g = math.dist(cfg.bs_pos, cfg.irs_pos)
    d_f = math.dist(cfg.irs_pos, cfg.user_pos)
    d_h = math.dist(cfg.bs_pos, cfg.user_pos)
    if min(d_g, d_f, d_h) <= 0.0:
        raise DegenerateGeometryError(
            f"nodes must be pairwise distinct (d_g={d_g}, d_f={d_f}, d_h={d_h})"
        )
    pl = lambda d, a: float(pathloss(d, cfg.pathloss_ref_db, a, cfg.ref_distance))
    return LinkBudget(
        l_g=pl(d_g, cfg.exponent_g),
        l_f=pl(d_f, cfg.exponent_f),
        l_h=pl(d_h, cfg.exponent_h),
        d_g=d_g,
        d_f=d_f,
        d_h=d_h,
    )
