"""Scenario parameters, realizations and the sampling primitives.

One sensor starts at the origin and performs a (possibly drifted) Wiener
motion with mobility parameter ``sigma0``. A Poisson number of sinks, mean
``2 * lambda_s * (D - h)``, start uniformly on ``[-D, -h] U [h, D]`` and move
independently with the shared parameter ``sigma_sink``. Positions are only
ever sampled at the grid times ``times``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping, Sequence

import numpy as np
import yaml
from scipy import stats


class ConfigError(ValueError):
    """A hard constraint on the scenario parameters is violated."""

    def __init__(self, field_name: str, message: str):
        self.field = field_name
        super().__init__(f"{field_name}: {message}")


class ScaleWarning(UserWarning):
    """The sensor is likely to wander close to the edge of the sink segment."""


@dataclass(frozen=True)
class ScenarioConfig:
    sigma0: float
    sigma_sink: float
    lambda_s: float
    D: float
    h: float
    d: float
    drift: float = 0.0
    times: tuple[float, ...] = field(default_factory=tuple)
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))

    @property
    def n(self) -> int:
        return len(self.times)

    @property
    def half_length(self) -> float:
        """Length ``D - h`` of each of the two deployment segments."""
        return self.D - self.h

    @property
    def mean_sinks(self) -> float:
        return 2.0 * self.lambda_s * (self.D - self.h)


@dataclass(frozen=True)
class Realization:
    sink_count: int
    sink_initial: np.ndarray  # (m,)
    sensor_positions: np.ndarray  # (n,)
    sink_positions: np.ndarray  # (m, n)


@dataclass(frozen=True)
class IndicatorSequence:
    bits: tuple[int, ...]

    @property
    def covered_count(self) -> int:
        return sum(self.bits)

    @property
    def longest_zero_run(self) -> int:
        best = run = 0
        for b in self.bits:
            run = 0 if b else run + 1
            best = max(best, run)
        return best


def validate_config(cfg: ScenarioConfig) -> ScenarioConfig:
    """Check the hard invariants and return ``cfg`` unchanged.

    Raises :class:`ConfigError` naming the offending field. Emits a
    :class:`ScaleWarning` when ``sigma0**2 * t_n >= D / 10``, i.e. when the
    sensor is no longer negligibly likely to leave the sink segment.
    """
    for name in ("sigma0", "sigma_sink", "lambda_s", "D", "h", "d", "drift"):
        value = getattr(cfg, name)
        if not isinstance(value, (int, float)) or not math.isfinite(value):
            raise ConfigError(name, f"must be a finite number, got {value!r}")
    if cfg.sigma0 <= 0:
        raise ConfigError("sigma0", "sigma0 > 0 violated")
    if cfg.sigma_sink <= 0:
        raise ConfigError("sigma_sink", "sigma_sink > 0 violated")
    if cfg.lambda_s < 0:
        raise ConfigError("lambda_s", "lambda_s >= 0 violated")
    if not cfg.d > 0:
        raise ConfigError("d", "d > 0 violated")
    if not cfg.d < cfg.h:
        raise ConfigError("h", "d < h violated")
    if not cfg.h < cfg.D:
        raise ConfigError("D", "h < D violated")
    if not cfg.times:
        raise ConfigError("times", "at least one time instant is required")
    if not all(math.isfinite(t) for t in cfg.times):
        raise ConfigError("times", "times must be finite")
    if cfg.times[0] <= 0:
        raise ConfigError("times", "0 < t_1 violated")
    if any(b <= a for a, b in zip(cfg.times, cfg.times[1:])):
        raise ConfigError("times", "times must be strictly increasing")
    if isinstance(cfg.trials, bool) or not isinstance(cfg.trials, int) or cfg.trials < 1:
        raise ConfigError("trials", "trials >= 1 violated")
    if isinstance(cfg.seed, bool) or not isinstance(cfg.seed, int) or cfg.seed < 0:
        raise ConfigError("seed", "seed must be a non-negative integer")

    spread = cfg.sigma0**2 * cfg.times[-1]
    if spread >= cfg.D / 10:
        warnings.warn(
            f"sigma0^2 * t_n = {spread:g} >= D/10 = {cfg.D / 10:g}; the sensor may "
            "approach the edge of the sink segment",
            ScaleWarning,
            stacklevel=2,
        )
    return cfg


def build_time_grid(start: float, step: float, n: int) -> list[float]:
    if not start > 0:
        raise ValueError("start must be positive")
    if not step > 0:
        raise ValueError("step must be positive")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise ValueError("n must be a positive integer")
    return [start + i * step for i in range(n)]


_KEYS = {f.name for f in fields(ScenarioConfig)}


def config_from_mapping(data: Mapping[str, Any]) -> ScenarioConfig:
    """Build a config from plain data; ``times`` may also be ``{start, step, n}``."""
    if not isinstance(data, Mapping):
        raise ConfigError("<root>", "configuration must be a mapping")
    unknown = sorted(set(data) - _KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown configuration key")
    for required in ("sigma0", "sigma_sink", "lambda_s", "D", "h", "d", "times"):
        if required not in data:
            raise ConfigError(required, "missing required key")

    kwargs = dict(data)
    times = kwargs["times"]
    if isinstance(times, Mapping):
        extra = set(times) - {"start", "step", "n"}
        if extra or len(times) != 3:
            raise ConfigError("times", "grid form needs exactly start, step, n")
        try:
            times = build_time_grid(times["start"], times["step"], times["n"])
        except (TypeError, ValueError) as exc:
            raise ConfigError("times", str(exc)) from None
    elif not isinstance(times, Sequence) or isinstance(times, str):
        raise ConfigError("times", "must be a list of numbers or {start, step, n}")
    try:
        kwargs["times"] = tuple(float(t) for t in times)
    except (TypeError, ValueError):
        raise ConfigError("times", "must contain numbers") from None

    for name in ("sigma0", "sigma_sink", "lambda_s", "D", "h", "d", "drift"):
        if name in kwargs:
            value = kwargs[name]
            if isinstance(value, bool) or not isinstance(value, (int, float)):
                raise ConfigError(name, f"must be a number, got {value!r}")
            kwargs[name] = float(value)
    return validate_config(ScenarioConfig(**kwargs))


def load_config(path: str | Path) -> ScenarioConfig:
    """Read a YAML (or JSON) scenario file."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"malformed configuration: {exc}") from None
    return config_from_mapping(data)


def config_to_mapping(cfg: ScenarioConfig) -> dict[str, Any]:
    return {f.name: (list(getattr(cfg, f.name)) if f.name == "times" else getattr(cfg, f.name))
            for f in fields(ScenarioConfig)}


# -- sampling primitives ----------------------------------------------------

def sink_count_table(mean: float) -> np.ndarray:
    """Poisson CDF table for inversion sampling: ``m = #{cdf <= u}``.

    The last entry is forced to 1 so every ``u < 1`` maps to a finite count.
    """
    if mean <= 0:
        return np.ones(1)
    top = int(mean + 12.0 * math.sqrt(mean) + 30)
    cdf = stats.poisson.cdf(np.arange(top + 1), mean)
    cdf[-1] = 1.0
    return np.ascontiguousarray(cdf, dtype=np.float64)


def place_sinks(u: np.ndarray, D: float, h: float) -> np.ndarray:
    """Map uniforms on (0, 1) to uniform positions on ``[-D, -h] U [h, D]``."""
    half = D - h
    v = np.asarray(u) * (2.0 * half)
    return np.where(v < half, v - D, h + (v - half))


def step_scales(times: Sequence[float]) -> np.ndarray:
    """Standard deviation of a unit Wiener increment between grid times."""
    t = np.asarray(times, dtype=np.float64)
    return np.sqrt(np.diff(t, prepend=0.0))
