"""Two-dimensional motion with independent axes.

Each axis is a copy of the one-dimensional world: the sensor coordinate is
an independent Wiener motion, and the sink coordinates along that axis form
their own Poisson population on ``[-D, -h] U [h, D]``. A sink site is any
pair of an x-coordinate and a y-coordinate, so the per-axis gaps ``gx, gy``
to the nearest coordinates decide coverage:

* square of half-side ``d``: ``gx <= d and gy <= d``
* circle of radius ``d``: ``gx**2 + gy**2 <= d**2``

Square coverage then factorizes into the product of the per-axis 1D
coverage probabilities, and the circle is sandwiched between the inscribed
square (half-side ``d / sqrt 2``) and the circumscribed one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .analytic import coverage_prob_at
from .model import ScenarioConfig
from .montecarlo import MetricEstimates, metrics_from_bits, simulate_gaps

SHAPES = ("square", "circle")


@dataclass(frozen=True)
class PlanarConfig:
    x: ScenarioConfig
    y: ScenarioConfig
    coverage_shape: str = "square"

    def __post_init__(self):
        if self.coverage_shape not in SHAPES:
            raise ValueError(f"coverage_shape must be one of {SHAPES}")
        if self.x.times != self.y.times:
            raise ValueError("both axes must share the time grid")
        if self.x.d != self.y.d:
            raise ValueError("both axes must use the same range d")
        if not self.x.d > 0:
            raise ValueError("d must be positive")

    @classmethod
    def isotropic(cls, cfg: ScenarioConfig, coverage_shape: str = "square") -> "PlanarConfig":
        return cls(cfg, cfg, coverage_shape)

    @property
    def d(self) -> float:
        return self.x.d

    @property
    def n(self) -> int:
        return self.x.n


def _square_prob(k: int, pcfg: PlanarConfig, half_side: float) -> float:
    if not 1 <= k <= pcfg.n:
        raise IndexError(f"instant index {k} outside 1..{pcfg.n}")
    t = pcfg.x.times[k - 1]
    px = coverage_prob_at(t, replace(pcfg.x, d=half_side))
    if pcfg.y == pcfg.x:
        return px * px
    return px * coverage_prob_at(t, replace(pcfg.y, d=half_side))


def coverage_prob_2d_square(k: int, pcfg: PlanarConfig) -> float:
    """``Pr{I_k^x = 1} * Pr{I_k^y = 1}`` for a square of half-side ``d``."""
    return _square_prob(k, pcfg, pcfg.d)


def circle_coverage_bounds(k: int, pcfg: PlanarConfig) -> tuple[float, float]:
    """Inscribed-square lower and circumscribed-square upper bounds."""
    lower = _square_prob(k, pcfg, pcfg.d / math.sqrt(2.0))
    upper = _square_prob(k, pcfg, pcfg.d)
    return lower, upper


def planar_indicators(pcfg: PlanarConfig, shape: str | None = None, **kwargs) -> np.ndarray:
    shape = shape or pcfg.coverage_shape
    trials = kwargs.pop("trials", pcfg.x.trials)
    gx = simulate_gaps(pcfg.x, trials=trials, stream=0, **kwargs)
    # the y axis draws from its own stream of the x config's seed
    gy = simulate_gaps(replace(pcfg.y, seed=pcfg.x.seed), trials=trials, stream=1, **kwargs)
    d = pcfg.d
    if shape == "square":
        return (gx <= d) & (gy <= d)
    if shape == "circle":
        with np.errstate(invalid="ignore"):
            return gx * gx + gy * gy <= d * d
    raise ValueError(f"unknown shape {shape!r}")


def simulate_2d(pcfg: PlanarConfig, **kwargs) -> MetricEstimates:
    return metrics_from_bits(planar_indicators(pcfg, **kwargs))
