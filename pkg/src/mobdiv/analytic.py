"""Per-instant coverage probability and the expected number of covered instants.

A single sink that starts uniformly on ``[-D, -h] U [h, D]`` and diffuses
with ``sigma_sink`` is within ``d`` of a sensor at ``x`` at time ``t`` with
probability ``1 - g(x, t)``. The inner integral over the starting position
is done in closed form using ``F(u) = u Q(u) - phi(u)``, the antiderivative
of the Gaussian tail. With a Poisson number of sinks the miss probability
given the sensor position is ``exp(-2 lambda_s (D - h) (1 - g))``, which is
then averaged over the sensor's Gaussian position by adaptive quadrature.

A common drift moves sensor and sinks together and cancels in every
quantity computed here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import ScenarioConfig
from .numerics import DEFAULT_SPEC, QuadratureSpec, gaussian_pdf, integrate, q_antiderivative

_TRUNCATION = 8.0


@dataclass(frozen=True)
class CoverageCurve:
    probabilities: tuple[float, ...]
    expected_covered: float
    converged: bool = True


def sink_hit_prob(x, t, cfg: ScenarioConfig):
    """Probability ``1 - g(x, t)`` that one sink is within ``d`` of ``x``."""
    if not t > 0:
        raise ValueError("t must be positive")
    x = np.asarray(x, dtype=np.float64)
    s = cfg.sigma_sink * math.sqrt(t)
    d = cfg.d
    total = np.zeros_like(x)
    for y1, y2 in ((-cfg.D, -cfg.h), (cfg.h, cfg.D)):
        # int_{y1}^{y2} Q((a - y)/s) dy = s * (F((a - y1)/s) - F((a - y2)/s))
        total = total + (
            q_antiderivative((x - d - y1) / s) - q_antiderivative((x - d - y2) / s)
            - q_antiderivative((x + d - y1) / s) + q_antiderivative((x + d - y2) / s)
        )
    hit = s * total / (2.0 * cfg.half_length)
    hit = np.clip(hit, 0.0, 1.0)
    return float(hit) if hit.ndim == 0 else hit


def sink_miss_prob(x, t, cfg: ScenarioConfig):
    """``g(x, t)``: probability that a single sink is NOT within ``d`` of ``x``."""
    hit = sink_hit_prob(x, t, cfg)
    return 1.0 - hit


def ell(x, t, cfg: ScenarioConfig):
    """Probability that no sink covers a sensor sitting at ``x`` at time ``t``."""
    out = np.exp(-cfg.mean_sinks * np.asarray(sink_hit_prob(x, t, cfg)))
    return float(out) if out.ndim == 0 else out


def coverage_prob_at(t: float, cfg: ScenarioConfig, spec: QuadratureSpec = DEFAULT_SPEC,
                     full_output: bool = False):
    """``Pr{I=1}`` at an arbitrary time ``t > 0``."""
    if not t > 0:
        raise ValueError("t must be positive")
    if cfg.lambda_s == 0:
        return (0.0, 0.0, True) if full_output else 0.0
    sd = cfg.sigma0 * math.sqrt(t)
    var = sd * sd
    mu = cfg.mean_sinks

    def integrand(x):
        # 1 - ell, written with expm1 so small coverages keep their digits
        return gaussian_pdf(x, 0.0, var) * -np.expm1(-mu * sink_hit_prob(x, t, cfg))

    # the integrand peaks near |x| ~ h - d, well inside the window, so split at 0
    lim = _TRUNCATION * sd
    left = integrate(integrand, -lim, 0.0, spec, full_output=True)
    right = integrate(integrand, 0.0, lim, spec, full_output=True)
    value = min(max(left[0] + right[0], 0.0), 1.0)
    if full_output:
        return value, left[1] + right[1], left[2] and right[2]
    return value


def coverage_prob(k: int, cfg: ScenarioConfig, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """``Pr{I_k = 1}`` for the 1-based instant index ``k``."""
    if not 1 <= k <= cfg.n:
        raise IndexError(f"instant index {k} outside 1..{cfg.n}")
    return coverage_prob_at(cfg.times[k - 1], cfg, spec)


def expected_covered(cfg: ScenarioConfig, spec: QuadratureSpec = DEFAULT_SPEC) -> CoverageCurve:
    probs = []
    ok = True
    for t in cfg.times:
        p, _, conv = coverage_prob_at(t, cfg, spec, full_output=True)
        probs.append(p)
        ok = ok and conv
    return CoverageCurve(tuple(probs), math.fsum(probs), ok)


def en_saturation_approx(cfg: ScenarioConfig, kappa: float) -> float:
    """Empirical fit ``2 n d lambda_s (1 - exp(-kappa sigma0))``.

    Diagnostic only; it overshoots ``n`` once ``2 d lambda_s`` is not small.
    """
    if not kappa > 0:
        raise ValueError("kappa must be positive")
    return 2.0 * cfg.n * cfg.d * cfg.lambda_s * -math.expm1(-kappa * cfg.sigma0)
