"""Trajectory-level simulation of the sensor/sink world.

Trial ``i`` depends only on ``(seed, i)``: chunks of trials can run on any
number of threads and the aggregated estimates do not change.

Configs are taken as given; run :func:`mobdiv.model.validate_config` at the
boundary where user input enters.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend, _kernels_py, _rng
from .model import IndicatorSequence, Realization, ScenarioConfig, sink_count_table
from .runlength import TransitionSchedule

CHUNK = 16_384


def _kernel_args(cfg: ScenarioConfig, stream: int = 0):
    return dict(
        key=_rng.stream_key(cfg.seed, stream),
        times=np.asarray(cfg.times, dtype=np.float64),
        sigma0=float(cfg.sigma0),
        sigma_sink=float(cfg.sigma_sink),
        drift=float(cfg.drift),
        D=float(cfg.D),
        h=float(cfg.h),
        cdf=sink_count_table(cfg.mean_sinks),
    )


def simulate_realization(cfg: ScenarioConfig, trial_index: int, stream: int = 0,
                         sink_initial=None) -> tuple[Realization, IndicatorSequence]:
    """Regenerate the full world of one trial.

    ``sink_initial`` replaces the Poisson draw and uniform placement; it is a
    hook for fixtures with a known geometry.
    """
    args = _kernel_args(cfg, stream)
    counts, y0, mask, sensor, sinks = _kernels_py.sample_paths(
        args["key"], [trial_index], args["times"], args["sigma0"], args["sigma_sink"],
        args["drift"], args["D"], args["h"], args["cdf"], sink_initial=sink_initial)
    m = int(counts[0])
    real = Realization(
        sink_count=m,
        sink_initial=y0[0, :m].copy(),
        sensor_positions=sensor[0].copy(),
        sink_positions=sinks[0, :m].copy(),
    )
    if m:
        gap = np.abs(real.sink_positions - real.sensor_positions).min(axis=0)
        bits = tuple(int(g <= cfg.d) for g in gap)
    else:
        bits = (0,) * cfg.n
    return real, IndicatorSequence(bits)


def simulate_gaps(cfg: ScenarioConfig, trials: int | None = None, stream: int = 0,
                  workers: int | None = None, backend=None) -> np.ndarray:
    """Nearest-sink distance per trial and instant, shape ``(trials, n)``."""
    trials = cfg.trials if trials is None else trials
    if trials < 1:
        raise ValueError("trials must be at least 1")
    kern = backend or _backend.kernel
    args = _kernel_args(cfg, stream)
    bounds = [(lo, min(lo + CHUNK, trials)) for lo in range(0, trials, CHUNK)]

    def run(span):
        lo, hi = span
        return kern.min_gaps(args["key"], lo, hi, args["times"], args["sigma0"],
                             args["sigma_sink"], args["drift"], args["D"], args["h"],
                             args["cdf"])

    workers = workers or os.cpu_count() or 1
    if workers == 1 or len(bounds) == 1:
        parts = [run(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, bounds))
    return np.concatenate(parts) if parts else np.empty((0, cfg.n))


def simulate_indicators(cfg: ScenarioConfig, **kwargs) -> np.ndarray:
    """Boolean coverage matrix ``(trials, n)``: covered iff nearest sink is within ``d``."""
    return simulate_gaps(cfg, **kwargs) <= cfg.d


@dataclass(frozen=True)
class TransitionEstimates:
    """Empirical chain: conditional frequencies with their sample counts.

    ``probs[k-2, a, b]`` estimates ``p_ab^k``; rows whose conditioning event
    ``I_{k-1} = a`` never occurred are NaN and ``counts[k-2, a] == 0``.
    """

    trials: int
    p1_initial: float
    probs: np.ndarray  # (n-1, 2, 2)
    counts: np.ndarray  # (n-1, 2)

    @property
    def observed(self) -> np.ndarray:
        return self.counts > 0

    @property
    def p1_stderr(self) -> float:
        return _binom_se(self.p1_initial, self.trials)

    @property
    def stderr(self) -> np.ndarray:
        with np.errstate(invalid="ignore", divide="ignore"):
            p = self.probs[:, :, 1]
            se = np.sqrt(p * (1 - p) / self.counts)
        return np.where(self.observed, se, np.nan)  # (n-1, 2): se of p_a1 given I_{k-1}=a

    def schedule(self, p1_initial: float | None = None, fill: float = 0.5) -> TransitionSchedule:
        """Chain usable by :mod:`runlength`.

        Unobserved rows get ``(1 - fill, fill)``; the chain never puts mass
        on them when they were unobserved because their probability is 0.
        """
        p = np.where(self.observed[:, :, None], self.probs,
                     np.array([1.0 - fill, fill]))
        p1 = self.p1_initial if p1_initial is None else p1_initial
        return TransitionSchedule(p1, p)

    def markov_outage(self) -> tuple[float, float]:
        """``Pr{I_1=0} prod p00^k`` and its delta-method standard error."""
        q1 = 1.0 - self.p1_initial
        p00 = self.probs[:, 0, 0]
        if not np.all(self.observed[:, 0]):
            return math.nan, math.nan
        value = q1 * float(np.prod(p00))
        if value == 0.0 or self.trials < 2:
            return value, math.nan if self.trials < 2 else 0.0
        rel2 = (1 - q1) / (q1 * self.trials)
        rel2 += float(np.sum((1 - p00) / (p00 * self.counts[:, 0])))
        return value, value * math.sqrt(rel2)


@dataclass(frozen=True)
class MetricEstimates:
    trials: int
    coverage: np.ndarray  # per-instant Pr{I_k=1}
    coverage_stderr: np.ndarray
    en_mean: float
    en_stderr: float
    outage_rate: float
    outage_stderr: float
    nd_mean: float
    nd_stderr: float
    nd_histogram: np.ndarray  # counts for N_d = 0..n
    transition_estimates: TransitionEstimates

    @property
    def n(self) -> int:
        return self.coverage.size


def _binom_se(p: float, trials: int) -> float:
    if trials < 2:
        return math.nan
    return math.sqrt(p * (1.0 - p) / trials)


def _sample_se(x: np.ndarray) -> float:
    if x.size < 2:
        return math.nan
    return float(np.std(x, ddof=1) / math.sqrt(x.size))


def estimate_transitions_from_bits(bits: np.ndarray) -> TransitionEstimates:
    bits = np.asarray(bits, dtype=bool)
    trials, n = bits.shape
    prev, cur = bits[:, :-1], bits[:, 1:]
    counts = np.stack([(~prev).sum(axis=0), prev.sum(axis=0)], axis=1)
    hits = np.stack([(~prev & cur).sum(axis=0), (prev & cur).sum(axis=0)], axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        p1 = np.where(counts > 0, hits / counts, np.nan)
    probs = np.stack([1.0 - p1, p1], axis=2)
    return TransitionEstimates(trials, float(bits[:, 0].mean()), probs, counts)


def longest_zero_runs(bits: np.ndarray) -> np.ndarray:
    bits = np.asarray(bits, dtype=bool)
    run = np.zeros(bits.shape[0], dtype=np.int64)
    best = np.zeros(bits.shape[0], dtype=np.int64)
    for k in range(bits.shape[1]):
        run = np.where(bits[:, k], 0, run + 1)
        np.maximum(best, run, out=best)
    return best


def metrics_from_bits(bits: np.ndarray) -> MetricEstimates:
    bits = np.asarray(bits, dtype=bool)
    trials, n = bits.shape
    covered = bits.sum(axis=1)
    nd = longest_zero_runs(bits)
    hist = np.bincount(nd, minlength=n + 1)
    outage = hist[n] / trials
    cov = bits.mean(axis=0)
    cov_se = (np.sqrt(cov * (1 - cov) / trials) if trials > 1 else np.full(n, np.nan))
    return MetricEstimates(
        trials=trials,
        coverage=cov,
        coverage_stderr=cov_se,
        en_mean=float(covered.mean()),
        en_stderr=_sample_se(covered),
        outage_rate=float(outage),
        outage_stderr=_binom_se(float(outage), trials),
        nd_mean=float(nd.mean()),
        nd_stderr=_sample_se(nd),
        nd_histogram=hist,
        transition_estimates=estimate_transitions_from_bits(bits),
    )


def estimate_metrics(cfg: ScenarioConfig, **kwargs) -> MetricEstimates:
    return metrics_from_bits(simulate_indicators(cfg, **kwargs))


def estimate_transitions(cfg: ScenarioConfig, **kwargs) -> TransitionEstimates:
    return estimate_transitions_from_bits(simulate_indicators(cfg, **kwargs))
