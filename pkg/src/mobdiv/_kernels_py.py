"""Vectorized numpy implementation of the trial kernel.

Draw layout per trial (shared with ``_kernels_c.pyx``):

* lane 0, index 0: uniform inverted through the Poisson table -> sink count ``m``
* lane 1, index j: initial position of sink ``j``
* lane 2, index k: standard normal for the sensor step into ``t_k``
* lane 3, index j*n + k: standard normal for sink ``j`` stepping into ``t_k``
"""

import numpy as np

from . import _rng
from .model import place_sinks, step_scales

CHUNK = 2048


def sample_paths(key, trials, times, sigma0, sigma_sink, drift, D, h, cdf,
                 sink_initial=None):
    """Full positions for the given trial indices.

    Returns ``counts (T,)``, ``sink_initial (T, M)``, ``mask (T, M)``,
    ``sensor (T, n)`` and ``sinks (T, M, n)``; padded sinks are masked out.
    ``sink_initial`` (1-D) overrides the Poisson draw and placement for every
    trial, which is only meant for test fixtures.
    """
    trials = np.asarray(trials, dtype=np.int64)
    times = np.asarray(times, dtype=np.float64)
    n = times.size
    tk = _rng.trial_keys(key, trials)[:, None]
    scales = step_scales(times)
    shift = drift * times

    k_idx = np.arange(n, dtype=np.uint64)[None, :]
    steps = _rng.normals(tk, _rng.LANE_SENSOR_STEP, k_idx) * (sigma0 * scales)
    sensor = shift + np.cumsum(steps, axis=1)

    if sink_initial is None:
        u = _rng.uniforms(tk[:, 0], _rng.LANE_COUNT, 0)
        counts = np.searchsorted(cdf, u, side="right").astype(np.int64)
        M = int(counts.max()) if counts.size else 0
        j_idx = np.arange(M, dtype=np.uint64)[None, :]
        y0 = place_sinks(_rng.uniforms(tk, _rng.LANE_SINK_INIT, j_idx), D, h)
    else:
        fixed = np.asarray(sink_initial, dtype=np.float64).ravel()
        M = fixed.size
        counts = np.full(trials.size, M, dtype=np.int64)
        y0 = np.broadcast_to(fixed, (trials.size, M)).copy()
    mask = np.arange(M)[None, :] < counts[:, None]

    idx = (np.arange(M, dtype=np.uint64)[:, None] * np.uint64(n)
           + np.arange(n, dtype=np.uint64)[None, :])
    sink_steps = _rng.normals(tk[:, :, None], _rng.LANE_SINK_STEP, idx[None]) * (sigma_sink * scales)
    sinks = y0[:, :, None] + shift + np.cumsum(sink_steps, axis=2)
    return counts, y0, mask, sensor, sinks


def min_gaps(key, start, stop, times, sigma0, sigma_sink, drift, D, h, cdf):
    """Distance from the sensor to its nearest sink at each grid time.

    Shape ``(stop - start, n)``; ``inf`` where a trial has no sinks.
    """
    times = np.asarray(times, dtype=np.float64)
    out = np.empty((stop - start, times.size))
    for lo in range(start, stop, CHUNK):
        hi = min(lo + CHUNK, stop)
        _, _, mask, sensor, sinks = sample_paths(
            key, np.arange(lo, hi), times, sigma0, sigma_sink, drift, D, h, cdf)
        gap = np.abs(sinks - sensor[:, None, :])
        gap[~mask] = np.inf
        out[lo - start:hi - start] = gap.min(axis=1, initial=np.inf)
    return out
