"""Counter-based random streams.

Every draw is a pure function of ``(stream key, trial, lane, index)`` so a
trial can be regenerated in isolation and trials can be evaluated in any
order or in parallel. The compiled kernel implements the same mixing
function bit for bit.
"""

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_TWO_PI = 2.0 * np.pi

# lanes
LANE_COUNT = 0
LANE_SINK_INIT = 1
LANE_SENSOR_STEP = 2
LANE_SINK_STEP = 3

_MASK64 = (1 << 64) - 1


def _mix(z):
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _mix_int(z: int) -> int:
    z &= _MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
    return z ^ (z >> 31)


def stream_key(seed: int, stream: int = 0) -> int:
    """Root key for one independent family of trials (e.g. one axis)."""
    k0 = _mix_int((seed & _MASK64) + 0x9E3779B97F4A7C15)
    return _mix_int(k0 ^ ((stream & _MASK64) * 0xD1B54A32D192ED03))


def trial_keys(key: int, trials) -> np.ndarray:
    t = np.asarray(trials, dtype=np.uint64)
    with np.errstate(over="ignore"):
        return _mix(np.uint64(key) + t * GOLDEN)


def uniforms(tkeys, lane: int, index) -> np.ndarray:
    """Uniform(0, 1) draws, open at both ends.

    ``tkeys`` and ``index`` broadcast against each other.
    """
    idx = np.asarray(index, dtype=np.uint64)
    with np.errstate(over="ignore"):
        word = (np.uint64(lane) << np.uint64(40)) + idx
    h = _mix(np.asarray(tkeys, dtype=np.uint64) ^ _mix(word))
    return ((h >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


def normals(tkeys, lane: int, index) -> np.ndarray:
    """Standard normals via Box-Muller on uniforms ``2i`` and ``2i+1``."""
    idx = np.asarray(index, dtype=np.uint64)
    u1 = uniforms(tkeys, lane, idx * np.uint64(2))
    u2 = uniforms(tkeys, lane, idx * np.uint64(2) + np.uint64(1))
    return np.sqrt(-2.0 * np.log(u1)) * np.cos(_TWO_PI * u2)
