"""Distribution of the longest run of uncovered instants in a binary chain.

The chain ``I_1..I_n`` is described by ``Pr{I_1 = 1}`` and, for every
``k = 2..n``, a 2x2 row-stochastic matrix ``P_k[a, b] = Pr{I_k = b | I_{k-1} = a}``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

ROW_TOL = 1e-12


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class TransitionSchedule:
    p1_initial: float
    transitions: np.ndarray  # (n-1, 2, 2); transitions[k-2, a, b] = p_ab^k

    def __post_init__(self):
        p = np.array(self.transitions, dtype=np.float64).reshape(-1, 2, 2)
        p.setflags(write=False)
        object.__setattr__(self, "transitions", p)
        if not 0.0 <= self.p1_initial <= 1.0:
            raise ScheduleError(f"p1_initial={self.p1_initial} outside [0, 1]")
        if not np.all(np.isfinite(p)) or np.any(p < 0) or np.any(p > 1):
            raise ScheduleError("transition probabilities must lie in [0, 1]")
        sums = p.sum(axis=2)
        bad = np.argwhere(np.abs(sums - 1.0) > ROW_TOL)
        if bad.size:
            k, a = bad[0]
            raise ScheduleError(
                f"row p_{a}*^{k + 2} sums to {sums[k, a]:.15g}, not 1")

    @property
    def n(self) -> int:
        return self.transitions.shape[0] + 1

    def p(self, a: int, b: int, k: int) -> float:
        """``p_ab^k`` for ``k = 2..n``."""
        return float(self.transitions[k - 2, a, b])

    @classmethod
    def from_rates(cls, p1_initial, p01, p11):
        """Build from the two free parameters per step, ``p01^k`` and ``p11^k``."""
        p01 = np.asarray(p01, dtype=np.float64)
        p11 = np.asarray(p11, dtype=np.float64)
        rows = np.stack([np.stack([1 - p01, p01], -1), np.stack([1 - p11, p11], -1)], -2)
        return cls(float(p1_initial), rows.reshape(-1, 2, 2))

    @classmethod
    def homogeneous(cls, n, p1_initial, p01, p11):
        return cls.from_rates(p1_initial, np.full(n - 1, p01), np.full(n - 1, p11))


@dataclass(frozen=True)
class RunLengthDistribution:
    cmf: np.ndarray  # Pr{N_d < L}, L = 0..n+1
    pmf: np.ndarray  # Pr{N_d = j}, j = 0..n

    @property
    def expected(self) -> float:
        return float(np.sum(1.0 - self.cmf[1:]))

    @classmethod
    def from_cmf(cls, cmf):
        cmf = np.asarray(cmf, dtype=np.float64)
        return cls(cmf, np.diff(cmf))


def runs_of_zeros(bits):
    """Current zero-run length after each position, and its maximum."""
    bits = [int(b) for b in bits]
    if not bits:
        raise ValueError("bits must be nonempty")
    beta = []
    run = 0
    for b in bits:
        run = 0 if b else run + 1
        beta.append(run)
    return beta, max(beta)


def _below(sched: TransitionSchedule, L: int) -> float:
    """``Pr{N_d < L}`` by forward DP over the capped current run length.

    State ``r = 0`` means the last bit was 1; ``r = 1..L-1`` is the length of
    the current zero run. Reaching ``L`` kills the path.
    """
    n = sched.n
    if L <= 0:
        return 0.0
    if L > n:
        return 1.0
    state = np.zeros(L)
    state[0] = sched.p1_initial
    if L > 1:
        state[1] = 1.0 - sched.p1_initial
    for k in range(2, n + 1):
        P = sched.transitions[k - 2]
        nxt = np.zeros(L)
        nxt[0] = state[0] * P[1, 1] + state[1:].sum() * P[0, 1]
        if L > 1:
            nxt[1] = state[0] * P[1, 0]
            nxt[2:] = state[1:-1] * P[0, 0]
        state = nxt
    return float(state.sum())


def runlength_distribution(sched: TransitionSchedule) -> RunLengthDistribution:
    n = sched.n
    cmf = np.array([_below(sched, L) for L in range(n + 2)])
    return RunLengthDistribution.from_cmf(cmf)


def outage_from_chain(sched: TransitionSchedule) -> float:
    """``Pr{I_1 = 0} * prod_k p_00^k``: probability of no covered instant."""
    return float((1.0 - sched.p1_initial) * np.prod(sched.transitions[:, 0, 0]))


def _prefix(sched: TransitionSchedule, position: int) -> TransitionSchedule:
    if not 1 <= position <= sched.n:
        raise IndexError(f"position {position} outside 1..{sched.n}")
    return TransitionSchedule(sched.p1_initial, sched.transitions[: position - 1])


def beta_pmf(sched: TransitionSchedule, position: int, k: int) -> float:
    """``Pr{beta_position = k}`` from the closed recursion for Markov chains.

    ``a(j) = Pr{I_j = 1}`` satisfies ``a(j) = (p11^j - p01^j) a(j-1) + p01^j``.
    A run of exactly ``k`` zeros ending at ``position`` needs a 1 at
    ``position - k`` followed by ``k`` zeros.
    """
    sched = _prefix(sched, position)
    n = position
    if not 0 <= k <= n:
        raise IndexError(f"k={k} outside 0..{n}")

    a = [None, sched.p1_initial]
    for j in range(2, n + 1):
        a.append((sched.p(1, 1, j) - sched.p(0, 1, j)) * a[j - 1] + sched.p(0, 1, j))

    def p00_run(length):
        return float(np.prod([sched.p(0, 0, n - i + 1) for i in range(1, length)]))

    if k == 0:
        return a[n]
    if k == n:
        return (1.0 - sched.p1_initial) * p00_run(n)
    return sched.p(1, 0, n - k + 1) * a[n - k] * p00_run(k)


def beta_marginal(sched: TransitionSchedule, position: int | None = None) -> np.ndarray:
    """Distribution of the current zero-run length at ``position`` by forward DP."""
    n = sched.n if position is None else position
    sched = _prefix(sched, n)
    state = np.zeros(n + 1)
    state[0] = sched.p1_initial
    state[1] = 1.0 - sched.p1_initial
    for k in range(2, n + 1):
        P = sched.transitions[k - 2]
        nxt = np.zeros(n + 1)
        nxt[0] = state[0] * P[1, 1] + state[1:].sum() * P[0, 1]
        nxt[1] = state[0] * P[1, 0]
        nxt[2:] = state[1:-1] * P[0, 0]
        state = nxt
    return state


MAX_BRUTE_N = 20


def brute_force_runlength(sched: TransitionSchedule) -> RunLengthDistribution:
    """Exact pmf by summing the probability of every binary sequence."""
    n = sched.n
    if n > MAX_BRUTE_N:
        raise ValueError(f"n={n} too large for enumeration (max {MAX_BRUTE_N})")
    seqs = np.array(list(itertools.product((0, 1), repeat=n)), dtype=np.int64)
    prob = np.where(seqs[:, 0] == 1, sched.p1_initial, 1.0 - sched.p1_initial)
    for k in range(2, n + 1):
        prob = prob * sched.transitions[k - 2][seqs[:, k - 2], seqs[:, k - 1]]

    longest = np.zeros(len(seqs), dtype=np.int64)
    run = np.zeros(len(seqs), dtype=np.int64)
    for k in range(n):
        run = np.where(seqs[:, k] == 0, run + 1, 0)
        longest = np.maximum(longest, run)

    pmf = np.zeros(n + 1)
    np.add.at(pmf, longest, prob)
    cmf = np.concatenate([[0.0], np.cumsum(pmf)])
    return RunLengthDistribution(cmf, pmf)
