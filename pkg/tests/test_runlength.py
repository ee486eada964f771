import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mobdiv.runlength import (MAX_BRUTE_N, ScheduleError, TransitionSchedule, beta_marginal,
                              beta_pmf, brute_force_runlength, outage_from_chain, runlength_distribution,
                              runs_of_zeros)

HALF = TransitionSchedule.homogeneous(3, 0.5, 0.5, 0.5)


def random_schedule(rng, n):
    return TransitionSchedule.from_rates(rng.uniform(), rng.uniform(size=n - 1), rng.uniform(size=n - 1))


prob = st.floats(0.0, 1.0, allow_nan=False)


@st.composite
def schedules(draw, max_n=10):
    n = draw(st.integers(1, max_n))
    p01 = draw(st.lists(prob, min_size=n - 1, max_size=n - 1))
    p11 = draw(st.lists(prob, min_size=n - 1, max_size=n - 1))
    return TransitionSchedule.from_rates(draw(prob), p01, p11)


def test_worked_example():
    beta, longest = runs_of_zeros("1100100011")
    assert beta == [0, 0, 1, 2, 0, 1, 2, 3, 0, 0]
    assert longest == 3


def test_runs_of_zeros_empty():
    with pytest.raises(ValueError):
        runs_of_zeros([])


def test_fair_coin_n3():
    dist = runlength_distribution(HALF)
    assert np.allclose(dist.pmf, [1 / 8, 4 / 8, 2 / 8, 1 / 8], atol=1e-15)
    assert dist.expected == pytest.approx(11 / 8)
    assert outage_from_chain(HALF) == pytest.approx(1 / 8)


def test_beta_two_fair_coin():
    sched = TransitionSchedule.homogeneous(2, 0.5, 0.5, 0.5)
    assert [beta_pmf(sched, 2, k) for k in range(3)] == pytest.approx([1 / 2, 1 / 4, 1 / 4])
    assert beta_marginal(sched) == pytest.approx([1 / 2, 1 / 4, 1 / 4])


def test_dp_matches_enumeration():
    rng = np.random.default_rng(2024)
    for _ in range(50):
        sched = random_schedule(rng, int(rng.integers(1, 13)))
        dp = runlength_distribution(sched)
        bf = brute_force_runlength(sched)
        assert np.max(np.abs(dp.pmf - bf.pmf)) <= 1e-12
        assert dp.pmf[-1] == pytest.approx(outage_from_chain(sched), abs=1e-12)


def test_beta_recursion_matches_marginal():
    rng = np.random.default_rng(7)
    for _ in range(30):
        sched = random_schedule(rng, int(rng.integers(1, 12)))
        for pos in range(1, sched.n + 1):
            rec = [beta_pmf(sched, pos, k) for k in range(pos + 1)]
            assert np.max(np.abs(np.array(rec) - beta_marginal(sched, pos))) <= 1e-10


def test_alternating_chain():
    sched = TransitionSchedule.homogeneous(9, 0.0, 1.0, 0.0)
    dist = runlength_distribution(sched)
    assert dist.pmf[1] == 1.0
    assert dist.expected == 1.0


def test_single_instant():
    sched = TransitionSchedule(0.3, np.empty((0, 2, 2)))
    dist = runlength_distribution(sched)
    assert dist.pmf == pytest.approx([0.3, 0.7])
    assert dist.cmf == pytest.approx([0.0, 0.3, 1.0])
    assert outage_from_chain(sched) == pytest.approx(0.7)


def test_always_covered_and_never_covered():
    on = runlength_distribution(TransitionSchedule.homogeneous(6, 1.0, 0.3, 1.0))
    off = runlength_distribution(TransitionSchedule.homogeneous(6, 0.0, 0.0, 0.4))
    assert on.pmf[0] == 1.0 and on.expected == 0.0
    assert off.pmf[6] == 1.0 and off.expected == 6.0


@settings(max_examples=200, deadline=None)
@given(schedules())
def test_distribution_properties(sched):
    dist = runlength_distribution(sched)
    n = sched.n
    assert dist.cmf[0] == 0.0 and dist.cmf[-1] == 1.0
    assert np.all(np.diff(dist.cmf) >= -1e-15)
    assert abs(dist.pmf.sum() - 1.0) <= 1e-12
    assert -1e-12 <= dist.expected <= n + 1e-12
    assert dist.expected == pytest.approx(float(np.arange(n + 1) @ dist.pmf), abs=1e-12)
    assert dist.pmf[n] == pytest.approx(outage_from_chain(sched), abs=1e-12)


@settings(max_examples=100, deadline=None)
@given(schedules(max_n=8), st.data())
def test_more_coverage_shortens_runs(sched, data):
    """Raising every Pr{next = 1} of a monotone chain (p11 >= p01) shortens runs.

    Monotonicity is what makes the step-by-step coupling order-preserving.
    """
    bump = data.draw(st.floats(0.0, 1.0))
    a = sched.transitions[:, 0, 1]
    b = sched.transitions[:, 1, 1]
    p01, p11 = np.minimum(a, b), np.maximum(a, b)
    sched = TransitionSchedule.from_rates(sched.p1_initial, p01, p11)
    up = TransitionSchedule.from_rates(sched.p1_initial + bump * (1 - sched.p1_initial),
                                       p01 + bump * (1 - p01), p11 + bump * (1 - p11))
    lo = runlength_distribution(sched)
    hi = runlength_distribution(up)
    assert np.all(hi.cmf >= lo.cmf - 1e-12)
    assert hi.expected <= lo.expected + 1e-12


def test_schedule_validation():
    with pytest.raises(ScheduleError, match="p_0"):
        TransitionSchedule(0.5, [[[0.5, 0.4], [0.5, 0.5]]])
    with pytest.raises(ScheduleError):
        TransitionSchedule(1.5, [[[0.5, 0.5], [0.5, 0.5]]])
    with pytest.raises(ScheduleError):
        TransitionSchedule(0.5, [[[1.2, -0.2], [0.5, 0.5]]])
    with pytest.raises(ScheduleError):
        TransitionSchedule(0.5, [[[np.nan, 0.5], [0.5, 0.5]]])


def test_schedule_accessor():
    sched = TransitionSchedule.from_rates(0.2, [0.1, 0.3], [0.7, 0.9])
    assert sched.n == 3
    assert sched.p(0, 1, 3) == 0.3
    assert sched.p(1, 0, 2) == pytest.approx(0.3)


def test_brute_force_size_limit():
    sched = TransitionSchedule.homogeneous(MAX_BRUTE_N + 1, 0.5, 0.5, 0.5)
    with pytest.raises(ValueError):
        brute_force_runlength(sched)


def test_beta_index_errors():
    with pytest.raises(IndexError):
        beta_pmf(HALF, 4, 0)
    with pytest.raises(IndexError):
        beta_pmf(HALF, 2, 3)
