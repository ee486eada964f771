"""Acceptance gate: one test per criterion, each reporting a pass/fail line.

The summary lines are printed at the end of the pytest run.
"""

import math
import time
from dataclasses import replace

import numpy as np
import pytest

from mobdiv import (PlanarConfig, circle_coverage_bounds, coverage_prob_2d_square, ell,
                    estimate_metrics, expected_covered, sink_miss_prob)
from mobdiv.planar import planar_indicators
from mobdiv.runlength import (TransitionSchedule, beta_marginal, beta_pmf, brute_force_runlength,
                              outage_from_chain, runlength_distribution, runs_of_zeros)

from .conftest import ACCEPTANCE_LINES, LAMBDA_GRID, SIGMA0_GRID, reference_config

pytestmark = pytest.mark.acceptance


def report(number, title, ok, detail):
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def test_criterion_1_analytic_grid():
    start = time.perf_counter()
    en = np.array([[expected_covered(reference_config(sigma0=s, lambda_s=lam)).expected_covered
                    for lam in LAMBDA_GRID] for s in SIGMA0_GRID])
    elapsed = time.perf_counter() - start
    up_sigma = bool(np.all(np.diff(en, axis=0) > 0))
    up_lambda = bool(np.all(np.diff(en, axis=1) > 0))
    bounded = bool(np.all(en <= 10))
    ok = up_sigma and up_lambda and bounded and elapsed < 60
    report(1, "analytic E{N} grid", ok,
           f"increasing in sigma0={up_sigma}, in lambda_s={up_lambda}, max={en.max():.4f}, "
           f"{elapsed:.1f}s for 42 points")


ORACLE_POINTS = [(0.5, 0.015), (0.5, 0.1), (25.0, 0.015), (25.0, 0.1), (5.0, 0.03), (5.0, 0.045)]


def test_criterion_2_oracle_agreement():
    start = time.perf_counter()
    worst = 0.0
    bad = []
    for i, (s, lam) in enumerate(ORACLE_POINTS):
        cfg = reference_config(sigma0=s, lambda_s=lam, trials=100_000, seed=500 + i)
        curve = expected_covered(cfg)
        est = estimate_metrics(cfg)
        z = [abs(est.en_mean - curve.expected_covered) / est.en_stderr]
        z += list(np.abs(est.coverage - curve.probabilities) / est.coverage_stderr)
        worst = max(worst, max(z))
        if max(z) > 3:
            bad.append((s, lam, round(max(z), 2)))
    elapsed = time.perf_counter() - start
    report(2, "MC vs analytic at 6 grid points", not bad and elapsed < 300,
           f"worst |z|={worst:.2f} (limit 3), failing points {bad}, {elapsed:.1f}s")


@pytest.fixture(scope="module")
def mc_grid():
    """MC metrics on the full 42-point grid, keyed by (sigma0, lambda_s)."""
    return {(s, lam): estimate_metrics(reference_config(sigma0=s, lambda_s=lam, trials=20_000,
                                                     seed=900 + 10 * i + j))
            for i, s in enumerate(SIGMA0_GRID) for j, lam in enumerate(LAMBDA_GRID)}


def test_criterion_3_outage_consistency(mc_grid):
    worst_z, worst_at = 0.0, None
    for key, est in mc_grid.items():
        value, se = est.transition_estimates.markov_outage()
        z = abs(est.outage_rate - value) / math.hypot(se, est.outage_stderr)
        if z > worst_z:
            worst_z, worst_at = z, (key, est.outage_rate, value)
    product_ok = worst_z <= 4

    monotone_ok = True
    for lam in LAMBDA_GRID:
        seq = [mc_grid[(s, lam)] for s in SIGMA0_GRID]
        for a, b in zip(seq, seq[1:]):
            if b.outage_rate > a.outage_rate + 3 * math.hypot(a.outage_stderr, b.outage_stderr):
                monotone_ok = False
    (s, lam), direct, product = worst_at
    report(3, "direct outage vs chain product; outage trend", product_ok and monotone_ok,
           f"product agreement={product_ok} (worst z={worst_z:.1f} at sigma0={s}, "
           f"lambda_s={lam}: direct={direct:.4f} product={product:.4f}, limit 4); "
           f"nonincreasing in sigma0={monotone_ok}")


def test_criterion_4_runlength_exactness():
    rng = np.random.default_rng(4)
    dp_err = beta_err = 0.0
    for _ in range(50):
        n = int(rng.integers(1, 13))
        sched = TransitionSchedule.from_rates(rng.uniform(), rng.uniform(size=n - 1),
                                              rng.uniform(size=n - 1))
        dp = runlength_distribution(sched)
        dp_err = max(dp_err, float(np.max(np.abs(dp.pmf - brute_force_runlength(sched).pmf))))
        rec = np.array([beta_pmf(sched, n, k) for k in range(n + 1)])
        beta_err = max(beta_err, float(np.max(np.abs(rec - beta_marginal(sched)))))
    beta, longest = runs_of_zeros("1100100011")
    example_ok = "".join(map(str, beta)) == "0012012300" and longest == 3
    ok = dp_err <= 1e-12 and beta_err <= 1e-10 and example_ok
    report(4, "run-length DP exactness", ok,
           f"DP vs enumeration {dp_err:.1e}, beta recursion {beta_err:.1e}, "
           f"worked example={example_ok}")


def _dp_expected_stderr(tr):
    """Delta-method stderr of the DP mean from the binomial noise of each estimated rate."""
    sched = tr.schedule()
    base = runlength_distribution(sched).expected
    p01 = sched.transitions[:, 0, 1].copy()
    p11 = sched.transitions[:, 1, 1].copy()
    var = 0.0
    eps = 1e-6

    def mean(p1, a, b):
        return runlength_distribution(TransitionSchedule.from_rates(p1, a, b)).expected

    p1 = sched.p1_initial
    step = eps if p1 + eps <= 1 else -eps
    var += ((mean(p1 + step, p01, p11) - base) / step) ** 2 * p1 * (1 - p1) / tr.trials
    for rates, row in ((p01, 0), (p11, 1)):
        for k in range(rates.size):
            cnt = tr.counts[k, row]
            if cnt == 0:
                continue
            r = rates[k]
            step = eps if r + eps <= 1 else -eps
            bumped = rates.copy()
            bumped[k] += step
            args = (bumped, p11) if row == 0 else (p01, bumped)
            grad = (mean(p1, *args) - base) / step
            var += grad**2 * r * (1 - r) / cnt
    return base, math.sqrt(var)


def test_criterion_5_delay_trend(mc_grid):
    violations = []
    for lam in LAMBDA_GRID:
        vals = [_dp_expected_stderr(mc_grid[(s, lam)].transition_estimates) for s in SIGMA0_GRID]
        for (sa, (a, sea)), (sb, (b, seb)) in zip(zip(SIGMA0_GRID, vals),
                                                  zip(SIGMA0_GRID[1:], vals[1:])):
            if b > a + 3 * math.hypot(sea, seb):
                violations.append((lam, sa, sb, round(a, 3), round(b, 3)))
    report(5, "E{N_d} from estimated chains nonincreasing in sigma0", not violations,
           f"violations {violations}")


def test_criterion_6_degenerate():
    cfg = reference_config(lambda_s=0.0, trials=10_000)
    n = cfg.n
    curve = expected_covered(cfg)
    est = estimate_metrics(cfg)
    chain = est.transition_estimates.schedule(p1_initial=curve.probabilities[0])
    dist = runlength_distribution(chain)
    analytic_ok = (curve.expected_covered == 0.0 and outage_from_chain(chain) == 1.0
                   and dist.expected == n)
    mc_ok = est.en_mean == 0.0 and est.outage_rate == 1.0 and est.nd_mean == n
    report(6, "zero sink density", analytic_ok and mc_ok,
           f"analytic (E{{N}}, outage, E{{N_d}})=({curve.expected_covered}, "
           f"{outage_from_chain(chain)}, {dist.expected}); "
           f"MC=({est.en_mean}, {est.outage_rate}, {est.nd_mean})")


PLANAR_POINTS = [(2.0, 0.1), (5.0, 0.045), (15.0, 0.1)]


def test_criterion_7_planar_bounds():
    worst_circle = worst_square = 0.0
    for i, (s, lam) in enumerate(PLANAR_POINTS):
        pcfg = PlanarConfig.isotropic(reference_config(sigma0=s, lambda_s=lam, trials=100_000,
                                                   seed=700 + i), "circle")
        for shape in ("circle", "square"):
            bits = planar_indicators(pcfg, shape)
            p = bits.mean(axis=0)
            se = np.sqrt(p * (1 - p) / bits.shape[0])
            for k in range(1, pcfg.n + 1):
                s_k = max(se[k - 1], 1e-300)
                if shape == "circle":
                    lo, hi = circle_coverage_bounds(k, pcfg)
                    excess = max(lo - p[k - 1], p[k - 1] - hi, 0.0) / s_k
                    worst_circle = max(worst_circle, excess)
                else:
                    z = abs(p[k - 1] - coverage_prob_2d_square(k, pcfg)) / s_k
                    worst_square = max(worst_square, z)
    report(7, "planar coverage", worst_circle <= 3 and worst_square <= 3,
           f"circle worst excursion outside bounds {worst_circle:.2f} stderr, "
           f"square vs product worst |z| {worst_square:.2f} (limit 3)")


def test_criterion_8_shape_properties():
    sym = 0.0
    rises = []
    for s in SIGMA0_GRID:
        cfg = reference_config(sigma0=s)
        xmax = 5 * s * math.sqrt(cfg.times[-1])
        x = np.linspace(0, xmax, 1201)
        for t in cfg.times:
            sym = max(sym, float(np.max(np.abs(sink_miss_prob(x, t, cfg)
                                               - sink_miss_prob(-x, t, cfg)))))
            for f in (sink_miss_prob, ell):
                for side in (x, -x):
                    # rounding noise on the far plateau is not a rise
                    d = np.diff(f(side, t, cfg))
                    if d.max() > 1e-13:
                        at = float(abs(side[1:][d > 1e-13][0]))
                        rises.append((s, t, f.__name__, round(at, 1)))
    window_ok = _window_mass_monotone()
    first = {}
    for s_, _, _, at in rises:
        first[s_] = min(first.get(s_, math.inf), at)
    report(8, "symmetry, unimodality, window-mass monotonicity",
           sym <= 1e-10 and not rises and window_ok,
           f"symmetry {sym:.1e} (limit 1e-10); unimodality violations {len(rises)} "
           f"first rising |x| by sigma0 {first}; window mass decreasing={window_ok}")


def _window_mass_monotone():
    from scipy import integrate as sint

    cfg = reference_config()
    ok = True
    for t in cfg.times:
        var = cfg.sigma_sink**2 * t
        y = np.linspace(0, cfg.D, 251)
        p = np.array([sint.quad(lambda u: math.exp(-(u - v) ** 2 / (2 * var)), -cfg.h, cfg.h,
                                epsabs=1e-14)[0] for v in y])
        ok &= bool(np.all(np.diff(p) <= 1e-13))
        live = (p < 0.999 * p[0]) & (p > 1e-12)
        ok &= bool(np.all(np.diff(p[live]) < 0))
    return ok
