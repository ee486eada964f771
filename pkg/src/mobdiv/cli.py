"""Command-line front end.

    mobdiv analyze    --config scenario.yaml
    mobdiv simulate   --config scenario.yaml --trials 100000 --seed 3
    mobdiv sweep      --config sweep.yaml --format json --out table.json
    mobdiv crosscheck --config scenario.yaml [--schedule chain.json]

Exit codes: 0 success, 1 invalid input, 2 a cross-check failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import warnings
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import yaml

from . import __version__, analytic, montecarlo, planar, runlength
from .model import ConfigError, ScenarioConfig, config_from_mapping, load_config, validate_config

EXIT_OK, EXIT_INVALID, EXIT_CHECK = 0, 1, 2
NA = "NA"
UNITS = ("units: distance m, time s, sigma m/sqrt(s), lambda_s nodes per m "
         "(per-1000 m figure labels divide by 1000), probabilities dimensionless")

SWEEP_COLUMNS = (
    "param", "value", "en_analytic", "en_mc", "en_mc_stderr", "outage_analytic_chain",
    "outage_mc", "outage_mc_stderr", "end_dp", "end_mc", "end_mc_stderr",
)
SWEEP_OUTPUTS = ("en", "outage", "end", "transitions", "bounds")
SWEEP_PARAMS = ("sigma0", "lambda_s")


# -- formatting -------------------------------------------------------------

def _num(value):
    if value is None:
        return None
    if isinstance(value, (bool, np.bool_)):
        return int(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        return None
    return float(f"{value:.12g}")


def _csv_cell(value):
    if isinstance(value, str):
        return value
    v = _num(value)
    if v is None:
        return NA
    return str(v) if isinstance(v, int) else f"{v:.12g}"


def render(columns: Sequence[str], rows: Sequence[dict], fmt: str, title: str) -> str:
    if fmt == "json":
        payload = {
            "table": title,
            "units": UNITS,
            "columns": list(columns),
            "rows": [{c: (r.get(c) if isinstance(r.get(c), str) else _num(r.get(c)))
                      for c in columns} for r in rows],
        }
        return json.dumps(payload, indent=2) + "\n"
    buf = io.StringIO()
    buf.write(f"# {title}; {UNITS}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_csv_cell(r.get(c)) for c in columns])
    return buf.getvalue()


def read_table(text: str) -> list[dict]:
    """Parse CSV written by :func:`render`, skipping ``#`` comment lines."""
    lines = [ln for ln in text.splitlines() if not ln.startswith("#")]
    return list(csv.DictReader(lines))


def _emit(text: str, out: str | None):
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- config handling ----------------------------------------------------------

def _with_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    changes = {}
    if getattr(args, "trials", None) is not None:
        changes["trials"] = args.trials
    if getattr(args, "seed", None) is not None:
        changes["seed"] = args.seed
    return validate_config(replace(cfg, **changes)) if changes else cfg


# -- analyze ------------------------------------------------------------------

def cmd_analyze(args) -> int:
    cfg = _with_overrides(load_config(args.config), args)
    curve = analytic.expected_covered(cfg)
    rows = [{"quantity": "coverage_prob", "index": k, "time": t, "value": p}
            for k, (t, p) in enumerate(zip(cfg.times, curve.probabilities), start=1)]
    rows.append({"quantity": "expected_covered", "index": NA, "time": NA,
                 "value": curve.expected_covered})
    if not curve.converged:
        print("warning: quadrature hit max_depth on at least one instant", file=sys.stderr)
    _emit(render(("quantity", "index", "time", "value"), rows, args.format, "analyze"), args.out)
    return EXIT_OK


# -- simulate -----------------------------------------------------------------

SIM_COLUMNS = ("quantity", "index", "time", "estimate", "stderr", "samples")


def simulation_rows(cfg: ScenarioConfig, est: montecarlo.MetricEstimates) -> list[dict]:
    rows = []
    for k, (t, p, se) in enumerate(zip(cfg.times, est.coverage, est.coverage_stderr), 1):
        rows.append(dict(quantity="coverage", index=k, time=t, estimate=p, stderr=se,
                         samples=est.trials))
    rows.append(dict(quantity="en", index=NA, time=NA, estimate=est.en_mean,
                     stderr=est.en_stderr, samples=est.trials))
    rows.append(dict(quantity="outage", index=NA, time=NA, estimate=est.outage_rate,
                     stderr=est.outage_stderr, samples=est.trials))
    rows.append(dict(quantity="nd_mean", index=NA, time=NA, estimate=est.nd_mean,
                     stderr=est.nd_stderr, samples=est.trials))
    for j, c in enumerate(est.nd_histogram):
        rows.append(dict(quantity="nd_pmf", index=j, time=NA, estimate=c / est.trials,
                         stderr=NA, samples=int(c)))
    tr = est.transition_estimates
    rows.append(dict(quantity="p1_initial", index=1, time=cfg.times[0], estimate=tr.p1_initial,
                     stderr=tr.p1_stderr, samples=tr.trials))
    se = tr.stderr
    for k in range(2, cfg.n + 1):
        for a in (0, 1):
            for b in (0, 1):
                rows.append(dict(quantity=f"p{a}{b}", index=k, time=cfg.times[k - 1],
                                 estimate=tr.probs[k - 2, a, b], stderr=se[k - 2, a],
                                 samples=int(tr.counts[k - 2, a])))
    mo, mo_se = tr.markov_outage()
    rows.append(dict(quantity="markov_outage", index=NA, time=NA, estimate=mo, stderr=mo_se,
                     samples=est.trials))
    return rows


def cmd_simulate(args) -> int:
    cfg = _with_overrides(load_config(args.config), args)
    est = montecarlo.estimate_metrics(cfg)
    _emit(render(SIM_COLUMNS, simulation_rows(cfg, est), args.format, "simulate"), args.out)
    return EXIT_OK


# -- sweep --------------------------------------------------------------------

@dataclass(frozen=True)
class SweepSpec:
    parameter: str
    values: tuple[float, ...]
    base: ScenarioConfig | planar.PlanarConfig
    outputs: tuple[str, ...] = ("en", "outage", "end")

    def __post_init__(self):
        if self.parameter not in SWEEP_PARAMS:
            raise ConfigError("parameter", f"must be one of {SWEEP_PARAMS}")
        if not self.values:
            raise ConfigError("values", "value list must be nonempty")
        for v in self.values:
            if not math.isfinite(v) or v < 0 or (v == 0 and self.parameter != "lambda_s"):
                raise ConfigError("values", f"invalid {self.parameter} value {v!r}")
        bad = set(self.outputs) - set(SWEEP_OUTPUTS)
        if bad:
            raise ConfigError("outputs", f"unknown outputs {sorted(bad)}")
        if "bounds" in self.outputs and not isinstance(self.base, planar.PlanarConfig):
            raise ConfigError("outputs", "bounds need a coverage_shape (planar base)")

    @property
    def axis_config(self) -> ScenarioConfig:
        return self.base.x if isinstance(self.base, planar.PlanarConfig) else self.base


_SWEEP_KEYS = {"parameter", "values", "outputs", "base", "base_config", "coverage_shape"}


def load_sweep(path: str | Path) -> SweepSpec:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except OSError as exc:
        raise ConfigError("<file>", f"cannot read {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise ConfigError("<file>", f"malformed sweep spec: {exc}") from None
    if not isinstance(data, dict):
        raise ConfigError("<root>", "sweep spec must be a mapping")
    unknown = sorted(set(data) - _SWEEP_KEYS)
    if unknown:
        raise ConfigError(unknown[0], "unknown sweep key")
    if ("base" in data) == ("base_config" in data):
        raise ConfigError("base", "give exactly one of base or base_config")
    if "base" in data:
        base = config_from_mapping(data["base"])
    else:
        base = load_config(path.parent / data["base_config"])
    if "coverage_shape" in data:
        try:
            base = planar.PlanarConfig.isotropic(base, data["coverage_shape"])
        except ValueError as exc:
            raise ConfigError("coverage_shape", str(exc)) from None
    for key in ("parameter", "values"):
        if key not in data:
            raise ConfigError(key, "missing required key")
    values = data["values"]
    if not isinstance(values, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise ConfigError("values", "must be a list of numbers")
    outputs = data.get("outputs", ["en", "outage", "end"])
    if not isinstance(outputs, list):
        raise ConfigError("outputs", "must be a list")
    return SweepSpec(str(data["parameter"]), tuple(float(v) for v in values), base,
                     tuple(outputs))


def _swept(spec: SweepSpec, value: float):
    change = {spec.parameter: value}
    base = spec.base
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        if isinstance(base, planar.PlanarConfig):
            x = validate_config(replace(base.x, **change))
            y = validate_config(replace(base.y, **change))
            return replace(base, x=x, y=y)
        return validate_config(replace(base, **change))


def sweep_rows(spec: SweepSpec) -> tuple[list[str], list[dict]]:
    outputs = set(spec.outputs)
    n = spec.axis_config.n
    columns = list(SWEEP_COLUMNS)
    if "transitions" in outputs:
        columns += [f"p01_{k}" for k in range(2, n + 1)]
    if "bounds" in outputs:
        columns += ["square_en_analytic", "square_en_mc", "square_en_mc_stderr",
                    "circle_en_lower", "circle_en_upper", "circle_en_mc", "circle_en_mc_stderr"]
    need_mc = bool(outputs & {"en", "outage", "end", "transitions"})

    rows = []
    for value in spec.values:
        world = _swept(spec, value)
        cfg = world.x if isinstance(world, planar.PlanarConfig) else world
        row: dict[str, Any] = {"param": spec.parameter, "value": value}
        curve = analytic.expected_covered(cfg) if outputs & {"en", "outage", "end"} else None
        est = montecarlo.estimate_metrics(cfg) if need_mc else None
        if "en" in outputs:
            row.update(en_analytic=curve.expected_covered, en_mc=est.en_mean,
                       en_mc_stderr=est.en_stderr)
        if outputs & {"outage", "end"}:
            # analytic Pr{I_1 = 1} with simulated transition rows
            chain = est.transition_estimates.schedule(p1_initial=curve.probabilities[0])
        if "outage" in outputs:
            row.update(outage_analytic_chain=runlength.outage_from_chain(chain),
                       outage_mc=est.outage_rate, outage_mc_stderr=est.outage_stderr)
        if "end" in outputs:
            row.update(end_dp=runlength.runlength_distribution(chain).expected,
                       end_mc=est.nd_mean, end_mc_stderr=est.nd_stderr)
        if "transitions" in outputs:
            tr = est.transition_estimates
            for k in range(2, n + 1):
                row[f"p01_{k}"] = tr.probs[k - 2, 0, 1]
        if "bounds" in outputs:
            sq = math.fsum(planar.coverage_prob_2d_square(k, world) for k in range(1, n + 1))
            lo_hi = [planar.circle_coverage_bounds(k, world) for k in range(1, n + 1)]
            sq_mc = planar.simulate_2d(replace(world, coverage_shape="square"))
            ci_mc = planar.simulate_2d(replace(world, coverage_shape="circle"))
            row.update(square_en_analytic=sq, square_en_mc=sq_mc.en_mean,
                       square_en_mc_stderr=sq_mc.en_stderr,
                       circle_en_lower=math.fsum(b[0] for b in lo_hi),
                       circle_en_upper=math.fsum(b[1] for b in lo_hi),
                       circle_en_mc=ci_mc.en_mean, circle_en_mc_stderr=ci_mc.en_stderr)
        rows.append(row)
    return columns, rows


def cmd_sweep(args) -> int:
    spec = load_sweep(args.config)
    if args.trials is not None or args.seed is not None:
        base = spec.base
        if isinstance(base, planar.PlanarConfig):
            base = replace(base, x=_with_overrides(base.x, args), y=_with_overrides(base.y, args))
        else:
            base = _with_overrides(base, args)
        spec = replace(spec, base=base)
    columns, rows = sweep_rows(spec)
    _emit(render(columns, rows, args.format, f"sweep over {spec.parameter}"), args.out)
    return EXIT_OK


# -- crosscheck -----------------------------------------------------------------

CHECK_COLUMNS = ("check", "status", "statistic", "tolerance", "detail")
Z_TOL = 3.0


def _check(name, ok, statistic, tolerance, detail="", gating=True):
    status = ("pass" if ok else "fail") if gating else "info"
    return dict(check=name, status=status, statistic=statistic, tolerance=tolerance,
                detail=detail)


def _z(diff, se):
    if se == 0 or not math.isfinite(se):
        return 0.0 if diff == 0 else math.inf
    return abs(diff) / se


def random_schedule(n: int, seed: int) -> runlength.TransitionSchedule:
    rng = np.random.default_rng(seed)
    return runlength.TransitionSchedule.from_rates(rng.uniform(), rng.uniform(size=n - 1),
                                                   rng.uniform(size=n - 1))


def _dp_checks(name: str, sched: runlength.TransitionSchedule) -> list[dict]:
    out = []
    dp = runlength.runlength_distribution(sched)
    if sched.n <= runlength.MAX_BRUTE_N:
        bf = runlength.brute_force_runlength(sched)
        err = float(np.max(np.abs(dp.pmf - bf.pmf)))
        out.append(_check(f"dp_vs_bruteforce[{name}]", err <= 1e-12, err, 1e-12,
                          f"n={sched.n}"))
    beta = np.array([runlength.beta_pmf(sched, sched.n, k) for k in range(sched.n + 1)])
    err = float(np.max(np.abs(beta - runlength.beta_marginal(sched))))
    out.append(_check(f"beta_pmf_vs_dp[{name}]", err <= 1e-10, err, 1e-10, f"n={sched.n}"))
    err = abs(runlength.outage_from_chain(sched) - dp.pmf[-1])
    out.append(_check(f"outage_product_vs_dp[{name}]", err <= 1e-12, err, 1e-12))
    return out


def load_schedule(path: str | Path) -> dict:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError("<schedule>", f"cannot read schedule: {exc}") from None
    if not isinstance(data, dict) or set(data) != {"p1_initial", "transitions"}:
        raise ConfigError("<schedule>", "expected keys p1_initial and transitions")
    return data


def crosscheck_rows(cfg: ScenarioConfig, schedule: dict | None = None) -> list[dict]:
    rows = []
    curve = analytic.expected_covered(cfg)
    est = montecarlo.estimate_metrics(cfg)

    z = _z(est.en_mean - curve.expected_covered, est.en_stderr)
    rows.append(_check("analytic_vs_mc[en]", z <= Z_TOL, z, Z_TOL,
                       f"analytic={curve.expected_covered:.6g} mc={est.en_mean:.6g}"))
    for k, (p, m, se) in enumerate(zip(curve.probabilities, est.coverage,
                                       est.coverage_stderr), 1):
        z = _z(m - p, se)
        rows.append(_check(f"analytic_vs_mc[coverage_k{k}]", z <= Z_TOL, z, Z_TOL,
                           f"analytic={p:.6g} mc={m:.6g}"))

    rows += _dp_checks("mc_schedule", est.transition_estimates.schedule())
    rows += _dp_checks("synthetic_n12", random_schedule(12, cfg.seed))

    tr = est.transition_estimates
    mo, mo_se = tr.markov_outage()
    z = _z(est.outage_rate - mo, math.hypot(est.outage_stderr, mo_se))
    rows.append(_check("markov_outage_product", True, z, Z_TOL,
                       f"direct={est.outage_rate:.6g} product={mo:.6g} (reported, not gating)",
                       gating=False))

    pc = planar.PlanarConfig.isotropic(cfg, "circle")
    circle = planar.simulate_2d(pc)
    square = planar.simulate_2d(replace(pc, coverage_shape="square"))
    worst_lo = worst_hi = worst_sq = 0.0
    for k in range(1, cfg.n + 1):
        lo, hi = planar.circle_coverage_bounds(k, pc)
        c, c_se = circle.coverage[k - 1], circle.coverage_stderr[k - 1]
        worst_lo = max(worst_lo, _z(min(c - lo, 0.0), c_se))
        worst_hi = max(worst_hi, _z(max(c - hi, 0.0), c_se))
        s, s_se = square.coverage[k - 1], square.coverage_stderr[k - 1]
        worst_sq = max(worst_sq, _z(s - hi, s_se))
    rows.append(_check("circle_within_bounds", max(worst_lo, worst_hi) <= Z_TOL,
                       max(worst_lo, worst_hi), Z_TOL, "worst per-instant excursion in stderr"))
    rows.append(_check("square_vs_product", worst_sq <= Z_TOL, worst_sq, Z_TOL,
                       "worst per-instant |z|"))

    if schedule is not None:
        try:
            sched = runlength.TransitionSchedule(float(schedule["p1_initial"]),
                                                 np.asarray(schedule["transitions"], float))
        except (runlength.ScheduleError, ValueError, TypeError) as exc:
            rows.append(_check("schedule_validation", False, NA, runlength.ROW_TOL, str(exc)))
        else:
            rows.append(_check("schedule_validation", True, 0.0, runlength.ROW_TOL))
            rows += _dp_checks("user_schedule", sched)
    return rows


def cmd_crosscheck(args) -> int:
    cfg = _with_overrides(load_config(args.config), args)
    schedule = load_schedule(args.schedule) if args.schedule else None
    rows = crosscheck_rows(cfg, schedule)
    _emit(render(CHECK_COLUMNS, rows, args.format, "crosscheck"), args.out)
    failed = [r["check"] for r in rows if r["status"] == "fail"]
    if failed:
        print("failed checks: " + ", ".join(failed), file=sys.stderr)
        return EXIT_CHECK
    return EXIT_OK


# -- entry point --------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mobdiv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    commands = {
        "analyze": (cmd_analyze, "per-instant coverage probabilities and E{N} by quadrature"),
        "simulate": (cmd_simulate, "Monte Carlo estimates and the empirical transition chain"),
        "sweep": (cmd_sweep, "sweep sigma0 or lambda_s; analytic and Monte Carlo columns"),
        "crosscheck": (cmd_crosscheck, "run every analytic/simulation oracle pair"),
    }
    for name, (func, help_text) in commands.items():
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True,
                       help="sweep spec for 'sweep', scenario file otherwise")
        p.add_argument("--out", help="output file (default stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--trials", type=int, help="override the config trial count")
        p.add_argument("--seed", type=int, help="override the config seed")
        if name == "crosscheck":
            p.add_argument("--schedule", help="JSON chain {p1_initial, transitions} to verify")
        p.set_defaults(func=func)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    seen = set()

    def show(message, category, *_args, **_kw):
        text = f"warning: {message}"
        if text not in seen:
            seen.add(text)
            print(text, file=sys.stderr)

    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = show
        try:
            return args.func(args)
        except ConfigError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
