"""End-to-end experiment orchestration: single runs, Monte Carlo replication,
the convergence-rate study, error metrics, and the ratio-of-means oracle."""

from __future__ import annotations

import time
from dataclasses import dataclass, field, replace

import numpy as np

from .bandwidth import BandwidthGrid, cv_select
from .errors import (EstimationUndefinedError, OracleUnreliableError,
                     SlopeUndefinedError)
from .kernels import KernelSpec
from .regression import EstimatorKind, EvalGrid, evaluate_on_grid
from .simgen import (Model, ScenarioConfig, derive_seed, gen_process,
                     true_censoring_survival, true_regression)
from .survival import km_censoring_survival


@dataclass(frozen=True)
class GridSpec:
    lo: float = 1.0
    hi: float = 4.0
    step: float = 0.05

    def points(self) -> np.ndarray:
        n = int(np.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return self.lo + self.step * np.arange(n)


DEFAULT_GRID = GridSpec()
DEFAULT_BANDWIDTHS = BandwidthGrid(0.01, 2.0, 0.01)


@dataclass
class ExperimentResult:
    config: ScenarioConfig
    grid: EvalGrid
    h_opt: float
    sup_error: dict
    iae: dict
    realized_cp: float
    wall_time_ms: int


@dataclass
class RateStudyResult:
    ns: list
    median_sup_errors: list
    slope: float


def sup_error(grid: EvalGrid, kind: EstimatorKind) -> float:
    """Max |estimate - truth| over defined grid points."""
    diffs = _abs_errors(grid, kind)
    return float(np.max(diffs[~np.isnan(diffs)]))


def iae(grid: EvalGrid, kind: EstimatorKind) -> float:
    """Trapezoid integral of |estimate - truth| over defined grid points."""
    diffs = _abs_errors(grid, kind)
    ok = ~np.isnan(diffs)
    xs = grid.points[:, 0]
    if ok.sum() == 1:
        return 0.0
    return float(np.trapezoid(diffs[ok], xs[ok]))


def _abs_errors(grid, kind):
    if grid.truth is None:
        raise ValueError("grid carries no truth values")
    if kind not in grid.estimates:
        raise ValueError(f"kind {kind} not present in grid")
    diffs = np.abs(grid.estimates[kind] - grid.truth)
    if np.isnan(diffs).all():
        raise EstimationUndefinedError(None, "all grid points undefined")
    return diffs


def run_experiment(config: ScenarioConfig,
                   grid_spec: GridSpec = DEFAULT_GRID,
                   bandwidth_grid: BandwidthGrid = DEFAULT_BANDWIDTHS,
                   kinds=(EstimatorKind.RER_hat, EstimatorKind.CR),
                   spec: KernelSpec = KernelSpec(),
                   weighted_cv: bool = False,
                   fixed_h: float | None = None) -> ExperimentResult:
    """Generate, fit the censoring curve, select h by CV, evaluate, score.

    Deterministic given the config seed.  `fixed_h` bypasses CV (used by the
    rate study's deterministic bandwidth rule).
    """
    t0 = time.perf_counter()
    kinds = list(kinds)
    data = gen_process(config)
    sample = data.to_sample()
    gbar = km_censoring_survival(sample)
    if fixed_h is None:
        h_opt, _, _ = cv_select(sample, gbar, spec, bandwidth_grid,
                                kind=EstimatorKind.RER_hat, weighted=weighted_cv)
    else:
        h_opt = float(fixed_h)
    points = grid_spec.points().reshape(-1, 1)
    truth = true_regression(config.model, config.c, config.rho, points[:, 0])
    gbar_true = (true_censoring_survival(config.censor_a)
                 if EstimatorKind.RER_pseudo in kinds else None)
    grid = evaluate_on_grid(sample, gbar, spec, h_opt, points, kinds,
                            truth=truth, gbar_true=gbar_true)
    sup = {k: sup_error(grid, k) for k in kinds}
    integ = {k: iae(grid, k) for k in kinds}
    ms = int(round((time.perf_counter() - t0) * 1000))
    return ExperimentResult(config=config, grid=grid, h_opt=h_opt,
                            sup_error=sup, iae=integ,
                            realized_cp=data.realized_cp, wall_time_ms=ms)


def mc_replicate(config: ScenarioConfig, R: int,
                 grid_spec: GridSpec = DEFAULT_GRID,
                 bandwidth_grid: BandwidthGrid = DEFAULT_BANDWIDTHS,
                 kinds=(EstimatorKind.RER_hat, EstimatorKind.CR),
                 spec: KernelSpec = KernelSpec(),
                 weighted_cv: bool = False,
                 fixed_h: float | None = None,
                 max_failure_fraction: float = 0.2,
                 jobs: int = 1):
    """R independent replicates with derived seeds, summarized per kind.

    Returns (summary dict, list of per-replicate ExperimentResult).  Aborts
    when more than `max_failure_fraction` of replicates fail.  Replicates are
    independent; `jobs` > 1 runs them in a process pool with a deterministic,
    order-preserving reduction.
    """
    if R < 1:
        raise ValueError("R must be positive")
    kinds = list(kinds)
    tasks = [(replace(config, seed=derive_seed(config.seed, r)), grid_spec,
              bandwidth_grid, kinds, spec, weighted_cv, fixed_h)
             for r in range(R)]
    results = []
    failures = []
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_replicate_worker, tasks))
    else:
        outcomes = [_replicate_worker(t) for t in tasks]
    for r, (ok, payload) in enumerate(outcomes):
        if ok:
            results.append(payload)
        else:
            failures.append((r, payload))
    if len(failures) > max_failure_fraction * R:
        raise RuntimeError(
            f"{len(failures)}/{R} replicates failed; first: {failures[0]!r}")
    summary = {
        "R": R,
        "n_failed": len(failures),
        "mean_realized_cp": float(np.mean([r.realized_cp for r in results])),
        "per_kind": {},
    }
    for k in kinds:
        sups = np.array([r.sup_error[k] for r in results])
        iaes = np.array([r.iae[k] for r in results])
        summary["per_kind"][k.name] = {
            "median_sup_error": float(np.median(sups)),
            "iqr_sup_error": float(np.subtract(*np.percentile(sups, [75, 25]))),
            "median_iae": float(np.median(iaes)),
            "iqr_iae": float(np.subtract(*np.percentile(iaes, [75, 25]))),
        }
    return summary, results


def _replicate_worker(task):
    cfg, grid_spec, bandwidth_grid, kinds, spec, weighted_cv, fixed_h = task
    try:
        return True, run_experiment(cfg, grid_spec, bandwidth_grid, kinds,
                                    spec, weighted_cv, fixed_h)
    except Exception as exc:  # noqa: BLE001 - per-replicate failure is data
        return False, repr(exc)


def rate_study(base_config: ScenarioConfig, ns, R: int,
               grid_spec: GridSpec = DEFAULT_GRID,
               bandwidth_rule=lambda n: n ** (-1.0 / 3.0),
               kinds=(EstimatorKind.RER_hat,),
               spec: KernelSpec = KernelSpec(),
               use_cv: bool = False,
               bandwidth_grid: BandwidthGrid = DEFAULT_BANDWIDTHS) -> RateStudyResult:
    """Median sup error per sample size and the log-log least-squares slope.

    Uses the deterministic bandwidth rule by default so the measured slope
    reflects the estimator rather than selector noise.
    """
    ns = [int(n) for n in ns]
    if len(ns) < 3 or sorted(set(ns)) != ns:
        raise ValueError("ns must be at least 3 strictly increasing sizes")
    medians = []
    for n in ns:
        cfg_n = replace(base_config, n=n)
        fixed_h = None if use_cv else float(bandwidth_rule(n))
        summary, _ = mc_replicate(cfg_n, R, grid_spec, bandwidth_grid, kinds,
                                  spec, fixed_h=fixed_h)
        medians.append(summary["per_kind"][kinds[0].name]["median_sup_error"])
    if len(set(medians)) == 1:
        raise SlopeUndefinedError("all medians equal; slope undefined")
    slope = float(np.polyfit(np.log(ns), np.log(medians), 1)[0])
    return RateStudyResult(ns=ns, median_sup_errors=medians, slope=slope)


def port_oracle(c: float, rho: float, x: float, mc_n: int, seed: int = 0,
                noise_sd: float | None = None, guard_factor: float = 5.0) -> float:
    """Monte Carlo ratio of means E[T^-1]/E[T^-2] with T = c + rho*x + sd*eps.

    Draws with T <= 0 are rejected and counted; more than 1% rejections raise
    OracleUnreliableError.  Inputs with |c + rho*x| < guard_factor * sd are
    rejected up front (inverse-moment blow-up region).
    """
    sd = float(np.sqrt(1.0 - rho * rho)) if noise_sd is None else float(noise_sd)
    mu = c + rho * x
    if abs(mu) < guard_factor * sd:
        raise ValueError(
            f"|c + rho*x| = {abs(mu):.4g} < {guard_factor} * noise sd = "
            f"{guard_factor * sd:.4g}; inverse moments unreliable")
    if sd == 0.0:
        return float(mu)
    rng = np.random.default_rng(seed)
    t = mu + sd * rng.standard_normal(mc_n)
    rejected = int((t <= 0).sum())
    if rejected > 0.01 * mc_n:
        raise OracleUnreliableError(
            f"{rejected}/{mc_n} draws nonpositive; scenario violates positivity")
    t = t[t > 0]
    return float(np.mean(1.0 / t) / np.mean(1.0 / t**2))
