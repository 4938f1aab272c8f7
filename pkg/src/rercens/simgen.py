"""Reproducible generation of the simulation scenarios.

Covariates follow the AR(1) recursion X_i = c + rho X_{i-1} + sqrt(1-rho^2) e_i
with X_0 ~ N(1, 0.1) (0.1 read as a variance).  Lifetimes are the next
covariate step (linear model) or a deterministic transform of X_i; censoring
times are N(3 + a, 1) draws resampled until positive.
"""

from __future__ import annotations

import enum
import io
import math
from dataclasses import dataclass, replace
from statistics import NormalDist

import numpy as np

from .errors import CalibrationFailedError, GenerationRejectedError
from .survival import CensoredSample, StepSurvival

_STD_NORMAL = NormalDist()


class Model(enum.Enum):
    Linear = "Linear"
    Cosine = "Cosine"
    Exponential = "Exponential"
    Inverse = "Inverse"


@dataclass(frozen=True)
class OutlierSpec:
    count: int
    factor: float
    target: str = "lifetime"  # or "observed"

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("outlier count must be positive")
        if not (self.factor > 0):
            raise ValueError("outlier factor must be positive")
        if self.target not in ("lifetime", "observed"):
            raise ValueError(f"unknown outlier target {self.target!r}")


@dataclass(frozen=True)
class ContaminationSpec:
    beta: float
    lambda_: float

    def __post_init__(self):
        if not (0 <= self.beta < 1):
            raise ValueError("beta must lie in [0, 1)")
        if not (self.lambda_ > 0):
            raise ValueError("lambda must be positive")


@dataclass(frozen=True)
class ScenarioConfig:
    model: Model
    c: float
    rho: float
    n: int
    censor_a: float
    seed: int
    outliers: OutlierSpec | None = None
    contamination: ContaminationSpec | None = None

    def __post_init__(self):
        if not (0 < self.rho < 1):
            raise ValueError("rho must lie strictly between 0 and 1")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.outliers is not None and self.outliers.count > self.n:
            raise ValueError("outlier count cannot exceed n")
        if self.seed < 0:
            raise ValueError("seed must be a nonnegative integer")


@dataclass
class GeneratedData:
    xs: np.ndarray       # covariate path X_1..X_n
    ts: np.ndarray       # latent lifetimes
    cs: np.ndarray       # censoring times
    ys: np.ndarray       # observed min(T, C)
    deltas: np.ndarray   # 1{T <= C}
    realized_cp: float

    def to_sample(self) -> CensoredSample:
        return CensoredSample(self.xs.reshape(-1, 1), self.ys, self.deltas)

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("i,x,t,c,y,delta\n")
        for i in range(self.xs.size):
            buf.write(f"{i},{self.xs[i]:.17g},{self.ts[i]:.17g},{self.cs[i]:.17g},"
                      f"{self.ys[i]:.17g},{self.deltas[i]}\n")
        return buf.getvalue()


def _innovations(rng, n_steps, contamination, lambda_is_sd):
    z = rng.standard_normal(n_steps)
    if contamination is None or contamination.beta == 0:
        return z
    u = rng.random(n_steps)
    scale = contamination.lambda_ if lambda_is_sd else math.sqrt(contamination.lambda_)
    return np.where(u < contamination.beta, scale * z, z)


def _covariate_path(rng, c, rho, n_steps, contamination, *,
                    lambda_is_sd=True, x0_var=0.1, burn_in=0):
    """AR(1) path P_0..P_{n_steps} (burn-in discarded from the front)."""
    total = n_steps + burn_in
    eps = _innovations(rng, total, contamination, lambda_is_sd)
    sd = math.sqrt(1.0 - rho * rho)
    path = np.empty(total + 1)
    path[0] = 1.0 + math.sqrt(x0_var) * rng.standard_normal()
    for i in range(1, total + 1):
        path[i] = c + rho * path[i - 1] + sd * eps[i - 1]
    return path[burn_in:]


def _lifetimes(model, path, rho, n):
    """(covariates, lifetimes) from a path P_0..P_{n or n+1}."""
    xs = path[1:n + 1]
    if model is Model.Linear:
        return xs, path[2:n + 2].copy()
    if model is Model.Cosine:
        return xs, 1.0 + np.cos(0.5 * math.pi * xs)
    if model is Model.Exponential:
        return xs, np.exp(rho * rho * xs)
    return xs, 1.0 / xs  # Inverse


def _draw_censoring(rng, n, censor_a):
    c = rng.normal(3.0 + censor_a, 1.0, n)
    while True:
        bad = c <= 0
        if not bad.any():
            return c
        c[bad] = rng.normal(3.0 + censor_a, 1.0, int(bad.sum()))


def gen_process(config: ScenarioConfig, *, lambda_is_sd=True, x0_var=0.1,
                burn_in=0) -> GeneratedData:
    """Generate one scenario: covariate path, lifetimes, censoring, outliers.

    Deterministic given config.seed.  Raises GenerationRejectedError when a
    lifetime fails strict positivity (linear/inverse models can produce it).
    """
    rng = np.random.default_rng(config.seed)
    n_steps = config.n + 1 if config.model is Model.Linear else config.n
    path = _covariate_path(rng, config.c, config.rho, n_steps,
                           config.contamination, lambda_is_sd=lambda_is_sd,
                           x0_var=x0_var, burn_in=burn_in)
    xs, ts = _lifetimes(config.model, path, config.rho, config.n)
    nonpos = np.flatnonzero(ts <= 0)
    if nonpos.size:
        raise GenerationRejectedError(int(nonpos[0]), float(ts[nonpos[0]]))
    cs = _draw_censoring(rng, config.n, config.censor_a)
    ys = np.minimum(ts, cs)
    deltas = (ts <= cs).astype(int)
    data = GeneratedData(xs=xs.copy(), ts=ts, cs=cs, ys=ys, deltas=deltas,
                         realized_cp=float(1.0 - deltas.mean()))
    if config.outliers is not None:
        data = inject_outliers(data, config.outliers.count, config.outliers.factor,
                               derive_seed(config.seed, 1),
                               target=config.outliers.target)
    return data


def inject_outliers(data: GeneratedData, count: int, factor: float, seed: int,
                    target: str = "lifetime") -> GeneratedData:
    """Multiply `count` randomly chosen observations by `factor`.

    target="lifetime": latent T_i is scaled, then Y and delta are re-derived
    from the unchanged censoring times.  target="observed": the recorded time
    at the index is scaled (both T_i and C_i, so Y_i scales and delta_i is
    unchanged), modeling a gross measurement error in the observed value.
    """
    n = data.xs.size
    if count > n:
        raise ValueError("outlier count cannot exceed sample size")
    idx = np.random.default_rng(seed).choice(n, size=count, replace=False)
    ts = data.ts.copy()
    cs = data.cs.copy()
    ts[idx] *= factor
    if target == "observed":
        cs[idx] *= factor
    elif target != "lifetime":
        raise ValueError(f"unknown outlier target {target!r}")
    ys = np.minimum(ts, cs)
    deltas = (ts <= cs).astype(int)
    return GeneratedData(xs=data.xs.copy(), ts=ts, cs=cs, ys=ys, deltas=deltas,
                         realized_cp=float(1.0 - deltas.mean()))


def true_regression(model: Model, c: float, rho: float, x):
    """Theoretical target curve for plotting and error measurement."""
    x = np.asarray(x, dtype=float)
    if model is Model.Linear:
        base = c + rho * x
        if np.any(base == 0):
            raise ValueError("true regression has a pole at c + rho*x = 0")
        return base + (1.0 - rho * rho) / base
    if model is Model.Cosine:
        return 1.0 + np.cos(0.5 * math.pi * x)
    if model is Model.Exponential:
        return np.exp(rho * rho * x)
    if np.any(x == 0):
        raise ValueError("inverse model has a pole at x = 0")
    return 1.0 / x


def _truncated_normal_ppf(u: np.ndarray, mean: float) -> np.ndarray:
    """Quantiles of N(mean, 1) conditioned on being positive."""
    p0 = _STD_NORMAL.cdf(-mean)
    ps = np.clip(p0 + np.asarray(u) * (1.0 - p0),
                 np.nextafter(0.0, 1.0), np.nextafter(1.0, 0.0))
    return np.array([mean + _STD_NORMAL.inv_cdf(p) for p in ps])


def true_censoring_survival(censor_a: float, step: float = 0.01) -> StepSurvival:
    """Known censoring survival curve, tabulated as a fine step function.

    C ~ N(3 + a, 1) truncated to positive values, matching the generator.
    """
    mean = 3.0 + censor_a
    upper = max(mean + 8.0, 8.0)
    ts = np.arange(0.0, upper, step)
    p0 = _STD_NORMAL.cdf(-mean)
    surv = np.array([(1.0 - _STD_NORMAL.cdf(t - mean)) / (1.0 - p0) for t in ts])
    surv = np.clip(surv, 0.0, 1.0)
    return StepSurvival(ts, surv)


def mc_censoring_rate(model: Model, c: float, rho: float, censor_a: float,
                      mc_n: int, seed: int, contamination=None) -> float:
    """Monte Carlo estimate of P(T > C), i.e. the expected censoring fraction.

    Nonpositive lifetime draws are dropped (positivity truncation) rather than
    rejected wholesale, so large mc_n is usable even for scenarios where a
    full-path generation would almost surely be rejected.
    """
    rng = np.random.default_rng(seed)
    n_steps = mc_n + 1 if model is Model.Linear else mc_n
    path = _covariate_path(rng, c, rho, n_steps, contamination)
    _, ts = _lifetimes(model, path, rho, mc_n)
    ts = ts[ts > 0]
    cs = _draw_censoring(rng, ts.size, censor_a)
    return float(np.mean(ts > cs))


def calibrate_censoring(model: Model, c: float, rho: float, target_cp: float,
                        mc_n: int, seed: int = 0, contamination=None,
                        bracket=(-20.0, 20.0), tol: float = 0.02) -> float:
    """Find the censoring shift a achieving a target censoring percentage.

    Monotone bisection on a; the realized censoring rate is non-increasing in
    a.  Common random numbers (one lifetime sample, one uniform sample mapped
    through the truncated-normal quantile) keep the objective monotone.
    """
    if not (0 <= target_cp < 1):
        raise ValueError("target_cp must lie in [0, 1)")
    rng = np.random.default_rng(seed)
    n_steps = mc_n + 1 if model is Model.Linear else mc_n
    path = _covariate_path(rng, c, rho, n_steps, contamination)
    _, ts = _lifetimes(model, path, rho, mc_n)
    ts = ts[ts > 0]
    u = rng.random(ts.size)

    def realized(a):
        cs = _truncated_normal_ppf(u, 3.0 + a)
        return float(np.mean(ts > cs))

    lo, hi = bracket
    cp_lo, cp_hi = realized(lo), realized(hi)
    if not (cp_hi - tol <= target_cp <= cp_lo + tol):
        raise CalibrationFailedError(target_cp, cp_lo, cp_hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if realized(mid) > target_cp:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-9:
            break
    a = 0.5 * (lo + hi)
    if abs(realized(a) - target_cp) > tol:
        raise CalibrationFailedError(target_cp, cp_lo, cp_hi)
    return a


def derive_seed(seed: int, index: int) -> int:
    """Deterministic child seed for replicate `index` of a base seed."""
    ss = np.random.SeedSequence(entropy=seed, spawn_key=(index,))
    return int(ss.generate_state(1, np.uint64)[0])
