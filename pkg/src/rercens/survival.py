"""Censored samples and Kaplan-Meier estimation of the censoring survival curve."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class CensoredSample:
    """Observed triples (X_i, Y_i, delta_i).

    xs: (n, d) covariates; ys: observed times min(T_i, C_i), strictly positive;
    deltas: 1 when the lifetime was observed, 0 when censored.
    """

    xs: np.ndarray
    ys: np.ndarray
    deltas: np.ndarray

    def __post_init__(self):
        xs = np.atleast_2d(np.asarray(self.xs, dtype=float))
        ys = np.asarray(self.ys, dtype=float)
        deltas = np.asarray(self.deltas, dtype=int)
        if xs.shape[0] != ys.shape[0] and xs.shape == (1, ys.shape[0]):
            xs = xs.T  # accept a flat covariate vector for d=1
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        object.__setattr__(self, "deltas", deltas)
        n = ys.shape[0]
        if n < 1:
            raise ValueError("sample must contain at least one observation")
        if xs.shape[0] != n or deltas.shape[0] != n:
            raise ValueError("xs, ys and deltas must have matching lengths")
        if not np.isfinite(ys).all() or (ys <= 0).any():
            raise ValueError("observed times must be finite and strictly positive")
        if not np.isin(deltas, (0, 1)).all():
            raise ValueError("deltas must be 0/1 indicators")

    @property
    def n(self) -> int:
        return self.ys.shape[0]

    @property
    def dim(self) -> int:
        return self.xs.shape[1]

    def without(self, i: int) -> "CensoredSample":
        """Copy of the sample with row i removed (leave-one-out)."""
        keep = np.arange(self.n) != i
        return CensoredSample(self.xs[keep], self.ys[keep], self.deltas[keep])


@dataclass(frozen=True)
class StepSurvival:
    """Right-continuous, non-increasing step function with values in [0, 1]."""

    jump_times: np.ndarray
    values_after: np.ndarray
    value_before_first: float = 1.0

    def __post_init__(self):
        jt = np.asarray(self.jump_times, dtype=float)
        va = np.asarray(self.values_after, dtype=float)
        object.__setattr__(self, "jump_times", jt)
        object.__setattr__(self, "values_after", va)
        if jt.shape != va.shape or jt.ndim != 1:
            raise ValueError("jump_times and values_after must be equal-length vectors")
        if jt.size and (np.diff(jt) <= 0).any():
            raise ValueError("jump_times must be strictly increasing")
        levels = np.concatenate(([self.value_before_first], va))
        if (levels < -1e-12).any() or (levels > 1 + 1e-12).any():
            raise ValueError("survival values must lie in [0, 1]")
        if (np.diff(levels) > 1e-12).any():
            raise ValueError("survival curve must be non-increasing")

    @classmethod
    def constant(cls, value: float = 1.0) -> "StepSurvival":
        return cls(np.empty(0), np.empty(0), value)

    def at(self, t) -> np.ndarray:
        """Right-continuous evaluation, vectorized over t."""
        t = np.asarray(t, dtype=float)
        if not np.isfinite(t).all():
            raise ValueError("evaluation point must be finite")
        idx = np.searchsorted(self.jump_times, t, side="right") - 1
        levels = np.concatenate(([self.value_before_first], self.values_after))
        return levels[idx + 1]

    def at_left(self, t) -> np.ndarray:
        """Left-limit evaluation, vectorized over t."""
        t = np.asarray(t, dtype=float)
        if not np.isfinite(t).all():
            raise ValueError("evaluation point must be finite")
        idx = np.searchsorted(self.jump_times, t, side="left") - 1
        levels = np.concatenate(([self.value_before_first], self.values_after))
        return levels[idx + 1]

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("t_jump,value_after\n")
        for t, v in zip(self.jump_times, self.values_after):
            buf.write(f"{t:.17g},{v:.17g}\n")
        return buf.getvalue()


def survival_at(curve: StepSurvival, t: float) -> float:
    return float(curve.at(t))


def survival_at_left(curve: StepSurvival, t: float) -> float:
    return float(curve.at_left(t))


def _km_order(ys: np.ndarray, deltas: np.ndarray) -> np.ndarray:
    # ties: uncensored before censored at equal times, then original index
    return np.lexsort((np.arange(ys.size), 1 - deltas, ys))


def km_censoring_survival(sample: CensoredSample) -> StepSurvival:
    """Product-limit estimator of the censoring survival function.

    The running product multiplies a factor (1 - (1 - delta_(i)) / (n - i + 1))
    per sorted observation, so only censored observations move the curve; the
    curve is clamped to 0 from the largest observation onward.
    """
    n = sample.n
    order = _km_order(sample.ys, sample.deltas)
    ys = sample.ys[order]
    deltas = sample.deltas[order]
    factors = 1.0 - (1.0 - deltas) / (n - np.arange(n, dtype=float))
    prod = np.cumprod(factors)

    jumps = []
    values = []
    prev = 1.0
    # value after passing a distinct time = product up to its last occurrence
    for k in range(n):
        if k + 1 < n and ys[k + 1] == ys[k]:
            continue
        v = prod[k]
        if v != prev:
            jumps.append(ys[k])
            values.append(v)
            prev = v
    # terminal clamp at the largest observation
    top = ys[-1]
    if jumps and jumps[-1] == top:
        values[-1] = 0.0
    else:
        jumps.append(top)
        values.append(0.0)
    return StepSurvival(np.asarray(jumps), np.asarray(values))
