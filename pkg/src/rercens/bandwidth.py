"""Leave-one-out cross-validation bandwidth selection over a finite grid."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EstimationUndefinedError, SelectionFailedError
from .kernels import KernelSpec, cross_matrix
from .regression import (EstimatorKind, cr_estimate, ipcw_weights,
                         rer_estimate)
from .survival import CensoredSample, StepSurvival


@dataclass(frozen=True)
class BandwidthGrid:
    lo: float
    hi: float
    step: float

    def __post_init__(self):
        if not (0 < self.lo <= self.hi):
            raise ValueError("require 0 < lo <= hi")
        if not (self.step > 0):
            raise ValueError("step must be positive")

    def values(self) -> np.ndarray:
        n = int(np.floor((self.hi - self.lo) / self.step + 1e-9)) + 1
        return self.lo + self.step * np.arange(n)


def loo_estimate(sample: CensoredSample, gbar: StepSurvival, spec: KernelSpec,
                 h: float, i: int, kind: EstimatorKind) -> float:
    """Estimator refitted on the sample without row i, evaluated at X_i.

    The censoring curve is not refitted; the supplied gbar is reused.
    """
    if sample.n < 2:
        raise ValueError("leave-one-out requires n >= 2")
    reduced = sample.without(i)
    x = sample.xs[i]
    if kind is EstimatorKind.CR:
        return cr_estimate(reduced, gbar, spec, h, x)
    return rer_estimate(reduced, gbar, spec, h, x)


def _loo_matrix(sample, w, spec, h, kind):
    """Leave-one-out fits at every X_i for one h, NaN where undefined."""
    K = cross_matrix(spec, sample.xs, sample.xs, h)
    np.fill_diagonal(K, 0.0)
    if kind is EstimatorKind.CR:
        num = K @ (w * sample.ys)
        den = K.sum(axis=1)
    else:
        num = K @ (w / sample.ys)
        den = K @ (w / sample.ys**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = num / den
    vals[den == 0] = np.nan
    return vals


def cv_select(sample: CensoredSample, gbar: StepSurvival, spec: KernelSpec,
              grid: BandwidthGrid, kind: EstimatorKind = EstimatorKind.RER_hat,
              weighted: bool = False):
    """Minimize CV(h) = (1/(n-1)) sum_i (Y_i - m_{-i,h}(X_i))^2 over the grid.

    Observations whose leave-one-out fit is undefined are skipped and the
    divisor reduced accordingly.  Ties break to the smallest h.  When
    `weighted` is set, each term is multiplied by the IPCW weight
    delta_i / Gbar(Y_i) (censoring-bias correction; off by default).

    Returns (h_opt, cv_values, n_skipped_per_h).
    """
    n = sample.n
    if n < 2:
        raise ValueError("cross-validation requires n >= 2")
    hs = grid.values()
    if hs.size == 0:
        raise SelectionFailedError("empty bandwidth grid")
    w = ipcw_weights(sample, gbar)
    term_w = w if weighted else np.ones(n)
    cv_values = np.full(hs.size, np.nan)
    skipped = np.zeros(hs.size, dtype=int)
    for j, h in enumerate(hs):
        fits = _loo_matrix(sample, w, spec, h, kind)
        ok = ~np.isnan(fits)
        skipped[j] = n - int(ok.sum())
        divisor = n - 1 - skipped[j]
        if divisor <= 0 or not ok.any():
            continue
        resid = (sample.ys[ok] - fits[ok]) ** 2 * term_w[ok]
        cv_values[j] = resid.sum() / divisor
    if np.isnan(cv_values).all():
        raise SelectionFailedError("CV criterion undefined at every grid point")
    best = int(np.nanargmin(cv_values))
    return float(hs[best]), cv_values, skipped
