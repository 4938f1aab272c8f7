"""Relative-error and classical kernel regression estimators under censoring.

All three estimators share the inverse-probability-of-censoring weight
w_i = delta_i / Gbar(Y_i).  When the estimated censoring curve is exactly 0 at
an uncensored observation (only possible at the largest observed time, where
the product-limit curve is clamped), the left limit is substituted; if that is
also 0 the term is dropped.
"""

from __future__ import annotations

import enum
import io
from dataclasses import dataclass, field

import numpy as np

from .errors import EstimationUndefinedError
from .kernels import KernelSpec, cross_matrix
from .survival import CensoredSample, StepSurvival


class EstimatorKind(enum.Enum):
    RER_hat = "m_rer"
    RER_pseudo = "m_pseudo"
    CR = "m_cr"


@dataclass
class EvalGrid:
    """Paired (x, truth, estimates) records over an evaluation grid."""

    points: np.ndarray  # (m, d)
    estimates: dict  # EstimatorKind -> (m,) array, NaN where undefined
    h_used: float
    n_used: int
    truth: np.ndarray | None = None
    undefined_counts: dict = field(default_factory=dict)

    def __post_init__(self):
        self.points = np.atleast_2d(np.asarray(self.points, dtype=float))
        m = self.points.shape[0]
        if self.truth is not None:
            self.truth = np.asarray(self.truth, dtype=float)
            if self.truth.shape[0] != m:
                raise ValueError("truth length must match number of grid points")
        for kind, vals in self.estimates.items():
            vals = np.asarray(vals, dtype=float)
            if vals.shape[0] != m:
                raise ValueError(f"estimate vector for {kind} has wrong length")
            self.estimates[kind] = vals
            self.undefined_counts.setdefault(kind, int(np.isnan(vals).sum()))
        if not (self.h_used > 0):
            raise ValueError("h_used must be positive")

    def to_csv(self) -> str:
        d = self.points.shape[1]
        cols = ["x"] if d == 1 else [f"x_{j + 1}" for j in range(d)]
        if self.truth is not None:
            cols.append("m_true")
        kinds = [k for k in EstimatorKind if k in self.estimates]
        cols += [k.value for k in kinds]
        buf = io.StringIO()
        buf.write(",".join(cols) + "\n")
        for i in range(self.points.shape[0]):
            row = [f"{v:.17g}" for v in self.points[i]]
            if self.truth is not None:
                row.append(f"{self.truth[i]:.17g}")
            for k in kinds:
                v = self.estimates[k][i]
                row.append("" if np.isnan(v) else f"{v:.17g}")
            buf.write(",".join(row) + "\n")
        return buf.getvalue()


def ipcw_weights(sample: CensoredSample, gbar: StepSurvival) -> np.ndarray:
    """delta_i / Gbar(Y_i) with the left-limit floor at the clamped top; 0 for
    censored observations and for terms that have to be dropped."""
    g = gbar.at(sample.ys)
    floor_needed = (g == 0) & (sample.deltas == 1)
    if floor_needed.any():
        g = np.where(floor_needed, gbar.at_left(sample.ys), g)
    w = np.zeros(sample.n)
    keep = (sample.deltas == 1) & (g > 0)
    w[keep] = 1.0 / g[keep]
    return w


def _as_points(x, dim: int) -> np.ndarray:
    pts = np.atleast_1d(np.asarray(x, dtype=float))
    if pts.ndim == 1:
        if pts.shape[0] != dim:
            raise ValueError(f"evaluation point must have length {dim}")
        pts = pts.reshape(1, dim)
    return pts


def _rer_vector(sample, w, spec, h, points):
    K = cross_matrix(spec, points, sample.xs, h)
    num = K @ (w / sample.ys)
    den = K @ (w / sample.ys**2)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = num / den
    vals[den == 0] = np.nan
    return vals


def _cr_vector(sample, w, spec, h, points):
    K = cross_matrix(spec, points, sample.xs, h)
    num = K @ (w * sample.ys)
    den = K.sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        vals = num / den
    vals[den == 0] = np.nan
    return vals


def rer_estimate(sample: CensoredSample, gbar: StepSurvival, spec: KernelSpec,
                 h: float, x) -> float:
    """Computable relative-error regression estimate at x.

    Ratio of the IPCW-weighted kernel sums of Y^-1 over Y^-2; the marginal
    density denominators cancel and are never formed.
    """
    pts = _as_points(x, spec.dim)
    w = ipcw_weights(sample, gbar)
    val = _rer_vector(sample, w, spec, h, pts)[0]
    if np.isnan(val):
        raise EstimationUndefinedError(x)
    return float(val)


def rer_pseudo_estimate(sample: CensoredSample, gbar_true: StepSurvival,
                        spec: KernelSpec, h: float, x) -> float:
    """Pseudo-estimator: same ratio with the known censoring survival curve."""
    return rer_estimate(sample, gbar_true, spec, h, x)


def cr_estimate(sample: CensoredSample, gbar: StepSurvival, spec: KernelSpec,
                h: float, x) -> float:
    """Classical comparator: IPCW-weighted kernel mean of Y over all kernels."""
    pts = _as_points(x, spec.dim)
    w = ipcw_weights(sample, gbar)
    val = _cr_vector(sample, w, spec, h, pts)[0]
    if np.isnan(val):
        raise EstimationUndefinedError(x)
    return float(val)


def density_estimate(sample: CensoredSample, spec: KernelSpec, h: float, x) -> float:
    """Kernel estimate of the covariate marginal density (diagnostics only)."""
    pts = _as_points(x, spec.dim)
    K = cross_matrix(spec, pts, sample.xs, h)
    return float(K.sum() / (sample.n * h**spec.dim))


def evaluate_on_grid(sample: CensoredSample, gbar: StepSurvival, spec: KernelSpec,
                     h: float, points, kinds, truth=None,
                     gbar_true: StepSurvival | None = None) -> EvalGrid:
    """Vectorized evaluation of the requested estimators over a grid.

    Undefined points are recorded as NaN, not raised.  The pseudo estimator
    uses gbar_true when supplied, otherwise it falls back to gbar.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.shape[1] != spec.dim:
        pts = pts.reshape(-1, spec.dim)
    if pts.shape[0] == 0:
        raise ValueError("evaluation grid must be nonempty")
    kinds = list(kinds)
    w = ipcw_weights(sample, gbar)
    estimates = {}
    for kind in kinds:
        if kind is EstimatorKind.RER_hat:
            estimates[kind] = _rer_vector(sample, w, spec, h, pts)
        elif kind is EstimatorKind.RER_pseudo:
            wt = ipcw_weights(sample, gbar_true if gbar_true is not None else gbar)
            estimates[kind] = _rer_vector(sample, wt, spec, h, pts)
        elif kind is EstimatorKind.CR:
            estimates[kind] = _cr_vector(sample, w, spec, h, pts)
        else:
            raise ValueError(f"unknown estimator kind {kind!r}")
    return EvalGrid(points=pts, estimates=estimates, h_used=float(h),
                    n_used=sample.n, truth=truth)
