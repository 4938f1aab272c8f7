"""Kernel families and scaled multivariate (product-kernel) evaluation."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

_GAUSS_NORM = 1.0 / math.sqrt(2.0 * math.pi)


class KernelFamily(enum.Enum):
    GAUSSIAN = "gaussian"
    EPANECHNIKOV = "epanechnikov"


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family together with the covariate dimension it smooths."""

    family: KernelFamily = KernelFamily.GAUSSIAN
    dim: int = 1

    def __post_init__(self):
        if not isinstance(self.dim, (int, np.integer)) or self.dim < 1:
            raise ValueError(f"dim must be a positive integer, got {self.dim!r}")


def profile(spec: KernelSpec, u: np.ndarray) -> np.ndarray:
    """Vectorized univariate kernel density values for an array of points."""
    u = np.asarray(u, dtype=float)
    if spec.family is KernelFamily.GAUSSIAN:
        return _GAUSS_NORM * np.exp(-0.5 * u * u)
    # Epanechnikov: 3/4 (1 - u^2) on [-1, 1]
    return 0.75 * np.clip(1.0 - u * u, 0.0, None)


def eval_univariate(spec: KernelSpec, u: float) -> float:
    """Univariate kernel density value K(u)."""
    if not math.isfinite(u):
        raise ValueError(f"kernel argument must be finite, got {u!r}")
    return float(profile(spec, np.float64(u)))


def eval_scaled(spec: KernelSpec, x, xi, h: float) -> float:
    """Product kernel over coordinates of (x - xi) / h.

    No 1/h^d normalization is applied; the regression ratios cancel it and
    density estimation applies it explicitly.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    if x.shape != (spec.dim,) or xi.shape != (spec.dim,):
        raise ValueError(
            f"expected vectors of length {spec.dim}, got shapes {x.shape} and {xi.shape}"
        )
    if not (h > 0):
        raise ValueError(f"bandwidth must be positive, got {h!r}")
    if not (np.isfinite(x).all() and np.isfinite(xi).all()):
        raise ValueError("kernel arguments must be finite")
    return float(np.prod(profile(spec, (x - xi) / h)))


def cross_matrix(spec: KernelSpec, points: np.ndarray, xs: np.ndarray, h: float) -> np.ndarray:
    """(m, n) matrix of product-kernel values between grid points and sample rows.

    points: (m, d) evaluation points; xs: (n, d) sample covariates.
    """
    points = np.asarray(points, dtype=float)
    xs = np.asarray(xs, dtype=float)
    if points.ndim != 2 or xs.ndim != 2 or points.shape[1] != spec.dim or xs.shape[1] != spec.dim:
        raise ValueError("points and xs must be 2-d with spec.dim columns")
    if not (h > 0):
        raise ValueError(f"bandwidth must be positive, got {h!r}")
    if spec.family is KernelFamily.GAUSSIAN:
        # product of Gaussian factors = Gaussian of the squared Euclidean norm
        sq = np.zeros((points.shape[0], xs.shape[0]))
        for j in range(spec.dim):
            d = (points[:, j, None] - xs[None, :, j]) / h
            sq += d * d
        return _GAUSS_NORM ** spec.dim * np.exp(-0.5 * sq)
    out = np.ones((points.shape[0], xs.shape[0]))
    for j in range(spec.dim):
        out *= profile(spec, (points[:, j, None] - xs[None, :, j]) / h)
    return out
