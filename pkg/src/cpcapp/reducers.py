"""The three reduction methods: PCA, contrastive PCA, and its sweep-free form.

All three produce a :class:`FilterBank` whose columns project samples onto a
K-dimensional discriminative (or maximum-variance) subspace. The sweep-free
method solves one background-whitened eigenproblem instead of scanning a
contrast parameter, so it costs a single eigendecomposition regardless of
grid size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ArgumentError, ShapeError
from .linalg import diagonal_load, q_eig, sym_eig
from .stats import CovariancePair, DataMatrix, center, second_moment

METHODS = ("pca", "cpca", "cpca++")

# Default contrast grid: alpha = 0 plus 40 log-spaced points spanning six decades.
ALPHA_GRID_MIN = 1e-3
ALPHA_GRID_MAX = 1e3
ALPHA_GRID_POINTS = 40


def default_alpha_grid() -> np.ndarray:
    """{0} followed by 40 log-spaced contrast values in [1e-3, 1e3]."""
    return np.concatenate(
        [[0.0], np.logspace(np.log10(ALPHA_GRID_MIN), np.log10(ALPHA_GRID_MAX), ALPHA_GRID_POINTS)]
    )


@dataclass(frozen=True, eq=False)
class FilterBank:
    """A fitted M x K projection with the statistics needed to apply it."""

    method: str
    f: np.ndarray                # (M, K), unit-norm columns
    train_mean_bg: np.ndarray    # (M,)
    train_mean_fg: np.ndarray    # (M,)
    eigenvalues: np.ndarray      # (K,), descending
    loading: float
    alpha: float | None = None   # contrast parameter, cpca only

    def __post_init__(self):
        if self.f.ndim != 2:
            raise ShapeError("filter matrix must be 2-D")
        m, k = self.f.shape
        if k > m:
            raise ShapeError(f"more filters ({k}) than features ({m})")
        if self.method not in METHODS:
            raise ArgumentError(f"unknown method {self.method!r}")
        if (self.method == "cpca") != (self.alpha is not None):
            raise ArgumentError("alpha must be present exactly when method is 'cpca'")
        if self.eigenvalues.shape != (k,):
            raise ShapeError("one eigenvalue per filter column is required")
        if np.any(np.diff(self.eigenvalues) > 1e-12 * (1.0 + np.abs(self.eigenvalues[:-1]))):
            raise ArgumentError("eigenvalues must be descending")
        norms = np.linalg.norm(self.f, axis=0)
        if np.max(np.abs(norms - 1.0)) > 1e-9:
            raise ArgumentError("filter columns must have unit norm")

    @property
    def features(self) -> int:
        return self.f.shape[0]

    @property
    def k(self) -> int:
        return self.f.shape[1]


@dataclass(frozen=True, eq=False)
class Projection:
    """Reduced-dimension samples, one column per input sample."""

    y: np.ndarray  # (K, N)


def _check_k(k: int, m: int) -> None:
    if not 1 <= k <= m:
        raise ArgumentError(f"k must be in [1, {m}], got {k}")


def fit_pca(data: DataMatrix, k: int) -> FilterBank:
    """Top-k eigenvectors of the sample covariance of ``data``."""
    _check_k(k, data.features)
    if data.samples < 2:
        raise ArgumentError("PCA needs at least two samples")
    centered = center(data)
    res = sym_eig(second_moment(centered))
    return FilterBank(
        method="pca",
        f=res.vectors[:, :k],
        train_mean_bg=centered.mean,
        train_mean_fg=centered.mean,
        eigenvalues=res.values[:k],
        loading=0.0,
    )


def fit_cpca(pair: CovariancePair, k: int, alpha: float) -> FilterBank:
    """Top-k filters of the contrast matrix ``r_f - alpha * r_b``.

    Selection is by largest algebraic (signed) eigenvalue. The stored
    background matrix is used as-is: loading only shifts the contrast
    spectrum uniformly and cannot change the chosen filters.
    """
    _check_k(k, pair.features)
    if alpha < 0:
        raise ArgumentError(f"contrast parameter must be non-negative, got {alpha}")
    res = sym_eig(pair.r_f - alpha * pair.r_b)
    return FilterBank(
        method="cpca",
        f=res.vectors[:, :k],
        train_mean_bg=pair.mean_b,
        train_mean_fg=pair.mean_f,
        eigenvalues=res.values[:k],
        loading=pair.loading,
        alpha=float(alpha),
    )


def sweep_cpca(pair: CovariancePair, k: int, alphas) -> list[FilterBank]:
    """One contrastive fit per grid value, in the given order."""
    alphas = list(alphas)
    if not alphas:
        raise ArgumentError("alpha grid must not be empty")
    return [fit_cpca(pair, k, alpha) for alpha in alphas]


def fit_cpcapp(pair: CovariancePair, k: int) -> FilterBank:
    """Sweep-free contrastive fit: top-k eigenvectors of the whitened product.

    Costs exactly one symmetric eigendecomposition; the relative scale of the
    two covariances cancels inside the product, which is what removes the
    contrast parameter.
    """
    _check_k(k, pair.features)
    r_b = pair.r_b if pair.loading == 0.0 else diagonal_load(pair.r_b, pair.loading)
    res = q_eig(r_b, pair.r_f, k)
    return FilterBank(
        method="cpca++",
        f=res.vectors,
        train_mean_bg=pair.mean_b,
        train_mean_fg=pair.mean_f,
        eigenvalues=res.values,
        loading=pair.loading,
    )


def transform(bank: FilterBank, data: DataMatrix, use_train_mean: bool = False) -> Projection:
    """Project samples through the bank: ``y = F^T (data - mean)``.

    By default each batch is centered with its own mean; pass
    ``use_train_mean=True`` to reuse the foreground mean stored at fit time
    (useful when a test batch is too small to estimate its own).
    """
    if data.features != bank.features:
        raise ShapeError(
            f"data has {data.features} features but bank expects {bank.features}"
        )
    if data.centered:
        values = data.values
    elif use_train_mean:
        values = data.values - bank.train_mean_fg[:, None]
    else:
        values = center(data).values
    return Projection(y=bank.f.T @ values)
