"""Gram assembly, kernel ridge regression, kernel PCA, and empirical feature maps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

import numpy as np
import scipy.linalg

SINGULAR_CONDITION = 1e14
DEFAULT_RIDGE = 1e-10


@dataclass
class GramMatrix:
    """Matrix of pairwise kernel evaluations with its provenance."""

    values: np.ndarray
    row_points: Any = None
    col_points: Any = None
    kernel: Any = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


def _matrix(gram_or_array) -> np.ndarray:
    if isinstance(gram_or_array, GramMatrix):
        return np.asarray(gram_or_array.values, dtype=float)
    return np.asarray(gram_or_array, dtype=float)


def _evaluator(kernel):
    return kernel.eval if hasattr(kernel, "eval") else kernel


def gram(kernel, xs, ys=None) -> GramMatrix:
    """Pairwise kernel evaluations k(xs[i], ys[j]).

    With ``ys`` omitted, returns the Gram matrix of ``xs`` against itself,
    filling the lower triangle by symmetry of the kernel. Point collections
    may be coordinate arrays or arbitrary objects (e.g. graphs); vectorized
    kernels are used when the points are numeric arrays.
    """
    symmetric = ys is None
    targets = xs if symmetric else ys
    if hasattr(kernel, "pairwise"):
        try:
            xa = np.asarray(xs, dtype=float)
            ya = xa if symmetric else np.asarray(targets, dtype=float)
        except (TypeError, ValueError):
            xa = None
        if xa is not None and xa.dtype == float:
            values = np.asarray(kernel.pairwise(xa, ya), dtype=float)
            return GramMatrix(values, row_points=xs, col_points=targets, kernel=kernel)
    k = _evaluator(kernel)
    m = len(xs)
    n = len(targets)
    values = np.empty((m, n))
    if symmetric:
        for i in range(m):
            for j in range(i, n):
                values[i, j] = k(xs[i], targets[j])
                values[j, i] = values[i, j]
    else:
        for i in range(m):
            for j in range(n):
                values[i, j] = k(xs[i], targets[j])
    return GramMatrix(values, row_points=xs, col_points=targets, kernel=kernel)


@dataclass
class RegressionModel:
    """Fitted kernel ridge regressor: coefficients over the training points."""

    coefficients: np.ndarray
    training_points: Any
    kernel: Any
    ridge: float


def krr_fit(kernel_matrix, y, ridge: float = 0.0) -> RegressionModel:
    """Solve (K + ridge I) theta = y by a symmetric linear solve.

    With ridge = 0 this is plain interpolation; a numerically singular
    unregularized system (condition estimate above 1e14) is rejected.
    """
    K = _matrix(kernel_matrix)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"training kernel matrix must be square, got {K.shape}")
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != K.shape[0]:
        raise ValueError(f"got {y.shape[0]} targets for {K.shape[0]} training points")
    if ridge < 0:
        raise ValueError(f"ridge parameter must be non-negative, got {ridge}")
    if ridge == 0.0 and np.linalg.cond(K) > SINGULAR_CONDITION:
        raise ValueError(
            "training system is numerically singular; use a positive ridge parameter"
        )
    system = K + ridge * np.eye(K.shape[0]) if ridge else K
    theta = scipy.linalg.solve(system, y, assume_a="sym")
    points = kernel_matrix.row_points if isinstance(kernel_matrix, GramMatrix) else None
    kern = kernel_matrix.kernel if isinstance(kernel_matrix, GramMatrix) else None
    return RegressionModel(theta, points, kern, float(ridge))


def krr_predict(model: RegressionModel, queries) -> np.ndarray:
    """Predictions theta' K_{train,query} at the given query points."""
    if model.kernel is None or model.training_points is None:
        raise ValueError(
            "model carries no kernel provenance; fit it from a GramMatrix built by gram()"
        )
    cross = gram(model.kernel, model.training_points, queries).values
    return model.coefficients @ cross


def kpca(kernel_matrix, n_components: int) -> np.ndarray:
    """Kernel principal component scores from a symmetric Gram matrix.

    The matrix is double-centered, eigendecomposed, and the leading
    eigenvector scores are scaled by the square roots of their eigenvalues.
    Components are ordered by descending eigenvalue and each column's sign is
    fixed so its largest-magnitude entry is positive.
    """
    K = _matrix(kernel_matrix)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"kernel matrix must be square, got {K.shape}")
    m = K.shape[0]
    if not 0 < n_components <= m:
        raise ValueError(f"cannot extract {n_components} components from {m} samples")
    if not np.allclose(K, K.T, atol=1e-8 * max(1.0, np.abs(K).max())):
        raise ValueError("kernel matrix must be symmetric")
    K = 0.5 * (K + K.T)
    row_means = K.mean(axis=0)
    centered = K - row_means[None, :] - row_means[:, None] + row_means.mean()
    eigenvalues, eigenvectors = scipy.linalg.eigh(centered)
    order = np.argsort(eigenvalues)[::-1][:n_components]
    scores = eigenvectors[:, order] * np.sqrt(np.maximum(eigenvalues[order], 0.0))
    for col in range(scores.shape[1]):
        peak = np.argmax(np.abs(scores[:, col]))
        if scores[peak, col] < 0:
            scores[:, col] = -scores[:, col]
    return scores


@dataclass
class MercerFeatures:
    """Empirical kernel eigenfunctions, extendable to out-of-sample points.

    Feature j at a point x is ``coefficients[:, j] @ k(sample_points, x)``;
    the stored coefficients bake in the normalization that gives each feature
    unit sup-norm on the reference grid.
    """

    eigenvalues: np.ndarray
    coefficients: np.ndarray
    sample_points: np.ndarray
    kernel: Any
    grid: np.ndarray
    grid_values: np.ndarray

    def evaluate(self, j: int, x) -> float | np.ndarray:
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        cross = gram(self.kernel, self.sample_points, np.atleast_2d(x)).values
        out = self.coefficients[:, j] @ cross
        return float(out[0]) if single else out


def mercer_features(kernel, sample_points, grid, n_features: int) -> MercerFeatures:
    """Leading empirical eigenfunctions of a kernel, evaluated on a grid.

    Eigendecomposes the scaled Gram matrix G/m and extends the top
    eigenvectors to arbitrary points through the kernel expansion. Features
    are normalized to unit sup-norm on the grid, with the sign fixed so the
    largest-magnitude grid value is positive.
    """
    sample_points = np.atleast_2d(np.asarray(sample_points, dtype=float))
    grid = np.atleast_2d(np.asarray(grid, dtype=float))
    m = sample_points.shape[0]
    if not 0 < n_features <= m:
        raise ValueError(f"cannot extract {n_features} features from {m} samples")
    G = gram(kernel, sample_points).values
    eigenvalues, eigenvectors = scipy.linalg.eigh(G / m)
    order = np.argsort(eigenvalues)[::-1]
    eigenvalues = eigenvalues[order]
    eigenvectors = eigenvectors[:, order]
    floor = max(eigenvalues[0], 0.0) * 1e-12
    if eigenvalues[n_features - 1] <= floor:
        raise ValueError(
            f"Gram matrix rank is below the requested {n_features} features"
        )
    lam = eigenvalues[:n_features]
    coefficients = eigenvectors[:, :n_features] / (m * lam)[None, :]
    cross = gram(kernel, sample_points, grid).values
    values = coefficients.T @ cross
    sup = np.abs(values).max(axis=1)
    if np.any(sup == 0.0):
        raise ValueError("a requested feature vanishes identically on the grid")
    peaks = np.argmax(np.abs(values), axis=1)
    signs = np.sign(values[np.arange(n_features), peaks])
    scale = signs / sup
    return MercerFeatures(
        eigenvalues=lam,
        coefficients=coefficients * scale[None, :],
        sample_points=sample_points,
        kernel=kernel,
        grid=grid,
        grid_values=values * scale[:, None],
    )


def augment_antisymmetric(xs, ys, transposition) -> tuple[np.ndarray, np.ndarray]:
    """Double a data set with swapped inputs and negated labels.

    Appends (pi(x), -y) for every pair, where pi exchanges the two coordinate
    indices in ``transposition``. Row order is original pairs first, then the
    reflected pairs in the same order.
    """
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    ys = np.asarray(ys, dtype=float).ravel()
    if xs.shape[0] != ys.shape[0]:
        raise ValueError(f"got {ys.shape[0]} labels for {xs.shape[0]} points")
    i, j = transposition
    if i == j or not (0 <= i < xs.shape[1] and 0 <= j < xs.shape[1]):
        raise ValueError(f"invalid transposition {transposition!r}")
    swapped = xs.copy()
    swapped[:, [i, j]] = xs[:, [j, i]]
    return np.vstack([xs, swapped]), np.concatenate([ys, -ys])
