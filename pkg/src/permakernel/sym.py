"""Symmetrized kernels, exact matrix permanents, and the determinant-quotient surrogate.

The symmetrized kernel drops the permutation signs, so the determinant trick
no longer applies; for entrywise radial bases the fast form is a matrix
permanent instead, computed exactly by inclusion-exclusion in O(2^n n).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .antisym import NAIVE_CAP, _det, _entry_stack, entry_matrix, permuted_stack
from .kernels import KernelSpec

STRATEGIES = ("naive_double_sum", "naive_single_sum", "permanent")
PERMANENT_FAMILIES = ("gaussian", "laplacian", "radial")
PERMANENT_CAP = 20

# Below this magnitude the quotient kernel's denominator determinant is
# treated as degenerate.
DENOMINATOR_FLOOR = 1e-300


def permanent(a) -> float:
    """Exact permanent via inclusion-exclusion over column subsets.

    Subsets are visited in Gray-code order so each step updates the running
    row sums by a single column, giving O(2^n n) total work. Capped at
    n <= PERMANENT_CAP to guard the exponential cost.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"permanent requires a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > PERMANENT_CAP:
        raise ValueError(f"permanent computation is capped at n <= {PERMANENT_CAP}, got {n}")
    if n == 0:
        return 1.0
    if n == 1:
        return float(a[0, 0])
    if n == 2:
        return float(a[0, 0] * a[1, 1] + a[0, 1] * a[1, 0])
    row_sums = np.zeros(n)
    total = 0.0
    gray = 0
    for k in range(1, 1 << n):
        new_gray = k ^ (k >> 1)
        bit = new_gray ^ gray
        j = bit.bit_length() - 1
        if new_gray & bit:
            row_sums += a[:, j]
        else:
            row_sums -= a[:, j]
        gray = new_gray
        sign = -1.0 if (new_gray.bit_count() & 1) else 1.0
        total += sign * row_sums.prod()
    if n & 1:
        total = -total
    return float(total)


@dataclass(frozen=True)
class SymKernel:
    """A symmetrized base kernel with a chosen evaluation strategy."""

    base: KernelSpec
    strategy: str = "permanent"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "permanent" and self.base.family not in PERMANENT_FAMILIES:
            raise ValueError(
                f"the permanent strategy requires an entrywise radial base, "
                f"not {self.base.family!r}"
            )

    def eval(self, x, xp) -> float:
        return sym_eval(self, x, xp)

    def __call__(self, x, xp) -> float:
        return sym_eval(self, x, xp)

    def pairwise(self, xs, ys) -> np.ndarray:
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        if self.strategy == "permanent" and xs.shape[1] == 2 * self.base.dy:
            e = _entry_stack(self.base, xs, ys)
            return (e[..., 0, 0] * e[..., 1, 1] + e[..., 0, 1] * e[..., 1, 0]) / 2.0
        return np.array([[sym_eval(self, x, y) for y in ys] for x in xs])

    def to_config(self) -> dict:
        cfg = self.base.to_config()
        cfg["symmetrize"] = True
        cfg["strategy"] = self.strategy
        return cfg


def sym_eval(kernel: SymKernel, x, xp) -> float:
    """Symmetrized kernel value under the kernel's configured strategy."""
    base = kernel.base
    x, xp = base._pair(x, xp)
    dx = x.size // base.dy
    if kernel.strategy == "permanent":
        return permanent(entry_matrix(base, x, xp)) / math.factorial(dx)
    if dx > NAIVE_CAP:
        raise ValueError(
            f"naive permutation sums are capped at {NAIVE_CAP} blocks, got {dx}"
        )
    stack_x, _ = permuted_stack(x, base.dy)
    if kernel.strategy == "naive_single_sum":
        column = base.pairwise(stack_x, xp[None, :])[:, 0]
        return float(column.sum()) / math.factorial(dx)
    stack_y, _ = permuted_stack(xp, base.dy)
    values = base.pairwise(stack_x, stack_y)
    return float(values.sum()) / math.factorial(dx) ** 2


def _gauss_entries(sigma: float, x: np.ndarray, xp: np.ndarray) -> np.ndarray:
    diff = x[:, None] - xp[None, :]
    return np.exp(-diff * diff / (2.0 * sigma**2))


def quotient_sym_eval(sigma1: float, sigma2: float, x, xp) -> float:
    """Symmetric surrogate kernel: ratio of two antisymmetric gaussian determinants.

    The permutation signs cancel between numerator and denominator, leaving a
    permutation-symmetric value that approximates a symmetric gaussian of
    bandwidth sigma with 1/sigma^2 = 1/sigma1^2 - 1/sigma2^2 away from
    coordinate coincidences. For d = 2 with x1 = x2 exactly, the removable
    singularity is filled with its closed-form limit
    (sigma2^2 / sigma1^2) * k1(x, xp) / k2(x, xp).
    """
    if not 0 < sigma1 < sigma2:
        raise ValueError(
            f"bandwidths must satisfy 0 < sigma1 < sigma2, got {sigma1} and {sigma2}"
        )
    x = np.asarray(x, dtype=float).ravel()
    xp = np.asarray(xp, dtype=float).ravel()
    if x.shape != xp.shape:
        raise ValueError(f"argument dimensions differ: {x.size} vs {xp.size}")
    if x.size == 2 and x[0] == x[1]:
        sq = float(np.sum((x - xp) ** 2))
        ratio = math.exp(-sq / (2.0 * sigma1**2)) / math.exp(-sq / (2.0 * sigma2**2))
        return sigma2**2 / sigma1**2 * ratio
    numerator = _det(_gauss_entries(sigma1, x, xp))
    denominator = _det(_gauss_entries(sigma2, x, xp))
    if abs(denominator) < DENOMINATOR_FLOOR:
        raise ZeroDivisionError(
            "denominator determinant of the quotient kernel is degenerate"
        )
    return numerator / denominator


@dataclass(frozen=True)
class QuotientGaussianKernel:
    """Callable wrapper around quotient_sym_eval for Gram assembly and configs."""

    sigma1: float
    sigma2: float

    def eval(self, x, xp) -> float:
        return quotient_sym_eval(self.sigma1, self.sigma2, x, xp)

    def __call__(self, x, xp) -> float:
        return self.eval(x, xp)

    def to_config(self) -> dict:
        return {"family": "quotient", "sigma1": self.sigma1, "sigma2": self.sigma2}
