"""Antisymmetrized kernels.

Three interchangeable evaluation strategies are provided: the defining double
sum over permutation pairs, the single sum valid for permutation-invariant
base kernels, and a determinant form for base kernels whose values factor
into entrywise radial terms (gaussian, laplacian, radial). The determinant
route costs O(dx^3) instead of O(dx!) and is the default.

Coordinates are permuted in blocks of length ``base.dy``; ``dx`` below is the
number of blocks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .combinatorics import enumerate_permutations
from .kernels import KernelSpec

STRATEGIES = ("naive_double_sum", "naive_single_sum", "slater_determinant")
DETERMINANT_FAMILIES = ("gaussian", "laplacian", "radial")

# Naive permutation sums are refused above this block count: families with a
# determinant form must not fall back to enumeration at sizes where the
# factorial cost explodes.
NAIVE_CAP = 8


def blocks(x, dy: int) -> np.ndarray:
    """View a flat coordinate vector as a (dx, dy) stack of particle blocks."""
    x = np.asarray(x, dtype=float).ravel()
    if x.size % dy:
        raise ValueError(f"dimension {x.size} is not divisible by block length {dy}")
    return x.reshape(-1, dy)


def permuted_stack(x, dy: int) -> tuple[np.ndarray, np.ndarray]:
    """All block permutations of x as rows, along with the matching sign vector."""
    b = blocks(x, dy)
    perms = list(enumerate_permutations(len(b)))
    stack = np.stack([b[list(p.image)].ravel() for p in perms])
    signs = np.array([p.sign for p in perms], dtype=float)
    return stack, signs


def _det(a: np.ndarray) -> float:
    """Determinant with closed forms for tiny matrices; LU with partial pivoting above."""
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0])
    if n == 2:
        return float(a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0])
    if n == 3:
        return float(
            a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[2, 1])
            - a[0, 1] * (a[1, 0] * a[2, 2] - a[1, 2] * a[2, 0])
            + a[0, 2] * (a[1, 0] * a[2, 1] - a[1, 1] * a[2, 0])
        )
    return float(np.linalg.det(a))


def entry_matrix(base: KernelSpec, x, xp) -> np.ndarray:
    """(dx, dx) matrix whose (i, j) entry applies the base profile to blocks (x_i, xp_j)."""
    xb = blocks(x, base.dy)
    yb = blocks(xp, base.dy)
    if xb.shape != yb.shape:
        raise ValueError(f"argument dimensions differ: {xb.size} vs {yb.size}")
    diff = xb[:, None, :] - yb[None, :, :]
    if base.family == "gaussian":
        return np.exp(-np.sum(diff * diff, axis=-1) / (2.0 * base.sigma**2))
    if base.family == "laplacian":
        return np.exp(-np.abs(diff).sum(axis=-1) / base.sigma)
    if base.family == "radial":
        return np.asarray(base.profile(np.sqrt(np.sum(diff * diff, axis=-1))), dtype=float)
    raise ValueError(f"no determinant representation for the {base.family} family")


def _entry_stack(base: KernelSpec, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Entry matrices for every point pair at once, shape (m, n, dx, dx)."""
    xb = xs.reshape(xs.shape[0], -1, base.dy)
    yb = ys.reshape(ys.shape[0], -1, base.dy)
    diff = xb[:, None, :, None, :] - yb[None, :, None, :, :]
    if base.family == "gaussian":
        return np.exp(-np.sum(diff * diff, axis=-1) / (2.0 * base.sigma**2))
    if base.family == "laplacian":
        return np.exp(-np.abs(diff).sum(axis=-1) / base.sigma)
    return np.asarray(base.profile(np.sqrt(np.sum(diff * diff, axis=-1))), dtype=float)


@dataclass(frozen=True)
class AntisymKernel:
    """An antisymmetrized base kernel with a chosen evaluation strategy."""

    base: KernelSpec
    strategy: str = "slater_determinant"

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}")
        if self.strategy == "slater_determinant" and self.base.family not in DETERMINANT_FAMILIES:
            raise ValueError(
                f"the determinant strategy requires an entrywise radial base, "
                f"not {self.base.family!r}"
            )

    def eval(self, x, xp) -> float:
        return antisym_eval(self, x, xp)

    def __call__(self, x, xp) -> float:
        return antisym_eval(self, x, xp)

    def _require_gaussian_flat(self):
        if self.base.family != "gaussian" or self.base.dy != 1:
            raise ValueError(
                "antisymmetric derivatives are implemented for flat gaussian bases only"
            )

    def eval_d1(self, x, xp, l: int) -> float:
        self._require_gaussian_flat()
        return antisym_gauss_partial(self.base.sigma, x, xp, l, order=1)

    def eval_d2(self, x, xp, l: int) -> float:
        self._require_gaussian_flat()
        return antisym_gauss_partial(self.base.sigma, x, xp, l, order=2)

    def pairwise(self, xs, ys) -> np.ndarray:
        """Matrix of antisymmetric kernel values over two point stacks."""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        if self.strategy == "slater_determinant":
            entries = _entry_stack(self.base, xs, ys)
            dx = entries.shape[-1]
            return np.linalg.det(entries) / math.factorial(dx)
        return np.array([[antisym_eval(self, x, y) for y in ys] for x in xs])

    def d2_sum_gram(self, xs, ys) -> np.ndarray:
        """Matrix of sum_l d2/dx_l2 k_a(xs[i], ys[j]) via derivative determinants."""
        self._require_gaussian_flat()
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        sigma = self.base.sigma
        d = xs.shape[1]
        diff = xs[:, None, :, None] - ys[None, :, None, :]
        base = np.exp(-diff * diff / (2.0 * sigma**2))
        second = (diff * diff / sigma**4 - 1.0 / sigma**2) * base
        total = np.zeros((xs.shape[0], ys.shape[0]))
        for l in range(d):
            work = base.copy()
            work[:, :, l, :] = second[:, :, l, :]
            total += np.linalg.det(work)
        return total / math.factorial(d)

    def to_config(self) -> dict:
        cfg = self.base.to_config()
        cfg["antisymmetrize"] = True
        cfg["strategy"] = self.strategy
        return cfg


def antisym_eval(kernel: AntisymKernel, x, xp) -> float:
    """Antisymmetrized kernel value under the kernel's configured strategy.

    All strategies agree (to floating-point tolerance) wherever more than one
    applies: the double sum is the definition, the single sum uses permutation
    invariance of the base, and the determinant applies Leibniz' formula to
    entrywise radial bases.
    """
    base = kernel.base
    x, xp = base._pair(x, xp)
    dx = x.size // base.dy
    if kernel.strategy == "slater_determinant":
        return _det(entry_matrix(base, x, xp)) / math.factorial(dx)
    if dx > NAIVE_CAP:
        raise ValueError(
            f"naive permutation sums are capped at {NAIVE_CAP} blocks, got {dx}"
        )
    stack_x, signs_x = permuted_stack(x, base.dy)
    if kernel.strategy == "naive_single_sum":
        column = base.pairwise(stack_x, xp[None, :])[:, 0]
        return float(signs_x @ column) / math.factorial(dx)
    stack_y, signs_y = permuted_stack(xp, base.dy)
    values = base.pairwise(stack_x, stack_y)
    return float(signs_x @ values @ signs_y) / math.factorial(dx) ** 2


def slater_kernel_eval(profile, x, xp, dy: int = 1) -> float:
    """Determinant-form kernel for an arbitrary scalar profile of block distances.

    Computes det[profile(|x_i - xp_j|)] / dx! where |.| is the 2-norm over
    blocks of length ``dy``. Antisymmetric in the blocks of either argument by
    the alternating property of the determinant.
    """
    xb = blocks(x, dy)
    yb = blocks(xp, dy)
    if xb.shape != yb.shape:
        raise ValueError(f"argument dimensions differ: {xb.size} vs {yb.size}")
    diff = xb[:, None, :] - yb[None, :, :]
    entries = np.asarray(profile(np.sqrt(np.sum(diff * diff, axis=-1))), dtype=float)
    return _det(entries) / math.factorial(len(xb))


def antisym_gauss_partial(sigma: float, x, xp, l: int, order: int = 1) -> float:
    """Partial derivative of the antisymmetric gaussian kernel in coordinate l.

    Row l of the gaussian entry matrix is replaced by the entrywise first or
    second derivative and the determinant is taken; multilinearity of the
    determinant in its rows makes this the exact derivative of the value.
    """
    if order not in (1, 2):
        raise ValueError(f"derivative order must be 1 or 2, got {order}")
    x = np.asarray(x, dtype=float).ravel()
    xp = np.asarray(xp, dtype=float).ravel()
    if x.shape != xp.shape:
        raise ValueError(f"argument dimensions differ: {x.size} vs {xp.size}")
    d = x.size
    if not 0 <= l < d:
        raise ValueError(f"coordinate index {l} out of range for dimension {d}")
    diff = x[:, None] - xp[None, :]
    entries = np.exp(-diff * diff / (2.0 * sigma**2))
    row = diff[l]
    if order == 1:
        entries[l] = -row / sigma**2 * entries[l]
    else:
        entries[l] = (row * row / sigma**4 - 1.0 / sigma**2) * entries[l]
    return _det(entries) / math.factorial(d)
