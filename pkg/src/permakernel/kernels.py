"""Base kernel families: pointwise evaluation, closed-form derivatives, pairwise matrices."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

FAMILIES = ("gaussian", "laplacian", "polynomial", "radial")
_DERIVATIVE_FAMILIES = ("gaussian", "polynomial")


def _squared_distances(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    sq = (xs * xs).sum(axis=1)[:, None] + (ys * ys).sum(axis=1)[None, :] - 2.0 * xs @ ys.T
    return np.maximum(sq, 0.0)


@dataclass(frozen=True)
class KernelSpec:
    """A base kernel described by a family tag plus its parameters.

    ``dy`` is the block length used when coordinates group into vector-valued
    particles; permutation machinery downstream always permutes whole blocks
    of this length. The gaussian family uses the 2-norm, the laplacian family
    the 1-norm, and the radial family applies ``profile`` to 2-norm distances.
    """

    family: str
    sigma: float | None = None
    offset: float | None = None
    degree: int | None = None
    profile: Callable | None = None
    dy: int = 1

    def _pair(self, x, xp) -> tuple[np.ndarray, np.ndarray]:
        x = np.asarray(x, dtype=float).ravel()
        xp = np.asarray(xp, dtype=float).ravel()
        if x.shape != xp.shape:
            raise ValueError(
                f"argument dimensions differ: {x.shape[0]} vs {xp.shape[0]}"
            )
        if x.shape[0] % self.dy:
            raise ValueError(
                f"dimension {x.shape[0]} is not divisible by block length {self.dy}"
            )
        return x, xp

    def eval(self, x, xp) -> float:
        x, xp = self._pair(x, xp)
        diff = x - xp
        if self.family == "gaussian":
            return math.exp(-float(diff @ diff) / (2.0 * self.sigma**2))
        if self.family == "laplacian":
            return math.exp(-float(np.abs(diff).sum()) / self.sigma)
        if self.family == "polynomial":
            return (self.offset + float(x @ xp)) ** self.degree
        return float(self.profile(float(np.linalg.norm(diff))))

    def __call__(self, x, xp) -> float:
        return self.eval(x, xp)

    def _check_derivative(self, dim: int, l: int) -> None:
        if self.family not in _DERIVATIVE_FAMILIES:
            raise ValueError(f"derivatives are unsupported for the {self.family} family")
        if not 0 <= l < dim:
            raise ValueError(f"coordinate index {l} out of range for dimension {dim}")

    def eval_d1(self, x, xp, l: int) -> float:
        """First partial derivative in coordinate l of the first argument."""
        x, xp = self._pair(x, xp)
        self._check_derivative(x.shape[0], l)
        if self.family == "gaussian":
            return -(x[l] - xp[l]) / self.sigma**2 * self.eval(x, xp)
        s = self.offset + float(x @ xp)
        return self.degree * s ** (self.degree - 1) * xp[l]

    def eval_d2(self, x, xp, l: int) -> float:
        """Second partial derivative in coordinate l of the first argument."""
        x, xp = self._pair(x, xp)
        self._check_derivative(x.shape[0], l)
        if self.family == "gaussian":
            u = (x[l] - xp[l]) / self.sigma**2
            return (u * u - 1.0 / self.sigma**2) * self.eval(x, xp)
        if self.degree == 1:
            return 0.0
        s = self.offset + float(x @ xp)
        return self.degree * (self.degree - 1) * s ** (self.degree - 2) * xp[l] ** 2

    def _stack_pair(self, xs, ys) -> tuple[np.ndarray, np.ndarray]:
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        ys = np.atleast_2d(np.asarray(ys, dtype=float))
        if xs.shape[1] != ys.shape[1]:
            raise ValueError(
                f"point dimensions differ: {xs.shape[1]} vs {ys.shape[1]}"
            )
        if xs.shape[1] % self.dy:
            raise ValueError(
                f"dimension {xs.shape[1]} is not divisible by block length {self.dy}"
            )
        return xs, ys

    def pairwise(self, xs, ys) -> np.ndarray:
        """Matrix of kernel values k(xs[i], ys[j])."""
        xs, ys = self._stack_pair(xs, ys)
        if self.family == "polynomial":
            return (self.offset + xs @ ys.T) ** self.degree
        if self.family == "laplacian":
            dist = np.abs(xs[:, None, :] - ys[None, :, :]).sum(axis=-1)
            return np.exp(-dist / self.sigma)
        sq = _squared_distances(xs, ys)
        if self.family == "gaussian":
            return np.exp(-sq / (2.0 * self.sigma**2))
        return np.asarray(self.profile(np.sqrt(sq)), dtype=float)

    def d2_sum_gram(self, xs, ys) -> np.ndarray:
        """Matrix of sum_l d2/dx_l2 k(xs[i], ys[j]): the Laplacian in the first argument."""
        xs, ys = self._stack_pair(xs, ys)
        d = xs.shape[1]
        if self.family == "gaussian":
            sq = _squared_distances(xs, ys)
            return (sq / self.sigma**4 - d / self.sigma**2) * np.exp(
                -sq / (2.0 * self.sigma**2)
            )
        if self.family == "polynomial":
            if self.degree == 1:
                return np.zeros((xs.shape[0], ys.shape[0]))
            s = self.offset + xs @ ys.T
            return (
                self.degree
                * (self.degree - 1)
                * s ** (self.degree - 2)
                * (ys * ys).sum(axis=1)[None, :]
            )
        raise ValueError(f"derivatives are unsupported for the {self.family} family")

    def to_config(self) -> dict:
        if self.family in ("gaussian", "laplacian"):
            return {"family": self.family, "sigma": self.sigma, "dy": self.dy}
        if self.family == "polynomial":
            return {"family": "polynomial", "c": self.offset, "p": self.degree, "dy": self.dy}
        raise ValueError("radial kernels have no JSON serialization")


def _check_dy(dy: int) -> None:
    if dy < 1:
        raise ValueError(f"block length must be >= 1, got {dy}")


def gaussian(sigma: float, dy: int = 1) -> KernelSpec:
    """Gaussian kernel exp(-|x - x'|^2 / (2 sigma^2))."""
    if sigma <= 0:
        raise ValueError(f"bandwidth must be positive, got {sigma}")
    _check_dy(dy)
    return KernelSpec("gaussian", sigma=float(sigma), dy=dy)


def laplacian(sigma: float, dy: int = 1) -> KernelSpec:
    """Laplacian kernel exp(-|x - x'|_1 / sigma), built on the 1-norm."""
    if sigma <= 0:
        raise ValueError(f"bandwidth must be positive, got {sigma}")
    _check_dy(dy)
    return KernelSpec("laplacian", sigma=float(sigma), dy=dy)


def polynomial(offset: float, degree: int, dy: int = 1) -> KernelSpec:
    """Polynomial kernel (c + <x, x'>)^p."""
    if offset < 0:
        raise ValueError(f"offset must be non-negative, got {offset}")
    if degree < 1:
        raise ValueError(f"degree must be a positive integer, got {degree}")
    _check_dy(dy)
    return KernelSpec("polynomial", offset=float(offset), degree=int(degree), dy=dy)


def radial(profile: Callable, dy: int = 1) -> KernelSpec:
    """Kernel defined through a scalar profile of the pairwise 2-norm distance.

    Evaluation only; no derivatives. The profile must accept numpy arrays.
    """
    _check_dy(dy)
    return KernelSpec("radial", profile=profile, dy=dy)


def kernel_from_config(cfg: dict) -> KernelSpec:
    """Rebuild a base kernel from its JSON form {family, sigma | c, p, dy}."""
    family = cfg.get("family")
    dy = int(cfg.get("dy", 1))
    if family == "gaussian":
        return gaussian(cfg["sigma"], dy=dy)
    if family == "laplacian":
        return laplacian(cfg["sigma"], dy=dy)
    if family == "polynomial":
        return polynomial(cfg["c"], cfg["p"], dy=dy)
    raise ValueError(f"unknown kernel family {family!r}")
