"""Permutations with parity, integer partitions, and kernel feature-space dimensions."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Sequence

ENUMERATION_CAP = 12


@dataclass(frozen=True)
class Permutation:
    """A bijection on {0, ..., d-1} in image form together with its parity sign."""

    image: tuple[int, ...]
    sign: int

    @property
    def degree(self) -> int:
        return len(self.image)

    def apply(self, values: Sequence) -> tuple:
        """Reorder a sequence: entry i of the result is ``values[image[i]]``."""
        return tuple(values[j] for j in self.image)

    def compose(self, other: "Permutation") -> "Permutation":
        """Composition acting as self-after-other, so image[i] = self(other(i))."""
        if other.degree != self.degree:
            raise ValueError("cannot compose permutations of different degrees")
        image = tuple(self.image[j] for j in other.image)
        return Permutation(image, self.sign * other.sign)


def permutation_sign(image: Sequence[int]) -> int:
    """Parity of a permutation in image form: +1 for even, -1 for odd."""
    seen = [False] * len(image)
    sign = 1
    for start in range(len(image)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = image[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def enumerate_permutations(d: int) -> Iterator[Permutation]:
    """Yield all d! permutations lazily, in lexicographic image order.

    The factorial blow-up is guarded by ``ENUMERATION_CAP``.
    """
    if d < 1:
        raise ValueError(f"degree must be a positive integer, got {d}")
    if d > ENUMERATION_CAP:
        raise ValueError(
            f"full permutation enumeration is capped at d <= {ENUMERATION_CAP}, got {d}"
        )
    for image in itertools.permutations(range(d)):
        yield Permutation(image, permutation_sign(image))


@lru_cache(maxsize=None)
def partition_count(parts: int, total: int) -> int:
    """Number of partitions of ``total`` into exactly ``parts`` positive integers.

    Computed from the recurrence s(parts, total) = s(parts, total - parts)
    + s(parts - 1, total - 1) with s(0, 0) = 1 and value 0 whenever
    total <= 0 or parts <= 0 (excluding the joint zero case).
    """
    if total == 0 and parts == 0:
        return 1
    if total <= 0 or parts <= 0:
        return 0
    return partition_count(parts, total - parts) + partition_count(parts - 1, total - 1)


def _check_dim_degree(d: int, p: int) -> None:
    if d < 1:
        raise ValueError(f"space dimension must be >= 1, got {d}")
    if p < 0:
        raise ValueError(f"polynomial degree must be >= 0, got {p}")


def poly_feature_dim(d: int, p: int) -> int:
    """Number of monomials of total degree at most p in d variables."""
    _check_dim_degree(d, p)
    return math.comb(p + d, d)


def antisym_feature_dim(d: int, p: int) -> int:
    """Feature count of the antisymmetrized polynomial kernel of degree p in d variables.

    Counts exponent vectors delta + mu with delta = (d-1, ..., 1, 0) and mu a
    partition into at most d parts of any remainder up to p - C(d, 2).
    Returns 0 whenever p < C(d, 2): no antisymmetric polynomial exists below
    that degree.
    """
    _check_dim_degree(d, p)
    budget = p - math.comb(d, 2)
    if budget < 0:
        return 0
    return sum(partition_count(j, r) for r in range(budget + 1) for j in range(d + 1))


def sym_feature_dim(d: int, p: int) -> int:
    """Feature count of the symmetrized polynomial kernel of degree p in d variables."""
    _check_dim_degree(d, p)
    return sum(partition_count(j, r) for r in range(p + 1) for j in range(d + 1))


@dataclass(frozen=True)
class MultiIndex:
    """Exponent vector of a monomial."""

    exponents: tuple[int, ...]

    @property
    def degree(self) -> int:
        return sum(self.exponents)


def partitions_at_most(
    total: int, parts: int, largest: int | None = None
) -> Iterator[tuple[int, ...]]:
    """Non-increasing tuples of at most ``parts`` positive integers summing to ``total``."""
    if total == 0:
        yield ()
        return
    if parts == 0:
        return
    cap = total if largest is None else min(largest, total)
    for first in range(cap, 0, -1):
        for rest in partitions_at_most(total - first, parts - 1, first):
            yield (first,) + rest


def enumerate_antisym_multiindices(d: int, p: int) -> list[MultiIndex]:
    """Exponent vectors spanning the antisymmetric polynomial features of degree <= p.

    Each vector is delta + mu where delta = (d-1, ..., 1, 0) and mu runs over
    partitions (padded with zeros to length d) of every remainder from 0 to
    p - C(d, 2). Empty when p is below C(d, 2).
    """
    _check_dim_degree(d, p)
    delta = tuple(range(d - 1, -1, -1))
    budget = p - math.comb(d, 2)
    out: list[MultiIndex] = []
    for r in range(budget + 1):
        for mu in partitions_at_most(r, d):
            padded = mu + (0,) * (d - len(mu))
            out.append(MultiIndex(tuple(a + b for a, b in zip(delta, padded))))
    return out
