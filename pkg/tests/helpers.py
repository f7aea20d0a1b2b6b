"""Shared independent oracles for the test suite."""

import itertools

import numpy as np


def central_difference(func, x, l, order=1, h=None):
    """Central finite difference of ``func`` in coordinate ``l`` at ``x``.

    The second-order stencil is Richardson-extrapolated over two step sizes
    so the oracle stays accurate near zero crossings of the derivative.
    """
    x = np.asarray(x, dtype=float)
    step = np.zeros_like(x)
    if order == 1:
        h = 1e-5 if h is None else h
        step[l] = h
        return (func(x + step) - func(x - step)) / (2.0 * h)
    if order != 2:
        raise ValueError(f"unsupported order {order}")
    h = 2e-3 if h is None else h

    def second(hh):
        step[l] = hh
        return (func(x + step) - 2.0 * func(x) + func(x - step)) / hh**2

    return (4.0 * second(h / 2.0) - second(h)) / 3.0


def leibniz_permanent(a):
    """Permanent by explicit summation over all permutations."""
    a = np.asarray(a, dtype=float)
    n = a.shape[0]
    total = 0.0
    rows = range(n)
    for cols in itertools.permutations(rows):
        total += float(np.prod(a[rows, cols]))
    return total


def relative_error(value, reference):
    scale = max(abs(value), abs(reference))
    if scale == 0.0:
        return 0.0
    return abs(value - reference) / scale


def separated_coordinates(d, rng, sigma):
    """Random coordinates with pairwise gaps of a few bandwidths.

    Alternating permutation sums annihilate up to ~d! digits when coordinates
    crowd within the bandwidth, leaving a value float64 cannot pin down;
    these points keep the comparison between evaluation strategies
    numerically well-posed at tight tolerances.
    """
    gaps = rng.uniform(4.0 * sigma, 6.0 * sigma, d)
    coords = np.cumsum(gaps) + rng.uniform(-1.0, 1.0)
    return rng.permutation(coords)
