"""Permutation-invariant graph kernels through hyperpermanents.

A pair of labeled graphs is compared by summing, over all node permutations,
the product of entrywise kernel values between matched adjacency entries.
That sum is the hyperpermanent of an order-4 tensor. Four algorithms are
provided: the defining permutation sum, a recursive expansion along the first
slice, a reduced form for pairwise symmetric tensors, and a restricted
enumeration that exploits artificial isolated nodes introduced by padding.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .combinatorics import ENUMERATION_CAP

PAD_LABEL = "∅"
DEFAULT_GRAPH_CAP = 11
_CHUNK = 50_000


@dataclass(frozen=True)
class LabeledGraph:
    """Symmetric adjacency matrix plus one atom label per node.

    ``original_size`` records how many nodes the graph had before padding
    with isolated nodes; padded nodes carry the reserved label.
    """

    adjacency: np.ndarray
    labels: tuple[str, ...]
    original_size: int | None = None

    def __post_init__(self):
        adjacency = np.asarray(self.adjacency, dtype=float)
        object.__setattr__(self, "adjacency", adjacency)
        object.__setattr__(self, "labels", tuple(self.labels))
        if adjacency.ndim != 2 or adjacency.shape[0] != adjacency.shape[1]:
            raise ValueError(f"adjacency must be square, got shape {adjacency.shape}")
        if not np.allclose(adjacency, adjacency.T):
            raise ValueError("adjacency must be symmetric")
        if np.any(np.diag(adjacency) != 0.0):
            raise ValueError("adjacency must have a zero diagonal")
        if np.any(adjacency < 0.0):
            raise ValueError("adjacency entries must be non-negative")
        if len(self.labels) != adjacency.shape[0]:
            raise ValueError(
                f"got {len(self.labels)} labels for {adjacency.shape[0]} nodes"
            )
        if self.original_size is None:
            object.__setattr__(self, "original_size", adjacency.shape[0])
        if not 0 < self.original_size <= adjacency.shape[0]:
            raise ValueError(
                f"original size {self.original_size} inconsistent with "
                f"{adjacency.shape[0]} nodes"
            )

    @property
    def size(self) -> int:
        return self.adjacency.shape[0]

    @classmethod
    def from_edges(cls, labels, edges) -> "LabeledGraph":
        """Build a graph from node labels and 0-based edge index pairs."""
        labels = tuple(labels)
        n = len(labels)
        adjacency = np.zeros((n, n))
        for i, j in edges:
            if not (0 <= i < n and 0 <= j < n) or i == j:
                raise ValueError(f"invalid edge ({i}, {j}) for {n} nodes")
            adjacency[i, j] = 1.0
            adjacency[j, i] = 1.0
        return cls(adjacency, labels)


def pad_graph(graph: LabeledGraph, d: int) -> LabeledGraph:
    """Expand a graph to d nodes by appending isolated nodes with the pad label."""
    if d < graph.size:
        raise ValueError(f"cannot pad a {graph.size}-node graph down to {d} nodes")
    if d == graph.size:
        return graph
    adjacency = np.zeros((d, d))
    adjacency[: graph.size, : graph.size] = graph.adjacency
    labels = graph.labels + (PAD_LABEL,) * (d - graph.size)
    return LabeledGraph(adjacency, labels, original_size=graph.original_size)


@dataclass(frozen=True)
class KernelTensor:
    """Order-4 tensor of entrywise kernel values between two graphs.

    Entries pairing a diagonal index with an off-diagonal one are never
    consulted by any hyperpermanent algorithm; they are stored as NaN so an
    accidental access propagates visibly.
    """

    values: np.ndarray
    pairwise_symmetric: bool = False

    @property
    def dim(self) -> int:
        return self.values.shape[0]

    def entry(self, i: int, j: int, k: int, l: int) -> float:
        value = self.values[i, j, k, l]
        if np.isnan(value):
            raise ValueError(
                f"tensor entry ({i}, {j}, {k}, {l}) mixes diagonal and "
                f"off-diagonal index pairs and is undefined"
            )
        return float(value)


def _diag_match(first, second) -> np.ndarray:
    """Boolean (d, d) table of which node pairs count as equal on the diagonal."""
    if isinstance(first, LabeledGraph):
        a = np.array(first.labels, dtype=object)
        b = np.array(second.labels, dtype=object)
        return a[:, None] == b[None, :]
    a = np.diag(np.asarray(first, dtype=float))
    b = np.diag(np.asarray(second, dtype=float))
    return a[:, None] == b[None, :]


def _adjacency_of(g) -> np.ndarray:
    return g.adjacency if isinstance(g, LabeledGraph) else np.asarray(g, dtype=float)


def _build_tensor(first, second, sigma: float, family: str) -> KernelTensor:
    adj = _adjacency_of(first)
    adj2 = _adjacency_of(second)
    if adj.shape != adj2.shape:
        raise ValueError(f"graph sizes differ: {adj.shape[0]} vs {adj2.shape[0]}")
    if sigma <= 0:
        raise ValueError(f"bandwidth must be positive, got {sigma}")
    d = adj.shape[0]
    diff = adj[:, :, None, None] - adj2[None, None, :, :]
    if family == "laplacian":
        values = np.exp(-np.abs(diff) / sigma)
        mismatch = math.exp(-1.0 / sigma)
    else:
        values = np.exp(-diff * diff / (2.0 * sigma**2))
        mismatch = math.exp(-1.0 / (2.0 * sigma**2))
    eye = np.eye(d, dtype=bool)
    mixed = eye[:, :, None, None] ^ eye[None, None, :, :]
    values[mixed] = np.nan
    match = _diag_match(first, second)
    idx = np.arange(d)
    diag = np.where(match, 1.0, mismatch)
    values[idx[:, None], idx[:, None], idx[None, :], idx[None, :]] = diag
    return KernelTensor(values, pairwise_symmetric=True)


def build_laplacian_tensor(first, second, sigma: float) -> KernelTensor:
    """Entrywise laplacian tensor t[i,j,k,l] = exp(-|a_ij - a'_kl| / sigma).

    Diagonal pairs compare node identities instead: 1 on a match, and
    exp(-1/sigma) otherwise. For labeled graphs a match means equal atom
    labels (pad labels match each other); for raw matrices it means equal
    diagonal entries.
    """
    return _build_tensor(first, second, sigma, "laplacian")


def build_gaussian_tensor(first, second, sigma: float) -> KernelTensor:
    """Entrywise gaussian tensor t[i,j,k,l] = exp(-(a_ij - a'_kl)^2 / (2 sigma^2)).

    Diagonal pairs follow the same match rule as the laplacian tensor with
    mismatch value exp(-1/(2 sigma^2)).
    """
    return _build_tensor(first, second, sigma, "gaussian")


def _tensor_values(t) -> np.ndarray:
    if isinstance(t, KernelTensor):
        return t.values
    values = np.asarray(t, dtype=float)
    if values.ndim != 4 or len(set(values.shape)) != 1:
        raise ValueError(f"expected a d x d x d x d tensor, got shape {values.shape}")
    return values


def _check_cap(d: int) -> None:
    if d > ENUMERATION_CAP:
        raise ValueError(
            f"hyperpermanent enumeration is capped at d <= {ENUMERATION_CAP}, got {d}"
        )


def _image_chunks(images, chunk: int = _CHUNK):
    iterator = iter(images)
    while True:
        batch = list(itertools.islice(iterator, chunk))
        if not batch:
            return
        yield np.asarray(batch, dtype=np.intp)


def hyperpermanent_naive(t) -> float:
    """Defining sum over all permutations of the full double product."""
    values = _tensor_values(t)
    d = values.shape[0]
    _check_cap(d)
    total = 0.0
    for images in _image_chunks(itertools.permutations(range(d))):
        acc = np.ones(images.shape[0])
        for i in range(d):
            for j in range(d):
                acc *= values[i, j, images[:, i], images[:, j]]
        total += float(acc.sum())
    return total


def hyperpermanent_laplace(t) -> float:
    """Recursive expansion along the first slice.

    Each level fixes the image of the first index, folds the two cross terms
    it leaves behind into the diagonal entries of the remaining tensor, and
    recurses on the reduced problem.
    """
    values = _tensor_values(t)
    _check_cap(values.shape[0])
    return _laplace(values)


def _laplace(values: np.ndarray) -> float:
    d = values.shape[0]
    if d == 1:
        return float(values[0, 0, 0, 0])
    total = 0.0
    rows = list(range(1, d))
    for mu in range(d):
        factor = values[0, 0, mu, mu]
        work = values.copy()
        for i in rows:
            for k in range(d):
                if k == mu:
                    continue
                work[i, i, k, k] = values[i, i, k, k] * values[i, 0, k, mu] * values[0, i, mu, k]
        cols = [k for k in range(d) if k != mu]
        sub = work[np.ix_(rows, rows, cols, cols)]
        total += factor * _laplace(sub)
    return total


def _require_pairwise_symmetric(t) -> np.ndarray:
    if not isinstance(t, KernelTensor) or not t.pairwise_symmetric:
        raise ValueError("tensor is not marked pairwise symmetric")
    return t.values


def _symmetric_products(values: np.ndarray, images: np.ndarray) -> float:
    d = values.shape[0]
    acc = values[0, 0, images[:, 0], images[:, 0]].copy()
    for j in range(1, d):
        off = values[0, j, images[:, 0], images[:, j]]
        acc *= off * off
    for i in range(1, d):
        acc *= values[i, i, images[:, i], images[:, i]]
        for j in range(i + 1, d):
            off = values[i, j, images[:, i], images[:, j]]
            acc *= off * off
    return float(acc.sum())


def hyperpermanent_pairwise_symmetric(t: KernelTensor) -> float:
    """Reduced sum for tensors symmetric in both index pairs.

    Only upper-triangular index pairs enter: each off-diagonal factor appears
    squared and each diagonal factor once.
    """
    values = _require_pairwise_symmetric(t)
    d = values.shape[0]
    _check_cap(d)
    total = 0.0
    for images in _image_chunks(itertools.permutations(range(d))):
        total += _symmetric_products(values, images)
    return total


def restricted_permutations(d: int, d_prime: int):
    """Images of permutations whose tail past position d_prime is ascending.

    The head is an ordered selection of d_prime values out of d; the unused
    values fill the tail in ascending order. Exactly d!/(d - d_prime)! images
    are produced.
    """
    if not 0 < d_prime <= d:
        raise ValueError(f"need 0 < d_prime <= d, got d_prime={d_prime}, d={d}")
    universe = range(d)
    for head in itertools.permutations(universe, d_prime):
        tail = sorted(set(universe) - set(head))
        yield head + tuple(tail)


def hyperpermanent_isolated(t: KernelTensor, d_prime: int) -> float:
    """Hyperpermanent for tensors built from a first graph padded from d_prime nodes.

    Permutations that only shuffle the images of padded nodes leave each
    summand unchanged, so the sum runs over the restricted set with ascending
    tails and is scaled by (d - d_prime)!.
    """
    values = _require_pairwise_symmetric(t)
    d = values.shape[0]
    _check_cap(d)
    total = 0.0
    for images in _image_chunks(restricted_permutations(d, d_prime)):
        total += _symmetric_products(values, images)
    return total * math.factorial(d - d_prime)


def graph_kernel(
    g: LabeledGraph,
    g2: LabeledGraph,
    sigma: float,
    family: str = "laplacian",
    cap: int = DEFAULT_GRAPH_CAP,
) -> float:
    """Permutation-invariant kernel between two labeled graphs.

    Pads both graphs to a common size and dispatches to the cheapest valid
    hyperpermanent algorithm: the restricted isolated-node enumeration when
    padding left artificial nodes, the pairwise symmetric sum otherwise.
    """
    if family not in ("laplacian", "gaussian"):
        raise ValueError(f"unknown graph kernel family {family!r}")
    d = max(g.size, g2.size)
    if d > cap:
        raise ValueError(f"graph kernel is capped at {cap} nodes, got {d}")
    if g2.original_size < g.original_size:
        g, g2 = g2, g
    g = pad_graph(g, d)
    g2 = pad_graph(g2, d)
    if family == "laplacian":
        tensor = build_laplacian_tensor(g, g2, sigma)
    else:
        tensor = build_gaussian_tensor(g, g2, sigma)
    if g.original_size < d:
        return hyperpermanent_isolated(tensor, g.original_size)
    return hyperpermanent_pairwise_symmetric(tensor)


@dataclass(frozen=True)
class GraphKernel:
    """Callable graph kernel for Gram assembly over graph collections."""

    sigma: float
    family: str = "laplacian"
    cap: int = DEFAULT_GRAPH_CAP

    def eval(self, g: LabeledGraph, g2: LabeledGraph) -> float:
        return graph_kernel(g, g2, self.sigma, family=self.family, cap=self.cap)

    def __call__(self, g: LabeledGraph, g2: LabeledGraph) -> float:
        return self.eval(g, g2)
