import itertools
import math

import numpy as np
import pytest

from helpers import relative_error

from permakernel.datasets import isomorphic_copy, random_tree
from permakernel.graphs import (
    PAD_LABEL,
    GraphKernel,
    KernelTensor,
    LabeledGraph,
    build_gaussian_tensor,
    build_laplacian_tensor,
    graph_kernel,
    hyperpermanent_isolated,
    hyperpermanent_laplace,
    hyperpermanent_naive,
    hyperpermanent_pairwise_symmetric,
    pad_graph,
    restricted_permutations,
)
from permakernel.learn import gram, kpca


def path_graph(labels):
    return LabeledGraph.from_edges(labels, [(i, i + 1) for i in range(len(labels) - 1)])


def random_padded_pair(rng, target):
    a = random_tree(int(rng.integers(2, target + 1)), rng)
    b = random_tree(int(rng.integers(2, target + 1)), rng)
    return pad_graph(a, target), pad_graph(b, target)


class TestLabeledGraph:
    def test_from_edges(self):
        g = path_graph(("C", "O", "C"))
        assert g.size == 3
        assert g.adjacency[0, 1] == 1.0
        assert g.adjacency[0, 2] == 0.0
        assert g.original_size == 3

    def test_validation(self):
        with pytest.raises(ValueError, match="symmetric"):
            LabeledGraph(np.array([[0.0, 1.0], [0.0, 0.0]]), ("C", "C"))
        with pytest.raises(ValueError, match="diagonal"):
            LabeledGraph(np.eye(2), ("C", "C"))
        with pytest.raises(ValueError, match="labels"):
            LabeledGraph(np.zeros((2, 2)), ("C",))

    def test_pad_identity(self):
        g = path_graph(("C", "O", "C"))
        assert pad_graph(g, 3) is g

    def test_pad_structure(self):
        g = path_graph(("C", "O", "C"))
        padded = pad_graph(g, 5)
        assert padded.size == 5
        assert padded.original_size == 3
        assert padded.labels[3:] == (PAD_LABEL, PAD_LABEL)
        assert np.all(padded.adjacency[:3, :3] == g.adjacency)
        assert padded.adjacency[3:, :].sum() == 0.0

    def test_pad_smaller_rejected(self):
        with pytest.raises(ValueError, match="pad"):
            pad_graph(path_graph(("C", "O", "C")), 2)


class TestTensorConstruction:
    def test_laplacian_matched_entries(self):
        g = path_graph(("C", "O", "C"))
        t = build_laplacian_tensor(g, g, 1.0)
        for i, j in itertools.permutations(range(3), 2):
            assert t.entry(i, j, i, j) == pytest.approx(1.0)
        for i in range(3):
            assert t.entry(i, i, i, i) == pytest.approx(1.0)

    def test_laplacian_edge_mismatch(self):
        g = path_graph(("C", "C", "C"))
        edgeless = LabeledGraph(np.zeros((3, 3)), ("C", "C", "C"))
        t = build_laplacian_tensor(g, edgeless, 1.0)
        assert t.entry(0, 1, 0, 1) == pytest.approx(math.exp(-1.0))

    def test_laplacian_label_mismatch(self):
        g = path_graph(("C", "O", "C"))
        g2 = path_graph(("C", "S", "C"))
        t = build_laplacian_tensor(g, g2, 3.0)
        assert t.entry(1, 1, 1, 1) == pytest.approx(math.exp(-1.0 / 3.0))
        assert t.entry(0, 0, 0, 0) == pytest.approx(1.0)

    def test_pad_labels_match_each_other(self):
        g = pad_graph(path_graph(("C", "O")), 4)
        t = build_laplacian_tensor(g, g, 1.0)
        assert t.entry(3, 3, 3, 3) == pytest.approx(1.0)

    def test_gaussian_entries(self):
        g = path_graph(("C", "C", "C"))
        edgeless = LabeledGraph(np.zeros((3, 3)), ("C", "C", "C"))
        t = build_gaussian_tensor(g, g, 1.0)
        assert t.entry(0, 1, 0, 1) == pytest.approx(1.0)
        t2 = build_gaussian_tensor(g, edgeless, 1.0)
        assert t2.entry(0, 1, 0, 1) == pytest.approx(math.exp(-0.5))

    def test_gaussian_accepts_matrices(self):
        rng = np.random.default_rng(0)
        a = rng.uniform(0, 1, (3, 3))
        a = 0.5 * (a + a.T)
        np.fill_diagonal(a, 0.0)
        t = build_gaussian_tensor(a, a, 1.0)
        assert t.entry(0, 0, 1, 1) == pytest.approx(1.0)

    def test_mixed_entries_undefined(self):
        g = path_graph(("C", "O", "C"))
        t = build_laplacian_tensor(g, g, 1.0)
        assert np.isnan(t.values[0, 1, 2, 2])
        with pytest.raises(ValueError, match="undefined"):
            t.entry(0, 1, 2, 2)

    def test_size_mismatch(self):
        with pytest.raises(ValueError, match="differ"):
            build_laplacian_tensor(path_graph(("C", "O")), path_graph(("C", "O", "C")), 1.0)


class TestHyperpermanents:
    def test_dimension_one(self):
        t = np.full((1, 1, 1, 1), 0.7)
        assert hyperpermanent_naive(t) == pytest.approx(0.7)
        assert hyperpermanent_laplace(t) == pytest.approx(0.7)

    def test_all_ones(self):
        t = np.ones((3, 3, 3, 3))
        assert hyperpermanent_naive(t) == pytest.approx(6.0)
        assert hyperpermanent_laplace(t) == pytest.approx(6.0)
        kt = KernelTensor(np.ones((3, 3, 3, 3)), pairwise_symmetric=True)
        assert hyperpermanent_pairwise_symmetric(kt) == pytest.approx(6.0)
        assert hyperpermanent_isolated(kt, 3) == pytest.approx(6.0)

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    def test_laplace_matches_naive_on_random_tensors(self, d):
        rng = np.random.default_rng(d)
        for _ in range(3):
            t = rng.uniform(0.1, 1.0, (d, d, d, d))
            assert relative_error(hyperpermanent_laplace(t), hyperpermanent_naive(t)) <= 1e-12

    @pytest.mark.parametrize("d", [3, 4, 5])
    def test_four_way_agreement_on_padded_pairs(self, d):
        rng = np.random.default_rng(d + 10)
        for _ in range(5):
            g, g2 = random_padded_pair(rng, d)
            t = build_laplacian_tensor(g, g2, 1.5)
            reference = hyperpermanent_naive(t)
            assert relative_error(hyperpermanent_laplace(t), reference) <= 1e-12
            assert relative_error(hyperpermanent_pairwise_symmetric(t), reference) <= 1e-12
            assert (
                relative_error(hyperpermanent_isolated(t, g.original_size), reference)
                <= 1e-12
            )

    def test_pairwise_symmetric_requires_flag(self):
        with pytest.raises(ValueError, match="pairwise symmetric"):
            hyperpermanent_pairwise_symmetric(np.ones((2, 2, 2, 2)))
        with pytest.raises(ValueError, match="pairwise symmetric"):
            hyperpermanent_isolated(
                KernelTensor(np.ones((2, 2, 2, 2)), pairwise_symmetric=False), 1
            )

    def test_restricted_enumerator_counts(self):
        assert sum(1 for _ in restricted_permutations(6, 3)) == 120
        for d, dp in ((4, 2), (5, 5), (5, 1)):
            count = sum(1 for _ in restricted_permutations(d, dp))
            assert count == math.factorial(d) // math.factorial(d - dp)

    def test_restricted_tails_ascend(self):
        for image in restricted_permutations(5, 2):
            tail = image[2:]
            assert list(tail) == sorted(tail)
            assert sorted(image) == list(range(5))

    def test_isolated_equals_pairwise_when_unpadded(self):
        rng = np.random.default_rng(3)
        g = random_tree(4, rng)
        t = build_laplacian_tensor(g, g, 1.0)
        full = hyperpermanent_pairwise_symmetric(t)
        assert hyperpermanent_isolated(t, 4) == pytest.approx(full, rel=1e-14)

    def test_cap(self):
        with pytest.raises(ValueError, match="capped"):
            hyperpermanent_naive(np.ones((13, 13, 13, 13)))


class TestGraphKernel:
    def test_isomorphism_invariance(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            g = random_tree(4, rng)
            g2 = random_tree(4, rng)
            relabeled = isomorphic_copy(g, rng)
            for family in ("laplacian", "gaussian"):
                value = graph_kernel(g, g2, 1.0, family=family)
                assert relative_error(
                    graph_kernel(relabeled, g2, 1.0, family=family), value
                ) <= 1e-12

    def test_isomorphic_pair_matches_self_similarity(self):
        rng = np.random.default_rng(5)
        g = random_tree(4, rng)
        twin = isomorphic_copy(g, rng)
        assert graph_kernel(g, twin, 1.0) == pytest.approx(
            graph_kernel(g, g, 1.0), rel=1e-12
        )

    def test_symmetry(self):
        rng = np.random.default_rng(6)
        g = pad_graph(random_tree(3, rng), 5)
        g2 = pad_graph(random_tree(5, rng), 5)
        assert graph_kernel(g, g2, 1.5) == pytest.approx(
            graph_kernel(g2, g, 1.5), rel=1e-12
        )

    def test_mixed_sizes_padded_internally(self):
        rng = np.random.default_rng(7)
        g = random_tree(3, rng)
        g2 = random_tree(5, rng)
        value = graph_kernel(g, g2, 1.0)
        padded = graph_kernel(pad_graph(g, 5), g2, 1.0)
        assert value == pytest.approx(padded, rel=1e-12)

    def test_edgeless_pair_is_maximal_among_three_node_graphs(self):
        # exhaustive over all 3-node graphs with identical labels: only the
        # edgeless pair attains the d! ceiling
        labels = ("C", "C", "C")
        graphs = []
        for edges in itertools.chain.from_iterable(
            itertools.combinations([(0, 1), (0, 2), (1, 2)], k) for k in range(4)
        ):
            graphs.append(LabeledGraph.from_edges(labels, edges))
        values = {
            (i, j): graph_kernel(graphs[i], graphs[j], 1.0)
            for i in range(len(graphs))
            for j in range(len(graphs))
        }
        peak = max(values.values())
        assert values[(0, 0)] == pytest.approx(peak, rel=1e-12)
        assert values[(0, 0)] == pytest.approx(math.factorial(3), rel=1e-12)
        # every mixed pair sits strictly below the ceiling; only fully
        # edge-transitive self-pairs (edgeless, complete) can reach it
        for (i, j), value in values.items():
            if i != j:
                assert value < peak

    def test_heteroatom_substitution_reduces_similarity(self):
        ether = path_graph(("C", "O", "C"))
        sulfide = path_graph(("C", "S", "C"))
        cross = graph_kernel(ether, sulfide, 1.0)
        self_value = graph_kernel(ether, ether, 1.0)
        assert cross < self_value

    def test_gram_positive_semidefinite(self):
        rng = np.random.default_rng(8)
        graphs = [pad_graph(random_tree(int(rng.integers(2, 5)), rng), 4) for _ in range(8)]
        K = gram(GraphKernel(1.0), graphs).values
        assert np.linalg.eigvalsh(K).min() >= -1e-9

    def test_isomorphic_graphs_share_first_pc_score(self):
        rng = np.random.default_rng(9)
        graphs = []
        for _ in range(4):
            g = random_tree(4, rng)
            graphs.extend([g, isomorphic_copy(g, rng)])
        K = gram(GraphKernel(1.0, family="gaussian"), graphs).values
        scores = kpca(K, 1)
        for base in range(0, 8, 2):
            assert scores[base, 0] == pytest.approx(scores[base + 1, 0], abs=1e-8)

    def test_cap(self):
        rng = np.random.default_rng(10)
        g = random_tree(4, rng)
        with pytest.raises(ValueError, match="capped"):
            graph_kernel(g, g, 1.0, cap=3)

    def test_unknown_family(self):
        g = path_graph(("C", "C"))
        with pytest.raises(ValueError, match="family"):
            graph_kernel(g, g, 1.0, family="cosine")
