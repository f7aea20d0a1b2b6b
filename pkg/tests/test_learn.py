import numpy as np
import pytest

from permakernel.antisym import AntisymKernel
from permakernel.kernels import gaussian
from permakernel.learn import (
    GramMatrix,
    augment_antisymmetric,
    gram,
    kpca,
    krr_fit,
    krr_predict,
    mercer_features,
)
from permakernel.sym import SymKernel


class TestGram:
    def test_single_point(self):
        K = gram(gaussian(0.5), np.array([[0.3, -0.2]]))
        assert K.values.shape == (1, 1)
        assert K.values[0, 0] == pytest.approx(1.0)

    def test_duplicate_coordinate_row_vanishes(self):
        kernel = AntisymKernel(gaussian(0.5))
        points = np.array([[0.4, 0.4], [0.1, -0.3], [0.5, 0.2]])
        K = gram(kernel, points).values
        assert np.abs(K[0]).max() <= 1e-14
        assert np.abs(K[:, 0]).max() <= 1e-14

    def test_matches_serial_recompute(self):
        rng = np.random.default_rng(0)
        kernel = gaussian(0.7)
        points = rng.uniform(-1, 1, (5, 3))
        K = gram(kernel, points).values
        for i in range(5):
            for j in range(5):
                assert K[i, j] == pytest.approx(kernel.eval(points[i], points[j]), rel=1e-12)

    def test_reproducible(self):
        rng = np.random.default_rng(1)
        kernel = AntisymKernel(gaussian(0.5))
        points = rng.uniform(-1, 1, (6, 2))
        first = gram(kernel, points).values
        second = gram(kernel, points).values
        assert np.array_equal(first, second)

    def test_rectangular(self):
        rng = np.random.default_rng(2)
        xs = rng.uniform(-1, 1, (4, 2))
        ys = rng.uniform(-1, 1, (7, 2))
        K = gram(gaussian(0.5), xs, ys)
        assert K.values.shape == (4, 7)

    def test_object_points_use_loop(self):
        # non-numeric points (e.g. graphs) take the entrywise path
        kernel = type("K", (), {"eval": staticmethod(lambda a, b: float(len(a) * len(b)))})()
        K = gram(kernel, ["ab", "c"], ["xyz"])
        assert K.values.tolist() == [[6.0], [3.0]]


class TestKrr:
    def test_identity_system(self):
        y = np.array([1.0, -2.0, 0.5])
        model = krr_fit(np.eye(3), y, ridge=0.0)
        assert np.allclose(model.coefficients, y)

    def test_single_point(self):
        model = krr_fit(np.array([[1.0]]), [3.0], ridge=0.0)
        assert model.coefficients[0] == pytest.approx(3.0)

    def test_training_residual_antisym(self):
        rng = np.random.default_rng(3)
        points = rng.uniform(-1, 1, (20, 2))
        y = np.sin(np.pi * (points[:, 0] - points[:, 1]))
        kernel = AntisymKernel(gaussian(0.5))
        K = gram(kernel, points)
        model = krr_fit(K, y, ridge=1e-10)
        fitted = krr_predict(model, points)
        assert np.abs(fitted - y).max() <= 1e-6

    def test_interpolates_at_training_points(self):
        rng = np.random.default_rng(4)
        points = rng.uniform(-1, 1, (8, 2))
        y = rng.uniform(-1, 1, 8)
        model = krr_fit(gram(gaussian(0.8), points), y, ridge=0.0)
        assert np.abs(krr_predict(model, points) - y).max() <= 1e-8

    def test_antisym_model_negates_under_swap(self):
        rng = np.random.default_rng(5)
        points = rng.uniform(-1, 1, (10, 2))
        y = np.sin(np.pi * (points[:, 0] - points[:, 1]))
        model = krr_fit(gram(AntisymKernel(gaussian(0.5)), points), y, ridge=1e-10)
        queries = rng.uniform(-1, 1, (5, 2))
        swapped = queries[:, ::-1].copy()
        assert np.allclose(
            krr_predict(model, swapped), -krr_predict(model, queries), atol=1e-12
        )

    def test_singular_unregularized_system_rejected(self):
        K = np.ones((3, 3))
        with pytest.raises(ValueError, match="singular"):
            krr_fit(K, [1.0, 1.0, 1.0], ridge=0.0)

    def test_rmse_improves_with_data(self):
        from permakernel.experiments import _regress_run, box_midpoint_grid

        grid = box_midpoint_grid(-1.0, 1.0, 30)
        m_values = [10, 20, 40]
        totals = np.zeros(3)
        for run in range(50):
            rows = _regress_run(9000 + run, m_values, 0.5, 1e-10, grid)
            totals += np.array([row[2] for row in rows])
        averages = totals / 50
        assert averages[0] > averages[1] > averages[2]

    def test_predict_requires_provenance(self):
        model = krr_fit(np.eye(2), [1.0, 2.0], ridge=0.0)
        with pytest.raises(ValueError, match="provenance"):
            krr_predict(model, np.zeros((1, 2)))

    def test_shape_validation(self):
        with pytest.raises(ValueError, match="square"):
            krr_fit(np.ones((2, 3)), [1.0, 2.0])
        with pytest.raises(ValueError, match="targets"):
            krr_fit(np.eye(3), [1.0, 2.0])
        with pytest.raises(ValueError, match="non-negative"):
            krr_fit(np.eye(2), [1.0, 2.0], ridge=-0.1)


class TestKpca:
    def test_identical_points_give_zero_scores(self):
        K = np.ones((5, 5))
        scores = kpca(K, 2)
        assert np.abs(scores).max() <= 1e-12

    def test_two_clusters_of_duplicates(self):
        # Gram of two groups of identical points
        K = np.block(
            [
                [np.ones((3, 3)), 0.2 * np.ones((3, 2))],
                [0.2 * np.ones((2, 3)), np.ones((2, 2))],
            ]
        )
        scores = kpca(K, 1)[:, 0]
        assert np.ptp(scores[:3]) <= 1e-12
        assert np.ptp(scores[3:]) <= 1e-12
        assert abs(scores[0] - scores[4]) > 1e-3

    def test_relabeling_invariance(self):
        rng = np.random.default_rng(6)
        points = rng.uniform(-1, 1, (9, 2))
        K = gram(gaussian(0.6), points).values
        perm = rng.permutation(9)
        base = kpca(K, 2)
        shuffled = kpca(K[np.ix_(perm, perm)], 2)
        assert np.allclose(shuffled, base[perm], atol=1e-10)

    def test_component_bound(self):
        with pytest.raises(ValueError, match="components"):
            kpca(np.eye(3), 4)

    def test_requires_symmetry(self):
        K = np.array([[1.0, 0.5], [0.0, 1.0]])
        with pytest.raises(ValueError, match="symmetric"):
            kpca(K, 1)


class TestMercerFeatures:
    def grid(self, n=15):
        ticks = np.linspace(-1.0, 1.0, n)
        xx, yy = np.meshgrid(ticks, ticks, indexing="ij")
        return np.column_stack([xx.ravel(), yy.ravel()])

    def swap_index(self, n=15):
        return np.arange(n * n).reshape(n, n).T.ravel()

    def test_antisymmetric_features(self):
        rng = np.random.default_rng(7)
        points = rng.uniform(-1, 1, (60, 2))
        feats = mercer_features(AntisymKernel(gaussian(0.5)), points, self.grid(), 2)
        mirrored = feats.grid_values[:, self.swap_index()]
        assert np.abs(feats.grid_values + mirrored).max() <= 1e-8

    def test_symmetric_features(self):
        rng = np.random.default_rng(8)
        points = rng.uniform(-1, 1, (60, 2))
        feats = mercer_features(SymKernel(gaussian(0.5)), points, self.grid(), 2)
        mirrored = feats.grid_values[:, self.swap_index()]
        assert np.abs(feats.grid_values - mirrored).max() <= 1e-8

    def test_top_plain_feature_has_no_sign_change(self):
        rng = np.random.default_rng(9)
        points = rng.uniform(-1, 1, (150, 1))
        grid = np.linspace(-1, 1, 101)[:, None]
        feats = mercer_features(gaussian(0.5), points, grid, 1)
        assert feats.grid_values[0].min() >= -1e-8
        assert feats.grid_values[0].max() == pytest.approx(1.0)

    def test_unit_sup_norm_and_evaluate_consistency(self):
        rng = np.random.default_rng(10)
        points = rng.uniform(-1, 1, (40, 2))
        grid = self.grid(9)
        feats = mercer_features(gaussian(0.5), points, grid, 3)
        assert np.allclose(np.abs(feats.grid_values).max(axis=1), 1.0)
        probe = grid[17]
        for j in range(3):
            assert feats.evaluate(j, probe) == pytest.approx(
                feats.grid_values[j, 17], rel=1e-10
            )

    def test_rank_deficiency_rejected(self):
        point = np.array([[0.2, -0.1]])
        points = np.repeat(point, 5, axis=0)
        with pytest.raises(ValueError, match="rank"):
            mercer_features(gaussian(0.5), points, self.grid(5), 3)


class TestAugmentation:
    def test_single_pair(self):
        xs, ys = augment_antisymmetric(np.array([[0.1, 0.2]]), [3.0], (0, 1))
        assert xs.shape == (2, 2)
        assert np.allclose(xs[1], [0.2, 0.1])
        assert ys.tolist() == [3.0, -3.0]

    def test_double_augmentation_duplicates(self):
        xs = np.array([[0.1, 0.2], [0.5, -0.5]])
        ys = np.array([1.0, 2.0])
        once_x, once_y = augment_antisymmetric(xs, ys, (0, 1))
        twice_x, twice_y = augment_antisymmetric(once_x, once_y, (0, 1))
        # the swapped block reappears, and the double swap restores the originals
        assert np.allclose(twice_x[4:6], once_x[2:4])
        assert np.allclose(twice_y[4:6], once_y[2:4])
        assert np.allclose(twice_x[6:], xs)
        assert np.allclose(twice_y[6:], ys)

    def test_invalid_transposition(self):
        with pytest.raises(ValueError, match="transposition"):
            augment_antisymmetric(np.zeros((1, 2)), [0.0], (1, 1))

    def test_augmented_krr_tracks_antisym_krr(self):
        rng = np.random.default_rng(11)
        points = rng.uniform(-1, 1, (12, 2))
        y = np.sin(np.pi * (points[:, 0] - points[:, 1]))
        queries = rng.uniform(-1, 1, (30, 2))
        anti = krr_predict(
            krr_fit(gram(AntisymKernel(gaussian(0.5)), points), y, 1e-10), queries
        )
        xs_aug, ys_aug = augment_antisymmetric(points, y, (0, 1))
        plain = krr_predict(
            krr_fit(gram(gaussian(0.5), xs_aug), ys_aug, 1e-10), queries
        )
        assert np.abs(anti - plain).max() <= 1e-5


def test_gram_matrix_shape_property():
    K = GramMatrix(np.zeros((2, 3)))
    assert K.shape == (2, 3)
