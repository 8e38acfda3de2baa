import numpy as np
import pytest
from sklearn.exceptions import NotFittedError

from mobokit.surrogate import RandomSplitForest


class FakeTree:
    def __init__(self, value):
        self.value = value

    def predict(self, X):
        return np.full(len(X), self.value)


class TestTraining:
    def test_single_sample_predicts_it_exactly(self):
        forest = RandomSplitForest(n_trees=10, random_state=0)
        forest.fit([[0.4, 0.2]], [3.7])
        mu, sigma = forest.predict([0.4, 0.2], return_std=True)
        assert mu == pytest.approx(3.7)
        assert sigma == 0.0

    def test_constant_targets_everywhere(self):
        rng = np.random.default_rng(0)
        X = rng.random((30, 3))
        forest = RandomSplitForest(n_trees=20, random_state=1).fit(X, np.full(30, 2.5))
        mu, sigma = forest.predict(rng.random((10, 3)), return_std=True)
        np.testing.assert_allclose(mu, 2.5)
        np.testing.assert_allclose(sigma, 0.0)

    def test_learns_square_function(self):
        # Train/test oracle: fit x^2 on 200 points, check held-out error.
        rng = np.random.default_rng(42)
        X = rng.uniform(-1, 1, size=(200, 1))
        forest = RandomSplitForest(n_trees=100, random_state=7).fit(X, X[:, 0] ** 2)
        grid = np.linspace(-0.95, 0.95, 101).reshape(-1, 1)
        mu = forest.predict(grid)
        mae = np.mean(np.abs(mu - grid[:, 0] ** 2))
        assert mae < 0.05

    def test_empty_data_rejected(self):
        with pytest.raises(ValueError):
            RandomSplitForest().fit(np.empty((0, 2)), [])

    def test_non_finite_targets_rejected(self):
        with pytest.raises(ValueError):
            RandomSplitForest().fit([[0.0], [1.0]], [1.0, np.nan])

    def test_bad_hyperparameters_rejected(self):
        with pytest.raises(ValueError):
            RandomSplitForest(n_trees=0).fit([[0.0]], [1.0])
        with pytest.raises(ValueError):
            RandomSplitForest(min_samples_split=1).fit([[0.0]], [1.0])
        with pytest.raises(ValueError):
            RandomSplitForest(max_features=0.0).fit([[0.0]], [1.0])


class TestPrediction:
    def test_two_tree_aggregation_convention(self):
        # mu is the tree mean and sigma the population std: {1, 3} -> 2, 1.
        forest = RandomSplitForest(n_trees=2)
        forest.trees_ = [FakeTree(1.0), FakeTree(3.0)]
        forest.n_features_in_ = 2
        mu, sigma = forest.predict([0.0, 0.0], return_std=True)
        assert mu == pytest.approx(2.0)
        assert sigma == pytest.approx(1.0)

    def test_agreeing_trees_have_zero_sigma(self):
        forest = RandomSplitForest(n_trees=3)
        forest.trees_ = [FakeTree(2.0)] * 3
        forest.n_features_in_ = 1
        _, sigma = forest.predict([0.5], return_std=True)
        assert sigma == 0.0

    def test_predictions_bounded_by_targets(self):
        rng = np.random.default_rng(3)
        X = rng.random((50, 4))
        y = rng.standard_normal(50) * 5
        forest = RandomSplitForest(n_trees=30, random_state=2).fit(X, y)
        mu, sigma = forest.predict(rng.random((100, 4)), return_std=True)
        assert np.all(mu >= y.min() - 1e-9)
        assert np.all(mu <= y.max() + 1e-9)
        assert np.all(sigma >= 0)

    def test_interpolates_training_points_without_bootstrap(self):
        rng = np.random.default_rng(5)
        X = rng.random((40, 2))
        y = rng.standard_normal(40)
        forest = RandomSplitForest(
            n_trees=10, bootstrap=False, min_samples_split=2, random_state=4
        ).fit(X, y)
        np.testing.assert_allclose(forest.predict(X), y, atol=1e-12)

    def test_seeded_determinism(self):
        rng = np.random.default_rng(8)
        X = rng.random((60, 3))
        y = rng.standard_normal(60)
        query = rng.random((20, 3))
        a = RandomSplitForest(n_trees=25, random_state=11).fit(X, y).predict(query)
        b = RandomSplitForest(n_trees=25, random_state=11).fit(X, y).predict(query)
        np.testing.assert_array_equal(a, b)

    def test_dimension_mismatch_rejected(self):
        forest = RandomSplitForest(n_trees=2, random_state=0).fit([[0.0, 1.0]], [1.0])
        with pytest.raises(ValueError):
            forest.predict([[0.0, 1.0, 2.0]])

    def test_predict_before_fit_rejected(self):
        with pytest.raises(NotFittedError):
            RandomSplitForest().predict([[0.0]])
