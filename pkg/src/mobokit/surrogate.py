"""Random-split regression forest with mean and dispersion predictions.

Each tree is grown on a bootstrap resample (optional) by drawing, at every
node, a random subset of ceil(max_features * dim) features, one uniformly
random threshold inside each candidate feature's node-local range, and
keeping the candidate that minimizes weighted child variance. Growth stops
when a node falls below min_samples_split or its targets are constant.
Tree growth is delegated to scikit-learn's random-splitter regression tree,
which implements exactly this rule.

The ensemble prediction is the mean of per-tree predictions; the
dispersion is their population standard deviation (divisor n_trees).
"""

from __future__ import annotations

import math

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.exceptions import NotFittedError
from sklearn.tree import ExtraTreeRegressor

__all__ = ["RandomSplitForest"]


class RandomSplitForest(BaseEstimator, RegressorMixin):
    """Ensemble of randomized regression trees.

    Args:
        n_trees: Number of trees in the forest.
        min_samples_split: Smallest node size still eligible for a split.
        max_features: Fraction of features drawn as split candidates per
            node; the candidate count is ceil(max_features * dim).
        bootstrap: Grow each tree on a size-n resample drawn with
            replacement instead of the full data.
        random_state: Seed or generator; fixes resampling and splits.
    """

    def __init__(
        self,
        n_trees: int = 100,
        min_samples_split: int = 2,
        max_features: float = 1.0,
        bootstrap: bool = True,
        random_state=None,
    ):
        self.n_trees = n_trees
        self.min_samples_split = min_samples_split
        self.max_features = max_features
        self.bootstrap = bootstrap
        self.random_state = random_state

    def fit(self, X, y):
        X = np.asarray(X, dtype=float)
        y = np.asarray(y, dtype=float).reshape(-1)
        if X.ndim != 2:
            raise ValueError(f"X must be 2-D, got shape {X.shape}")
        if X.shape[0] != y.shape[0]:
            raise ValueError(f"X and y disagree on sample count: {X.shape[0]} vs {y.shape[0]}")
        if X.shape[0] == 0:
            raise ValueError("cannot train a forest on empty data")
        if not np.isfinite(y).all():
            raise ValueError("training targets must be finite")
        if self.n_trees < 1:
            raise ValueError("n_trees must be >= 1")
        if self.min_samples_split < 2:
            raise ValueError("min_samples_split must be >= 2")
        if not 0.0 < self.max_features <= 1.0:
            raise ValueError("max_features must be in (0, 1]")

        n, dim = X.shape
        n_candidates = max(1, math.ceil(self.max_features * dim))
        rng = np.random.default_rng(self.random_state)
        trees = []
        for _ in range(self.n_trees):
            if self.bootstrap:
                idx = rng.integers(0, n, size=n)
                Xb, yb = X[idx], y[idx]
            else:
                Xb, yb = X, y
            tree = ExtraTreeRegressor(
                criterion="squared_error",
                splitter="random",
                max_features=n_candidates,
                min_samples_split=self.min_samples_split,
                random_state=int(rng.integers(0, 2**31 - 1)),
            )
            trees.append(tree.fit(Xb, yb))
        self.trees_ = trees
        self.n_features_in_ = dim
        return self

    def _tree_predictions(self, X: np.ndarray) -> np.ndarray:
        return np.stack([tree.predict(X) for tree in self.trees_])

    def predict(self, X, return_std: bool = False):
        """Predict the per-tree mean, and optionally the per-tree spread.

        Accepts a single feature vector or an (n, dim) matrix; outputs
        match the input's batch shape.
        """
        if not hasattr(self, "trees_"):
            raise NotFittedError("RandomSplitForest is not fitted")
        X = np.asarray(X, dtype=float)
        single = X.ndim == 1
        if single:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != self.n_features_in_:
            raise ValueError(
                f"expected {self.n_features_in_} features, got shape {X.shape}"
            )
        preds = self._tree_predictions(X)
        mu = preds.mean(axis=0)
        if not return_std:
            return float(mu[0]) if single else mu
        sigma = preds.std(axis=0)
        # agreeing trees mean exactly zero dispersion, not rounding residue
        sigma[np.ptp(preds, axis=0) == 0.0] = 0.0
        if single:
            return float(mu[0]), float(sigma[0])
        return mu, sigma
