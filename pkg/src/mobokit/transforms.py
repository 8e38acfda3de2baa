"""Columnwise objective normalizations: identity, min-max-log, quantile-uniform.

The quantile-uniform transform maps each objective column through its
empirical CDF, F(v) = #{samples <= v} / n, which squashes arbitrary scales
and outliers into [0, 1] while preserving the ordering of observed values
(and therefore the Pareto subset of any set of observed rows). Unseen
values between two adjacent samples are interpolated linearly; values below
every sample map to 0 and above every sample to 1.

Rows containing non-finite entries (failed evaluations) never participate
in fitting. Fitted transforms are immutable; refitting builds a new state.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.exceptions import NotFittedError

__all__ = [
    "IdentityTransform",
    "MinMaxLogTransform",
    "QuantileUniformTransform",
    "make_transform",
    "TRANSFORM_ALIASES",
]

TRANSFORM_ALIASES = {
    "id": "identity",
    "identity": "identity",
    "mml": "minmax-log",
    "minmax-log": "minmax-log",
    "qu": "quantile-uniform",
    "quantile-uniform": "quantile-uniform",
}


def _finite_rows(Y) -> np.ndarray:
    mat = np.asarray(Y, dtype=float)
    if mat.ndim == 1:
        mat = mat.reshape(1, -1)
    if mat.ndim != 2 or mat.shape[1] == 0:
        raise ValueError(f"expected an (n, n_obj) objective matrix, got {mat.shape}")
    finite = mat[np.isfinite(mat).all(axis=1)]
    if finite.shape[0] == 0:
        raise ValueError("cannot fit a transform: no finite objective rows")
    return finite


class _ObjectiveTransform(BaseEstimator, TransformerMixin):
    """Shared fit/transform plumbing for the columnwise normalizations."""

    kind = ""

    def fit(self, Y, y=None):
        finite = _finite_rows(Y)
        self.n_objectives_ = finite.shape[1]
        self._fit_finite(finite)
        return self

    def _fit_finite(self, finite: np.ndarray) -> None:  # pragma: no cover
        raise NotImplementedError

    def _check_input(self, Y) -> tuple[np.ndarray, bool]:
        if not hasattr(self, "n_objectives_"):
            raise NotFittedError(f"{type(self).__name__} is not fitted")
        mat = np.asarray(Y, dtype=float)
        single = mat.ndim == 1
        if single:
            mat = mat.reshape(1, -1)
        if mat.ndim != 2 or mat.shape[1] != self.n_objectives_:
            raise ValueError(
                f"expected {self.n_objectives_} objective columns, got shape {mat.shape}"
            )
        return mat, single

    def transform(self, Y) -> np.ndarray:
        mat, single = self._check_input(Y)
        out = self._transform_matrix(mat)
        return out[0] if single else out

    def _transform_matrix(self, mat: np.ndarray) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def transform_bounds(self, upper_bounds) -> np.ndarray:
        raise NotImplementedError(
            f"{type(self).__name__} does not support bound mapping; "
            "objective bounds require the quantile-uniform transform"
        )


class IdentityTransform(_ObjectiveTransform):
    """No-op normalization; objectives pass through unchanged."""

    kind = "identity"

    def _fit_finite(self, finite: np.ndarray) -> None:
        pass

    def _transform_matrix(self, mat: np.ndarray) -> np.ndarray:
        return mat.copy()


class MinMaxLogTransform(_ObjectiveTransform):
    """Columnwise log((y - y_min) / y_max + epsilon).

    The denominator is the raw column maximum. Columns whose maximum is
    zero cannot be mapped and are rejected at fit time. Columns with a
    negative maximum produce NaN outside the observed low end; callers
    are expected to feed objectives with positive maxima.
    """

    kind = "minmax-log"

    def __init__(self, epsilon: float = 1e-9):
        self.epsilon = epsilon

    def _fit_finite(self, finite: np.ndarray) -> None:
        self.min_ = finite.min(axis=0)
        self.max_ = finite.max(axis=0)
        if np.any(self.max_ == 0.0):
            raise ValueError("min-max-log requires a non-zero column maximum")

    def _transform_matrix(self, mat: np.ndarray) -> np.ndarray:
        return np.log((mat - self.min_) / self.max_ + self.epsilon)


class QuantileUniformTransform(_ObjectiveTransform):
    """Columnwise empirical-CDF mapping onto [0, 1].

    Fitted state is the per-column sorted sample of finite values. Seen
    values map to #{samples <= v} / n exactly (ties map to identical
    outputs); unseen intermediate values interpolate linearly between the
    bracketing samples; values outside the observed range map to 0 or 1.
    """

    kind = "quantile-uniform"

    def _fit_finite(self, finite: np.ndarray) -> None:
        n = finite.shape[0]
        self.sorted_samples_ = np.sort(finite, axis=0)
        knots = []
        for j in range(finite.shape[1]):
            values, counts = np.unique(self.sorted_samples_[:, j], return_counts=True)
            knots.append((values, np.cumsum(counts) / n))
        self._knots_ = knots

    def _transform_column(self, values: np.ndarray, j: int) -> np.ndarray:
        xp, fp = self._knots_[j]
        out = np.interp(values, xp, fp)
        out = np.where(values < xp[0], 0.0, out)
        return out

    def _transform_matrix(self, mat: np.ndarray) -> np.ndarray:
        out = np.empty_like(mat)
        for j in range(mat.shape[1]):
            out[:, j] = self._transform_column(mat[:, j], j)
        return out

    def transform_bounds(self, upper_bounds) -> np.ndarray:
        """Map per-objective upper bounds through the fitted ECDFs.

        Bounds may contain +/-inf, which map to 1 and 0 respectively.
        """
        if not hasattr(self, "n_objectives_"):
            raise NotFittedError("QuantileUniformTransform is not fitted")
        ub = np.asarray(upper_bounds, dtype=float)
        if ub.shape != (self.n_objectives_,):
            raise ValueError(
                f"expected {self.n_objectives_} upper bounds, got shape {ub.shape}"
            )
        out = np.empty_like(ub)
        for j in range(self.n_objectives_):
            out[j] = self._transform_column(ub[j : j + 1], j)[0]
        return out


def make_transform(kind: str) -> _ObjectiveTransform:
    """Build a transform by name ("identity"/"id", "minmax-log"/"mml",
    "quantile-uniform"/"qu")."""
    canonical = TRANSFORM_ALIASES.get(str(kind).lower())
    if canonical == "identity":
        return IdentityTransform()
    if canonical == "minmax-log":
        return MinMaxLogTransform()
    if canonical == "quantile-uniform":
        return QuantileUniformTransform()
    raise ValueError(f"unknown transform kind {kind!r}")
