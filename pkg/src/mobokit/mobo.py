"""Sequential multi-objective Bayesian optimizer.

Each `observe` call appends the new evaluations and rebuilds the whole
modeling pipeline over the full history: fit the objective normalization
on the finite rows, map the rows through it, inflate rows violating the
objective upper bounds by a penalty proportional to their total
(normalized) violation, scalarize everything with a freshly sampled
simplex weight vector, impute failed rows with the worst finite scalar,
and retrain the forest on the encoded inputs.

`suggest` returns random configurations until the initial budget is spent
and afterwards minimizes the lower confidence bound mu - kappa * sigma
over a random candidate pool.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .indicators import extract_pareto_front
from .scalarize import SCALARIZATION_ALIASES, make_scalarizer, sample_simplex_weights
from .space import Configuration, SearchSpace
from .surrogate import RandomSplitForest
from .transforms import TRANSFORM_ALIASES, QuantileUniformTransform, make_transform

__all__ = ["FailureMarker", "MoboOptimizer", "apply_objective_penalty"]

DEFAULT_CANDIDATE_POOL = 8192


@dataclass(frozen=True)
class FailureMarker:
    """Stands in for the objective vector of a failed evaluation."""

    reason: str = ""


def apply_objective_penalty(
    normalized: np.ndarray, normalized_bounds: np.ndarray | None, gamma: float
) -> np.ndarray:
    """Add each row's scaled total bound violation to all of its objectives.

    With bounds ub (already on the normalized scale), a row y gains
    p = gamma * sum_i max(y_i - ub_i, 0) on every component. Rows within
    bounds are unchanged; with no bounds the input is returned as-is.
    """
    Y = np.asarray(normalized, dtype=float)
    if normalized_bounds is None:
        return Y
    ub = np.asarray(normalized_bounds, dtype=float)
    if ub.shape != (Y.shape[-1],):
        raise ValueError(f"bounds shape {ub.shape} does not match objectives {Y.shape}")
    violation = np.maximum(Y - ub, 0.0).sum(axis=-1)
    return Y + gamma * violation[..., None]


class MoboOptimizer:
    """Multi-objective Bayesian optimizer over a mixed search space.

    Args:
        space: Search space to optimize over.
        n_objectives: Length of objective vectors.
        n_initial: Evaluations answered by random sampling before the
            surrogate is consulted.
        upper_bounds: Optional per-objective upper bounds; violations are
            penalized when the quantile-uniform transform is active
            (with other transforms the penalty is a no-op).
        gamma: Penalty strength on the total normalized violation.
        transform: Objective normalization ("identity", "minmax-log",
            "quantile-uniform").
        scalarization: "linear", "chebyshev", or "pbi".
        pbi_theta / pbi_signed: PBI parameters, ignored otherwise.
        n_trees, min_samples_split, max_features, bootstrap: forest setup.
        candidate_pool_size: Random candidates scored per suggest call.
        random_state: Seed or generator driving all stochastic choices.
    """

    def __init__(
        self,
        space: SearchSpace,
        n_objectives: int,
        *,
        n_initial: int = 10,
        upper_bounds=None,
        gamma: float = 2.0,
        transform: str = "quantile-uniform",
        scalarization: str = "linear",
        pbi_theta: float = 5.0,
        pbi_signed: bool = False,
        n_trees: int = 100,
        min_samples_split: int = 2,
        max_features: float = 1.0,
        bootstrap: bool = True,
        candidate_pool_size: int = DEFAULT_CANDIDATE_POOL,
        random_state=None,
    ):
        if n_objectives < 1:
            raise ValueError("need at least one objective")
        if n_initial < 1:
            raise ValueError("n_initial must be >= 1")
        if candidate_pool_size < 1:
            raise ValueError("candidate_pool_size must be >= 1")
        if str(transform).lower() not in TRANSFORM_ALIASES:
            raise ValueError(f"unknown transform {transform!r}")
        if str(scalarization).lower() not in SCALARIZATION_ALIASES:
            raise ValueError(f"unknown scalarization {scalarization!r}")
        self.space = space
        self.n_objectives = n_objectives
        self.n_initial = n_initial
        self.gamma = float(gamma)
        self.transform_kind = TRANSFORM_ALIASES[str(transform).lower()]
        self.scalarization_kind = SCALARIZATION_ALIASES[str(scalarization).lower()]
        self._scalarizer = make_scalarizer(
            self.scalarization_kind, theta=pbi_theta, signed_pbi=pbi_signed
        )
        self.forest_params = {
            "n_trees": n_trees,
            "min_samples_split": min_samples_split,
            "max_features": max_features,
            "bootstrap": bootstrap,
        }
        self.candidate_pool_size = candidate_pool_size
        if upper_bounds is None:
            self.upper_bounds = None
        else:
            ub = np.asarray(upper_bounds, dtype=float)
            if ub.shape != (n_objectives,):
                raise ValueError(
                    f"upper_bounds must have length {n_objectives}, got {ub.shape}"
                )
            self.upper_bounds = ub
        self._rng = (
            random_state
            if isinstance(random_state, np.random.Generator)
            else np.random.default_rng(random_state)
        )
        self._configs: list[Configuration] = []
        self._encoded: list[np.ndarray] = []
        self._rows: list[np.ndarray | FailureMarker] = []
        self.forest_: RandomSplitForest | None = None
        self.transform_ = None
        self.scalarized_targets_: np.ndarray | None = None
        self.last_weights_: np.ndarray | None = None
        self.utopia_: np.ndarray | None = None

    @property
    def num_observations(self) -> int:
        return len(self._rows)

    @property
    def configs(self) -> tuple[Configuration, ...]:
        return tuple(self._configs)

    @property
    def objective_rows(self) -> tuple[np.ndarray | FailureMarker, ...]:
        return tuple(self._rows)

    def _coerce_row(self, y) -> np.ndarray | FailureMarker:
        if y is None:
            return FailureMarker("missing objective")
        if isinstance(y, FailureMarker):
            return y
        row = np.asarray(y, dtype=float).reshape(-1)
        if row.shape != (self.n_objectives,):
            raise ValueError(
                f"objective vector must have length {self.n_objectives}, got {row.shape}"
            )
        if not np.isfinite(row).all():
            return FailureMarker("non-finite objective")
        return row

    def finite_objectives(self) -> np.ndarray:
        """Raw objective matrix of the finite observations, in arrival order."""
        rows = [r for r in self._rows if not isinstance(r, FailureMarker)]
        if not rows:
            return np.empty((0, self.n_objectives))
        return np.vstack(rows)

    def observe(self, configs, objectives) -> None:
        """Ingest evaluated configurations and rebuild the surrogate."""
        configs = list(configs)
        objectives = list(objectives)
        if len(configs) != len(objectives):
            raise ValueError(
                f"configs and objectives disagree: {len(configs)} vs {len(objectives)}"
            )
        # validate the whole batch before touching state, so a bad entry
        # cannot leave the configuration and objective lists out of step
        encoded = [self.space.encode(config) for config in configs]
        rows = [self._coerce_row(y) for y in objectives]
        self._encoded.extend(encoded)
        self._configs.extend(configs)
        self._rows.extend(rows)
        self._refit()

    def _refit(self) -> None:
        finite_mask = np.array(
            [not isinstance(r, FailureMarker) for r in self._rows], dtype=bool
        )
        if not finite_mask.any():
            self.forest_ = None
            self.transform_ = None
            self.scalarized_targets_ = None
            return
        finite = np.vstack([self._rows[i] for i in np.flatnonzero(finite_mask)])

        transform = make_transform(self.transform_kind).fit(finite)
        normalized = transform.transform(finite)

        bounds_u = None
        if self.upper_bounds is not None and isinstance(
            transform, QuantileUniformTransform
        ):
            bounds_u = transform.transform_bounds(self.upper_bounds)
        penalized = apply_objective_penalty(normalized, bounds_u, self.gamma)

        utopia = penalized.min(axis=0)
        weights = sample_simplex_weights(self.n_objectives, self._rng)
        scalar_finite = np.asarray(
            self._scalarizer(penalized, weights, utopia), dtype=float
        ).reshape(-1)

        targets = np.empty(len(self._rows), dtype=float)
        targets[finite_mask] = scalar_finite
        targets[~finite_mask] = scalar_finite.max()

        forest_seed = int(self._rng.integers(0, 2**31 - 1))
        forest = RandomSplitForest(random_state=forest_seed, **self.forest_params)
        forest.fit(np.vstack(self._encoded), targets)

        self.transform_ = transform
        self.normalized_bounds_ = bounds_u
        self.utopia_ = utopia
        self.last_weights_ = weights
        self.scalarized_targets_ = targets
        self.forest_ = forest

    def suggest(self, kappa: float = 1.96, candidates=None) -> Configuration:
        """Pick the next configuration to evaluate.

        Before `n_initial` observations exist (or while no finite
        observation has been seen) the suggestion is a random sample.
        Afterwards the lower confidence bound mu - kappa * sigma is
        minimized over `candidates` (or a fresh random pool), ties broken
        by lowest index.
        """
        if len(self._rows) < self.n_initial or self.forest_ is None:
            return self.space.sample(self._rng)
        if candidates is not None:
            pool = list(candidates)
            if not pool:
                raise ValueError("candidate pool must be non-empty")
            encoded = np.vstack([self.space.encode(c) for c in pool])
            mu, sigma = self.forest_.predict(encoded, return_std=True)
            best = int(np.argmin(mu - kappa * sigma))
            return pool[best]
        columns = self.space.sample_raw_columns(self.candidate_pool_size, self._rng)
        encoded = self.space.encode_columns(columns)
        mu, sigma = self.forest_.predict(encoded, return_std=True)
        best = int(np.argmin(mu - kappa * sigma))
        return self.space.config_from_columns(columns, best)

    def pareto_archive(self) -> np.ndarray:
        """Pareto front of the raw finite objective vectors observed so far."""
        return extract_pareto_front(self.finite_objectives())
