"""Comparator optimizers: random search and a steady-state NSGA-II.

The NSGA-II variant is asynchronous-friendly: `ask` hands out one
configuration at a time (random while the initial population fills,
afterwards a child bred by binary tournament, simulated binary crossover,
and polynomial mutation on the encoded vectors, with categoricals
inheriting from a parent and mutating by uniform resample), and `tell`
inserts one evaluated individual, trimming the pool back to the
population size by (rank, crowding). Failed evaluations rank below every
valid individual.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .mobo import FailureMarker
from .space import CATEGORICAL, Configuration, SearchSpace

__all__ = [
    "RandomSearch",
    "NsgaConfig",
    "NsgaOptimizer",
    "fast_nondominated_sort",
    "crowding_distance",
]


class RandomSearch:
    """Suggests independent prior samples; observations are ignored."""

    def __init__(self, space: SearchSpace, random_state=None):
        self.space = space
        self._rng = (
            random_state
            if isinstance(random_state, np.random.Generator)
            else np.random.default_rng(random_state)
        )

    def ask(self) -> Configuration:
        return self.space.sample(self._rng)

    def tell(self, config: Configuration, objectives) -> None:
        pass


def fast_nondominated_sort(points) -> list[list[int]]:
    """Partition point indices into dominance ranks.

    Rank 0 is the Pareto front of the whole set; rank k is the Pareto
    front once ranks below k are removed.
    """
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return []
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    n = pts.shape[0]
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    domination_count = np.zeros(n, dtype=int)
    for p in range(n):
        le = np.all(pts[p] <= pts, axis=1) & np.any(pts[p] < pts, axis=1)
        ge = np.all(pts <= pts[p], axis=1) & np.any(pts < pts[p], axis=1)
        dominated_by[p] = list(np.flatnonzero(le))
        domination_count[p] = int(ge.sum())
    fronts = [list(np.flatnonzero(domination_count == 0))]
    while True:
        nxt = []
        for p in fronts[-1]:
            for q in dominated_by[p]:
                domination_count[q] -= 1
                if domination_count[q] == 0:
                    nxt.append(q)
        if not nxt:
            return fronts
        fronts.append(sorted(nxt))


def crowding_distance(front) -> np.ndarray:
    """Per-point crowding of one front; boundary points are infinite.

    Interior points accumulate, per objective, the gap between their
    neighbors normalized by the objective's range; zero-range objectives
    contribute nothing.
    """
    pts = np.asarray(front, dtype=float)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    n = pts.shape[0]
    if n == 0:
        raise ValueError("crowding distance of an empty front is undefined")
    if n <= 2:
        return np.full(n, np.inf)
    distance = np.zeros(n)
    for m in range(pts.shape[1]):
        order = np.argsort(pts[:, m], kind="stable")
        lo, hi = pts[order[0], m], pts[order[-1], m]
        distance[order[0]] = np.inf
        distance[order[-1]] = np.inf
        span = hi - lo
        if span <= 0:
            continue
        gaps = (pts[order[2:], m] - pts[order[:-2], m]) / span
        distance[order[1:-1]] += gaps
    return distance


@dataclass(frozen=True)
class NsgaConfig:
    population_size: int = 50
    crossover_prob: float = 0.9
    mutation_prob: float | None = None  # defaults to 1 / n_params
    eta_crossover: float = 15.0
    eta_mutation: float = 20.0

    def __post_init__(self) -> None:
        if self.population_size < 4 or self.population_size % 2:
            raise ValueError("population_size must be even and >= 4")
        for name in ("crossover_prob", "mutation_prob"):
            value = getattr(self, name)
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if self.eta_crossover <= 0 or self.eta_mutation <= 0:
            raise ValueError("distribution indices must be positive")


@dataclass
class _Individual:
    config: Configuration
    objectives: np.ndarray | None  # None marks a failure


class NsgaOptimizer:
    """Steady-state NSGA-II over a mixed search space."""

    def __init__(
        self,
        space: SearchSpace,
        n_objectives: int,
        config: NsgaConfig | None = None,
        random_state=None,
    ):
        self.space = space
        self.n_objectives = n_objectives
        self.config = config or NsgaConfig()
        self.mutation_prob = (
            self.config.mutation_prob
            if self.config.mutation_prob is not None
            else 1.0 / len(space)
        )
        self._rng = (
            random_state
            if isinstance(random_state, np.random.Generator)
            else np.random.default_rng(random_state)
        )
        self.pool: list[_Individual] = []
        self._asked = 0

    def _rank_and_crowd(self) -> tuple[np.ndarray, np.ndarray]:
        n = len(self.pool)
        rank = np.full(n, np.inf)
        crowd = np.full(n, -np.inf)
        valid = [i for i, ind in enumerate(self.pool) if ind.objectives is not None]
        if valid:
            objs = np.vstack([self.pool[i].objectives for i in valid])
            for r, front in enumerate(fast_nondominated_sort(objs)):
                members = [valid[i] for i in front]
                dist = crowding_distance(objs[front])
                for member, d in zip(members, dist):
                    rank[member] = r
                    crowd[member] = d
        return rank, crowd

    def _tournament(self, rank: np.ndarray, crowd: np.ndarray) -> int:
        i, j = self._rng.integers(0, len(self.pool), size=2)
        if rank[i] < rank[j]:
            return int(i)
        if rank[j] < rank[i]:
            return int(j)
        return int(i) if crowd[i] >= crowd[j] else int(j)

    def _sbx_pair(self, a: float, b: float, low: float, high: float) -> tuple[float, float]:
        if abs(a - b) < 1e-14:
            return a, b
        u = self._rng.random()
        eta = self.config.eta_crossover
        beta = (2 * u) ** (1 / (eta + 1)) if u <= 0.5 else (1 / (2 * (1 - u))) ** (1 / (eta + 1))
        c1 = 0.5 * ((1 + beta) * a + (1 - beta) * b)
        c2 = 0.5 * ((1 - beta) * a + (1 + beta) * b)
        return float(np.clip(c1, low, high)), float(np.clip(c2, low, high))

    def _polynomial_mutation(self, v: float, low: float, high: float) -> float:
        span = high - low
        if span <= 0:
            return v
        u = self._rng.random()
        eta = self.config.eta_mutation
        if u < 0.5:
            delta = (2 * u) ** (1 / (eta + 1)) - 1
        else:
            delta = 1 - (2 * (1 - u)) ** (1 / (eta + 1))
        return float(np.clip(v + delta * span, low, high))

    def _breed(self, parent1: _Individual, parent2: _Individual) -> Configuration:
        values = list(parent1.config.values)
        p2_values = parent2.config.values
        crossed = self._rng.random() <= self.config.crossover_prob
        side = None
        for g, param in enumerate(self.space.params):
            if param.kind == CATEGORICAL:
                if crossed and self._rng.random() < 0.5:
                    values[g] = p2_values[g]
                if self._rng.random() < self.mutation_prob:
                    values[g] = param.categories[
                        int(self._rng.integers(0, len(param.categories)))
                    ]
                continue
            low, high = param.encoded_interval()
            enc = param.encode_value(values[g])
            if crossed and self._rng.random() < 0.5:
                c1, c2 = self._sbx_pair(enc, param.encode_value(p2_values[g]), low, high)
                if side is None:
                    side = self._rng.random() < 0.5
                enc = c1 if side else c2
                values[g] = param.decode_feature(enc)
            if self._rng.random() < self.mutation_prob:
                enc = param.encode_value(values[g])
                values[g] = param.decode_feature(self._polynomial_mutation(enc, low, high))
        return Configuration(tuple(zip(self.space.names, values)))

    def ask(self) -> Configuration:
        self._asked += 1
        if self._asked <= self.config.population_size or not self.pool:
            return self.space.sample(self._rng)
        rank, crowd = self._rank_and_crowd()
        parent1 = self.pool[self._tournament(rank, crowd)]
        parent2 = self.pool[self._tournament(rank, crowd)]
        return self._breed(parent1, parent2)

    def tell(self, config: Configuration, objectives) -> _Individual | None:
        """Insert an evaluated individual; returns the evicted one, if any."""
        if objectives is None or isinstance(objectives, FailureMarker):
            row = None
        else:
            row = np.asarray(objectives, dtype=float).reshape(-1)
            if row.shape != (self.n_objectives,):
                raise ValueError(
                    f"objective vector must have length {self.n_objectives}"
                )
            if not np.isfinite(row).all():
                row = None
        self.pool.append(_Individual(config, row))
        if len(self.pool) <= self.config.population_size:
            return None
        rank, crowd = self._rank_and_crowd()
        worst_rank = rank.max()
        worst = np.flatnonzero(rank == worst_rank)
        evict = worst[int(np.argmin(crowd[worst]))]
        return self.pool.pop(int(evict))
