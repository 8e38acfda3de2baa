import numpy as np
import pytest
from scipy import stats

from mobokit.baselines import (
    NsgaConfig,
    NsgaOptimizer,
    RandomSearch,
    crowding_distance,
    fast_nondominated_sort,
)
from mobokit.indicators import extract_pareto_front, gd_plus
from mobokit.mobo import FailureMarker
from mobokit.space import SearchSpace, categorical, continuous, integer


def mixed_space():
    return SearchSpace(
        (
            continuous("x", 0.0, 1.0),
            continuous("lr", 1e-4, 1e-1, prior="log-uniform"),
            integer("n", 2, 20),
            categorical("kind", ("a", "b", "c", "d")),
        )
    )


class TestRandomSearch:
    def test_mirrors_space_sampling(self):
        space = mixed_space()
        search = RandomSearch(space, random_state=3)
        direct_rng = np.random.default_rng(3)
        for _ in range(10):
            assert search.ask().values == space.sample(direct_rng).values

    def test_seeded_determinism(self):
        space = mixed_space()
        a = [RandomSearch(space, 5).ask().values for _ in range(1)]
        b = [RandomSearch(space, 5).ask().values for _ in range(1)]
        assert a == b

    def test_categorical_marginals_uniform(self):
        # Chi-squared goodness of fit on 10^4 categorical draws at alpha=0.01.
        space = mixed_space()
        search = RandomSearch(space, random_state=11)
        counts = {c: 0 for c in ("a", "b", "c", "d")}
        for _ in range(10_000):
            counts[search.ask()["kind"]] += 1
        observed = np.array(list(counts.values()))
        statistic = ((observed - 2500.0) ** 2 / 2500.0).sum()
        assert statistic < stats.chi2.ppf(0.99, df=3)

    def test_tell_is_a_no_op(self):
        search = RandomSearch(mixed_space(), 0)
        search.tell(search.ask(), [1.0, 2.0])


def peel_off_oracle(points):
    """Ranks by repeatedly removing the Pareto front."""
    points = np.asarray(points, dtype=float)
    remaining = list(range(len(points)))
    fronts = []
    while remaining:
        subset = points[remaining]
        front_pts = extract_pareto_front(subset)
        front_set = {tuple(p) for p in front_pts}
        this_front = [i for i in remaining if tuple(points[i]) in front_set]
        fronts.append(sorted(this_front))
        remaining = [i for i in remaining if i not in this_front]
    return fronts


class TestNondominatedSort:
    def test_mutually_nondominated_is_single_rank(self):
        pts = [(0, 3), (1, 2), (2, 1), (3, 0)]
        fronts = fast_nondominated_sort(pts)
        assert len(fronts) == 1
        assert sorted(fronts[0]) == [0, 1, 2, 3]

    def test_totally_ordered_chain(self):
        pts = [(2, 2), (1, 1), (0, 0)]
        fronts = fast_nondominated_sort(pts)
        assert [sorted(f) for f in fronts] == [[2], [1], [0]]

    def test_matches_peel_off_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            pts = rng.random((int(rng.integers(2, 40)), int(rng.integers(2, 4))))
            got = [sorted(f) for f in fast_nondominated_sort(pts)]
            assert got == peel_off_oracle(pts)

    def test_rank_zero_equals_pareto_front(self):
        rng = np.random.default_rng(1)
        pts = rng.random((40, 3))
        rank0 = sorted(fast_nondominated_sort(pts)[0])
        front = extract_pareto_front(pts)
        assert sorted(map(tuple, pts[rank0])) == sorted(map(tuple, front))

    def test_empty_input(self):
        assert fast_nondominated_sort(np.empty((0, 2))) == []


def crowding_oracle(front):
    """Direct textbook formula, computed without the library code."""
    front = np.asarray(front, dtype=float)
    n, m = front.shape
    if n <= 2:
        return np.full(n, np.inf)
    out = np.zeros(n)
    for j in range(m):
        order = sorted(range(n), key=lambda i: front[i, j])
        out[order[0]] = np.inf
        out[order[-1]] = np.inf
        span = front[order[-1], j] - front[order[0], j]
        if span == 0:
            continue
        for pos in range(1, n - 1):
            if np.isinf(out[order[pos]]):
                continue
            out[order[pos]] += (front[order[pos + 1], j] - front[order[pos - 1], j]) / span
    return out


class TestCrowdingDistance:
    def test_two_points_all_infinite(self):
        np.testing.assert_array_equal(
            crowding_distance([(0, 1), (1, 0)]), [np.inf, np.inf]
        )

    def test_three_collinear_equally_spaced(self):
        # The middle point gets one full normalized gap per objective.
        dist = crowding_distance([(0.0, 1.0), (0.5, 0.5), (1.0, 0.0)])
        assert dist[0] == np.inf and dist[2] == np.inf
        assert dist[1] == pytest.approx(2.0)

    def test_matches_direct_formula(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            front = rng.random((10, int(rng.integers(2, 4))))
            np.testing.assert_allclose(
                crowding_distance(front), crowding_oracle(front)
            )

    def test_degenerate_objective_contributes_zero(self):
        front = np.array([[0.0, 1.0], [0.5, 1.0], [1.0, 1.0]])
        dist = crowding_distance(front)
        assert dist[1] == pytest.approx(1.0)

    def test_empty_front_rejected(self):
        with pytest.raises(ValueError):
            crowding_distance(np.empty((0, 2)))


class TestNsgaConfigValidation:
    def test_population_must_be_even_and_at_least_four(self):
        with pytest.raises(ValueError):
            NsgaConfig(population_size=5)
        with pytest.raises(ValueError):
            NsgaConfig(population_size=2)

    def test_probability_ranges(self):
        with pytest.raises(ValueError):
            NsgaConfig(crossover_prob=1.5)
        with pytest.raises(ValueError):
            NsgaConfig(eta_mutation=0.0)


class TestNsgaOptimizer:
    def objective(self, config):
        x = np.array([config["x"], config["lr"], config["n"] / 20.0])
        return np.array([float(np.sum((x - 0.2) ** 2)), float(np.sum((x - 0.8) ** 2))])

    def test_initial_population_is_random_and_in_bounds(self):
        space = mixed_space()
        opt = NsgaOptimizer(space, 2, NsgaConfig(population_size=8), random_state=0)
        for _ in range(8):
            space.validate_config(opt.ask())

    def test_no_operators_returns_a_pool_member(self):
        space = mixed_space()
        opt = NsgaOptimizer(
            space,
            2,
            NsgaConfig(population_size=4, crossover_prob=0.0, mutation_prob=0.0),
            random_state=1,
        )
        seen = []
        for _ in range(4):
            config = opt.ask()
            seen.append(config.values)
            opt.tell(config, self.objective(config))
        child = opt.ask()
        assert child.values in seen

    def test_pool_never_exceeds_population_and_rank0_survives(self):
        space = mixed_space()
        rng = np.random.default_rng(3)
        opt = NsgaOptimizer(space, 2, NsgaConfig(population_size=10), random_state=2)
        for step in range(200):
            config = opt.ask()
            objectives = rng.random(2)
            before = [
                (ind.config.values, None if ind.objectives is None else tuple(ind.objectives))
                for ind in opt.pool
            ]
            evicted = opt.tell(config, objectives)
            assert len(opt.pool) <= 10
            if evicted is not None and evicted.objectives is not None:
                valid = [np.array(o) for _, o in before if o is not None]
                ranks = fast_nondominated_sort(np.vstack(valid + [objectives]))
                if len(ranks) > 1:
                    rank0 = {tuple(v) for v in np.vstack(valid + [objectives])[ranks[0]]}
                    assert tuple(evicted.objectives) not in rank0

    def test_failures_evicted_before_valid_individuals(self):
        space = mixed_space()
        opt = NsgaOptimizer(space, 2, NsgaConfig(population_size=4), random_state=4)
        rng = np.random.default_rng(5)
        for _ in range(4):
            opt.tell(space.sample(rng), rng.random(2))
        evicted = opt.tell(space.sample(rng), FailureMarker("dead"))
        assert evicted is not None
        assert evicted.objectives is None

    def test_seeded_determinism(self):
        space = mixed_space()

        def run_once():
            opt = NsgaOptimizer(space, 2, NsgaConfig(population_size=6), random_state=9)
            history = []
            for _ in range(40):
                config = opt.ask()
                history.append(config.values)
                opt.tell(config, self.objective(config))
            return history

        assert run_once() == run_once()

    def test_converges_on_two_sphere_toy(self):
        # GD+ to the analytic front must shrink at least 5x from the
        # initial population to the final rank-0 front.
        space = SearchSpace(tuple(continuous(f"x{i}", 0.0, 1.0) for i in range(3)))

        def objective(config):
            x = np.asarray(config.values)
            return np.array(
                [float(np.sum((x - 0.25) ** 2)), float(np.sum((x - 0.75) ** 2))]
            )

        ts = np.linspace(0.0, 1.0, 200)
        centers = 0.25 + 0.5 * ts
        targets = np.column_stack(
            [3 * (centers - 0.25) ** 2, 3 * (centers - 0.75) ** 2]
        )

        opt = NsgaOptimizer(space, 2, NsgaConfig(population_size=20), random_state=7)
        initial = []
        history = []
        for step in range(500):
            config = opt.ask()
            y = objective(config)
            if step < 20:
                initial.append(y)
            history.append(y)
            opt.tell(config, y)
        initial_front = extract_pareto_front(np.vstack(initial))
        final_pool = np.vstack([ind.objectives for ind in opt.pool if ind.objectives is not None])
        final_front = final_pool[fast_nondominated_sort(final_pool)[0]]
        improvement = gd_plus(initial_front, targets) / gd_plus(final_front, targets)
        assert improvement >= 5.0
