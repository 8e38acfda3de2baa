import json
import math
import threading

import numpy as np
import pytest

from mobokit.dbo import (
    Agent,
    AgentConfig,
    Archive,
    Trial,
    evaluate_safely,
    kappa_schedule,
    load_archive,
    record_to_trial,
    run_simulated,
    run_threaded,
    sample_initial_tradeoff,
    save_archive,
    trial_to_record,
    utilization_curve,
)
from mobokit.mobo import FailureMarker
from mobokit.space import Configuration, SearchSpace, continuous


def unit_space(dim=2):
    return SearchSpace(tuple(continuous(f"x{i}", 0.0, 1.0) for i in range(dim)))


def cheap_objective(config):
    x = np.asarray(config.values)
    return np.array([float(x[0]), float(1.0 - x[0])])


def make_agents(n_agents, space, archive, seed=0, on_observe=None, **kwargs):
    kwargs.setdefault("n_trees", 4)
    kwargs.setdefault("candidate_pool_size", 32)
    kwargs.setdefault("n_initial", 4)
    return [
        Agent(
            AgentConfig(rank=r, n_agents=n_agents, seed_global=seed),
            space,
            2,
            archive,
            on_observe=on_observe,
            **kwargs,
        )
        for r in range(n_agents)
    ]


class TestKappaSchedule:
    def test_step_zero_returns_kappa0(self):
        assert kappa_schedule(1.5, 0, 0.25, 25) == 1.5

    def test_period_resets(self):
        assert kappa_schedule(1.5, 25, 0.25, 25) == 1.5

    def test_direct_evaluation(self):
        value = kappa_schedule(1.96, 4, 0.25, 25)
        assert value == pytest.approx(1.96 * math.exp(-1.0))
        assert value == pytest.approx(0.7210, abs=1e-4)

    def test_stays_in_half_open_interval(self):
        for t in range(60):
            value = kappa_schedule(2.0, t, 0.3, 7)
            assert 0 < value <= 2.0

    def test_periodicity(self):
        for t in range(30):
            assert kappa_schedule(2.0, t, 0.3, 7) == pytest.approx(
                kappa_schedule(2.0, t + 7, 0.3, 7)
            )

    def test_invalid_arguments(self):
        with pytest.raises(ValueError):
            kappa_schedule(1.0, -1, 0.25, 25)
        with pytest.raises(ValueError):
            kappa_schedule(1.0, 0, 0.25, 0)


class TestInitialTradeoff:
    def test_exponential_mean(self):
        rng = np.random.default_rng(123)
        draws = [sample_initial_tradeoff(1.96, rng) for _ in range(100_000)]
        assert np.mean(draws) == pytest.approx(1.96, rel=0.02)

    def test_positive_mean_required(self):
        with pytest.raises(ValueError):
            sample_initial_tradeoff(0.0, np.random.default_rng(0))


class TestSeedProtocol:
    def protocol_oracle(self, seed_global, kappa_mean, n_agents, rank):
        g = np.random.default_rng(seed_global)
        kappa0 = -kappa_mean * math.log(1.0 - g.random())
        seeds = g.integers(0, 2**63, size=n_agents)
        return kappa0, int(seeds[rank])

    def test_matches_independent_reimplementation(self):
        space = unit_space()
        archive = Archive()
        agent = Agent(
            AgentConfig(rank=2, n_agents=5, seed_global=99), space, 2, archive
        )
        kappa0, seed_local = self.protocol_oracle(99, 1.96, 5, 2)
        assert agent.kappa0 == pytest.approx(kappa0)
        assert agent.seed_local == seed_local

    def test_single_agent_takes_the_only_seed(self):
        space = unit_space()
        agent = Agent(AgentConfig(rank=0, n_agents=1, seed_global=5), space, 2, Archive())
        _, seed_local = self.protocol_oracle(5, 1.96, 1, 0)
        assert agent.seed_local == seed_local

    def test_same_global_seed_shares_kappa0_but_not_streams(self):
        space = unit_space()
        archive = Archive()
        a, b = make_agents(2, space, archive, seed=7)
        assert a.kappa0 == b.kappa0
        assert a.seed_local != b.seed_local
        assert a.optimizer.suggest(1.0).values != b.optimizer.suggest(1.0).values

    def test_invalid_rank_rejected(self):
        with pytest.raises(ValueError):
            AgentConfig(rank=3, n_agents=2)


class TestArchive:
    def make_trial(self, rank, step, value=0.5):
        return Trial(
            agent_rank=rank,
            local_step=step,
            config=Configuration((("x0", value),)),
            objectives=np.array([value, 1 - value]),
            t_submit=float(step),
            t_complete=float(step) + 1.0,
            kappa_used=1.0,
        )

    def test_readers_get_every_entry_exactly_once(self):
        archive = Archive()
        reader = archive.register_reader()
        seen = []
        for step in range(5):
            archive.append(self.make_trial(0, step))
            if step % 2 == 0:
                seen.extend(archive.read_new(reader))
        seen.extend(archive.read_new(reader))
        assert [t.local_step for t in seen] == [0, 1, 2, 3, 4]
        assert archive.read_new(reader) == []

    def test_reader_order_consistency(self):
        archive = Archive()
        r1 = archive.register_reader()
        r2 = archive.register_reader()
        for step in range(6):
            archive.append(self.make_trial(step % 2, step))
        first = [t.local_step for t in archive.read_new(r1)]
        chunks = []
        chunks.extend(archive.read_new(r2))
        archive.append(self.make_trial(0, 6))
        chunks.extend(archive.read_new(r2))
        assert first == [0, 1, 2, 3, 4, 5]
        assert [t.local_step for t in chunks] == [0, 1, 2, 3, 4, 5, 6]

    def test_owner_never_sees_own_trials(self):
        archive = Archive()
        reader = archive.register_reader(owner_rank=1)
        archive.append(self.make_trial(0, 0))
        archive.append(self.make_trial(1, 0))
        archive.append(self.make_trial(2, 0))
        ranks = [t.agent_rank for t in archive.read_new(reader)]
        assert ranks == [0, 2]

    def test_concurrent_appends_all_land(self):
        archive = Archive()

        def worker(rank):
            for step in range(50):
                archive.append(self.make_trial(rank, step))

        threads = [threading.Thread(target=worker, args=(r,)) for r in range(4)]
        for t in threads:
            t.start()
        for t in threads:
            t.join()
        assert len(archive) == 200

    def test_trial_timestamps_validated(self):
        with pytest.raises(ValueError):
            Trial(0, 0, Configuration((("x", 1.0),)), np.array([1.0]), 2.0, 1.0, None)


class TestEvaluateSafely:
    def test_exception_becomes_failure(self):
        def boom(config):
            raise RuntimeError("dead")

        result = evaluate_safely(boom, Configuration((("x", 1.0),)))
        assert isinstance(result, FailureMarker)
        assert "dead" in result.reason

    def test_non_finite_becomes_failure(self):
        result = evaluate_safely(
            lambda c: [np.inf, 1.0], Configuration((("x", 1.0),))
        )
        assert isinstance(result, FailureMarker)

    def test_plain_vector_passes_through(self):
        result = evaluate_safely(lambda c: [1.0, 2.0], Configuration((("x", 1.0),)))
        np.testing.assert_array_equal(result, [1.0, 2.0])


class TestSimulatedRuns:
    def test_zero_budget_leaves_archive_empty(self):
        space = unit_space()
        archive = Archive()
        agents = make_agents(2, space, archive)
        run_simulated(agents, cheap_objective, max_trials=0)
        assert len(archive) == 0

    def test_single_agent_initial_budget_is_all_random(self):
        space = unit_space()
        archive = Archive()
        agents = make_agents(1, space, archive, n_initial=6)
        run_simulated(agents, cheap_objective, max_trials=6, latency=1.0)
        trials = archive.snapshot()
        assert len(trials) == 6
        assert [t.local_step for t in trials] == list(range(6))
        for trial in trials:
            space.validate_config(trial.config)

    def test_constant_latency_steps_round_robin(self):
        space = unit_space()
        archive = Archive()
        agents = make_agents(3, space, archive)
        run_simulated(agents, cheap_objective, max_trials=9, latency=1.0)
        ranks = [t.agent_rank for t in archive.snapshot()]
        assert ranks == [0, 1, 2] * 3

    def test_wall_clock_budget_limits_submissions(self):
        space = unit_space()
        archive = Archive()
        agents = make_agents(1, space, archive)
        run_simulated(agents, cheap_objective, max_time=3.5, latency=1.0)
        # Submissions at t = 0, 1, 2, 3 are allowed; 4 is past the deadline.
        assert len(archive) == 4

    def test_exactly_once_delivery_with_final_sync(self):
        from mobokit.problems import get_problem

        problem = get_problem("dtlz2", n_vars=4, n_objectives=2)
        archive = Archive()
        deliveries = {}

        def spy(agent, batch):
            deliveries.setdefault(agent.rank, []).extend(
                (t.agent_rank, t.local_step) for t in batch
            )

        agents = [
            Agent(
                AgentConfig(rank=r, n_agents=4, seed_global=3),
                problem.space,
                2,
                archive,
                on_observe=spy,
                n_trees=2,
                candidate_pool_size=8,
                n_initial=400,
            )
            for r in range(4)
        ]
        run_simulated(agents, problem.evaluate, max_trials=400, latency=1.0)
        all_trials = [(t.agent_rank, t.local_step) for t in archive.snapshot()]
        assert len(all_trials) == 400
        for rank in range(4):
            assert sorted(deliveries[rank]) == sorted(all_trials)
            assert len(set(deliveries[rank])) == len(deliveries[rank])

    def test_deterministic_archives(self):
        space = unit_space()

        def run_once():
            archive = Archive()
            agents = make_agents(2, space, archive, seed=11)
            run_simulated(agents, cheap_objective, max_trials=20, latency=1.0)
            return [json.dumps(trial_to_record(t)) for t in archive.snapshot()]

        assert run_once() == run_once()

    def test_failures_do_not_crash_the_loop(self):
        space = unit_space()
        archive = Archive()
        agents = make_agents(2, space, archive)

        def flaky(config):
            if config["x0"] < 0.5:
                raise ValueError("hidden constraint")
            return cheap_objective(config)

        run_simulated(agents, flaky, max_trials=16, latency=1.0)
        trials = archive.snapshot()
        assert len(trials) == 16
        assert any(t.is_failure for t in trials)

    def test_requires_some_budget(self):
        with pytest.raises(ValueError):
            run_simulated([], cheap_objective)


class TestThreadedRuns:
    def test_budgeted_run_delivers_everything(self):
        space = unit_space()
        archive = Archive()
        agents = make_agents(2, space, archive, seed=5)
        run_threaded(agents, cheap_objective, max_trials=12)
        assert len(archive) == 12
        for agent in agents:
            assert agent.optimizer.num_observations == 12


class TestUtilization:
    def test_no_trials_gives_zeros(self):
        curve = utilization_curve([], 2, np.linspace(0, 1, 5))
        np.testing.assert_array_equal(curve, np.zeros(5))

    def test_single_busy_worker_is_one(self):
        trial = Trial(
            0, 0, Configuration((("x", 0.5),)), np.array([1.0]), 0.0, 10.0, None
        )
        curve = utilization_curve([trial], 1, np.linspace(0.0, 9.9, 10))
        np.testing.assert_array_equal(curve, np.ones(10))

    def test_two_disjoint_half_windows_average_half(self):
        trials = [
            Trial(0, 0, Configuration((("x", 0.1),)), np.array([1.0]), 0.0, 5.0, None),
            Trial(1, 0, Configuration((("x", 0.2),)), np.array([1.0]), 5.0, 10.0, None),
        ]
        curve = utilization_curve(trials, 2, np.linspace(0.0, 9.9, 20))
        np.testing.assert_allclose(curve, np.full(20, 0.5))


GOLDEN_LINES = (
    '{"agent_rank": 0, "local_step": 0, "config": {"x": 0.25, "algo": "a"}, '
    '"objectives": [0.5, 1.25], "t_submit": 0.0, "t_complete": 1.0, "kappa_used": 1.96}',
    '{"agent_rank": 1, "local_step": 3, "config": {"x": 0.75, "algo": "b"}, '
    '"failure": "evaluation raised ValueError: bad", "t_submit": 0.5, '
    '"t_complete": 2.5, "kappa_used": null}',
)


class TestArchiveFileFormat:
    def golden_trials(self):
        return [
            Trial(
                agent_rank=0,
                local_step=0,
                config=Configuration((("x", 0.25), ("algo", "a"))),
                objectives=np.array([0.5, 1.25]),
                t_submit=0.0,
                t_complete=1.0,
                kappa_used=1.96,
            ),
            Trial(
                agent_rank=1,
                local_step=3,
                config=Configuration((("x", 0.75), ("algo", "b"))),
                objectives=FailureMarker("evaluation raised ValueError: bad"),
                t_submit=0.5,
                t_complete=2.5,
                kappa_used=None,
            ),
        ]

    def test_format_is_stable(self, tmp_path):
        path = tmp_path / "archive.jsonl"
        save_archive(self.golden_trials(), path)
        assert path.read_text().splitlines() == list(GOLDEN_LINES)

    def test_round_trip(self, tmp_path):
        path = tmp_path / "archive.jsonl"
        save_archive(self.golden_trials(), path)
        loaded = load_archive(path)
        assert len(loaded) == 2
        assert loaded[0].config["x"] == 0.25
        np.testing.assert_array_equal(loaded[0].objectives, [0.5, 1.25])
        assert loaded[1].is_failure
        assert loaded[1].objectives.reason == "evaluation raised ValueError: bad"
        assert loaded[1].kappa_used is None

    def test_record_round_trip_identity(self):
        for trial in self.golden_trials():
            again = record_to_trial(trial_to_record(trial))
            assert trial_to_record(again) == trial_to_record(trial)

    def test_archive_tee_writes_lines(self, tmp_path):
        path = tmp_path / "live.jsonl"
        archive = Archive(path=path)
        for trial in self.golden_trials():
            archive.append(trial)
        archive.close()
        assert path.read_text().splitlines() == list(GOLDEN_LINES)
