"""Decentralized asynchronous optimization runtime.

Independent agents each own a sequential optimizer and interact only
through a shared append-only archive of trials. An agent's loop is:
compute the decayed trade-off kappa_t, suggest a configuration, evaluate
it, read the trials other agents appended meanwhile, append its own, and
feed the whole batch to its optimizer.

Agent diversification follows a fixed seeding protocol: a generator
seeded with the global seed first yields the initial trade-off kappa_0
(drawn from an exponential distribution) and then one candidate seed per
agent, of which the agent keeps the one at its rank. kappa decays as
kappa_0 * exp(-decay_rate * (t mod period)), resetting every period.

Two runners are provided: real threads, and a deterministic event-driven
simulation with configurable evaluation latencies (ties resolved by
rank, so constant latencies step agents round-robin).
"""

from __future__ import annotations

import heapq
import json
import math
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Iterable, Sequence

import numpy as np

from .mobo import FailureMarker, MoboOptimizer
from .space import Configuration, SearchSpace

__all__ = [
    "Trial",
    "Archive",
    "AgentConfig",
    "Agent",
    "kappa_schedule",
    "sample_initial_tradeoff",
    "evaluate_safely",
    "run_simulated",
    "run_threaded",
    "utilization_curve",
    "trial_to_record",
    "record_to_trial",
    "save_archive",
    "load_archive",
]


@dataclass(frozen=True)
class Trial:
    """One evaluated configuration as stored in the shared archive."""

    agent_rank: int
    local_step: int
    config: Configuration
    objectives: np.ndarray | FailureMarker
    t_submit: float
    t_complete: float
    kappa_used: float | None

    def __post_init__(self) -> None:
        if self.t_complete < self.t_submit:
            raise ValueError("trial completed before it was submitted")

    @property
    def is_failure(self) -> bool:
        return isinstance(self.objectives, FailureMarker)


class Archive:
    """Append-only, internally synchronized store of trials.

    Readers register a cursor and receive every entry exactly once, in
    append order, across successive `read_new` calls. A cursor registered
    with an owner rank never yields that rank's own trials (agents feed
    their own results to their optimizer directly). When constructed with
    a path, every append is also written as one JSON line.
    """

    def __init__(self, path: str | Path | None = None):
        self._entries: list[Trial] = []
        self._lock = threading.Lock()
        self._cursors: dict[int, int] = {}
        self._owners: dict[int, int | None] = {}
        self._next_reader = 0
        self._fh = open(path, "a", encoding="utf-8") if path is not None else None

    def __len__(self) -> int:
        with self._lock:
            return len(self._entries)

    def append(self, trial: Trial) -> int:
        with self._lock:
            self._entries.append(trial)
            if self._fh is not None:
                self._fh.write(json.dumps(trial_to_record(trial)) + "\n")
                self._fh.flush()
            return len(self._entries) - 1

    def register_reader(self, owner_rank: int | None = None) -> int:
        with self._lock:
            reader = self._next_reader
            self._next_reader += 1
            self._cursors[reader] = 0
            self._owners[reader] = owner_rank
            return reader

    def read_new(self, reader: int) -> list[Trial]:
        with self._lock:
            start = self._cursors[reader]
            end = len(self._entries)
            self._cursors[reader] = end
            owner = self._owners[reader]
            batch = self._entries[start:end]
        if owner is None:
            return batch
        return [t for t in batch if t.agent_rank != owner]

    def snapshot(self) -> list[Trial]:
        with self._lock:
            return list(self._entries)

    def close(self) -> None:
        if self._fh is not None:
            self._fh.close()
            self._fh = None


def kappa_schedule(kappa0: float, step: int, decay_rate: float, period: int) -> float:
    """Periodically reset exponential decay: kappa0 * exp(-rate * (t mod T))."""
    if step < 0:
        raise ValueError("step must be >= 0")
    if period < 1:
        raise ValueError("period must be >= 1")
    return kappa0 * math.exp(-decay_rate * (step % period))


def sample_initial_tradeoff(kappa_mean: float, rng: np.random.Generator) -> float:
    """Draw kappa_0 from an exponential distribution with the given mean."""
    if kappa_mean <= 0:
        raise ValueError("kappa_mean must be positive")
    return -kappa_mean * math.log(1.0 - rng.random())


def evaluate_safely(func: Callable[[Configuration], Any], config: Configuration):
    """Call the black box, converting any misbehavior into a FailureMarker."""
    try:
        result = func(config)
    except Exception as exc:
        return FailureMarker(f"evaluation raised {type(exc).__name__}: {exc}")
    if isinstance(result, FailureMarker):
        return result
    row = np.asarray(result, dtype=float).reshape(-1)
    if not np.isfinite(row).all():
        return FailureMarker("non-finite objective")
    return row


@dataclass(frozen=True)
class AgentConfig:
    """Identity and schedule of one optimization agent."""

    rank: int
    n_agents: int
    kappa_mean: float = 1.96
    decay_rate: float = 0.25
    period: int = 25
    seed_global: int = 0

    def __post_init__(self) -> None:
        if not 0 <= self.rank < self.n_agents:
            raise ValueError(f"rank {self.rank} outside [0, {self.n_agents})")
        if self.period < 1:
            raise ValueError("period must be >= 1")
        if self.decay_rate < 0:
            raise ValueError("decay_rate must be >= 0")
        if self.kappa_mean <= 0:
            raise ValueError("kappa_mean must be positive")


class Agent:
    """One optimization agent bound to a shared archive."""

    def __init__(
        self,
        config: AgentConfig,
        space: SearchSpace,
        n_objectives: int,
        archive: Archive,
        on_observe: Callable[["Agent", list[Trial]], None] | None = None,
        **optimizer_kwargs,
    ):
        self.config = config
        self.archive = archive
        self.on_observe = on_observe
        seeder = np.random.default_rng(config.seed_global)
        self.kappa0 = sample_initial_tradeoff(config.kappa_mean, seeder)
        candidate_seeds = seeder.integers(0, 2**63, size=config.n_agents)
        self.seed_local = int(candidate_seeds[config.rank])
        self.optimizer = MoboOptimizer(
            space,
            n_objectives,
            random_state=np.random.default_rng(self.seed_local),
            **optimizer_kwargs,
        )
        self._reader = archive.register_reader(owner_rank=config.rank)
        self.step = 0

    @property
    def rank(self) -> int:
        return self.config.rank

    def current_kappa(self) -> float:
        return kappa_schedule(
            self.kappa0, self.step, self.config.decay_rate, self.config.period
        )

    def start_trial(self) -> tuple[Configuration, float]:
        kappa = self.current_kappa()
        return self.optimizer.suggest(kappa), kappa

    def finish_trial(
        self,
        config: Configuration,
        objectives,
        t_submit: float,
        t_complete: float,
        kappa: float,
    ) -> Trial:
        fresh = self.archive.read_new(self._reader)
        trial = Trial(
            agent_rank=self.rank,
            local_step=self.step,
            config=config,
            objectives=objectives,
            t_submit=t_submit,
            t_complete=t_complete,
            kappa_used=kappa,
        )
        self.archive.append(trial)
        batch = fresh + [trial]
        self._deliver(batch)
        self.step += 1
        return trial

    def sync(self) -> int:
        """Ingest any archived trials this agent has not seen yet."""
        fresh = self.archive.read_new(self._reader)
        if fresh:
            self._deliver(fresh)
        return len(fresh)

    def _deliver(self, batch: list[Trial]) -> None:
        if self.on_observe is not None:
            self.on_observe(self, batch)
        self.optimizer.observe(
            [t.config for t in batch], [t.objectives for t in batch]
        )


def _latency_fn(latency) -> Callable[[int, int], float]:
    if callable(latency):
        return latency
    value = float(latency)
    if value <= 0:
        raise ValueError("latency must be positive")
    return lambda rank, step: value


def run_simulated(
    agents: Sequence[Agent],
    func: Callable[[Configuration], Any],
    *,
    max_trials: int | None = None,
    max_time: float | None = None,
    latency: float | Callable[[int, int], float] = 1.0,
    final_sync: bool = True,
) -> None:
    """Drive agents under a deterministic discrete-event scheduler.

    Every evaluation occupies its agent for `latency(rank, step)` simulated
    seconds; completions are processed in (time, rank) order. New trials
    start while fewer than `max_trials` have been launched and the start
    time is below `max_time`. With `final_sync`, each agent ingests
    whatever it has not yet seen once the run is over.
    """
    if max_trials is None and max_time is None:
        raise ValueError("need max_trials and/or max_time")
    lat = _latency_fn(latency)
    launched = 0
    heap: list[tuple[float, int, Configuration, Any, float, float]] = []

    def can_launch(now: float) -> bool:
        if max_trials is not None and launched >= max_trials:
            return False
        if max_time is not None and now >= max_time:
            return False
        return True

    def launch(agent: Agent, now: float) -> None:
        nonlocal launched
        config, kappa = agent.start_trial()
        objectives = evaluate_safely(func, config)
        duration = lat(agent.rank, agent.step)
        heapq.heappush(
            heap, (now + duration, agent.rank, config, objectives, now, kappa)
        )
        launched += 1

    for agent in sorted(agents, key=lambda a: a.rank):
        if can_launch(0.0):
            launch(agent, 0.0)

    by_rank = {agent.rank: agent for agent in agents}
    while heap:
        t_complete, rank, config, objectives, t_submit, kappa = heapq.heappop(heap)
        agent = by_rank[rank]
        agent.finish_trial(config, objectives, t_submit, t_complete, kappa)
        if can_launch(t_complete):
            launch(agent, t_complete)

    if final_sync:
        for agent in sorted(agents, key=lambda a: a.rank):
            agent.sync()


def run_threaded(
    agents: Sequence[Agent],
    func: Callable[[Configuration], Any],
    *,
    max_trials: int | None = None,
    max_seconds: float | None = None,
    final_sync: bool = True,
) -> None:
    """Drive each agent on its own thread against the real clock."""
    if max_trials is None and max_seconds is None:
        raise ValueError("need max_trials and/or max_seconds")
    start = time.monotonic()
    launched = 0
    budget_lock = threading.Lock()

    def try_start() -> bool:
        nonlocal launched
        with budget_lock:
            if max_trials is not None and launched >= max_trials:
                return False
            if max_seconds is not None and time.monotonic() - start >= max_seconds:
                return False
            launched += 1
            return True

    def loop(agent: Agent) -> None:
        while try_start():
            config, kappa = agent.start_trial()
            t_submit = time.monotonic() - start
            objectives = evaluate_safely(func, config)
            t_complete = time.monotonic() - start
            agent.finish_trial(config, objectives, t_submit, t_complete, kappa)

    threads = [threading.Thread(target=loop, args=(agent,)) for agent in agents]
    for thread in threads:
        thread.start()
    for thread in threads:
        thread.join()
    if final_sync:
        for agent in sorted(agents, key=lambda a: a.rank):
            agent.sync()


def utilization_curve(
    trials: "Archive | Iterable[Trial]", n_workers: int, grid: Sequence[float]
) -> np.ndarray:
    """Fraction of workers busy (submit <= t < complete) at each grid time."""
    if n_workers < 1:
        raise ValueError("n_workers must be >= 1")
    if isinstance(trials, Archive):
        trials = trials.snapshot()
    times = np.asarray(list(grid), dtype=float)
    busy = np.zeros(times.shape, dtype=float)
    for trial in trials:
        busy += (times >= trial.t_submit) & (times < trial.t_complete)
    return busy / n_workers


def trial_to_record(trial: Trial) -> dict[str, Any]:
    """Stable JSON-compatible form of one trial (one archive line)."""
    record: dict[str, Any] = {
        "agent_rank": trial.agent_rank,
        "local_step": trial.local_step,
        "config": trial.config.as_dict(),
    }
    if trial.is_failure:
        record["failure"] = trial.objectives.reason
    else:
        record["objectives"] = [float(v) for v in trial.objectives]
    record["t_submit"] = trial.t_submit
    record["t_complete"] = trial.t_complete
    record["kappa_used"] = trial.kappa_used
    return record


def record_to_trial(record: dict[str, Any]) -> Trial:
    if "failure" in record:
        objectives: np.ndarray | FailureMarker = FailureMarker(record["failure"])
    else:
        objectives = np.asarray(record["objectives"], dtype=float)
    return Trial(
        agent_rank=int(record["agent_rank"]),
        local_step=int(record["local_step"]),
        config=Configuration.from_dict(record["config"]),
        objectives=objectives,
        t_submit=float(record["t_submit"]),
        t_complete=float(record["t_complete"]),
        kappa_used=None if record["kappa_used"] is None else float(record["kappa_used"]),
    )


def save_archive(trials: Iterable[Trial], path: str | Path) -> None:
    """Write trials as JSON lines in archive order."""
    with open(path, "w", encoding="utf-8") as fh:
        for trial in trials:
            fh.write(json.dumps(trial_to_record(trial)) + "\n")


def load_archive(path: str | Path) -> list[Trial]:
    """Read a JSON-lines archive back into trials."""
    trials = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if line:
                trials.append(record_to_trial(json.loads(line)))
    return trials
