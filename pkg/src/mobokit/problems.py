"""Benchmark black boxes: the DTLZ suite and a synthetic tuning problem.

The DTLZ problems follow their standard published constructions over
[0, 1]^n with configurable variable and objective counts; each instance
carries a sampler of its analytic Pareto front for distance indicators.

The synthetic tuning problem imitates a hyperparameter search at desk
scale: a mixed space, a smooth multimodal loss in [0, 1], a heavy-tailed
runtime objective whose outliers span several orders of magnitude, and a
deterministic 2% subset of configurations that fail outright.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .indicators import pareto_mask
from .mobo import FailureMarker
from .space import Configuration, SearchSpace, categorical, continuous, integer

__all__ = ["ProblemInstance", "dtlz", "synthetic_hpo", "get_problem", "PROBLEM_NAMES"]


@dataclass(frozen=True)
class ProblemInstance:
    """A named black box with its space and optional analytic front."""

    name: str
    space: SearchSpace
    n_objectives: int
    evaluate: Callable[[Configuration], np.ndarray | FailureMarker]
    true_front_sampler: Callable[[int, np.random.Generator], np.ndarray] | None = None
    properties: frozenset[str] = field(default_factory=frozenset)


def _unit_space(n_vars: int) -> SearchSpace:
    return SearchSpace(tuple(continuous(f"x{i + 1}", 0.0, 1.0) for i in range(n_vars)))


def _f_from_angles(theta: np.ndarray, g: float) -> np.ndarray:
    # f_m stacks cosines of the leading angles and one closing sine.
    m_obj = theta.shape[0] + 1
    f = np.empty(m_obj)
    for j in range(m_obj):
        value = 1.0 + g
        value *= np.prod(np.cos(theta[: m_obj - 1 - j]))
        if j >= 1:
            value *= np.sin(theta[m_obj - 1 - j])
        f[j] = value
    return f


def _g_rastrigin(tail: np.ndarray) -> float:
    shifted = tail - 0.5
    return 100.0 * (tail.shape[0] + float(np.sum(shifted**2 - np.cos(20.0 * np.pi * shifted))))


def _g_sphere(tail: np.ndarray) -> float:
    return float(np.sum((tail - 0.5) ** 2))


def _sample_sphere_octant(n: int, rng: np.random.Generator, m_obj: int) -> np.ndarray:
    v = np.abs(rng.standard_normal((n, m_obj)))
    norms = np.linalg.norm(v, axis=1, keepdims=True)
    norms[norms == 0.0] = 1.0
    return v / norms


def _sample_degenerate_curve(n: int, rng: np.random.Generator, m_obj: int) -> np.ndarray:
    theta1 = rng.random(n) * (np.pi / 2)
    out = np.empty((n, m_obj))
    for i in range(n):
        theta = np.full(m_obj - 1, np.pi / 4)
        theta[0] = theta1[i]
        out[i] = _f_from_angles(theta, 0.0)
    return out


def _sample_disjoint_front(n: int, rng: np.random.Generator, m_obj: int) -> np.ndarray:
    # Rejection: oversample the g=1 surface, keep its non-dominated part.
    candidates = rng.random((max(20 * n, 200), m_obj - 1))
    g = 1.0
    h = m_obj - np.sum(
        candidates / (1.0 + g) * (1.0 + np.sin(3.0 * np.pi * candidates)), axis=1
    )
    front = np.column_stack([candidates, (1.0 + g) * h])
    front = front[pareto_mask(front)]
    if front.shape[0] > n:
        keep = rng.choice(front.shape[0], size=n, replace=False)
        front = front[keep]
    return front


_DTLZ_PROPERTIES = {
    1: frozenset({"P1"}),
    2: frozenset({"P2"}),
    3: frozenset({"P1", "P2"}),
    4: frozenset({"P2", "P4"}),
    5: frozenset({"P3"}),
    6: frozenset({"P3"}),
    7: frozenset({"P2", "P5"}),
}


def dtlz(k: int, n_vars: int = 8, n_objectives: int = 3) -> ProblemInstance:
    """Build DTLZ problem k (1..7) on [0, 1]^n_vars."""
    if not 1 <= k <= 7:
        raise ValueError(f"DTLZ index must be in 1..7, got {k}")
    if n_vars < n_objectives:
        raise ValueError("need at least as many variables as objectives")
    m_obj = n_objectives
    split = m_obj - 1

    def evaluate(config: Configuration) -> np.ndarray:
        x = np.asarray(config.values, dtype=float)
        head, tail = x[:split], x[split:]
        if k == 1:
            g = _g_rastrigin(tail)
            f = np.empty(m_obj)
            for j in range(m_obj):
                value = 0.5 * (1.0 + g) * np.prod(head[: m_obj - 1 - j])
                if j >= 1:
                    value *= 1.0 - head[m_obj - 1 - j]
                f[j] = value
            return f
        if k in (2, 3, 4):
            g = _g_rastrigin(tail) if k == 3 else _g_sphere(tail)
            positions = head**100.0 if k == 4 else head
            theta = positions * (np.pi / 2)
            return _f_from_angles(theta, g)
        if k in (5, 6):
            g = _g_sphere(tail) if k == 5 else float(np.sum(tail**0.1))
            theta = np.empty(split)
            theta[0] = head[0] * (np.pi / 2)
            if split > 1:
                theta[1:] = (np.pi / (4.0 * (1.0 + g))) * (1.0 + 2.0 * g * head[1:])
            return _f_from_angles(theta, g)
        g = 1.0 + 9.0 / tail.shape[0] * float(np.sum(tail))
        h = m_obj - np.sum(head / (1.0 + g) * (1.0 + np.sin(3.0 * np.pi * head)))
        return np.append(head, (1.0 + g) * h)

    if k == 1:
        sampler = lambda n, rng: 0.5 * rng.dirichlet(np.ones(m_obj), size=n)
    elif k in (2, 3, 4):
        sampler = lambda n, rng: _sample_sphere_octant(n, rng, m_obj)
    elif k in (5, 6):
        sampler = lambda n, rng: _sample_degenerate_curve(n, rng, m_obj)
    else:
        sampler = lambda n, rng: _sample_disjoint_front(n, rng, m_obj)

    return ProblemInstance(
        name=f"dtlz{k}",
        space=_unit_space(n_vars),
        n_objectives=m_obj,
        evaluate=evaluate,
        true_front_sampler=sampler,
        properties=_DTLZ_PROPERTIES[k],
    )


_ALGO_CENTERS = {
    "adam": (0.25, 0.30, 0.85),
    "sgd": (0.55, 0.60, 0.75),
    "rmsprop": (0.75, 0.20, 0.90),
    "adagrad": (0.35, 0.80, 0.60),
}
_ALGO_PENALTY = {"adam": 0.0, "sgd": 0.06, "rmsprop": 0.12, "adagrad": 0.20}
_ALGO_COST = {"adam": 1.0, "sgd": 0.6, "rmsprop": 0.8, "adagrad": 1.4}


def _config_digest(config: Configuration, seed: int, salt: str) -> int:
    payload = json.dumps(
        {"seed": seed, "salt": salt, "config": config.as_dict()}, sort_keys=True
    )
    return int.from_bytes(hashlib.sha256(payload.encode()).digest()[:8], "big")


def synthetic_hpo(seed: int = 0) -> ProblemInstance:
    """Mixed-space tuning problem with outliers and hidden failures.

    Minimizes (loss, runtime). The loss landscape combines a coarse
    quadratic guide with a narrow deep well around a per-algorithm
    optimum that wants a large model, so precise localization requires a
    useful surrogate. The runtime grows with model size and is multiplied
    by a heavy-tailed lognormal factor derived deterministically from the
    configuration, so repeated evaluation of a configuration always
    returns the same values while outliers span several orders of
    magnitude.
    """
    space = SearchSpace(
        (
            continuous("learning_rate", 1e-4, 1e-1, prior="log-uniform"),
            continuous("regularization", 0.0, 1.0),
            integer("units", 16, 256, prior="log-uniform"),
            categorical("algorithm", tuple(_ALGO_CENTERS)),
        )
    )
    log_units_low, log_units_high = math.log10(16), math.log10(256)

    def evaluate(config: Configuration) -> np.ndarray | FailureMarker:
        if _config_digest(config, seed, "failure") % 50 == 0:
            return FailureMarker("synthetic failure")
        algo = config["algorithm"]
        u_lr = (math.log10(config["learning_rate"]) + 4.0) / 3.0
        u_reg = float(config["regularization"])
        u_units = (math.log10(config["units"]) - log_units_low) / (
            log_units_high - log_units_low
        )
        c1, c2, c3 = _ALGO_CENTERS[algo]
        bowl = (u_lr - c1) ** 2 + (u_reg - c2) ** 2 + (u_units - c3) ** 2
        ripple = 0.02 * (
            math.sin(6.0 * math.pi * u_lr) * math.cos(4.0 * math.pi * u_reg)
            + math.sin(5.0 * math.pi * u_units)
        )
        loss = (
            0.06
            + _ALGO_PENALTY[algo]
            + 0.12 * bowl
            + 0.45 * (1.0 - math.exp(-40.0 * bowl))
            + ripple
        )
        loss = min(max(loss, 0.0), 1.0)

        base_cost = 0.05 + 3.0 * (config["units"] / 256.0) ** 1.5 * _ALGO_COST[algo]
        noise_rng = np.random.default_rng(_config_digest(config, seed, "runtime"))
        runtime = base_cost * math.exp(2.2 * noise_rng.standard_normal())
        return np.array([loss, runtime])

    return ProblemInstance(
        name="synthetic-hpo",
        space=space,
        n_objectives=2,
        evaluate=evaluate,
        true_front_sampler=None,
        properties=frozenset(),
    )


PROBLEM_NAMES = tuple(f"dtlz{i}" for i in range(1, 8)) + ("synthetic-hpo",)


def get_problem(name: str, **params) -> ProblemInstance:
    """Build a problem by name: dtlz1..dtlz7 or synthetic-hpo."""
    key = str(name).lower()
    if key.startswith("dtlz"):
        try:
            index = int(key[4:])
        except ValueError:
            raise ValueError(f"unknown problem {name!r}") from None
        allowed = {"n_vars", "n_objectives"}
        unknown = set(params) - allowed
        if unknown:
            raise ValueError(f"unknown problem parameters: {sorted(unknown)}")
        return dtlz(index, **params)
    if key == "synthetic-hpo":
        unknown = set(params) - {"seed"}
        if unknown:
            raise ValueError(f"unknown problem parameters: {sorted(unknown)}")
        return synthetic_hpo(**params)
    raise ValueError(f"unknown problem {name!r}")
