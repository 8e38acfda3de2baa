"""Multi-objective black-box optimization toolkit.

Quantile-normalized Bayesian search with randomized scalarization and
objective-bound penalties, a decentralized asynchronous multi-agent
runtime, random-search and NSGA-II baselines, analytic benchmarks,
Pareto-quality indicators, and an experiment harness.
"""

from .baselines import NsgaConfig, NsgaOptimizer, RandomSearch
from .dbo import Agent, AgentConfig, Archive, Trial, kappa_schedule
from .indicators import (
    dominates,
    extract_pareto_front,
    gd_plus,
    hypervolume,
    igd_plus,
)
from .mobo import FailureMarker, MoboOptimizer
from .problems import get_problem
from .scalarize import (
    sample_simplex_weights,
    scalarize_chebyshev,
    scalarize_linear,
    scalarize_pbi,
)
from .space import Configuration, SearchSpace, categorical, continuous, integer, load_space
from .surrogate import RandomSplitForest
from .transforms import (
    IdentityTransform,
    MinMaxLogTransform,
    QuantileUniformTransform,
    make_transform,
)

__version__ = "0.1.0"

__all__ = [
    "Agent",
    "AgentConfig",
    "Archive",
    "Configuration",
    "FailureMarker",
    "IdentityTransform",
    "MinMaxLogTransform",
    "MoboOptimizer",
    "NsgaConfig",
    "NsgaOptimizer",
    "QuantileUniformTransform",
    "RandomSearch",
    "RandomSplitForest",
    "SearchSpace",
    "Trial",
    "categorical",
    "continuous",
    "dominates",
    "extract_pareto_front",
    "gd_plus",
    "get_problem",
    "hypervolume",
    "igd_plus",
    "integer",
    "kappa_schedule",
    "load_space",
    "make_transform",
    "sample_simplex_weights",
    "scalarize_chebyshev",
    "scalarize_linear",
    "scalarize_pbi",
]
