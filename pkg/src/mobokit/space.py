"""Mixed-type search spaces and their numeric encodings.

A search space is an ordered collection of parameters, each continuous,
integer, or categorical. Configurations drawn from a space encode into
fixed-length float vectors for surrogate models: numeric values pass
through (log10 when the prior is log-uniform) and each categorical
contributes the ordinal index of its value.

Spaces are immutable after construction and safe to share across
concurrently running agents; random state is always passed in by the
caller and never stored.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Iterator, Mapping, Sequence

import numpy as np

CONTINUOUS = "continuous"
INTEGER = "integer"
CATEGORICAL = "categorical"
KINDS = (CONTINUOUS, INTEGER, CATEGORICAL)

UNIFORM = "uniform"
LOG_UNIFORM = "log-uniform"
PRIORS = (UNIFORM, LOG_UNIFORM)

__all__ = [
    "ParameterSpec",
    "SearchSpace",
    "Configuration",
    "continuous",
    "integer",
    "categorical",
    "load_space",
]


def _round_half_up(x: np.ndarray | float) -> np.ndarray:
    # Ties at .5 round toward +inf, unlike Python's banker's rounding.
    return np.floor(np.asarray(x, dtype=float) + 0.5)


@dataclass(frozen=True)
class ParameterSpec:
    """One named parameter of a search space.

    Args:
        name: Unique identifier within the space.
        kind: "continuous", "integer", or "categorical".
        bounds: (low, high) pair for numeric kinds. Continuous requires
            low < high, integer requires low <= high.
        categories: Ordered, duplicate-free labels for categoricals.
        prior: "uniform" or "log-uniform" (numeric kinds only);
            log-uniform requires low > 0.
    """

    name: str
    kind: str
    bounds: tuple[float, float] | None = None
    categories: tuple[Any, ...] | None = None
    prior: str | None = None

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("parameter name must be non-empty")
        if self.kind not in KINDS:
            raise ValueError(f"unknown parameter kind {self.kind!r}")
        if self.kind == CATEGORICAL:
            if self.bounds is not None:
                raise ValueError(f"{self.name}: categorical takes no bounds")
            if not self.categories:
                raise ValueError(f"{self.name}: categories must be non-empty")
            cats = tuple(self.categories)
            if len(set(cats)) != len(cats):
                raise ValueError(f"{self.name}: duplicate categories")
            object.__setattr__(self, "categories", cats)
            if self.prior is not None:
                raise ValueError(f"{self.name}: categorical takes no prior")
            return
        if self.categories is not None:
            raise ValueError(f"{self.name}: only categoricals take categories")
        if self.bounds is None or len(self.bounds) != 2:
            raise ValueError(f"{self.name}: numeric parameter needs (low, high)")
        low, high = float(self.bounds[0]), float(self.bounds[1])
        if self.kind == CONTINUOUS and not low < high:
            raise ValueError(f"{self.name}: continuous bounds need low < high")
        if self.kind == INTEGER:
            if not float(self.bounds[0]).is_integer() or not float(self.bounds[1]).is_integer():
                raise ValueError(f"{self.name}: integer bounds must be integers")
            if not low <= high:
                raise ValueError(f"{self.name}: integer bounds need low <= high")
        prior = self.prior if self.prior is not None else UNIFORM
        if prior not in PRIORS:
            raise ValueError(f"{self.name}: unknown prior {prior!r}")
        if prior == LOG_UNIFORM and low <= 0:
            raise ValueError(f"{self.name}: log-uniform requires low > 0")
        object.__setattr__(self, "bounds", (low, high))
        object.__setattr__(self, "prior", prior)

    @property
    def is_log(self) -> bool:
        return self.prior == LOG_UNIFORM

    def sample_raw(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n raw values from the parameter's prior.

        Categoricals are returned as integer indices; decoding to labels
        happens at configuration materialization.
        """
        if self.kind == CATEGORICAL:
            return rng.integers(0, len(self.categories), size=n)
        low, high = self.bounds
        if self.is_log:
            lo, hi = math.log10(low), math.log10(high)
            values = 10.0 ** (lo + (hi - lo) * rng.random(n))
        else:
            values = low + (high - low) * rng.random(n)
        if self.kind == INTEGER:
            return _round_half_up(values).astype(np.int64)
        return values

    def value_from_raw(self, raw: Any) -> Any:
        if self.kind == CATEGORICAL:
            return self.categories[int(raw)]
        if self.kind == INTEGER:
            return int(raw)
        return float(raw)

    def contains(self, value: Any) -> bool:
        if self.kind == CATEGORICAL:
            return value in self.categories
        if self.kind == INTEGER:
            if not isinstance(value, (int, np.integer)) and not float(value).is_integer():
                return False
            return self.bounds[0] <= float(value) <= self.bounds[1]
        try:
            v = float(value)
        except (TypeError, ValueError):
            return False
        return self.bounds[0] <= v <= self.bounds[1]

    def encode_value(self, value: Any) -> float:
        """Map a raw value onto the surrogate feature scale."""
        if self.kind == CATEGORICAL:
            return float(self.categories.index(value))
        v = float(value)
        return math.log10(v) if self.is_log else v

    def decode_feature(self, feature: float) -> Any:
        """Invert :meth:`encode_value`, clipping into the domain."""
        if self.kind == CATEGORICAL:
            idx = int(np.clip(_round_half_up(feature), 0, len(self.categories) - 1))
            return self.categories[idx]
        v = 10.0 ** feature if self.is_log else float(feature)
        low, high = self.bounds
        if self.kind == INTEGER:
            return int(np.clip(_round_half_up(v), low, high))
        return float(np.clip(v, low, high))

    def encoded_interval(self) -> tuple[float, float]:
        """Bounds on the encoded scale (numeric kinds only)."""
        if self.kind == CATEGORICAL:
            raise ValueError(f"{self.name}: categoricals have no encoded interval")
        low, high = self.bounds
        if self.is_log:
            return math.log10(low), math.log10(high)
        return low, high

    def to_dict(self) -> dict[str, Any]:
        d: dict[str, Any] = {"name": self.name, "kind": self.kind}
        if self.kind == CATEGORICAL:
            d["categories"] = list(self.categories)
        else:
            d["bounds"] = list(self.bounds)
            d["prior"] = self.prior
        return d


def continuous(name: str, low: float, high: float, prior: str = UNIFORM) -> ParameterSpec:
    return ParameterSpec(name, CONTINUOUS, bounds=(low, high), prior=prior)


def integer(name: str, low: int, high: int, prior: str = UNIFORM) -> ParameterSpec:
    return ParameterSpec(name, INTEGER, bounds=(low, high), prior=prior)


def categorical(name: str, categories: Sequence[Any]) -> ParameterSpec:
    return ParameterSpec(name, CATEGORICAL, categories=tuple(categories))


@dataclass(frozen=True)
class Configuration:
    """One point of a search space: an ordered (name, value) tuple."""

    items: tuple[tuple[str, Any], ...]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(name for name, _ in self.items)

    @property
    def values(self) -> tuple[Any, ...]:
        return tuple(value for _, value in self.items)

    def __getitem__(self, name: str) -> Any:
        for key, value in self.items:
            if key == name:
                return value
        raise KeyError(name)

    def as_dict(self) -> dict[str, Any]:
        return dict(self.items)

    @classmethod
    def from_dict(cls, values: Mapping[str, Any]) -> "Configuration":
        return cls(tuple(values.items()))


@dataclass(frozen=True)
class SearchSpace:
    """Ordered, immutable collection of parameters."""

    params: tuple[ParameterSpec, ...]

    def __post_init__(self) -> None:
        params = tuple(self.params)
        if not params:
            raise ValueError("search space needs at least one parameter")
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise ValueError("parameter names must be unique")
        object.__setattr__(self, "params", params)

    def __len__(self) -> int:
        return len(self.params)

    def __iter__(self) -> Iterator[ParameterSpec]:
        return iter(self.params)

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)

    def sample_raw_columns(self, n: int, rng: np.random.Generator) -> list[np.ndarray]:
        """Draw n configurations column-wise (categoricals as indices)."""
        if n < 1:
            raise ValueError("need n >= 1 samples")
        return [p.sample_raw(n, rng) for p in self.params]

    def config_from_columns(self, columns: Sequence[np.ndarray], i: int) -> Configuration:
        items = tuple(
            (p.name, p.value_from_raw(col[i])) for p, col in zip(self.params, columns)
        )
        return Configuration(items)

    def encode_columns(self, columns: Sequence[np.ndarray]) -> np.ndarray:
        """Encode column-wise samples into an (n, dim) float matrix."""
        out = np.empty((len(columns[0]), len(self.params)), dtype=float)
        for j, (p, col) in enumerate(zip(self.params, columns)):
            if p.kind == CATEGORICAL:
                out[:, j] = col.astype(float)
            elif p.is_log:
                out[:, j] = np.log10(col.astype(float))
            else:
                out[:, j] = col.astype(float)
        return out

    def sample(self, rng: np.random.Generator) -> Configuration:
        """Draw a single configuration from the parameter priors."""
        cols = self.sample_raw_columns(1, rng)
        return self.config_from_columns(cols, 0)

    def random_candidates(self, n: int, rng: np.random.Generator) -> list[Configuration]:
        """Draw n independent configurations."""
        cols = self.sample_raw_columns(n, rng)
        return [self.config_from_columns(cols, i) for i in range(n)]

    def validate_config(self, config: Configuration) -> None:
        if config.names != self.names:
            raise ValueError(
                f"configuration names {config.names} do not match space {self.names}"
            )
        for p, (_, value) in zip(self.params, config.items):
            if not p.contains(value):
                raise ValueError(f"value {value!r} outside domain of {p.name!r}")

    def encode(self, config: Configuration) -> np.ndarray:
        """Encode a configuration into its fixed-length feature vector."""
        self.validate_config(config)
        return np.array(
            [p.encode_value(v) for p, (_, v) in zip(self.params, config.items)],
            dtype=float,
        )

    def decode(self, features: Sequence[float]) -> Configuration:
        """Build the configuration nearest to an encoded feature vector."""
        feats = np.asarray(features, dtype=float)
        if feats.shape != (len(self.params),):
            raise ValueError(f"expected {len(self.params)} features, got {feats.shape}")
        items = tuple(
            (p.name, p.decode_feature(f)) for p, f in zip(self.params, feats)
        )
        return Configuration(items)

    def to_dicts(self) -> list[dict[str, Any]]:
        return [p.to_dict() for p in self.params]

    @classmethod
    def from_dicts(cls, specs: Sequence[Mapping[str, Any]]) -> "SearchSpace":
        """Build a space from its declarative form.

        Each entry is ``{"name", "kind", "bounds"|"categories", "prior"?}``,
        the same schema `load_space` reads from JSON files.
        """
        params = []
        for entry in specs:
            unknown = set(entry) - {"name", "kind", "bounds", "categories", "prior"}
            if unknown:
                raise ValueError(f"unknown parameter fields: {sorted(unknown)}")
            bounds = entry.get("bounds")
            params.append(
                ParameterSpec(
                    name=entry["name"],
                    kind=entry["kind"],
                    bounds=tuple(bounds) if bounds is not None else None,
                    categories=tuple(entry["categories"]) if "categories" in entry else None,
                    prior=entry.get("prior"),
                )
            )
        return cls(tuple(params))


def load_space(path: str | Path) -> SearchSpace:
    """Load a search space from a JSON file holding a list of parameters."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    if not isinstance(data, list):
        raise ValueError("space file must hold a JSON list of parameters")
    return SearchSpace.from_dicts(data)
