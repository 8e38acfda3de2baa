"""Dominance relations, Pareto-front extraction, and set-quality indicators.

All objectives are in minimization orientation. The hypervolume is computed
exactly: a sort-and-sweep for two objectives and recursive dimension slicing
above that, with exactness guaranteed up to 5 objectives. The distance-based
indicators use the one-sided metric d+(a, b) = ||max(a - b, 0)||_2, so a
point that weakly dominates its target contributes zero.

All functions are pure over immutable inputs and safe for concurrent use.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Any, Sequence

import numpy as np

logger = logging.getLogger(__name__)

MAX_EXACT_DIMENSION = 5

__all__ = [
    "UnsupportedDimensionError",
    "UndefinedIndicatorError",
    "IndicatorReport",
    "dominates",
    "pareto_mask",
    "extract_pareto_front",
    "filter_by_reference",
    "hypervolume",
    "dplus",
    "gd_plus",
    "igd_plus",
]


class UnsupportedDimensionError(ValueError):
    """Raised when an exact computation is requested beyond its dimension bound."""


class UndefinedIndicatorError(ValueError):
    """Raised when an indicator is requested on an empty set."""


def _as_matrix(points: Any) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return pts.reshape(0, pts.shape[-1] if pts.ndim == 2 else 0)
    if pts.ndim == 1:
        pts = pts.reshape(1, -1)
    if pts.ndim != 2:
        raise ValueError(f"expected an (n, n_obj) array, got shape {pts.shape}")
    if not np.isfinite(pts).all():
        raise ValueError("objective vectors must be finite")
    return pts


def dominates(a: Sequence[float], b: Sequence[float]) -> bool:
    """True iff a is no worse than b everywhere and strictly better somewhere."""
    av = np.asarray(a, dtype=float)
    bv = np.asarray(b, dtype=float)
    if av.shape != bv.shape or av.ndim != 1:
        raise ValueError(f"length mismatch: {av.shape} vs {bv.shape}")
    return bool(np.all(av <= bv) and np.any(av < bv))


def pareto_mask(points: Any) -> np.ndarray:
    """Boolean mask of points dominated by no other point.

    Duplicates of a non-dominated point are all kept: equal vectors never
    dominate each other.
    """
    pts = _as_matrix(points)
    n = pts.shape[0]
    mask = np.ones(n, dtype=bool)
    for i in range(n):
        dominators = np.all(pts <= pts[i], axis=1) & np.any(pts < pts[i], axis=1)
        if dominators.any():
            mask[i] = False
    return mask


def extract_pareto_front(points: Any) -> np.ndarray:
    """Return exactly the non-dominated points, preserving order and duplicates."""
    pts = _as_matrix(points)
    if pts.shape[0] == 0:
        return pts
    return pts[pareto_mask(pts)]


def filter_by_reference(points: Any, reference: Sequence[float]) -> tuple[np.ndarray, int]:
    """Drop points that do not weakly dominate the reference componentwise.

    Returns the kept points and the number clipped out.
    """
    pts = _as_matrix(points)
    ref = np.asarray(reference, dtype=float)
    if pts.shape[0] == 0:
        return pts, 0
    if ref.shape != (pts.shape[1],):
        raise ValueError(f"reference length {ref.shape} does not match points")
    keep = np.all(pts <= ref, axis=1)
    return pts[keep], int((~keep).sum())


def _hv_sweep_2d(pts: np.ndarray, ref: np.ndarray) -> float:
    # Sort by first objective, keep the strictly improving staircase.
    order = np.lexsort((pts[:, 1], pts[:, 0]))
    xs: list[float] = []
    ys: list[float] = []
    best_y = np.inf
    for i in order:
        x, y = pts[i]
        if y < best_y:
            xs.append(x)
            ys.append(y)
            best_y = y
    area = 0.0
    for j in range(len(xs)):
        next_x = xs[j + 1] if j + 1 < len(xs) else ref[0]
        area += (next_x - xs[j]) * (ref[1] - ys[j])
    return area


def _hv_recursive(pts: np.ndarray, ref: np.ndarray, sweep_base: bool) -> float:
    dim = pts.shape[1]
    if dim == 1:
        return float(ref[0] - pts[:, 0].min())
    if dim == 2 and sweep_base:
        return _hv_sweep_2d(pts, ref)
    pts = pts[pareto_mask(pts)]
    order = np.argsort(pts[:, -1], kind="stable")
    pts = pts[order]
    levels = np.unique(pts[:, -1])
    volume = 0.0
    for j, z in enumerate(levels):
        upper = levels[j + 1] if j + 1 < len(levels) else ref[-1]
        depth = upper - z
        if depth <= 0.0:
            continue
        slab = pts[pts[:, -1] <= z][:, :-1]
        volume += depth * _hv_recursive(slab, ref[:-1], sweep_base)
    return volume


def hypervolume(points: Any, reference: Sequence[float], method: str = "auto") -> float:
    """Exact volume of objective space dominated by `points` up to `reference`.

    Points violating the reference precondition (point <= reference in every
    coordinate) are clipped out before the computation. A dominated front
    region of zero extent contributes zero volume.

    Args:
        points: (n, n_obj) objective vectors in minimization orientation.
        reference: Upper corner bounding the measured region.
        method: "auto" picks the 2-D sweep when applicable and recursive
            slicing otherwise; "sweep" (2-D only) and "slicing" force one.

    Raises:
        UnsupportedDimensionError: more than 5 objectives.
    """
    ref = np.asarray(reference, dtype=float)
    if ref.ndim != 1:
        raise ValueError("reference must be a flat vector")
    if ref.shape[0] > MAX_EXACT_DIMENSION:
        raise UnsupportedDimensionError(
            f"exact hypervolume supports up to {MAX_EXACT_DIMENSION} objectives, "
            f"got {ref.shape[0]}"
        )
    if method not in ("auto", "sweep", "slicing"):
        raise ValueError(f"unknown method {method!r}")
    pts, clipped = filter_by_reference(points, ref)
    if clipped:
        logger.debug("hypervolume: clipped %d points beyond the reference", clipped)
    if pts.shape[0] == 0:
        return 0.0
    if method == "sweep":
        if ref.shape[0] != 2:
            raise ValueError("sweep method is only defined for 2 objectives")
        return _hv_sweep_2d(pts, ref)
    sweep_base = method == "auto"
    return _hv_recursive(pts, ref, sweep_base)


def dplus(yhat: Sequence[float], y: Sequence[float]) -> float:
    """One-sided distance ||max(yhat - y, 0)||_2 from yhat to target y."""
    a = np.asarray(yhat, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(np.maximum(a - b, 0.0)))


def _dplus_matrix(front: np.ndarray, targets: np.ndarray) -> np.ndarray:
    diff = np.maximum(front[:, None, :] - targets[None, :, :], 0.0)
    return np.sqrt((diff**2).sum(axis=2))


def gd_plus(front: Any, targets: Any) -> float:
    """Mean over front points of the one-sided distance to the closest target."""
    f = _as_matrix(front)
    t = _as_matrix(targets)
    if f.shape[0] == 0 or t.shape[0] == 0:
        raise UndefinedIndicatorError("gd_plus needs non-empty front and targets")
    if f.shape[1] != t.shape[1]:
        raise ValueError("front and targets disagree on objective count")
    return float(_dplus_matrix(f, t).min(axis=1).mean())


def igd_plus(front: Any, targets: Any) -> float:
    """Mean over targets of the one-sided distance to the closest front point."""
    f = _as_matrix(front)
    t = _as_matrix(targets)
    if f.shape[0] == 0 or t.shape[0] == 0:
        raise UndefinedIndicatorError("igd_plus needs non-empty front and targets")
    if f.shape[1] != t.shape[1]:
        raise ValueError("front and targets disagree on objective count")
    return float(_dplus_matrix(f, t).min(axis=0).mean())


@dataclass(frozen=True)
class IndicatorReport:
    """Indicator values together with their provenance."""

    hvi: float | None = None
    gd_plus: float | None = None
    igd_plus: float | None = None
    reference: tuple[float, ...] | None = None
    reference_rule: str | None = None
    target_source: str | None = None
    clipped_points: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "hvi": self.hvi,
            "gd_plus": self.gd_plus,
            "igd_plus": self.igd_plus,
            "reference": list(self.reference) if self.reference is not None else None,
            "reference_rule": self.reference_rule,
            "target_source": self.target_source,
            "clipped_points": self.clipped_points,
        }
