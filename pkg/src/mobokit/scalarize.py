"""Scalarization functions and random weight sampling on the unit simplex.

Weights are drawn uniformly from the simplex via normalized exponential
spacings: w_i = log(1 - u_i) / sum_j log(1 - u_j) with u_i ~ U(0, 1).
Every scalarization accepts a single objective vector or a stacked
(n, n_obj) matrix and reduces along the last axis.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "sample_simplex_weights",
    "scalarize_linear",
    "scalarize_chebyshev",
    "scalarize_pbi",
    "make_scalarizer",
    "SCALARIZATION_ALIASES",
]

SCALARIZATION_ALIASES = {
    "l": "linear",
    "linear": "linear",
    "ch": "chebyshev",
    "chebyshev": "chebyshev",
    "pbi": "pbi",
}


def sample_simplex_weights(n_objectives: int, rng: np.random.Generator) -> np.ndarray:
    """Draw one weight vector uniformly from the unit simplex.

    Draws with any coordinate equal to 1 (or a degenerate all-zero draw)
    are rejected and resampled; both are measure-zero events.
    """
    if n_objectives < 1:
        raise ValueError("need at least one objective")
    while True:
        u = rng.random(n_objectives)
        if np.any(u == 1.0):
            continue
        logs = np.log1p(-u)
        total = logs.sum()
        if total == 0.0:
            continue
        return logs / total


def _check_pair(y, w) -> tuple[np.ndarray, np.ndarray]:
    yv = np.asarray(y, dtype=float)
    wv = np.asarray(w, dtype=float)
    if wv.ndim != 1 or yv.shape[-1] != wv.shape[0]:
        raise ValueError(f"objective/weight length mismatch: {yv.shape} vs {wv.shape}")
    return yv, wv


def scalarize_linear(y, w) -> float | np.ndarray:
    """Weighted sum of objectives."""
    yv, wv = _check_pair(y, w)
    out = yv @ wv
    return float(out) if np.ndim(out) == 0 else out


def scalarize_chebyshev(y, w, z) -> float | np.ndarray:
    """Weighted max of absolute deviations from the utopia point z."""
    yv, wv = _check_pair(y, w)
    zv = np.asarray(z, dtype=float)
    if zv.shape != wv.shape:
        raise ValueError(f"utopia length mismatch: {zv.shape} vs {wv.shape}")
    out = np.max(wv * np.abs(yv - zv), axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def scalarize_pbi(y, w, z, theta: float = 5.0, signed: bool = False) -> float | np.ndarray:
    """Penalty-boundary intersection value d1 + theta * d2.

    With v = z - y and unit direction w/||w||: d1 = |v . w| / ||w|| and
    d2 = ||v - d1 * w / ||w||||. The default keeps the absolute value in
    d1, which makes the scalarization insensitive to which side of the
    utopia direction a point falls on. `signed=True` switches to the
    conventional signed projection of y - z instead.
    """
    yv, wv = _check_pair(y, w)
    zv = np.asarray(z, dtype=float)
    if zv.shape != wv.shape:
        raise ValueError(f"utopia length mismatch: {zv.shape} vs {wv.shape}")
    norm = np.linalg.norm(wv)
    if norm == 0.0:
        raise ValueError("pbi requires a non-zero weight vector")
    unit = wv / norm
    if signed:
        v = yv - zv
        d1 = v @ unit
    else:
        v = zv - yv
        d1 = np.abs(v @ unit)
    d2 = np.linalg.norm(v - np.multiply.outer(d1, unit), axis=-1)
    out = d1 + theta * d2
    return float(out) if np.ndim(out) == 0 else out


def make_scalarizer(kind: str, theta: float = 5.0, signed_pbi: bool = False):
    """Return f(Y, w, z) for a scalarization named by kind."""
    canonical = SCALARIZATION_ALIASES.get(str(kind).lower())
    if canonical == "linear":
        return lambda Y, w, z: scalarize_linear(Y, w)
    if canonical == "chebyshev":
        return scalarize_chebyshev
    if canonical == "pbi":
        return lambda Y, w, z: scalarize_pbi(Y, w, z, theta=theta, signed=signed_pbi)
    raise ValueError(f"unknown scalarization kind {kind!r}")
