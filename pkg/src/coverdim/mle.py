"""Maximum-likelihood intrinsic dimension estimation (nearest-neighbor based).

The local estimator at a point x with sorted neighbor distances T_1 <= ... <= T_k
is ``d(x) = [ (1/(k-1)) * sum_{j<k} log(T_k / T_j) ]^-1``; the global figure
averages the inverses of the local estimates, which is better behaved than
averaging the estimates directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import PointSet, distance_matrix


class DegenerateNeighborError(ValueError):
    """A neighbor at distance zero (duplicate point) makes the estimator undefined."""


@dataclass(frozen=True)
class MleEstimate:
    """Per-point and global MLE results.

    ``local_values`` has one entry per point: a positive estimate, ``inf``
    when all k neighbors are equidistant (the log sum vanishes), or ``nan``
    for points with a duplicate neighbor, which are excluded from the global
    average and counted in ``degenerate_count``. Infinite locals contribute
    an inverse of 0 to the average.
    """

    k: int
    local_values: np.ndarray
    global_value: float
    degenerate_count: int
    method: str = "inverse"


def mle_local(neighbor_distances, k: int) -> float:
    """Local MLE dimension from the sorted distances to the k nearest neighbors.

    Parameters
    ----------
    neighbor_distances : array-like
        Non-decreasing distances T_1 <= ... <= T_k (extra entries ignored).
    k : int
        Neighbor count, at least 2.

    Returns
    -------
    float
        Positive estimate, or ``inf`` when all distances equal T_k.

    Raises
    ------
    ValueError
        If k < 2 or fewer than k distances are given.
    DegenerateNeighborError
        If any distance is zero (duplicate point).
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    t = np.asarray(neighbor_distances, dtype=float)
    if t.size < k:
        raise ValueError(f"need at least k={k} distances, got {t.size}")
    t = t[:k]
    if np.any(np.diff(t) < 0):
        raise ValueError("neighbor distances must be sorted ascending")
    if t[0] <= 0:
        raise DegenerateNeighborError("zero neighbor distance (duplicate point)")
    log_sum = float(np.log(t[k - 1] / t[: k - 1]).sum())
    if log_sum == 0.0:
        return math.inf
    return (k - 1) / log_sum


def mle_global(points: PointSet, k: int, direct: bool = False) -> MleEstimate:
    """Global MLE dimension of a point set.

    Sorts each point's distances to all others (self excluded; ranking ties
    resolved by ascending index), evaluates the local estimator, and averages
    the inverses of the local values. Points with duplicate neighbors are
    flagged and skipped. ``direct=True`` averages the finite local values
    themselves instead of their inverses; it exists as a diagnostic and is
    not the recommended estimator.

    Raises
    ------
    ValueError
        If n <= k.
    DegenerateNeighborError
        If every point is degenerate (e.g. all points identical).
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if points.n <= k:
        raise ValueError(f"need more than k={k} points, got {points.n}")

    dist = distance_matrix(points)
    order = np.sort(dist, axis=1, kind="stable")
    local_values = np.empty(points.n)
    degenerate = 0
    inverses = []
    for i in range(points.n):
        neighbor_dists = order[i, 1 : k + 1]  # drop the self distance at rank 0
        try:
            value = mle_local(neighbor_dists, k)
        except DegenerateNeighborError:
            local_values[i] = math.nan
            degenerate += 1
            continue
        local_values[i] = value
        inverses.append(0.0 if math.isinf(value) else 1.0 / value)

    if not inverses:
        raise DegenerateNeighborError("all points have duplicate neighbors")

    if direct:
        finite = local_values[np.isfinite(local_values)]
        global_value = float(finite.mean()) if finite.size else math.inf
        method = "direct"
    else:
        mean_inverse = float(np.mean(inverses))
        global_value = math.inf if mean_inverse == 0 else 1.0 / mean_inverse
        method = "inverse"
    return MleEstimate(
        k=k,
        local_values=local_values,
        global_value=global_value,
        degenerate_count=degenerate,
        method=method,
    )
