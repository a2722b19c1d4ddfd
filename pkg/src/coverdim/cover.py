"""Neighborhood construction and greedy approximate minimum set cover.

Each data point gets a neighborhood (k nearest neighbors or an epsilon-ball).
A single greedy pass then discards neighborhoods whose members are all covered
more than once, leaving an approximate minimum cover of the data set.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np


@dataclass(frozen=True)
class NeighborhoodSpec:
    """How neighborhoods are formed: k-NN or epsilon-ball.

    Exactly one of ``k`` / ``eps`` is set, according to ``mode``.
    """

    mode: str
    k: int | None = None
    eps: float | None = None

    def __post_init__(self):
        if self.mode == "knn":
            if self.k is None or self.k < 1:
                raise ValueError(f"knn mode needs k >= 1, got {self.k}")
            if self.eps is not None:
                raise ValueError("knn mode must not set eps")
        elif self.mode == "eps":
            if self.eps is None or not self.eps > 0:
                raise ValueError(f"eps mode needs eps > 0, got {self.eps}")
            if self.k is not None:
                raise ValueError("eps mode must not set k")
        else:
            raise ValueError(f"unknown neighborhood mode {self.mode!r}")

    @classmethod
    def knn(cls, k: int) -> "NeighborhoodSpec":
        return cls(mode="knn", k=int(k))

    @classmethod
    def eps_ball(cls, eps: float) -> "NeighborhoodSpec":
        return cls(mode="eps", eps=float(eps))


@dataclass(frozen=True)
class Neighborhood:
    """Index set of one neighborhood; members[0] is always the center."""

    center: int
    members: np.ndarray
    radius: float = 0.0

    def __post_init__(self):
        members = np.asarray(self.members, dtype=np.intp)
        if members.size < 1 or members[0] != self.center:
            raise ValueError("members must start with the center index")
        object.__setattr__(self, "members", members)

    @property
    def size(self) -> int:
        return self.members.size


@dataclass(frozen=True)
class Cover:
    """Retained neighborhoods whose member sets jointly cover all n points."""

    subsets: tuple[Neighborhood, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "subsets", tuple(self.subsets))
        if not 1 <= len(self.subsets) <= self.n:
            raise ValueError(f"cover must retain between 1 and {self.n} subsets")
        covered = np.zeros(self.n, dtype=bool)
        for nb in self.subsets:
            covered[nb.members] = True
        if not covered.all():
            missing = np.nonzero(~covered)[0]
            raise ValueError(f"cover does not contain points {missing[:10].tolist()}")

    @property
    def size(self) -> int:
        return len(self.subsets)


def build_neighborhoods(dist: np.ndarray, spec: NeighborhoodSpec) -> list[Neighborhood]:
    """Build one neighborhood per point from a distance matrix.

    In k-NN mode every neighborhood has exactly k+1 members (the center plus
    its k nearest neighbors); distance ties at the k-th rank are broken by
    ascending point index. In eps mode the members are the center plus all
    points strictly closer than eps; a point with no neighbors within eps
    yields a singleton neighborhood.
    """
    dist = np.asarray(dist, dtype=float)
    n = dist.shape[0]
    if dist.ndim != 2 or dist.shape[1] != n:
        raise ValueError(f"distance matrix must be square, got shape {dist.shape}")

    neighborhoods = []
    if spec.mode == "knn":
        k = spec.k
        if k > n - 1:
            raise ValueError(f"k={k} requires at least k+1={k + 1} points, got {n}")
        masked = dist.copy()
        np.fill_diagonal(masked, np.inf)
        # Stable sort on distances == ascending-index tie-break.
        order = np.argsort(masked, axis=1, kind="stable")[:, :k]
        for i in range(n):
            members = np.concatenate(([i], order[i]))
            neighborhoods.append(Neighborhood(center=i, members=members))
    else:
        for i in range(n):
            within = np.nonzero(dist[i] < spec.eps)[0]
            within = within[within != i]
            members = np.concatenate(([i], within))
            neighborhoods.append(Neighborhood(center=i, members=members))
    return neighborhoods


def minimum_cover(neighborhoods: list[Neighborhood], dist: np.ndarray) -> Cover:
    """Greedy single-pass approximation of the minimum set cover.

    Computes the frequency Q_i of each point (number of neighborhoods that
    contain it), then walks the neighborhoods in the given order (ascending
    center index as built). A neighborhood whose members all have frequency
    > 1 is removed and the frequencies of its members are decremented;
    otherwise it is retained and assigned its radius, the maximum distance
    from its center to any member.

    Removal never drops a member's frequency below 1, so the retained subsets
    always cover every point.
    """
    n = len(neighborhoods)
    freq = np.zeros(n, dtype=np.int64)
    for nb in neighborhoods:
        freq[nb.members] += 1

    retained = []
    for nb in neighborhoods:
        members = nb.members
        if np.all(freq[members] > 1):
            freq[members] -= 1
            assert freq[members].min() >= 1, "cover pass dropped a frequency below 1"
        else:
            radius = float(dist[nb.center, members].max())
            retained.append(replace(nb, radius=radius))
    return Cover(subsets=tuple(retained), n=n)
