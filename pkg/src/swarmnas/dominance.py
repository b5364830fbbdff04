"""Pareto and epsilon-Pareto dominance, crowding distance, and the two archives.

All objectives are maximized. An objective vector is any sequence of finite
floats; for the architecture search it is (accuracy, -FLOPs/1e9).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NoLeadersError

INF = math.inf


def dominates(a, b) -> bool:
    """True iff a >= b componentwise and strictly better somewhere."""
    better = False
    for av, bv in zip(a, b, strict=True):
        if av < bv:
            return False
        if av > bv:
            better = True
    return better


def pareto_filter(points) -> list[int]:
    """Indices of non-dominated points, in stable input order."""
    arr = np.asarray(points, dtype=float)
    n = len(arr)
    if n == 0:
        return []
    keep = []
    for i in range(n):
        ge = np.all(arr >= arr[i], axis=1)
        gt = np.any(arr > arr[i], axis=1)
        if not np.any(ge & gt):
            keep.append(i)
    return keep


def _boxes(v, eps) -> tuple[int, ...]:
    return tuple(math.floor(x / e) for x, e in zip(v, eps, strict=True))


def epsilon_dominates(a, b, eps) -> bool:
    """Box dominance: floor(a/eps) >= floor(b/eps) componentwise, boxes unequal."""
    if any(e <= 0 for e in eps):
        raise ValueError("epsilon components must be positive")
    box_a, box_b = _boxes(a, eps), _boxes(b, eps)
    return box_a != box_b and all(x >= y for x, y in zip(box_a, box_b))


def _corner_distance(v, eps) -> float:
    """Euclidean distance to the box's upper corner (the best point of the box)."""
    box = _boxes(v, eps)
    return math.sqrt(sum(((i + 1) * e - x) ** 2 for x, i, e in zip(v, box, eps)))


@dataclass
class EpsilonArchive:
    """Final-solution archive kept pairwise epsilon-non-dominated."""

    epsilon: tuple[float, ...] = (0.01, 0.05)
    entries: list[tuple[object, tuple[float, ...]]] = field(default_factory=list)

    def __post_init__(self):
        self.epsilon = tuple(float(e) for e in self.epsilon)
        if any(e <= 0 for e in self.epsilon):
            raise ValueError("epsilon components must be positive")

    def insert(self, genotype, objectives) -> bool:
        """Insert a candidate; returns True if it was accepted."""
        objectives = tuple(float(v) for v in objectives)
        box = _boxes(objectives, self.epsilon)
        for _, obj in self.entries:
            if epsilon_dominates(obj, objectives, self.epsilon):
                return False
        for i, (_, obj) in enumerate(self.entries):
            if _boxes(obj, self.epsilon) == box:
                # same box: keep whichever sits closer to the box's upper corner
                if _corner_distance(objectives, self.epsilon) < _corner_distance(obj, self.epsilon):
                    self.entries[i] = (genotype, objectives)
                    return True
                return False
        self.entries = [
            e for e in self.entries if not epsilon_dominates(objectives, e[1], self.epsilon)
        ]
        self.entries.append((genotype, objectives))
        return True

    def objectives(self) -> list[tuple[float, ...]]:
        return [obj for _, obj in self.entries]

    def __len__(self) -> int:
        return len(self.entries)


def crowding_distances(front) -> list[float]:
    """NSGA-II crowding distance; boundary points get +inf per objective sort."""
    front = [tuple(float(v) for v in p) for p in front]
    n = len(front)
    if n == 0:
        return []
    if n <= 2:
        return [INF] * n
    m = len(front[0])
    dist = [0.0] * n
    for obj in range(m):
        order = sorted(range(n), key=lambda i: (front[i][obj], i))
        lo, hi = front[order[0]][obj], front[order[-1]][obj]
        span = hi - lo
        dist[order[0]] = dist[order[-1]] = INF
        if span == 0:
            continue
        for pos in range(1, n - 1):
            i = order[pos]
            if dist[i] == INF:
                continue
            gap = front[order[pos + 1]][obj] - front[order[pos - 1]][obj]
            dist[i] += gap / span
    return dist


@dataclass
class LeaderEntry:
    genotype: object
    objectives: tuple[float, ...]
    crowding: float = 0.0


@dataclass
class LeaderArchive:
    """Crowding-truncated archive of non-dominated leaders."""

    max_size: int
    entries: list[LeaderEntry] = field(default_factory=list)

    def update(self, candidates) -> None:
        """Rebuild from existing entries plus (genotype, objectives) candidates."""
        pool = [(e.genotype, e.objectives) for e in self.entries]
        pool += [(g, tuple(float(v) for v in obj)) for g, obj in candidates]
        if not pool:
            return
        keep = pareto_filter([obj for _, obj in pool])
        self.entries = [LeaderEntry(pool[i][0], pool[i][1]) for i in keep]
        self.truncate()
        self.recompute_crowding()

    def truncate(self) -> None:
        """Drop minimum-crowding entries (recomputed each drop) down to max_size."""
        while len(self.entries) > self.max_size:
            self.recompute_crowding()
            worst = min(range(len(self.entries)), key=lambda i: self.entries[i].crowding)
            del self.entries[worst]

    def recompute_crowding(self) -> None:
        dist = crowding_distances([e.objectives for e in self.entries])
        for e, d in zip(self.entries, dist):
            e.crowding = d

    def select_leader(self, rng: np.random.Generator) -> LeaderEntry:
        """Binary tournament on crowding; ties broken uniformly."""
        if not self.entries:
            raise NoLeadersError("leader archive is empty")
        i = int(rng.integers(len(self.entries)))
        j = int(rng.integers(len(self.entries)))
        a, b = self.entries[i], self.entries[j]
        if a.crowding > b.crowding:
            return a
        if b.crowding > a.crowding:
            return b
        return a if rng.random() < 0.5 else b

    def __len__(self) -> int:
        return len(self.entries)
