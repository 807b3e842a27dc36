"""Lloyd's K-Means with random or K-Means++ seeding."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import Dataset
from .objective import Assignment, CenterSet, assign, centroids, icss

INIT_METHODS = ("random-points", "kmeans-plus-plus")


@dataclass
class LloydConfig:
    max_iterations: int = 300
    seed: int = 0
    init: str = "random-points"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if self.init not in INIT_METHODS:
            raise ValueError(f"unknown init {self.init!r}; expected one of {INIT_METHODS}")


@dataclass
class ClusteringResult:
    centers: CenterSet
    assignment: Assignment
    j: float
    iterations: int
    converged: bool
    # ICSS after every full assign+centroid pass
    history: list = field(default_factory=list)


def _check_k(ds: Dataset, k: int):
    if not 1 <= k <= ds.n:
        raise ValueError(f"k must satisfy 1 <= k <= N={ds.n}, got {k}")


def init_random(ds: Dataset, k: int, seed: int) -> CenterSet:
    _check_k(ds, k)
    rng = np.random.default_rng(seed)
    return CenterSet.from_rows(ds, rng.choice(ds.n, size=k, replace=False))


def init_kmeanspp(ds: Dataset, k: int, seed: int) -> CenterSet:
    """D^2 seeding: each new center drawn with probability proportional to the
    squared distance to its nearest already-chosen center."""
    _check_k(ds, k)
    rng = np.random.default_rng(seed)
    x = ds.points
    chosen = [int(rng.integers(ds.n))]
    d2 = np.sum((x - x[chosen[0]]) ** 2, axis=1)
    for _ in range(1, k):
        d2[chosen] = 0.0
        total = d2.sum()
        if total > 0:
            nxt = int(rng.choice(ds.n, p=d2 / total))
        else:
            # every remaining row coincides with a chosen center
            rest = np.setdiff1d(np.arange(ds.n), chosen)
            nxt = int(rng.choice(rest))
        chosen.append(nxt)
        d2 = np.minimum(d2, np.sum((x - x[nxt]) ** 2, axis=1))
    return CenterSet.from_rows(ds, chosen)


def lloyd_run(ds: Dataset, init: CenterSet, cfg: LloydConfig | None = None) -> ClusteringResult:
    cfg = cfg or LloydConfig()
    centers = CenterSet(init.centers)
    a = assign(ds, centers)
    history = []
    converged = False
    it = 0
    while it < cfg.max_iterations:
        it += 1
        centers = centroids(ds, a, fallback=centers)
        new = assign(ds, centers)
        history.append(icss(ds, centers, new))
        if np.array_equal(new.labels, a.labels):
            converged = True
            a = new
            break
        a = new
    return ClusteringResult(centers, a, history[-1], it, converged, history)


def kmeans(ds: Dataset, k: int, cfg: LloydConfig | None = None) -> ClusteringResult:
    """Seed per `cfg.init` and run Lloyd iterations."""
    cfg = cfg or LloydConfig()
    seeder = init_random if cfg.init == "random-points" else init_kmeanspp
    return lloyd_run(ds, seeder(ds, k, cfg.seed), cfg)
