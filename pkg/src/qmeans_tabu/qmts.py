"""Quantized-means tabu search for K-Means.

During exploration every center is a dataset row. Each iteration replaces
center k with the non-tabu member of its own cluster whose swap changes the
objective least (or improves it most), holding memberships fixed. The best
configuration seen is then unconstrained by a centroid step or a full Lloyd run.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .dataset import Dataset
from .lloyd import ClusteringResult, LloydConfig, init_random, lloyd_run
from .objective import Assignment, CenterSet, assign, centroids, icss

REFINEMENTS = ("centroid-step", "full-kmeans")

# observer(cluster, chosen_row, tabu_row_before_selection, evictions_in_this_selection)
SelectObserver = Callable[[int, int, tuple, int], None]


@dataclass
class QmtsConfig:
    it_max: int = 400
    r_max: Optional[int] = None
    seed: int = 0
    refinement: str = "full-kmeans"
    tabu_cap: Optional[int] = None
    lloyd_max_iterations: int = 300

    def __post_init__(self):
        if self.r_max is None:
            self.r_max = max(1, int(round(0.25 * self.it_max)))
        if self.it_max < 1 or not 1 <= self.r_max <= self.it_max:
            raise ValueError(f"need 1 <= r_max <= it_max, got r_max={self.r_max}, it_max={self.it_max}")
        if self.refinement not in REFINEMENTS:
            raise ValueError(f"unknown refinement {self.refinement!r}; expected one of {REFINEMENTS}")
        if self.tabu_cap is not None and self.tabu_cap < 1:
            raise ValueError("tabu_cap must be >= 1 or None")


class TabuList:
    """K rows of dataset-row indices. Rows grow; the only removal is evict_last
    (plus dropping the oldest entry when a cap is configured)."""

    def __init__(self, k: int, cap: Optional[int] = None):
        self.rows: list[list[int]] = [[] for _ in range(k)]
        self._members: list[set[int]] = [set() for _ in range(k)]
        self.cap = cap
        self.evictions = 0

    def contains(self, k: int, idx: int) -> bool:
        return idx in self._members[k]

    def add(self, k: int, idx: int):
        idx = int(idx)
        if idx in self._members[k]:
            return
        self.rows[k].append(idx)
        self._members[k].add(idx)
        if self.cap is not None and len(self.rows[k]) > self.cap:
            self._members[k].discard(self.rows[k].pop(0))

    def evict_last(self, k: int) -> int:
        idx = self.rows[k].pop()
        self._members[k].discard(idx)
        self.evictions += 1
        return idx

    def mask(self, k: int, candidates: np.ndarray) -> np.ndarray:
        """Boolean mask over `candidates`, True where the row is tabu for cluster k."""
        if not self._members[k]:
            return np.zeros(candidates.shape[0], dtype=bool)
        return np.isin(candidates, self.rows[k])


@dataclass
class SearchState:
    m_current: CenterSet
    m_best: CenterSet
    j_current: float
    j_best: float
    assignment: Assignment
    r: int = 0
    iteration: int = 0


@dataclass
class QmtsResult(ClusteringResult):
    explore_j: float = float("nan")
    best_rows: tuple = ()
    evictions: int = 0
    worsening_moves: int = 0
    stop_reason: str = ""
    refine_iterations: int = 0
    # J of the initial solution followed by J_n for every iteration
    j_trace: list = field(default_factory=list)


def delta_j(ds: Dataset, cluster_members, mu_k, candidate_x) -> float:
    """Change in the cluster's sum of squares when its center moves from `mu_k`
    to `candidate_x`, memberships held fixed (summed term by term)."""
    mu_k = np.asarray(mu_k, dtype=float)
    candidate_x = np.asarray(candidate_x, dtype=float)
    if mu_k.shape != (ds.d,) or candidate_x.shape != (ds.d,):
        raise ValueError(f"center and candidate must be {ds.d}-dimensional")
    members = np.asarray(cluster_members, dtype=np.intp)
    if members.size == 0:
        return 0.0
    step = candidate_x - mu_k
    xs = ds.points[members]
    return float(np.sum(-2.0 * (xs - mu_k) @ step + step @ step))


def _delta_j_scan(xs: np.ndarray, mu_k: np.ndarray) -> np.ndarray:
    """delta_j for every row of `xs` as a candidate, O(d) each via the cluster sum."""
    offset = xs.sum(axis=0) - xs.shape[0] * mu_k
    steps = xs - mu_k
    return xs.shape[0] * np.einsum("nd,nd->n", steps, steps) - 2.0 * steps @ offset


def select_neighbor_component(
    ds: Dataset,
    k: int,
    cluster_members,
    mu_k,
    tabu: TabuList,
    observer: Optional[SelectObserver] = None,
) -> Optional[int]:
    """Non-tabu member of cluster k with minimal delta_j (lowest row index on ties).

    When every member is tabu, the last entry of tabu row k is evicted until one
    member is free. Returns None for an empty cluster; the caller repairs it.
    """
    members = np.asarray(cluster_members, dtype=np.intp)
    if members.size == 0:
        return None
    before = tuple(tabu.rows[k])
    scores = _delta_j_scan(ds.points[members], np.asarray(mu_k, dtype=float))
    evicted = 0
    blocked = tabu.mask(k, members)
    while blocked.all():
        tabu.evict_last(k)
        evicted += 1
        blocked = tabu.mask(k, members)
    scores = np.where(blocked, np.inf, scores)
    chosen = int(members[int(np.argmin(scores))])
    if observer is not None:
        observer(k, chosen, before, evicted)
    return chosen


def _repair_empty(ds, state, tabu, k, taken):
    """Farthest point from its current center, excluding tabu row k and rows already taken."""
    m = state.m_current.centers
    d2 = np.sum((ds.points - m[state.assignment.labels]) ** 2, axis=1)
    blocked = np.zeros(ds.n, dtype=bool)
    blocked[list(taken)] = True
    free = ~blocked & ~tabu.mask(k, np.arange(ds.n))
    if not free.any():
        free = ~blocked
    d2 = np.where(free, d2, -np.inf)
    return int(np.argmax(d2))


def build_neighbor(
    ds: Dataset,
    state: SearchState,
    tabu: TabuList,
    observer: Optional[SelectObserver] = None,
) -> CenterSet:
    """Assemble M_n from the per-cluster choices, each made independently."""
    cur = state.m_current
    k_total = cur.k
    chosen: list[Optional[int]] = [None] * k_total
    for k in range(k_total):
        chosen[k] = select_neighbor_component(
            ds, k, state.assignment.members(k), cur.centers[k], tabu, observer
        )
    picked = [c for c in chosen if c is not None]
    assert len(set(picked)) == len(picked), "clusters are disjoint, so picks must be too"
    taken = set(picked)
    for k in range(k_total):
        if chosen[k] is None:
            chosen[k] = _repair_empty(ds, state, tabu, k, taken)
            taken.add(chosen[k])
    return CenterSet.from_rows(ds, chosen)


def refine(
    ds: Dataset, m_best: CenterSet, mode: str = "full-kmeans", max_iterations: int = 300
) -> ClusteringResult:
    if mode == "full-kmeans":
        return lloyd_run(ds, m_best, LloydConfig(max_iterations=max_iterations))
    if mode != "centroid-step":
        raise ValueError(f"unknown refinement {mode!r}; expected one of {REFINEMENTS}")
    a = assign(ds, m_best)
    c = centroids(ds, a, fallback=m_best)
    a2 = assign(ds, c)
    j = icss(ds, c, a2)
    return ClusteringResult(c, a2, j, 1, bool(np.array_equal(a.labels, a2.labels)), [j])


def qmts_run(
    ds: Dataset,
    k: int,
    cfg: Optional[QmtsConfig] = None,
    observer: Optional[SelectObserver] = None,
) -> QmtsResult:
    cfg = cfg or QmtsConfig()
    m0 = init_random(ds, k, cfg.seed)
    a0 = assign(ds, m0)
    j0 = icss(ds, m0, a0)
    state = SearchState(m_current=m0, m_best=m0, j_current=j0, j_best=j0, assignment=a0)
    tabu = TabuList(k, cfg.tabu_cap)
    trace = [j0]
    worsening = 0
    stop_reason = "it_max"

    while state.iteration < cfg.it_max:
        state.iteration += 1
        m_n = build_neighbor(ds, state, tabu, observer)
        a_n = assign(ds, m_n)
        j_n = icss(ds, m_n, a_n)
        trace.append(j_n)
        if j_n > state.j_current:
            worsening += 1
        if j_n < state.j_best:
            state.j_best, state.m_best, state.r = j_n, m_n, 0
        else:
            state.r += 1
        for kk, row in enumerate(state.m_current.indices):
            tabu.add(kk, row)
        state.m_current, state.assignment, state.j_current = m_n, a_n, j_n
        if state.r >= cfg.r_max:
            stop_reason = "r_max"
            break

    refined = refine(ds, state.m_best, cfg.refinement, cfg.lloyd_max_iterations)
    return QmtsResult(
        centers=refined.centers,
        assignment=refined.assignment,
        j=refined.j,
        iterations=state.iteration,
        converged=refined.converged,
        history=refined.history,
        explore_j=state.j_best,
        best_rows=tuple(int(i) for i in state.m_best.indices),
        evictions=tabu.evictions,
        worsening_moves=worsening,
        stop_reason=stop_reason,
        refine_iterations=refined.iterations,
        j_trace=trace,
    )
