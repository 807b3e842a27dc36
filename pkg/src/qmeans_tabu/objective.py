"""ICSS objective, nearest-center assignment and centroid computation.

Cluster indices are 0-based throughout the package.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .dataset import Dataset


@dataclass(frozen=True)
class CenterSet:
    """K centers. `indices` is set while the centers are dataset rows (quantized form)."""

    centers: np.ndarray
    indices: Optional[np.ndarray] = None

    def __post_init__(self):
        c = np.array(self.centers, dtype=float)
        if c.ndim != 2 or c.shape[0] < 1:
            raise ValueError(f"centers must be a (K, d) matrix with K >= 1, got shape {c.shape}")
        c.setflags(write=False)
        object.__setattr__(self, "centers", c)
        if self.indices is not None:
            idx = np.array(self.indices, dtype=np.intp)
            if idx.shape != (c.shape[0],):
                raise ValueError("indices must hold one dataset row per center")
            idx.setflags(write=False)
            object.__setattr__(self, "indices", idx)

    @classmethod
    def from_rows(cls, ds: Dataset, indices) -> "CenterSet":
        idx = np.asarray(indices, dtype=np.intp)
        if idx.ndim != 1 or idx.size == 0 or idx.min() < 0 or idx.max() >= ds.n:
            raise ValueError(f"row indices out of range for dataset with {ds.n} rows")
        return cls(ds.points[idx], idx)

    @property
    def k(self) -> int:
        return self.centers.shape[0]

    @property
    def quantized(self) -> bool:
        return self.indices is not None


@dataclass(frozen=True)
class Assignment:
    labels: np.ndarray
    counts: np.ndarray

    @classmethod
    def from_labels(cls, labels, k: int) -> "Assignment":
        labels = np.asarray(labels, dtype=np.intp)
        if labels.size and (labels.min() < 0 or labels.max() >= k):
            raise ValueError(f"labels out of range for K={k}")
        labels.setflags(write=False)
        counts = np.bincount(labels, minlength=k)
        counts.setflags(write=False)
        return cls(labels, counts)

    @property
    def k(self) -> int:
        return self.counts.shape[0]

    def members(self, k: int) -> np.ndarray:
        return np.flatnonzero(self.labels == k)


def sq_distances(points: np.ndarray, centers: np.ndarray) -> np.ndarray:
    """(N, K) squared Euclidean distances as explicit sums of squared differences."""
    diff = points[:, None, :] - centers[None, :, :]
    return np.einsum("nkd,nkd->nk", diff, diff)


def assign(ds: Dataset, m: CenterSet) -> Assignment:
    """Nearest center per point; ties go to the lowest cluster index."""
    if m.centers.shape[1] != ds.d:
        raise ValueError(f"center dimensionality {m.centers.shape[1]} != dataset dimensionality {ds.d}")
    # argmin returns the first minimum, which is the tie-break we want
    labels = np.argmin(sq_distances(ds.points, m.centers), axis=1)
    return Assignment.from_labels(labels, m.k)


def icss(ds: Dataset, m: CenterSet, a: Assignment) -> float:
    """Intra-cluster sum of squares of `ds` under centers `m` and memberships `a`."""
    if a.labels.shape[0] != ds.n:
        raise ValueError(f"assignment covers {a.labels.shape[0]} points, dataset has {ds.n}")
    if a.k != m.k:
        raise ValueError(f"assignment has K={a.k}, center set has K={m.k}")
    if m.centers.shape[1] != ds.d:
        raise ValueError("center dimensionality does not match dataset")
    diff = ds.points - m.centers[a.labels]
    return float(np.einsum("nd,nd->", diff, diff))


def centroids(ds: Dataset, a: Assignment, fallback: CenterSet) -> CenterSet:
    """Cluster means; an empty cluster keeps its `fallback` center."""
    k = a.k
    sums = np.zeros((k, ds.d))
    np.add.at(sums, a.labels, ds.points)
    out = np.array(fallback.centers, dtype=float)
    nonempty = a.counts > 0
    out[nonempty] = sums[nonempty] / a.counts[nonempty, None]
    return CenterSet(out)
