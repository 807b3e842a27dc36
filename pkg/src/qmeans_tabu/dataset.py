"""Dataset loading, normalization and synthetic fixtures."""

from __future__ import annotations

import csv
import io
import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np

REGISTRY_ENV = "QMEANS_TABU_REGISTRY"
NORMALIZE_MODES = ("none", "zscore", "minmax")


class DatasetError(ValueError):
    """Raised for malformed input files or unknown dataset names."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


@dataclass(frozen=True)
class Dataset:
    points: np.ndarray
    name: str = "data"
    labels: Optional[tuple] = None

    def __post_init__(self):
        pts = np.array(self.points, dtype=float)
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2 or pts.shape[0] < 1 or pts.shape[1] < 1:
            raise DatasetError(f"points must be a non-empty 2-D matrix, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise DatasetError("points contain NaN or Inf")
        if self.labels is not None and len(self.labels) != pts.shape[0]:
            raise DatasetError("labels length does not match number of rows")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def d(self) -> int:
        return self.points.shape[1]


@dataclass(frozen=True)
class NormalizationSpec:
    mode: str
    # (shift, scale) per feature; output = (x - shift) / scale, scale 0 maps to 0
    shift: tuple = field(default=())
    scale: tuple = field(default=())


def load_csv(
    path,
    delimiter: str = ",",
    has_header: bool = False,
    label_column: Optional[int] = None,
    name: Optional[str] = None,
) -> Dataset:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DatasetError(f"cannot read {path}: {exc}") from exc
    return parse_csv(text, delimiter, has_header, label_column, name or path.stem)


def parse_csv(
    text: str,
    delimiter: str = ",",
    has_header: bool = False,
    label_column: Optional[int] = None,
    name: str = "data",
) -> Dataset:
    rows, labels = [], []
    width = None
    for lineno, row in enumerate(csv.reader(io.StringIO(text), delimiter=delimiter), start=1):
        if not row or all(not c.strip() for c in row):
            continue
        if has_header and lineno == 1:
            continue
        if width is None:
            width = len(row)
            if label_column is not None and not -width <= label_column < width:
                raise DatasetError(f"label column {label_column} out of range for {width} fields", lineno)
        elif len(row) != width:
            raise DatasetError(f"expected {width} fields, got {len(row)}", lineno)
        lab = None
        if label_column is not None:
            lab_idx = label_column % width
            lab = row[lab_idx].strip()
            row = row[:lab_idx] + row[lab_idx + 1:]
        try:
            values = [float(c) for c in row]
        except ValueError:
            bad = next(c for c in row if not _is_float(c))
            raise DatasetError(f"non-numeric value {bad!r}", lineno) from None
        if not all(np.isfinite(values)):
            raise DatasetError("non-finite value", lineno)
        rows.append(values)
        labels.append(lab)
    if not rows:
        raise DatasetError("no data rows")
    if not rows[0]:
        raise DatasetError("no numeric columns")
    return Dataset(np.array(rows), name=name, labels=tuple(labels) if label_column is not None else None)


def _is_float(s: str) -> bool:
    try:
        float(s)
        return True
    except ValueError:
        return False


def to_csv(ds: Dataset, delimiter: str = ",") -> str:
    """Serialize points (and labels as a trailing column) with repr floats, so parsing is exact."""
    buf = io.StringIO()
    w = csv.writer(buf, delimiter=delimiter, lineterminator="\n")
    for i, row in enumerate(ds.points):
        out = [repr(float(v)) for v in row]
        if ds.labels is not None:
            out.append(ds.labels[i])
        w.writerow(out)
    return buf.getvalue()


def normalize(ds: Dataset, mode: str = "none") -> tuple[Dataset, NormalizationSpec]:
    """Return a normalized copy of `ds`. z-score uses the population (ddof=0) std."""
    x = ds.points
    if mode == "none":
        return Dataset(x.copy(), ds.name, ds.labels), NormalizationSpec("none")
    if mode == "zscore":
        shift = x.mean(axis=0)
        scale = x.std(axis=0)
    elif mode == "minmax":
        shift = x.min(axis=0)
        scale = x.max(axis=0) - shift
    else:
        raise DatasetError(f"unknown normalization mode {mode!r}; expected one of {NORMALIZE_MODES}")
    out = np.zeros_like(x)
    # exact constancy test: a float mean can leave a spurious nonzero std
    ok = (scale > 0) & (x.max(axis=0) > x.min(axis=0))
    out[:, ok] = (x[:, ok] - shift[ok]) / scale[ok]
    spec = NormalizationSpec(mode, tuple(shift.tolist()), tuple(scale.tolist()))
    return Dataset(out, ds.name, ds.labels), spec


def synth_gaussian_mixture(
    k: int, per_cluster_n: int, d: int, separation: float, seed: int
) -> tuple[Dataset, np.ndarray]:
    """Unit-variance spherical Gaussian blobs with means pairwise >= `separation` apart.

    Returns the dataset and the 0-based ground-truth labels.
    """
    if k < 1 or per_cluster_n < 1 or d < 1:
        raise ValueError("k, per_cluster_n and d must be >= 1")
    if separation <= 0:
        raise ValueError("separation must be positive")
    rng = np.random.default_rng(seed)
    means = _spread_means(rng, k, d, separation)
    pts = np.concatenate([rng.normal(m, 1.0, size=(per_cluster_n, d)) for m in means])
    truth = np.repeat(np.arange(k), per_cluster_n)
    return Dataset(pts, name=f"gmm-k{k}-d{d}-s{seed}"), truth


def _spread_means(rng, k, d, separation):
    box = separation * max(2.0, k ** (1.0 / d) * 2.0)
    means = []
    for _ in range(200 * k):
        cand = rng.uniform(0.0, box, size=d)
        if all(np.linalg.norm(cand - m) >= separation for m in means):
            means.append(cand)
            if len(means) == k:
                return np.array(means)
    # rejection failed (tight box); a line always satisfies the gap
    return np.outer(np.arange(k), np.eye(d)[0]) * separation


def _registry_path() -> Path:
    env = os.environ.get(REGISTRY_ENV)
    if env:
        return Path(env)
    return Path(str(resources.files("qmeans_tabu") / "data" / "registry.json"))


def load_registry(path=None) -> dict:
    path = Path(path) if path else _registry_path()
    try:
        entries = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DatasetError(f"cannot load dataset registry {path}: {exc}") from exc
    for entry in entries.values():
        entry["path"] = str((path.parent / entry["path"]).resolve())
    return entries


def load_dataset(name_or_path: str, registry=None) -> tuple[Dataset, dict]:
    """Resolve a registry name, else treat the argument as a headerless CSV path.

    Returns the dataset and its registry entry (empty for plain paths).
    """
    reg = load_registry(registry)
    if name_or_path in reg:
        entry = reg[name_or_path]
        ds = load_csv(
            entry["path"],
            delimiter=entry.get("delimiter", ","),
            has_header=entry.get("header", False),
            label_column=entry.get("label_column"),
            name=name_or_path,
        )
        return ds, entry
    if Path(name_or_path).is_file():
        return load_csv(name_or_path), {}
    raise DatasetError(f"unknown dataset {name_or_path!r}; registry has {sorted(reg)}")


def builtin(name: str) -> Dataset:
    return load_dataset(name)[0]

