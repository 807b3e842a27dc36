"""Repeated seeded runs per algorithm, aggregation, and report emission."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Optional

from .dataset import Dataset, load_dataset, normalize
from .lloyd import LloydConfig, kmeans
from .qmts import QmtsConfig, qmts_run

ALGORITHMS = ("lloyd-random", "lloyd-kmeanspp", "qmts")
FORMATS = ("json", "csv", "md")
TABLE_NAMES = {"lloyd-random": "K-Means", "lloyd-kmeanspp": "K-Means++", "qmts": "Proposed"}


class BenchError(ValueError):
    pass


@dataclass
class ExperimentSpec:
    dataset: str
    k: int
    algorithms: tuple = ALGORITHMS
    repetitions: int = 100
    base_seed: int = 0
    lloyd: LloydConfig = field(default_factory=LloydConfig)
    qmts: QmtsConfig = field(default_factory=QmtsConfig)
    # None means: use the registry default for the dataset, else "none"
    normalize: Optional[str] = None
    jobs: int = 1

    def __post_init__(self):
        self.algorithms = tuple(self.algorithms)
        unknown = [a for a in self.algorithms if a not in ALGORITHMS]
        if unknown:
            raise BenchError(f"unknown algorithm(s) {unknown}; expected a subset of {ALGORITHMS}")
        if self.repetitions < 1:
            raise BenchError("repetitions must be >= 1")
        if self.k < 1:
            raise BenchError("k must be >= 1")


@dataclass(frozen=True)
class RunRecord:
    algorithm: str
    seed: int
    j_final: float
    wall_time_s: float
    iterations: int


@dataclass(frozen=True)
class Aggregate:
    algorithm: str
    worst_j: float
    average_j: float
    best_j: float
    mean_time_s: float
    runs: int


@dataclass
class RunReport:
    meta: dict
    records: list
    aggregates: list

    def to_dict(self, timings: bool = True) -> dict:
        recs = [asdict(r) for r in self.records]
        aggs = [asdict(a) for a in self.aggregates]
        if not timings:
            for r in recs:
                del r["wall_time_s"]
            for a in aggs:
                del a["mean_time_s"]
        return {"meta": dict(self.meta), "records": recs, "aggregates": aggs}

    @classmethod
    def from_dict(cls, data: dict) -> "RunReport":
        return cls(
            meta=dict(data["meta"]),
            records=[RunRecord(**r) for r in data["records"]],
            aggregates=[Aggregate(**a) for a in data["aggregates"]],
        )

    def j_values(self, algorithm: str) -> list[float]:
        return [r.j_final for r in self.records if r.algorithm == algorithm]

    def aggregate(self, algorithm: str) -> Aggregate:
        for a in self.aggregates:
            if a.algorithm == algorithm:
                return a
        raise KeyError(algorithm)


def aggregate(records: list, algorithms) -> list[Aggregate]:
    """worst/average/best J and mean time per algorithm, in `algorithms` order."""
    out = []
    for alg in algorithms:
        js = [r.j_final for r in records if r.algorithm == alg]
        if not js:
            continue
        times = [r.wall_time_s for r in records if r.algorithm == alg]
        worst, best = max(js), min(js)
        # fsum keeps the mean reproducible; clamp guards the last-ulp rounding
        avg = min(max(math.fsum(js) / len(js), best), worst)
        out.append(Aggregate(alg, worst, avg, best, math.fsum(times) / len(times), len(js)))
    return out


def _run_one(ds: Dataset, spec: ExperimentSpec, algorithm: str, seed: int) -> RunRecord:
    if algorithm == "qmts":
        cfg = replace(spec.qmts, seed=seed)
        t0 = time.perf_counter()
        res = qmts_run(ds, spec.k, cfg)
    else:
        init = "random-points" if algorithm == "lloyd-random" else "kmeans-plus-plus"
        cfg = replace(spec.lloyd, seed=seed, init=init)
        t0 = time.perf_counter()
        res = kmeans(ds, spec.k, cfg)
    elapsed = time.perf_counter() - t0
    return RunRecord(algorithm, seed, float(res.j), elapsed, int(res.iterations))


def _run_batch(args):
    ds, spec, jobs = args
    return [_run_one(ds, spec, alg, seed) for alg, seed in jobs]


def resolve_dataset(spec: ExperimentSpec) -> tuple[Dataset, str]:
    try:
        ds, entry = load_dataset(spec.dataset)
    except ValueError as exc:
        raise BenchError(str(exc)) from exc
    mode = spec.normalize or entry.get("normalize", "none")
    ds, _ = normalize(ds, mode)
    return ds, mode


def run_experiment(spec: ExperimentSpec, ds: Optional[Dataset] = None) -> RunReport:
    """Repetition i of every algorithm uses seed base_seed + i.

    Pass `ds` to bypass the registry (the dataset is used as given).
    """
    if ds is None:
        ds, mode = resolve_dataset(spec)
    else:
        mode = spec.normalize or "none"
    if spec.k > ds.n:
        raise BenchError(f"k={spec.k} exceeds the {ds.n} rows of {ds.name}")

    work = [(alg, spec.base_seed + i) for alg in spec.algorithms for i in range(spec.repetitions)]
    if spec.jobs > 1 and len(work) > 1:
        chunks = [work[i:: spec.jobs] for i in range(spec.jobs)]
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            done = list(pool.map(_run_batch, [(ds, spec, c) for c in chunks if c]))
        by_key = {(r.algorithm, r.seed): r for batch in done for r in batch}
        records = [by_key[w] for w in work]
    else:
        records = [_run_one(ds, spec, alg, seed) for alg, seed in work]

    meta = {
        "dataset": ds.name,
        "n": ds.n,
        "d": ds.d,
        "k": spec.k,
        "normalize": mode,
        "repetitions": spec.repetitions,
        "base_seed": spec.base_seed,
        "algorithms": list(spec.algorithms),
        "it_max": spec.qmts.it_max,
        "r_max": spec.qmts.r_max,
        "refinement": spec.qmts.refinement,
        "lloyd_max_iterations": spec.lloyd.max_iterations,
    }
    return RunReport(meta, records, aggregate(records, spec.algorithms))


def emit_report(report: RunReport, fmt: str = "json", timings: bool = True) -> bytes:
    if fmt == "json":
        return (json.dumps(report.to_dict(timings), indent=2) + "\n").encode("utf-8")
    if fmt == "csv":
        return _emit_csv(report).encode("utf-8")
    if fmt in ("md", "markdown"):
        return _emit_markdown(report).encode("utf-8")
    raise BenchError(f"unknown format {fmt!r}; expected one of {FORMATS}")


def parse_json_report(data: bytes) -> RunReport:
    return RunReport.from_dict(json.loads(data))


def _emit_csv(report: RunReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["algorithm", "seed", "j_final", "wall_time_s", "iterations"])
    for r in report.records:
        w.writerow([r.algorithm, r.seed, repr(r.j_final), repr(r.wall_time_s), r.iterations])
    w.writerow([])
    w.writerow(["algorithm", "worst_j", "average_j", "best_j", "mean_time_s", "runs"])
    for a in report.aggregates:
        w.writerow([a.algorithm, repr(a.worst_j), repr(a.average_j), repr(a.best_j), repr(a.mean_time_s), a.runs])
    return buf.getvalue()


def _emit_markdown(report: RunReport) -> str:
    m = report.meta
    lines = []
    if m:
        lines.append(f"{m.get('dataset', '?')}: N={m.get('n')}, K={m.get('k')}, d={m.get('d')}")
        lines.append("")
    lines.append("| Algorithm | Worst J | Average J | Best J | Time (s) |")
    lines.append("|---|---|---|---|---|")
    for a in report.aggregates:
        name = TABLE_NAMES.get(a.algorithm, a.algorithm)
        lines.append(f"| {name} | {a.worst_j:.2f} | {a.average_j:.2f} | {a.best_j:.2f} | {a.mean_time_s:.3f} |")
    return "\n".join(lines) + "\n"
