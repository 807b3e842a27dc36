"""Regenerate the Iris and Glass comparison tables (plus any user-registered datasets).

    python scripts/reproduce_tables.py --out results/ [--reps 100] [--jobs 4]

Extra datasets: add entries to a registry file (see README) and pass --extra name:k,
e.g. --extra bavaria:4 --extra cloud:10.
"""

import argparse
from pathlib import Path

from qmeans_tabu.bench import ExperimentSpec, emit_report, run_experiment
from qmeans_tabu.qmts import QmtsConfig

DEFAULT_TABLES = [("iris", 3), ("glass", 6)]


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", default="results")
    parser.add_argument("--reps", type=int, default=100)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--jobs", type=int, default=1)
    parser.add_argument("--itmax", type=int, default=400)
    parser.add_argument("--extra", action="append", default=[], help="name:k")
    args = parser.parse_args()

    tables = DEFAULT_TABLES + [(e.split(":")[0], int(e.split(":")[1])) for e in args.extra]
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, k in tables:
        spec = ExperimentSpec(
            name, k, repetitions=args.reps, base_seed=args.seed, jobs=args.jobs,
            qmts=QmtsConfig(it_max=args.itmax),
        )
        report = run_experiment(spec)
        stem = f"{name}_k{k}"
        (out / f"{stem}.json").write_bytes(emit_report(report, "json"))
        md = emit_report(report, "md")
        (out / f"{stem}.md").write_bytes(md)
        print(md.decode())


if __name__ == "__main__":
    main()
