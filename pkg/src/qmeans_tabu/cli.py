"""Command line entry point: `cluster run ...` and `cluster datasets`."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .bench import ALGORITHMS, FORMATS, BenchError, ExperimentSpec, emit_report, run_experiment
from .dataset import NORMALIZE_MODES, DatasetError, load_registry
from .lloyd import LloydConfig
from .qmts import QmtsConfig

REFINE_FLAGS = {"centroid": "centroid-step", "kmeans": "full-kmeans"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cluster", description="K-Means benchmark runner")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run repeated seeded clusterings and emit a report")
    run.add_argument("--data", required=True, help="registry name or path to a headerless numeric CSV")
    run.add_argument("--k", type=int, required=True)
    run.add_argument("--algo", default=",".join(ALGORITHMS),
                     help=f"comma-separated subset of {','.join(ALGORITHMS)}")
    run.add_argument("--reps", type=int, default=100)
    run.add_argument("--seed", type=int, default=0, help="base seed; repetition i uses seed+i")
    run.add_argument("--itmax", type=int, default=400)
    run.add_argument("--rmax-frac", type=float, default=0.25)
    run.add_argument("--refine", choices=sorted(REFINE_FLAGS), default="kmeans")
    run.add_argument("--normalize", choices=NORMALIZE_MODES, default=None)
    run.add_argument("--format", choices=FORMATS, default="md")
    run.add_argument("--out", default="-", help="output file, '-' for stdout")
    run.add_argument("--jobs", type=int, default=1)

    sub.add_parser("datasets", help="list registered datasets")
    return parser


def _spec_from_args(args) -> ExperimentSpec:
    algos = tuple(a.strip() for a in args.algo.split(",") if a.strip())
    if not 0 < args.rmax_frac <= 1:
        raise BenchError("--rmax-frac must be in (0, 1]")
    try:
        qcfg = QmtsConfig(
            it_max=args.itmax,
            r_max=max(1, int(round(args.rmax_frac * args.itmax))),
            refinement=REFINE_FLAGS[args.refine],
        )
    except ValueError as exc:
        raise BenchError(str(exc)) from exc
    return ExperimentSpec(
        dataset=args.data,
        k=args.k,
        algorithms=algos,
        repetitions=args.reps,
        base_seed=args.seed,
        lloyd=LloydConfig(),
        qmts=qcfg,
        normalize=args.normalize,
        jobs=args.jobs,
    )


def _fail(kind: str, message: str) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return 2


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "datasets":
            for name, entry in load_registry().items():
                print(f"{name}\tk={entry.get('k')}\tnormalize={entry.get('normalize', 'none')}\t{entry['path']}")
            return 0
        report = run_experiment(_spec_from_args(args))
        payload = emit_report(report, args.format)
        if args.out == "-":
            sys.stdout.write(payload.decode("utf-8"))
        else:
            Path(args.out).write_bytes(payload)
    except DatasetError as exc:
        return _fail("dataset", str(exc))
    except BenchError as exc:
        return _fail("experiment", str(exc))
    except OSError as exc:
        return _fail("io", str(exc))
    return 0


if __name__ == "__main__":
    sys.exit(main())
