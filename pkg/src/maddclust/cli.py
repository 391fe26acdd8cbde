"""Command-line entry point: ``maddclust {simulate,cluster,estimate-k,reproduce,ingest}``.

Exit status: 0 on success, 1 when a run finishes but an invariant check failed,
2 on bad input or configuration.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .datagen import SCENARIOS, ScenarioSpec, sample_scenario
from .dissimilarity import madd_matrix
from .evaluation import rand_index
from .harness import ExperimentConfig, check_madd_invariants, run_experiment, seed_for
from .io import CSVFormatError, ingest_csv, write_csv
from .methods import Method
from .reproduce import SCALES, TABLES, reproduce
from .selection import ESTIMATORS, estimate_k

log = logging.getLogger("maddclust")


def _ints(text):
    return [int(v) for v in text.split(",") if v.strip()]


def _words(text):
    return [v.strip() for v in text.split(",") if v.strip()]


def _add_data_args(p, with_dims=False):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--scenario", choices=sorted(SCENARIOS), help="generate data from a built-in scenario")
    src.add_argument("--input", help="CSV file with one observation per row")
    p.add_argument("--header", dest="header", action="store_true", default=None, help="first row is a header")
    p.add_argument("--no-header", dest="header", action="store_false")
    p.add_argument("--label-column", help="column name or 0-based index holding true labels")
    p.add_argument("--sizes", type=_ints, help="per-class sizes, e.g. 30 or 30,30,30")
    if with_dims:
        p.add_argument("--dims", type=_ints, help="comma-separated dimensions")
    else:
        p.add_argument("--d", type=int, default=500, help="dimension for generated data (default 500)")
    p.add_argument("--seed", type=int, help="base seed (default 1)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maddclust", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="verb", required=True)

    p = sub.add_parser("simulate", help="run a repeated-trial experiment")
    _add_data_args(p, with_dims=True)
    p.add_argument("--config", help="JSON file with ExperimentConfig fields; flags override it")
    p.add_argument("--methods", type=_words, help="e.g. avgl:rho0,km:euclid,spectral:rho2")
    p.add_argument("--estimators", type=_words, help=f"subset of {','.join(ESTIMATORS)}")
    p.add_argument("--k", type=int, help="number of clusters to fit (default: true k)")
    p.add_argument("--k-max", dest="k_max", type=int)
    p.add_argument("--reps", type=int)
    p.add_argument("--t", type=float, help="Jump transformation power")
    p.add_argument("--lam", type=float, help="penalized Dunn constant")
    p.add_argument("--B", type=int, help="Gap/CV resamples")
    p.add_argument("--threads", type=int)
    p.add_argument("--out", dest="out_dir", help="output directory")
    p.add_argument("--no-plot", dest="plot", action="store_false", default=None)
    p.add_argument("--dump-data", help="also write each generated sample as CSV into this directory")

    p = sub.add_parser("cluster", help="cluster one data set")
    _add_data_args(p)
    p.add_argument("--method", default="avgl:rho0")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", help="write labels CSV here instead of stdout")

    p = sub.add_parser("estimate-k", help="estimate the number of clusters")
    _add_data_args(p)
    p.add_argument("--method", default="avgl:rho0")
    p.add_argument("--estimators", type=_words, default=["dunn", "pd", "kl", "jump"])
    p.add_argument("--k-max", dest="k_max", type=int, default=12)
    p.add_argument("--t", type=float, default=1.0)
    p.add_argument("--lam", type=float, default=0.015)
    p.add_argument("--B", type=int, default=100)

    p = sub.add_parser("reproduce", help="regenerate a benchmark table or figure")
    p.add_argument("table", choices=TABLES)
    p.add_argument("--scale", choices=sorted(SCALES), default="desk")
    p.add_argument("--out", default="reproduce")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--threads", type=int, default=1)

    p = sub.add_parser("ingest", help="validate a CSV file and report its shape")
    p.add_argument("path")
    p.add_argument("--header", dest="header", action="store_true", default=None)
    p.add_argument("--no-header", dest="header", action="store_false")
    p.add_argument("--label-column")
    p.add_argument("--out", help="rewrite the parsed data as a clean CSV")
    return parser


def _load_data(args):
    seed = 1 if args.seed is None else args.seed
    if args.input:
        data = ingest_csv(args.input, args.header, args.label_column)
        return data.X, data.labels
    if not args.scenario:
        raise ValueError("give --scenario or --input")
    sizes = args.sizes[0] if args.sizes and len(args.sizes) == 1 else (tuple(args.sizes) if args.sizes else None)
    sample = sample_scenario(ScenarioSpec(args.scenario, args.d, sizes, seed))
    for note in sample.notes:
        log.warning(note)
    return sample.X, sample.labels


def cmd_simulate(args) -> int:
    fields = {}
    if args.config:
        fields.update(json.loads(Path(args.config).read_text()))
    mapping = {"scenario": "scenario", "input": "input_path", "header": "header", "label_column": "label_column",
               "dims": "dims", "seed": "seed", "methods": "methods", "estimators": "estimators", "k": "k",
               "k_max": "k_max", "reps": "reps", "t": "t", "lam": "lam", "B": "B", "threads": "threads",
               "out_dir": "out_dir", "plot": "plot"}
    for arg, key in mapping.items():
        value = getattr(args, arg)
        if value is not None:
            fields[key] = value
    if args.sizes:
        fields["sizes"] = args.sizes[0] if len(args.sizes) == 1 else args.sizes
    if fields.get("input_path"):
        fields.pop("scenario", None)
    cfg = ExperimentConfig.from_dict(fields)
    if args.dump_data:
        if cfg.scenario is None:
            raise ValueError("--dump-data needs a generated scenario")
        for d in cfg.dims:
            for trial in range(cfg.reps):
                seed = seed_for(cfg, d, trial)
                s = sample_scenario(ScenarioSpec(cfg.scenario, d, cfg.sizes, seed))
                write_csv(Path(args.dump_data) / f"{cfg.scenario}_d{d}_trial{trial}.csv", s.X, s.labels)
    report = run_experiment(cfg)
    for e in report.clustering:
        mean = "failed" if e["mean_rand"] is None else f"{e['mean_rand']:.4f}"
        print(f"d={e['d']} {e['method']}: mean Rand {mean} ({e['failed']} failed of {e['trials']})")
    for e in report.estimation:
        print(f"d={e['d']} {e['method']} {e['estimator']}: k-hat frequencies {e['frequency']}")
    for path in report.files.values():
        print(f"wrote {path}")
    if report.invariant_violations:
        for v in report.invariant_violations:
            print(f"invariant violation: {v}", file=sys.stderr)
        return 1
    return 0


def cmd_cluster(args) -> int:
    X, truth = _load_data(args)
    method = Method.parse(args.method)
    base = method.base(X)
    D = madd_matrix(base) if method.is_madd else base
    problems = check_madd_invariants(base, D) if method.is_madd else []
    a = method.fit(X, args.k, seed=1 if args.seed is None else args.seed, D=D)
    if args.out:
        Path(args.out).write_text("cluster\n" + "".join(f"{v}\n" for v in a.labels))
        print(f"wrote {args.out}")
    else:
        print("\n".join(str(v) for v in a.labels))
    if truth is not None:
        print(f"Rand index (0 = perfect): {rand_index(truth, a):.4f}", file=sys.stderr)
    for p in problems:
        print(f"invariant violation: {p}", file=sys.stderr)
    return 1 if problems else 0


def cmd_estimate(args) -> int:
    X, _ = _load_data(args)
    seed = 1 if args.seed is None else args.seed
    reports = estimate_k(X, args.method, args.estimators, args.k_max, seed, args.t, args.lam, args.B)
    print(json.dumps({name: r.as_dict() for name, r in reports.items()}, indent=2))
    return 0


def cmd_reproduce(args) -> int:
    result = reproduce(args.table, args.scale, args.out, args.seed, args.threads)
    for path in result["files"].values():
        print(f"wrote {path}")
    bad = [v for r in result["reports"].values() for v in r.invariant_violations]
    for v in bad:
        print(f"invariant violation: {v}", file=sys.stderr)
    return 1 if bad else 0


def cmd_ingest(args) -> int:
    data = ingest_csv(args.path, args.header, args.label_column)
    info = {"path": data.path, "n": data.n, "d": data.d,
            "labels": None if data.labels is None else {str(k): int(c) for k, c in
                                                        zip(*np.unique(data.labels, return_counts=True))}}
    print(json.dumps(info))
    if args.out:
        write_csv(args.out, data.X, data.labels, columns=data.columns)
    return 0


COMMANDS = {"simulate": cmd_simulate, "cluster": cmd_cluster, "estimate-k": cmd_estimate,
            "reproduce": cmd_reproduce, "ingest": cmd_ingest}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.verb](args)
    except (CSVFormatError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
