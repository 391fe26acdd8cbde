"""Preset experiments for the benchmark Rand-index and k-hat tables.

``desk`` scale: 10 repetitions, 30 observations per class, and 10 resamples for
Gap and CV. ``full`` scale: 100 repetitions, 50 per class, 100 resamples; this
takes hours on one core.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from .harness import ExperimentConfig, run_experiment
from .plotting import plot_rand_vs_dim

TABLES = ("fig2", "t1", "t2", "t3", "t4")
SCALES = {
    "desk": {"reps": 10, "per_class": 30, "B": 10},
    "full": {"reps": 100, "per_class": 50, "B": 100},
}
K_MAX = 12


@dataclass(frozen=True)
class TablePlan:
    scenarios: tuple
    dims: tuple
    methods: tuple
    estimators: tuple = ()


def _grid(algos, disses):
    return tuple(f"{a}:{d}" for a in algos for d in disses)


PLANS = {
    "fig2": TablePlan(("A", "B"), tuple(2 ** r for r in range(1, 12)),
                      _grid(("avgl", "km", "spectral"), ("euclid", "rho0"))),
    "t1": TablePlan(("Ex1", "Ex2", "Ex3", "Ex4", "Ex5", "Ex6"), (100, 200, 500),
                    _grid(("avgl", "km", "spectral"), ("euclid", "rho0"))),
    "t2": TablePlan(("Ex7", "Ex8"), (100, 200, 500),
                    _grid(("avgl", "km", "spectral"), ("euclid", "rho0", "rho1", "rho2"))),
    "t3": TablePlan(("Ex1", "Ex2", "Ex3", "Ex4", "Ex5", "Ex6"), (500,),
                    _grid(("avgl", "km"), ("euclid", "rho0")), ("dunn", "pd", "kl", "jump", "gap", "cv")),
    "t4": TablePlan(("Ex7", "Ex8"), (500,),
                    _grid(("avgl", "km"), ("rho0", "rho1", "rho2")), ("dunn", "pd", "kl", "jump", "gap", "cv")),
}


def table_config(table: str, scenario: str, scale: str = "desk", seed: int = 1, threads: int = 1,
                 out_dir=None) -> ExperimentConfig:
    if table not in PLANS:
        raise ValueError(f"unknown table {table!r}; choose from {TABLES}")
    if scale not in SCALES:
        raise ValueError(f"unknown scale {scale!r}; choose from {sorted(SCALES)}")
    plan, s = PLANS[table], SCALES[scale]
    return ExperimentConfig(
        scenario=scenario, sizes=s["per_class"], dims=list(plan.dims), methods=list(plan.methods),
        estimators=list(plan.estimators), cluster=not plan.estimators,
        k_max=K_MAX, reps=s["reps"], seed=seed, B=s["B"], threads=threads, out_dir=out_dir,
        plot=False, name=f"{table} {scenario}",
    )


def reproduce(table: str, scale: str = "desk", out_dir="reproduce", seed: int = 1, threads: int = 1) -> dict:
    """Run every scenario of ``table``; returns the written file paths and the per-scenario reports."""
    root = Path(out_dir) / table
    plan = PLANS.get(table)
    if plan is None:
        raise ValueError(f"unknown table {table!r}; choose from {TABLES}")
    reports, files = {}, {}
    for scenario in plan.scenarios:
        cfg = table_config(table, scenario, scale, seed, threads, root / scenario)
        reports[scenario] = run_experiment(cfg)
        if table == "fig2":
            svg = root / f"rand_vs_dim_{scenario}.svg"
            plot_rand_vs_dim(reports[scenario].clustering, svg, title=f"Example {scenario}")
            files[f"plot_{scenario}"] = str(svg)

    path = root / f"{table}.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if plan.estimators:
            w.writerow(["example", "method", "estimator", "k0", "failed"] + [f"k={k}" for k in range(1, K_MAX + 1)])
            for scenario, rep in reports.items():
                for e in rep.estimation:
                    counts = [e["frequency"].get(str(k), 0) for k in range(1, K_MAX + 1)]
                    w.writerow([scenario, e["method"], e["estimator"], e.get("k0", ""), e["failed"]] + counts)
        else:
            w.writerow(["example", "d", "method", "mean_rand", "sd_rand", "failed", "mean_sigma"])
            for scenario, rep in reports.items():
                for e in rep.clustering:
                    sig = e.get("sigma")
                    w.writerow([scenario, e["d"], e["method"],
                                "" if e["mean_rand"] is None else f"{e['mean_rand']:.4f}",
                                "" if e["sd_rand"] is None else f"{e['sd_rand']:.4f}", e["failed"],
                                f"{sum(sig) / len(sig):.6g}" if sig else ""])
    files["table"] = str(path)
    return {"files": files, "reports": reports}
