"""Configuration-driven Monte-Carlo experiments: trial records, summaries and plots.

Outputs of ``run_experiment`` in ``out_dir``:

* ``trials.csv``   one row per trial x method (x estimator)
* ``summary.json`` mean Rand indices and k-hat frequency tables, ``schema_version`` = 1
* ``rand_vs_dim.svg`` mean Rand index against log2(d) when several dimensions are run
"""

from __future__ import annotations

import csv
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .dissimilarity import madd_matrix
from .datagen import SCENARIOS, ScenarioSpec, sample_scenario
from .evaluation import rand_index
from .io import ingest_csv
from .methods import Method
from .selection import ESTIMATORS, build_sweep, estimate_k

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
TRIAL_FIELDS = ["scenario", "d", "trial", "seed", "kind", "method", "estimator",
                "k", "rand_index", "k_hat", "status", "sigma"]


@dataclass
class ExperimentConfig:
    scenario: str | None = None
    input_path: str | None = None
    header: bool | None = None
    label_column: str | None = None
    sizes: int | list | None = None
    dims: list = field(default_factory=lambda: [500])
    methods: list = field(default_factory=lambda: ["avgl:rho0"])
    estimators: list = field(default_factory=list)
    k: int | None = None
    cluster: bool = True
    k_max: int = 12
    reps: int = 10
    seed: int = 1
    seeds: list | None = None
    t: float = 1.0
    lam: float = 0.015
    B: int = 100
    threads: int = 1
    out_dir: str | None = None
    plot: bool = True
    name: str = "experiment"

    def __post_init__(self):
        if (self.scenario is None) == (self.input_path is None):
            raise ValueError("give exactly one of scenario or input_path")
        if self.scenario is not None and self.scenario not in SCENARIOS:
            raise ValueError(f"unknown scenario {self.scenario!r}; choose from {sorted(SCENARIOS)}")
        if self.reps < 1:
            raise ValueError(f"reps must be >= 1, got {self.reps}")
        if self.seeds is not None and len(self.seeds) < self.reps:
            raise ValueError(f"{self.reps} repetitions need at least as many seeds, got {len(self.seeds)}")
        self.methods = [Method.parse(m).name for m in self.methods]
        unknown = set(self.estimators) - set(ESTIMATORS)
        if unknown:
            raise ValueError(f"unknown estimators {sorted(unknown)}; choose from {ESTIMATORS}")
        if self.estimators and self.k_max < 2:
            raise ValueError("k_max must be >= 2 for cluster-count estimation")
        if "jump" in self.estimators and not self.t > 0:
            raise ValueError("the Jump statistic needs t > 0")
        # paths stay plain strings so the config serializes to JSON
        if self.out_dir is not None:
            self.out_dir = str(self.out_dir)
        if self.input_path is not None:
            self.input_path = str(self.input_path)
        if isinstance(self.sizes, list):
            self.sizes = tuple(self.sizes)
        if self.input_path is not None:
            self.dims = [None]
        self.dims = [None if d is None else int(d) for d in self.dims]

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        return cls(**data)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SummaryReport:
    config: dict
    clustering: list
    estimation: list
    invariant_violations: list
    files: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "config": self.config,
            "clustering": self.clustering,
            "estimation": self.estimation,
            "invariant_violations": self.invariant_violations,
        }

    @property
    def ok(self) -> bool:
        return not self.invariant_violations


def trial_seed(base_seed: int, trial: int) -> int:
    """Trial i draws its data and restarts from seed base + i, whatever the trial count."""
    return int(base_seed) + int(trial)


def _load(config: ExperimentConfig, d, seed):
    if config.scenario is not None:
        sample = sample_scenario(ScenarioSpec(config.scenario, d, config.sizes, seed))
        return sample.X, sample.labels, SCENARIOS[config.scenario].k0
    data = ingest_csv(config.input_path, config.header, config.label_column)
    k0 = int(data.labels.max()) if data.labels is not None else None
    return data.X, data.labels, k0


def check_madd_invariants(base, madd, tol=1e-10) -> list:
    """Dominance rho <= phi and symmetry/zero diagonal on a computed MADD matrix."""
    problems = []
    excess = float(np.max(madd.values - base.values))
    if excess > tol * max(1.0, float(base.values.max())):
        problems.append(f"rho exceeds phi by {excess:.3g}")
    if not np.array_equal(madd.values, madd.values.T) or np.any(np.diag(madd.values) != 0):
        problems.append("MADD matrix not symmetric with zero diagonal")
    return problems


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def run_trial(config: ExperimentConfig, d, trial: int, seed: int):
    """All methods and estimators on one generated (or ingested) sample."""
    X, truth, k0 = _load(config, d, seed)
    d_eff = X.shape[1]
    label = config.scenario or Path(config.input_path).name
    rows, violations = [], []
    matrices = {}
    for name in config.methods:
        m = Method.parse(name)
        if m.dissimilarity not in matrices:
            base = m.base(X)
            if m.is_madd:
                D = madd_matrix(base)
                violations += [f"{label} d={d_eff} trial={trial}: {p}" for p in check_madd_invariants(base, D)]
            else:
                D = base
            matrices[m.dissimilarity] = D

    common = {"scenario": label, "d": d_eff, "trial": trial, "seed": seed}
    k = config.k or k0
    for name in config.methods:
        m = Method.parse(name)
        D = matrices[m.dissimilarity]
        if config.cluster and k is not None:
            row = dict(common, kind="cluster", method=name, estimator="", k=k)
            try:
                a = m.fit(X, k, seed=seed, D=D)
                row.update(rand_index=rand_index(truth, a) if truth is not None else None,
                           status="ok", sigma=a.info.get("sigma"))
            except (ValueError, RuntimeError) as exc:
                row.update(status=f"error: {exc}")
            rows.append(row)
        if config.estimators:
            sweep, sweep_error = None, None
            if set(config.estimators) & {"dunn", "pd", "kl", "jump"}:
                try:
                    sweep = build_sweep(X, m, config.k_max + 1, seed, D=D)
                except (ValueError, RuntimeError) as exc:
                    sweep_error = exc
            for est in config.estimators:
                names = ["cv_a", "cv_v"] if est == "cv" else [est]
                try:
                    if sweep_error is not None and est in ("dunn", "pd", "kl", "jump"):
                        raise sweep_error
                    reports = estimate_k(X, m, [est], config.k_max, seed, config.t, config.lam,
                                         config.B, sweep=sweep)
                    for key in names:
                        rows.append(dict(common, kind="estimate", method=name, estimator=key,
                                         k_hat=reports[key].k_hat, status="ok"))
                except (ValueError, RuntimeError) as exc:
                    for key in names:
                        rows.append(dict(common, kind="estimate", method=name, estimator=key,
                                         status=f"error: {exc}"))
    return rows, violations


def _task(args):
    config, d, trial, seed = args
    return run_trial(config, d, trial, seed)


def seed_for(config, d, trial):
    if config.seeds is not None:
        return int(config.seeds[trial])
    return trial_seed(config.seed, trial)


def summarize(rows: list, k0=None) -> tuple[list, list]:
    """Mean Rand per (d, method) and k-hat frequencies per (d, method, estimator)."""
    clus, est = {}, {}
    for r in rows:
        if r["kind"] == "cluster":
            clus.setdefault((r["d"], r["method"]), []).append(r)
        else:
            est.setdefault((r["d"], r["method"], r["estimator"]), []).append(r)
    clustering = []
    for (d, method), rs in clus.items():
        ok = [r["rand_index"] for r in rs if r["status"] == "ok" and r["rand_index"] is not None]
        clustering.append({
            "d": d, "method": method, "trials": len(rs), "failed": sum(r["status"] != "ok" for r in rs),
            "mean_rand": math.fsum(ok) / len(ok) if ok else None,
            "sd_rand": float(np.std(ok)) if ok else None,
        })
        sig = [r["sigma"] for r in rs if r.get("sigma") is not None]
        if sig:
            clustering[-1]["sigma"] = sig
    estimation = []
    for (d, method, name), rs in est.items():
        hats = [int(r["k_hat"]) for r in rs if r["status"] == "ok"]
        freq = {}
        for h in sorted(set(hats)):
            freq[str(h)] = hats.count(h)
        entry = {"d": d, "method": method, "estimator": name, "trials": len(rs),
                 "failed": len(rs) - len(hats), "frequency": freq}
        if k0 is not None:
            entry["k0"] = k0
            entry["correct"] = hats.count(k0)
        estimation.append(entry)
    return clustering, estimation


def write_trials_csv(path, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRIAL_FIELDS)
        for r in rows:
            w.writerow([_fmt(r.get(f)) for f in TRIAL_FIELDS])


def read_trials_csv(path) -> list:
    """Parse trials.csv back into typed rows (inverse of ``write_trials_csv``)."""
    out = []
    with open(path, newline="", encoding="utf-8") as fh:
        for r in csv.DictReader(fh):
            out.append({
                "scenario": r["scenario"], "d": int(r["d"]), "trial": int(r["trial"]), "seed": int(r["seed"]),
                "kind": r["kind"], "method": r["method"], "estimator": r["estimator"],
                "k": int(r["k"]) if r["k"] else None,
                "rand_index": float(r["rand_index"]) if r["rand_index"] else None,
                "k_hat": int(r["k_hat"]) if r["k_hat"] else None,
                "status": r["status"], "sigma": float(r["sigma"]) if r["sigma"] else None,
            })
    return out


def _prepare_out(out_dir) -> Path:
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise OSError(f"output directory {out} is not writable: {exc.strerror}") from exc
    return out


def run_experiment(config: ExperimentConfig) -> SummaryReport:
    """Run every (dimension, trial) task; results are gathered in task order."""
    out = _prepare_out(config.out_dir) if config.out_dir else None
    tasks = [(config, d, t, seed_for(config, d, t)) for d in config.dims for t in range(config.reps)]
    if config.threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=config.threads) as pool:
            results = list(pool.map(_task, tasks))
    else:
        results = [_task(t) for t in tasks]
    rows = [r for rs, _ in results for r in rs]
    violations = [v for _, vs in results for v in vs]
    k0 = SCENARIOS[config.scenario].k0 if config.scenario else None
    clustering, estimation = summarize(rows, k0)
    report = SummaryReport(config.to_dict(), clustering, estimation, violations)
    report.rows = rows
    if out is not None:
        trials = out / "trials.csv"
        write_trials_csv(trials, rows)
        summary = out / "summary.json"
        summary.write_text(json.dumps(report.as_dict(), indent=2, sort_keys=True) + "\n")
        report.files = {"trials": str(trials), "summary": str(summary)}
        if config.plot and len(config.dims) > 1 and clustering:
            from .plotting import plot_rand_vs_dim

            svg = out / "rand_vs_dim.svg"
            plot_rand_vs_dim(clustering, svg, title=config.name)
            report.files["plot"] = str(svg)
    for v in violations:
        log.warning("invariant violation: %s", v)
    return report
