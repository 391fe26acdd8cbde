import json

import numpy as np
import pytest

from maddclust.cli import main
from maddclust.harness import (
    ExperimentConfig,
    read_trials_csv,
    run_experiment,
    summarize,
    trial_seed,
)
from maddclust.io import write_csv
from maddclust.methods import Method
from maddclust import reproduce as rp
from maddclust.reproduce import PLANS, table_config


def test_config_validation():
    with pytest.raises(ValueError):
        ExperimentConfig()
    with pytest.raises(ValueError):
        ExperimentConfig(scenario="Ex1", reps=0)
    with pytest.raises(ValueError):
        ExperimentConfig(scenario="Ex1", methods=["avgl:rho9"])
    with pytest.raises(ValueError):
        ExperimentConfig(scenario="Ex1", estimators=["elbow"])
    with pytest.raises(ValueError):
        ExperimentConfig(scenario="Ex1", estimators=["jump"], t=0.0)
    cfg = ExperimentConfig(scenario="Ex1", methods=["km-euclid"])
    assert cfg.methods == ["km:euclid"]


def test_method_parsing():
    m = Method.parse("spectral:rho2")
    assert m.algorithm == "spectral" and m.is_madd and not m.hierarchical
    assert not Method.parse("km:euclid").is_madd
    with pytest.raises(ValueError):
        Method.parse("ward:rho0")


def test_ex3_avgl_rho0_small_run(tmp_path):
    cfg = ExperimentConfig(scenario="Ex3", dims=[100], reps=5, methods=["avgl:rho0"], out_dir=tmp_path)
    report = run_experiment(cfg)
    assert report.clustering[0]["mean_rand"] == pytest.approx(0.0, abs=0.02)
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["schema_version"] == 1
    assert report.ok


def test_byte_identical_reruns(tmp_path):
    kw = dict(scenario="Ex1", dims=[60], reps=1, seed=7, methods=["avgl:rho0", "km:euclid"],
              estimators=["dunn", "jump"], k_max=5)
    for name in ("a", "b"):
        run_experiment(ExperimentConfig(out_dir=str(tmp_path / name), **kw))
    assert (tmp_path / "a" / "trials.csv").read_bytes() == (tmp_path / "b" / "trials.csv").read_bytes()


def test_summary_recomputable_from_trials(tmp_path):
    cfg = ExperimentConfig(scenario="Ex2", dims=[40, 80], reps=3, methods=["avgl:rho0", "spectral:rho0"],
                           estimators=["pd", "kl"], k_max=6, out_dir=str(tmp_path))
    run_experiment(cfg)
    summary = json.loads((tmp_path / "summary.json").read_text())
    clustering, estimation = summarize(read_trials_csv(tmp_path / "trials.csv"), k0=4)
    again = json.loads(json.dumps({"clustering": clustering, "estimation": estimation}, sort_keys=True))
    assert again["clustering"] == summary["clustering"]
    assert again["estimation"] == summary["estimation"]
    assert (tmp_path / "rand_vs_dim.svg").read_text().lstrip().startswith("<?xml")


def test_seed_isolation():
    base = dict(scenario="Ex5", dims=[50], methods=["km:rho0"], seed=3)
    short = run_experiment(ExperimentConfig(reps=2, **base)).rows
    long = run_experiment(ExperimentConfig(reps=4, **base)).rows
    assert long[:2] == short
    assert trial_seed(3, 1) == trial_seed(3, 1)


def test_threads_do_not_change_results():
    base = dict(scenario="Ex6", dims=[30], reps=3, methods=["avgl:rho1"])
    one = run_experiment(ExperimentConfig(threads=1, **base)).rows
    two = run_experiment(ExperimentConfig(threads=2, **base)).rows
    assert one == two


def test_algorithm_failure_is_recorded():
    cfg = ExperimentConfig(scenario="Ex8-cauchy", dims=[200], reps=2, methods=["spectral:euclid", "avgl:rho2"])
    report = run_experiment(cfg)
    status = {r["method"]: r["status"] for r in report.rows}
    assert status["avgl:rho2"] == "ok"
    assert all(e["trials"] == 2 for e in report.clustering)


def test_null_uniform_pd_rho1():
    cfg = ExperimentConfig(scenario="null-uniform", dims=[500], reps=10, methods=["avgl:rho1"],
                           estimators=["pd"])
    est = run_experiment(cfg).estimation[0]
    assert est["frequency"].get("1", 0) >= 9


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    with pytest.raises(OSError, match="not writable"):
        run_experiment(ExperimentConfig(scenario="Ex1", dims=[10], reps=1, out_dir=str(blocker / "sub")))


def test_input_file_experiment(tmp_path):
    rng = np.random.default_rng(0)
    X = np.vstack([rng.normal(size=(10, 30)), rng.normal(size=(10, 30)) + 3])
    path = tmp_path / "in.csv"
    write_csv(path, X, np.repeat([1, 2], 10))
    cfg = ExperimentConfig(input_path=str(path), label_column="class", reps=2, methods=["avgl:rho0"])
    rep = run_experiment(cfg)
    assert rep.clustering[0]["mean_rand"] == 0.0 and rep.clustering[0]["d"] == 30


def test_reproduce_plans_are_valid():
    for table, plan in PLANS.items():
        for scale in ("desk", "full"):
            cfg = table_config(table, plan.scenarios[0], scale)
            assert cfg.reps == (10 if scale == "desk" else 100)


# CLI

def test_cli_simulate_and_outputs(tmp_path, capsys):
    rc = main(["simulate", "--scenario", "Ex3", "--dims", "60,120", "--reps", "2", "--methods", "avgl:rho0",
               "--out", str(tmp_path / "run"), "--dump-data", str(tmp_path / "data")])
    assert rc == 0
    assert (tmp_path / "run" / "trials.csv").exists() and (tmp_path / "run" / "rand_vs_dim.svg").exists()
    assert len(list((tmp_path / "data").glob("*.csv"))) == 4
    assert "mean Rand" in capsys.readouterr().out


def test_cli_config_file(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"scenario": "Ex6", "dims": [40], "reps": 1, "methods": ["km:rho0"]}))
    assert main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 0
    rows = read_trials_csv(tmp_path / "o" / "trials.csv")
    assert rows[0]["method"] == "km:rho0"


def test_cli_cluster_estimate_ingest(tmp_path, capsys):
    out = tmp_path / "labels.csv"
    assert main(["cluster", "--scenario", "Ex6", "--d", "100", "--k", "2", "--out", str(out)]) == 0
    assert out.read_text().splitlines()[0] == "cluster"
    assert main(["estimate-k", "--scenario", "Ex3", "--d", "200", "--estimators", "dunn,jump"]) == 0
    reports = json.loads(capsys.readouterr().out.split("\n", 1)[1])
    assert reports["jump"]["k_hat"] >= 1
    data = tmp_path / "d.csv"
    write_csv(data, np.eye(3) + 1, [1, 2, 2])
    assert main(["ingest", str(data), "--label-column", "class"]) == 0
    info = json.loads(capsys.readouterr().out)
    assert info["n"] == 3 and info["d"] == 3 and info["labels"] == {"1": 1, "2": 2}


def test_cli_errors(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("1,2\n3\n")
    assert main(["ingest", str(bad)]) == 2
    assert "line 2" in capsys.readouterr().err
    assert main(["cluster", "--k", "2"]) == 2
    with pytest.raises(SystemExit):
        main(["reproduce", "t9"])


def test_cli_reproduce_writes_table(tmp_path, monkeypatch):
    monkeypatch.setitem(rp.SCALES, "desk", {"reps": 1, "per_class": 10, "B": 3})
    monkeypatch.setitem(rp.PLANS, "t3", rp.TablePlan(("Ex6",), (40,), ("avgl:rho0",), ("dunn", "gap")))
    assert main(["reproduce", "t3", "--out", str(tmp_path)]) == 0
    lines = (tmp_path / "t3" / "t3.csv").read_text().splitlines()
    assert lines[0].startswith("example,method,estimator,k0,failed,k=1") and len(lines) == 3
    assert json.loads((tmp_path / "t3" / "Ex6" / "summary.json").read_text())["schema_version"] == 1
