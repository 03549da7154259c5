import json

import numpy as np
import pytest

from spantree import experiments
from spantree.cli import main
from spantree.tree import load_edges_csv


def _write_data(path, p=8, n=25, seed=0):
    rng = np.random.default_rng(seed)
    Y, tree = experiments.generate_tree_data(p, n, rng, 0.3)
    header = ",".join("v%d" % (j + 1) for j in range(p))
    np.savetxt(path, Y, delimiter=",", header=header, comments="")
    return tree


def test_mcp_command(tmp_path):
    data = tmp_path / "data.csv"
    _write_data(data)
    out = tmp_path / "run"
    main(["mcp", "--data", str(data), "--out", str(out)])
    mcp = np.loadtxt(out / "mcp.csv", delimiter=",")
    assert mcp.shape == (8, 8)
    assert abs(np.triu(mcp, 1).sum() - 7.0) < 1e-6
    summary = json.loads((out / "summary.json").read_text())
    assert summary["p"] == 8 and summary["tau"] > 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert "mcp.csv" in manifest["files"]


def test_mode_command_recovers_generating_tree(tmp_path):
    data = tmp_path / "data.csv"
    truth = _write_data(data, seed=1)
    out = tmp_path / "run"
    main(["mode", "--data", str(data), "--out", str(out)])
    tree = load_edges_csv(out / "tree.csv", p=8)
    assert len(tree.edge_set() ^ truth.edge_set()) <= 2


def test_fit_command_outputs(tmp_path):
    data = tmp_path / "data.csv"
    _write_data(data, seed=2)
    out = tmp_path / "run"
    main(["fit", "--data", str(data), "--out", str(out),
          "--iters", "60", "--burnin", "20", "--chains", "2"])
    for name in ("draws_chain0.jsonl", "draws_chain1.jsonl", "mcp_freq.csv",
                 "tau_trace.csv", "degree_trace.csv", "diagnostics.json",
                 "manifest.json"):
        assert (out / name).exists(), name
    lines = (out / "draws_chain0.jsonl").read_text().splitlines()
    assert len(lines) == 40
    rec = json.loads(lines[0])
    assert len(rec["edges"]) == 7 and rec["tau"] > 0
    freq = np.loadtxt(out / "mcp_freq.csv", delimiter=",")
    assert abs(np.triu(freq, 1).sum() - 7.0) < 1e-9
    diag = json.loads((out / "diagnostics.json").read_text())
    assert set(diag) == {"chain_0", "chain_1"}


def test_fit_with_config_degree_prior(tmp_path):
    data = tmp_path / "data.csv"
    _write_data(data, seed=3)
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({
        "alpha": 5.0,
        "prior": {"kind": "degree", "v": [0.125] * 8, "conc": 1.5},
    }))
    out = tmp_path / "run"
    main(["fit", "--data", str(data), "--config", str(cfg),
          "--out", str(out), "--iters", "40", "--burnin", "10"])
    assert (out / "mcp_freq.csv").exists()


def test_simulate_oracle_tree(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"kind": "oracle_tree", "p": 12, "n": 20,
                                "seed": 4}))
    out = tmp_path / "run"
    main(["simulate", "--spec", str(spec), "--out", str(out)])
    Y = np.loadtxt(out / "data.csv", delimiter=",", skiprows=1)
    assert Y.shape == (20, 12)
    assert len(load_edges_csv(out / "truth_tree.csv", p=12).edges) == 11


def test_simulate_manifold(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"kind": "two_moons", "p": 20, "seed": 5,
                                "iterations": 40, "burn_in": 10}))
    out = tmp_path / "run"
    main(["simulate", "--spec", str(spec), "--out", str(out)])
    pts = np.loadtxt(out / "points.csv", delimiter=",")
    assert pts.shape == (20, 2)
    assert (out / "mcp.csv").exists()
    assert (out / "tree_draw_0.csv").exists()


def test_benchmark_command(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"kind": "oracle_tree", "p": 15, "seed": 6,
                                "replicates": 2}))
    out = tmp_path / "run"
    main(["benchmark", "--spec", str(spec),
          "--methods", "bayes_mode,threshold_0.5",
          "--n-grid", "20,40", "--out", str(out)])
    rows = (out / "benchmark.csv").read_text().splitlines()
    assert rows[0].startswith("method,n,replicate")
    assert len(rows) == 1 + 2 * 2 * 2
    summary = (out / "benchmark_summary.csv").read_text().splitlines()
    assert summary[0] == "method,n,mean_error,ci_lo,ci_hi,replicates"
    assert len(summary) == 1 + 2 * 2


def test_hmm_command(tmp_path):
    rng = np.random.default_rng(7)
    datadir = tmp_path / "series"
    datadir.mkdir()
    entries, holdout = [], []
    for i in range(4):
        Y = rng.normal(size=(20, 5)) + 0.2 * rng.normal(size=(20, 1))
        name = "s%d.csv" % i
        header = ",".join("v%d" % (j + 1) for j in range(5))
        np.savetxt(datadir / name, Y, delimiter=",", header=header, comments="")
        entry = {"file": name, "subject": "subj%d" % i,
                 "condition": "a" if i % 2 else "b"}
        (entries if i < 3 else holdout).append(entry)
    manifest = tmp_path / "manifest.json"
    manifest.write_text(json.dumps({"series": entries, "holdout": holdout}))
    out = tmp_path / "run"
    main(["hmm", "--data-dir", str(datadir), "--manifest", str(manifest),
          "--K", "2", "--iters", "8", "--burnin", "4", "--out", str(out)])
    for name in ("state_0_tree.csv", "state_1_mcp.csv", "assignments.csv",
                 "q0.csv", "trans_a.csv", "trans_b.csv",
                 "classification.csv", "manifest.json"):
        assert (out / name).exists(), name
    lines = (out / "classification.csv").read_text().splitlines()
    assert lines[0] == "series,true_condition,pr_first,decision"
    assert len(lines) == 2


def test_unknown_simulate_kind_exits(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"kind": "wat"}))
    with pytest.raises(SystemExit):
        main(["simulate", "--spec", str(spec), "--out", str(tmp_path / "o")])


def test_bench_kernels_runs(capsys):
    main(["bench-kernels", "--p", "30", "--sweeps", "3"])
    out = capsys.readouterr().out
    assert "active backend:" in out
