import json

import numpy as np
import pytest

import homsample as hs
from homsample.cli import main
from homsample.io_formats import (
    read_edge_list,
    read_kept,
    read_report,
    write_edge_list,
    write_features_csv,
    write_labels_csv,
)

from util import path_graph


@pytest.fixture
def p3_dir(tmp_path):
    write_edge_list(path_graph(3), tmp_path / "graph.txt")
    write_features_csv(np.array([[1.0], [1.0], [1.0]]), tmp_path / "const.csv")
    write_features_csv(np.array([[0.0], [1.0], [0.5]]), tmp_path / "vary.csv")
    return tmp_path


def test_homophily_identical_features_prints_zero(p3_dir, capsys):
    rc = main(["homophily", "--graph", str(p3_dir / "graph.txt"), "--features", str(p3_dir / "const.csv")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "h_G = 0" in out
    assert "undefined" in out  # all columns constant, bound has no denominator


def test_homophily_single_edge_values(tmp_path, capsys):
    write_edge_list(hs.build_graph([(0, 1)]), tmp_path / "g.txt")
    write_features_csv(np.array([[0.0], [1.0]]), tmp_path / "x.csv")
    rc = main(["homophily", "--graph", str(tmp_path / "g.txt"), "--features", str(tmp_path / "x.csv")])
    out = capsys.readouterr().out
    assert rc == 0
    assert "h_G = -2" in out
    assert "tr(L) = 2" in out
    assert "bound = 2" in out


def test_missing_file_exits_2_with_path(tmp_path, capsys):
    rc = main(["homophily", "--graph", str(tmp_path / "ghost.txt"), "--features", str(tmp_path / "x.csv")])
    err = capsys.readouterr().err
    assert rc == 2
    assert "ghost.txt" in err


def test_usage_errors_exit_1(capsys):
    assert main(["sample", "--graph", "g", "--gamma", "1.5", "--out", "o"]) == 1
    assert main(["sample", "--graph", "g", "--gamma", "0", "--out", "o"]) == 1
    assert main(["sample", "--graph", "g", "--gamma", "abc", "--out", "o"]) == 1
    assert main(["sample", "--graph", "g", "--gamma", "0.5", "--method", "bogus", "--out", "o"]) == 1
    assert main(["nonsense"]) == 1
    assert main(["experiment", "--rates", "0.5", "--out", "o"]) == 1  # no dataset source


def test_sample_hand_example(tmp_path, capsys):
    g = path_graph(4)
    write_edge_list(g, tmp_path / "g.txt")
    write_features_csv(np.sqrt([[5.0], [1.0], [3.0], [2.0]]), tmp_path / "x.csv")
    out = tmp_path / "samp"
    rc = main([
        "sample", "--graph", str(tmp_path / "g.txt"), "--features", str(tmp_path / "x.csv"),
        "--gamma", "0.5", "--method", "homophily", "--use-raw-scores", "--out", str(out),
    ])
    assert rc == 0
    assert read_kept(out / "kept.txt").tolist() == [1, 3]


def test_sample_gamma_one_keeps_all(p3_dir):
    out = p3_dir / "full"
    rc = main([
        "sample", "--graph", str(p3_dir / "graph.txt"), "--features", str(p3_dir / "vary.csv"),
        "--gamma", "1.0", "--out", str(out),
    ])
    assert rc == 0
    assert read_kept(out / "kept.txt").tolist() == [0, 1, 2]


def test_sample_random_seeded_reproducible(tmp_path):
    g = hs.build_graph([(i, i + 1) for i in range(19)], n=20)
    write_edge_list(g, tmp_path / "g.txt")
    args = ["sample", "--graph", str(tmp_path / "g.txt"), "--gamma", "0.5",
            "--method", "random", "--seed", "11"]
    assert main(args + ["--out", str(tmp_path / "a")]) == 0
    assert main(args + ["--out", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "kept.txt").read_bytes() == (tmp_path / "b" / "kept.txt").read_bytes()


def test_metrics_command_writes_report(p3_dir, capsys):
    out = p3_dir / "report.json"
    rc = main(["metrics", "--graph", str(p3_dir / "graph.txt"), "--features", str(p3_dir / "vary.csv"),
               "--out", str(out)])
    assert rc == 0
    rep = read_report(out)
    assert rep.components == 1
    assert rep.laplacian_rank == 2
    assert rep.bound_satisfied
    assert '"method": "full"' in capsys.readouterr().out


def test_synth_command_round_trips(tmp_path):
    out = tmp_path / "ds"
    rc = main(["synth", "--spec", "blocks,n=80,intra=0.2,inter=0.02,fracs=0.3:0.7,d=4,tau=0.1,seed=2",
               "--out", str(out)])
    assert rc == 0
    g = read_edge_list(out / "graph.txt")
    assert g.n == 80
    assert (out / "features.csv").exists() and (out / "labels.csv").exists()


def test_train_eval_smoke(tmp_path, capsys):
    ds = hs.generate_dataset(hs.GraphonSpec(
        kind="blocks", n=100, feature_dim=4, noise=0.2, seed=6,
        block_probs=np.array([[0.3, 0.02], [0.02, 0.3]]),
        block_fracs=np.array([0.4, 0.6]),
    ))
    write_edge_list(ds.graph, tmp_path / "g.txt")
    write_features_csv(ds.features, tmp_path / "x.csv")
    write_labels_csv(ds.labels, tmp_path / "y.csv")
    rc = main([
        "train-eval", "--graph", str(tmp_path / "g.txt"), "--features", str(tmp_path / "x.csv"),
        "--labels", str(tmp_path / "y.csv"), "--gamma", "0.5", "--seed", "1",
        "--epochs", "50", "--hidden", "8",
    ])
    out = capsys.readouterr().out
    assert rc == 0
    acc = float(out.split("=")[1])
    assert 0.0 <= acc <= 1.0


def test_train_eval_divergence_exits_3(tmp_path, capsys):
    ds = hs.generate_dataset(hs.GraphonSpec(
        kind="blocks", n=40, feature_dim=4, noise=0.2, seed=6,
        block_probs=np.array([[0.4, 0.05], [0.05, 0.4]]),
    ))
    write_edge_list(ds.graph, tmp_path / "g.txt")
    write_features_csv(ds.features * 1e3, tmp_path / "x.csv")
    write_labels_csv(ds.labels, tmp_path / "y.csv")
    with np.errstate(over="ignore", invalid="ignore"):
        rc = main([
            "train-eval", "--graph", str(tmp_path / "g.txt"), "--features", str(tmp_path / "x.csv"),
            "--labels", str(tmp_path / "y.csv"), "--gamma", "0.5", "--lr", "1e200",
            "--weight-decay", "0", "--epochs", "10", "--hidden", "4",
        ])
    assert rc == 3
    assert "numerical failure" in capsys.readouterr().err


def test_experiment_grid_file_count(tmp_path, capsys):
    out = tmp_path / "exp"
    rc = main([
        "experiment", "--synth", "blocks,n=60,intra=0.2,inter=0.02,fracs=0.3:0.7,d=4,tau=0.2,seed=3",
        "--rates", "0.25,0.5,0.75", "--methods", "homophily,random", "--reps", "50",
        "--metrics-only", "--out", str(out),
    ])
    assert rc == 0
    reports = sorted(out.glob("report__*.json"))
    assert len(reports) == 3 * (1 + 50)  # 153 per the grid arithmetic
    assert (out / "summary.csv").exists()
    # metrics-only cells must never carry train/eval phases
    for tf in out.glob("timings__*.json"):
        phases = set(json.loads(tf.read_text()))
        assert phases == {"sample", "metrics"}


def test_experiment_training_accuracy_column(tmp_path):
    out = tmp_path / "exp"
    rc = main([
        "experiment", "--synth", "blocks,n=80,intra=0.25,inter=0.02,fracs=0.4:0.6,d=4,tau=0.2,seed=4",
        "--rates", "0.5", "--methods", "homophily,random", "--reps", "2",
        "--epochs", "30", "--hidden", "8", "--out", str(out),
    ])
    assert rc == 0
    lines = (out / "summary.csv").read_text().splitlines()
    header = lines[0].split(",")
    acc_idx = header.index("accuracy_mean")
    for line in lines[1:]:
        acc = float(line.split(",")[acc_idx])
        assert 0.0 <= acc <= 1.0


def test_experiment_from_files_with_training(tmp_path):
    ds = hs.generate_dataset(hs.GraphonSpec(
        kind="blocks", n=70, feature_dim=4, noise=0.2, seed=8,
        block_probs=np.array([[0.3, 0.03], [0.03, 0.3]]),
        block_fracs=np.array([0.4, 0.6]),
    ))
    write_edge_list(ds.graph, tmp_path / "g.txt")
    write_features_csv(ds.features, tmp_path / "x.csv")
    write_labels_csv(ds.labels, tmp_path / "y.csv")
    out = tmp_path / "exp"
    rc = main([
        "experiment", "--graph", str(tmp_path / "g.txt"), "--features", str(tmp_path / "x.csv"),
        "--labels", str(tmp_path / "y.csv"), "--rates", "0.5", "--methods", "homophily",
        "--reps", "1", "--epochs", "20", "--hidden", "4", "--out", str(out),
    ])
    assert rc == 0
    summary = (out / "summary.csv").read_text().splitlines()
    assert summary[1].split(",")[0] == "g"  # dataset id from the graph file stem
    rep = read_report(next(iter(out.glob("report__*.json"))))
    assert rep.accuracy is not None


def test_bench_dims_sweep(tmp_path):
    out = tmp_path / "bench.csv"
    rc = main(["bench", "--sizes", "400", "--dims", "4,8", "--d", "4",
               "--repeats", "1", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 1 + 1 + 2  # header, one size row, two dim rows
    dims = [int(l.split(",")[4]) for l in lines[2:]]
    assert dims == [4, 8]


def test_experiment_rerun_identical_bytes(tmp_path):
    args = [
        "experiment", "--synth", "blocks,n=50,intra=0.2,inter=0.05,d=4,tau=0.2,seed=5",
        "--rates", "0.5,0.75", "--methods", "homophily,random", "--reps", "3",
        "--metrics-only",
    ]
    assert main(args + ["--out", str(tmp_path / "one")]) == 0
    assert main(args + ["--out", str(tmp_path / "two")]) == 0
    one = sorted((tmp_path / "one").glob("report__*.json")) + [tmp_path / "one" / "summary.csv"]
    two = sorted((tmp_path / "two").glob("report__*.json")) + [tmp_path / "two" / "summary.csv"]
    assert [p.name for p in one] == [p.name for p in two]
    for a, b in zip(one, two):
        assert a.read_bytes() == b.read_bytes()


def test_experiment_workers_match_serial(tmp_path, monkeypatch):
    args = [
        "experiment", "--synth", "blocks,n=50,intra=0.2,inter=0.05,d=4,tau=0.2,seed=5",
        "--rates", "0.5", "--methods", "random", "--reps", "6", "--metrics-only",
    ]
    assert main(args + ["--out", str(tmp_path / "serial")]) == 0
    monkeypatch.setenv("HOMSAMPLE_THREADS", "2")
    assert main(args + ["--workers", "4", "--out", str(tmp_path / "par")]) == 0
    assert (tmp_path / "serial" / "summary.csv").read_bytes() == (
        tmp_path / "par" / "summary.csv"
    ).read_bytes()


def test_bench_trivial_run(capsys):
    rc = main(["bench", "--sizes", "100,200", "--d", "4", "--repeats", "1"])
    out = capsys.readouterr().out
    assert rc == 0
    lines = [l for l in out.splitlines() if l.strip()]
    assert len(lines) == 2
    for line in lines:
        assert "total=" in line
        assert float(line.rsplit("total=", 1)[1].rstrip("s")) > 0.0


def test_bench_both_backends(tmp_path):
    out = tmp_path / "bench.csv"
    rc = main(["bench", "--sizes", "100", "--d", "4", "--repeats", "1",
               "--backend", "both", "--out", str(out)])
    assert rc == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("backend,")
    backends = {l.split(",")[0] for l in lines[1:]}
    assert "numpy" in backends
