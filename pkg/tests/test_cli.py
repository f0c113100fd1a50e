import json

import pytest

from cumdeg.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    lines = text.strip().splitlines()
    return [line.split(",") for line in lines[1:]]


class TestExitCodes:
    def test_missing_file(self, capsys, tmp_path):
        code, _, err = run(capsys, "centrality", "--graph", str(tmp_path / "nope.txt"), "--measure", "degree")
        assert code == 1 and "cannot read" in err

    def test_malformed_file(self, capsys, tmp_path):
        path = tmp_path / "bad.txt"
        path.write_text("0 1\n1 2 -3\n")
        code, _, err = run(capsys, "centrality", "--graph", str(path), "--measure", "degree")
        assert code == 1 and "line 2" in err

    def test_zero_layers(self, capsys):
        code, *_ = run(capsys, "centrality", "--graph", "path:3", "--measure", "cdn", "--n", "0")
        assert code == 2

    def test_unknown_scheme(self, capsys):
        code, *_ = run(capsys, "consensus", "--graph", "path:3", "--scheme", "gossip")
        assert code == 2

    def test_dcd_walk(self, capsys):
        code, *_ = run(capsys, "centrality", "--graph", "path:3", "--measure", "dcd")
        assert code == 2

    def test_eigenvector_disconnected(self, capsys, tmp_path):
        path = tmp_path / "g.txt"
        path.write_text("0 1\n2 3\n")
        code, _, err = run(capsys, "centrality", "--graph", str(path), "--measure", "eigenvector")
        assert code == 3 and "connected" in err

    def test_disconnecting_fault(self, capsys):
        code, _, err = run(capsys, "gas", "--fault", "pipe:valve1-consumer1=break")
        assert code == 3 and "disconnected" in err

    def test_malformed_fault(self, capsys):
        code, *_ = run(capsys, "gas", "--fault", "pipe:valve1-consumer1")
        assert code == 2

    def test_wrong_x0_length(self, capsys):
        code, *_ = run(capsys, "consensus", "--graph", "path:3", "--scheme", "metropolis", "--x0", "1,2")
        assert code == 2

    def test_compare_max_n_zero(self, capsys):
        code, *_ = run(capsys, "compare", "--graph", "bucky", "--max-n", "0")
        assert code == 2


class TestOutputs:
    def test_degree_path(self, capsys):
        code, out, err = run(capsys, "centrality", "--graph", "path:3", "--measure", "degree")
        assert code == 0
        assert [float(s) for _, s in rows(out)] == [0.5, 1.0, 0.5]
        assert err.startswith("manifest: ")

    def test_metropolis_limit(self, capsys, tmp_path):
        out = tmp_path / "c.csv"
        code, stdout, _ = run(
            capsys, "consensus", "--graph", "path:5", "--scheme", "metropolis", "--x0", "1,2,3,4,5", "--out", str(out)
        )
        assert code == 0 and "converged=True" in stdout
        meta = json.loads((tmp_path / "c.csv.meta.json").read_text())
        assert meta["summary"]["limit"] == pytest.approx(3.0, abs=1e-8)
        last = out.read_text().strip().splitlines()[-1].split(",")
        assert all(abs(float(x) - 3.0) < 1e-7 for x in last[1:-1])

    @pytest.mark.parametrize(
        "graph,scheme,period",
        [("cycle:6", "max_degree", "0.01"), ("path:2", "directed", "1")],
    )
    def test_unit_schedule_matches_sync(self, capsys, graph, scheme, period):
        # every period rounds to 1, so the schedule is degenerate
        base = ["consensus", "--graph", graph, "--scheme", scheme, "--seed", "4"]
        _, sync, _ = run(capsys, *base)
        _, sched, _ = run(capsys, *base, "--schedule", "--base-period", period)
        assert sync == sched

    def test_compare_bucky(self, capsys):
        code, out, _ = run(capsys, "compare", "--graph", "bucky", "--max-n", "5")
        assert code == 0
        assert [float(e) for _, e in rows(out)] == pytest.approx([0] * 5, abs=1e-10)

    def test_benchmark(self, capsys):
        code, out, _ = run(capsys, "benchmark", "--graph", "complete:5", "--schemes", "metropolis", "max_degree")
        assert code == 0
        assert [r[0] for r in rows(out)] == ["metropolis", "max_degree"]

    def test_gas_default(self, capsys, tmp_path):
        out = tmp_path / "gas.csv"
        code, *_ = run(capsys, "gas", "--out", str(out))
        assert code == 0
        lines = out.read_text().splitlines()
        assert lines[0] == "unit,desired_psi,achieved_psi,decision_power"
        assert [line.split(",")[0] for line in lines[1:7]] == [f"consumer{i}" for i in range(1, 7)]

    def test_manifest(self, capsys, tmp_path):
        out = tmp_path / "deg.csv"
        run(capsys, "centrality", "--graph", "sample", "--measure", "betweenness", "--out", str(out))
        manifest = json.loads((tmp_path / "deg.csv.manifest.json").read_text())
        assert manifest["command"] == "centrality" and manifest["seed"] == 0
        assert str(out) in manifest["outputs"]
        assert {"tool_version", "timestamp", "inputs"} <= set(manifest)

    def test_json_format(self, capsys):
        code, out, _ = run(capsys, "centrality", "--graph", "star:4", "--measure", "cdn", "--n", "2", "--format", "json")
        assert code == 0
        doc = json.loads(out)
        assert [float(r["score"]) for r in doc["data"]] == [9, 3, 3, 3]
        assert doc["meta"]["params"]["layer_n"] == 2
