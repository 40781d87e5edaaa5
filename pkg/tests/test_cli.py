import json

import pytest

from qrclique import cli
from qrclique.graph import read_edge_list, read_witness


@pytest.fixture
def outdir(tmp_path, monkeypatch):
    monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(tmp_path))
    return tmp_path


def test_roots_truncated(outdir):
    assert cli.main(["roots", "--p", "0.25", "--truncated-k", "5", "--out", "r.json"]) == 0
    table = json.loads((outdir / "r.json").read_text())
    assert table["p"] == "0.25" and len(table["roots"]) == 5
    assert [row["j"] for row in table["sigma"]] == [1, 2, 3, 4, 5]


def test_roots_echoes_p_verbatim(outdir):
    assert cli.main(["roots", "--p", "0.250", "--k", "2", "--out", "r.json"]) == 0
    assert json.loads((outdir / "r.json").read_text())["p"] == "0.250"


def test_roots_entire_to_stdout(monkeypatch, capsys):
    monkeypatch.delenv(cli.OUTPUT_DIR_ENV, raising=False)
    assert cli.main(["roots", "--p", "0.5", "--entire-m", "40"]) == 0
    table = json.loads(capsys.readouterr().out)
    assert len(table["roots"]) == 40 and float(table["tail_mass"]) < 1e-12


def test_roots_csv(outdir):
    assert cli.main(["roots", "--p", "0.25", "--k", "3", "--format", "csv", "--out", "r.csv"]) == 0
    lines = (outdir / "r.csv").read_text().splitlines()
    assert lines[0] == "i,root,weight" and len(lines) == 4


def test_roots_above_half_exit_2(outdir, capsys):
    assert cli.main(["roots", "--p", "0.6", "--truncated-k", "4"]) == 2
    err = capsys.readouterr().err
    assert "non-real" in err and "root index 1" in err


@pytest.mark.parametrize("argv", [
    ["roots", "--p", "1.5", "--k", "3"],
    ["roots", "--p", "abc", "--k", "3"],
    ["roots", "--p", "0.25"],
    ["roots", "--p", "0.25", "--k", "3", "--m", "4"],
    ["construct", "--p", "0.25", "--n", "10"],
    ["construct", "--p", "0.25", "--k", "5", "--n", "10"],
])
def test_invalid_parameters_exit_1(outdir, argv):
    assert cli.main(argv) == 1


def test_construct_k2(outdir, capsys):
    assert cli.main(["construct", "--p", "0.25", "--k", "2", "--n", "100", "--out", "g.edges"]) == 0
    assert "85 15" in capsys.readouterr().out
    g = read_edge_list(outdir / "g.edges")
    w = read_witness(outdir / "g.edges.witness.json")
    assert g.n == 100 and w.sizes == [85, 15] and w.matches(g)


def test_construct_from_weights_file(outdir):
    cli.main(["roots", "--p", "0.25", "--k", "3", "--out", "r.json"])
    assert cli.main(["construct", "--weights", str(outdir / "r.json"), "--n", "100",
                     "--out", "g.edges"]) == 0
    table = json.loads((outdir / "r.json").read_text())
    w = read_witness(outdir / "g.edges.witness.json")
    for size, c in zip(w.sizes, table["weights"]):
        assert abs(size - float(c) * 100) < 1


def test_construct_bad_weights_file(outdir):
    (outdir / "bad.json").write_text("{\n  nope")
    assert cli.main(["construct", "--weights", str(outdir / "bad.json"), "--n", "10"]) == 1


def test_sample_deterministic(outdir):
    argv = ["sample", "--p", "0.5", "--m", "30", "--n", "300", "--seed", "42"]
    assert cli.main(argv + ["--out", "a.edges"]) == 0
    assert cli.main(argv + ["--out", "b.edges"]) == 0
    assert (outdir / "a.edges").read_bytes() == (outdir / "b.edges").read_bytes()
    assert ((outdir / "a.edges.witness.json").read_bytes()
            == (outdir / "b.edges.witness.json").read_bytes())


def test_sample_tail_too_heavy(outdir, capsys):
    assert cli.main(["sample", "--p", "0.7", "--m", "3", "--n", "100", "--seed", "1"]) == 2
    assert "raise --m" in capsys.readouterr().err


def test_sample_single_vertex(outdir):
    assert cli.main(["sample", "--p", "0.5", "--m", "40", "--n", "1", "--seed", "1",
                     "--out", "one.edges"]) == 0
    assert read_edge_list(outdir / "one.edges").n == 1


def test_sample_requires_seed(outdir):
    with pytest.raises(SystemExit) as info:
        cli.main(["sample", "--p", "0.5", "--m", "40", "--n", "10"])
    assert info.value.code == 2


def test_audit_with_sidecar_witness(outdir):
    cli.main(["construct", "--p", "0.25", "--k", "3", "--n", "600", "--out", "g.edges"])
    assert cli.main(["audit", "--graph", str(outdir / "g.edges"), "--p", "0.25",
                     "--k-max", "3", "--out", "rep.json"]) == 0
    report = json.loads((outdir / "rep.json").read_text())
    assert report["structured_counts"]
    assert report["verdict"] == "clique_consistent_but_p3_fail"
    assert report["independent_set"]["independent"]


def test_audit_csv_and_json_graph(outdir):
    cli.main(["control", "--kind", "gnp", "--n", "200", "--p", "0.5", "--seed", "1",
              "--format", "json", "--out", "g.json"])
    assert cli.main(["audit", "--graph", str(outdir / "g.json"), "--p", "0.5", "--k-max", "3",
                     "--format", "csv", "--out", "rep.csv"]) == 0
    text = (outdir / "rep.csv").read_text()
    assert text.startswith("kind,subgraph") and "verdict" in text


def test_audit_malformed_edge_list(outdir, capsys):
    (outdir / "bad.edges").write_text("3 2\n0 1\n1 x\n")
    assert cli.main(["audit", "--graph", str(outdir / "bad.edges"), "--p", "0.5"]) == 1
    assert "line 3" in capsys.readouterr().err


def test_audit_missing_file(outdir):
    assert cli.main(["audit", "--graph", str(outdir / "nope.edges"), "--p", "0.5"]) == 1


def test_demo_small(outdir, capsys):
    assert cli.main(["demo", "--p", "0.25", "--k", "2", "--n", "100", "--out", "demo.json"]) == 0
    out = capsys.readouterr().out
    assert "route: truncated" in out and "independent set" in out
    assert json.loads((outdir / "demo.json").read_text())["k_max"] == 2


def test_demo_graphon_route(outdir, capsys):
    assert cli.main(["demo", "--p", "0.7", "--k", "3", "--n", "400", "--seed", "7"]) == 0
    assert "route: graphon" in capsys.readouterr().out


def test_demo_graphon_needs_seed(outdir):
    assert cli.main(["demo", "--p", "0.7", "--k", "3", "--n", "400"]) == 1


def test_demo_forced_truncated_refuses(outdir):
    assert cli.main(["demo", "--p", "0.7", "--k", "4", "--n", "100", "--route", "truncated"]) == 2


@pytest.mark.parametrize("argv, n", [
    (["--kind", "paley", "--q", "13"], 13),
    (["--kind", "clique-plus-isolated", "--n", "20", "--p", "0.5"], 20),
    (["--kind", "bipartite", "--n", "10"], 10),
    (["--kind", "gnp", "--n", "30", "--p", "0.5", "--seed", "3"], 30),
])
def test_control(outdir, argv, n):
    assert cli.main(["control", *argv, "--out", "c.edges"]) == 0
    assert read_edge_list(outdir / "c.edges").n == n


def test_control_gnp_needs_seed(outdir):
    assert cli.main(["control", "--kind", "gnp", "--n", "30", "--p", "0.5"]) == 1
