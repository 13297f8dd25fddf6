"""End-to-end CLI flows: file round-trips, exit codes, determinism."""

import json
from pathlib import Path

from sumlab.cli import main


def run(argv):
    return main([str(a) for a in argv])


def test_construct_analyze_round_trip(tmp_path):
    out = tmp_path / "sharp"
    rc = run(["construct", "sharpness", "--q", "24", "--alpha", "1/2", "--eta", "1/5",
              "--beta", "1/4", "--gamma", "1/2", "-o", out])
    assert rc == 0
    assert {p.name for p in out.iterdir()} == {"A.json", "B.json", "C.json", "metadata.json", "manifest.json"}
    meta = json.loads((out / "metadata.json").read_text())
    assert meta["cardinalities"]["A"] == 1024

    rc = run(["analyze", "--input", out / "A.json", "--s", "1/2",
              "-o", tmp_path / "rep.json"])
    assert rc == 0
    rep = json.loads((tmp_path / "rep.json").read_text())
    assert rep["katz_tao"]["approx"] <= 4
    assert (tmp_path / "rep.manifest.json").exists()


def test_expand_and_plot(tmp_path):
    out = tmp_path / "sharp"
    run(["construct", "sharpness", "--q", "12", "--alpha", "1/2", "--eta", "1/5",
         "--beta", "1/4", "--gamma", "1/2", "-o", out])
    rc = run(["expand", "--A", out / "A.json", "--B", out / "B.json", "--C", out / "C.json",
              "--theta-exp", "0.05", "-o", tmp_path / "exp.json",
              "--per-c-csv", tmp_path / "exp.csv"])
    assert rc == 0
    rep = json.loads((tmp_path / "exp.json").read_text())
    # sharpness: the image never expands much past |A|
    from fractions import Fraction

    assert Fraction(rep["best_ratio"]) <= 16
    lines = (tmp_path / "exp.csv").read_text().splitlines()
    assert lines[0] == "c_index,full,adversarial"
    assert len(lines) == 1 + len(rep["per_c"])

    rc = run(["plot", "--kind", "expansion", "--input", tmp_path / "exp.json",
              "--format", "svg", "-o", tmp_path / "exp.svg"])
    assert rc == 0
    svg = (tmp_path / "exp.svg").read_text()
    assert svg.startswith("<svg") and "covering" in svg


def test_uniformize_branch_flow(tmp_path):
    rc = run(["construct", "random", "--kind", "katztao", "--q", "12", "--T", "3",
              "--s", "1/2", "--seed", "7", "-o", tmp_path / "r"])
    assert rc == 0
    rc = run(["uniformize", "--input", tmp_path / "r" / "set.json", "--T", "3",
              "-o", tmp_path / "u"])
    assert rc == 0
    # wrapped output is accepted downstream
    rc = run(["branch", "--input", tmp_path / "u" / "uniform.json", "--T", "3",
              "--decompose", "minlen", "--epsilon", "0.2",
              "--csv", tmp_path / "f.csv", "-o", tmp_path / "b.json"])
    assert rc == 0
    data = json.loads((tmp_path / "b.json").read_text())
    assert data["decomposition"]["variant"] == "min-length"
    csv_lines = (tmp_path / "f.csv").read_text().splitlines()
    assert csv_lines[0] == "j,f" and csv_lines[1] == "0,0"

    rc = run(["plot", "--kind", "branching", "--input", tmp_path / "b.json",
              "--format", "svg", "-o", tmp_path / "f.svg"])
    assert rc == 0
    assert "minorant" in (tmp_path / "f.svg").read_text()


def test_uniformize_pieces(tmp_path):
    run(["construct", "random", "--kind", "frostman", "--q", "12", "--T", "4",
         "--s", "3/4", "--seed", "1", "-o", tmp_path / "r"])
    rc = run(["uniformize", "--input", tmp_path / "r" / "set.json", "--T", "4",
              "--pieces", "--epsilon", "4/5", "-o", tmp_path / "pieces"])
    assert rc == 0
    names = {p.name for p in (tmp_path / "pieces").iterdir()}
    assert "pieces.json" in names and "manifest.json" in names


def test_trace_flow(tmp_path):
    for name, seed, s in (("A", 3, "1/2"), ("B", 4, "3/4"), ("C", 5, "3/4")):
        run(["construct", "random", "--kind", "katztao" if name != "C" else "frostman",
             "--q", "12", "--T", "4", "--s", s, "--seed", seed, "-o", tmp_path / name])
    rc = run(["trace", "c3",
              "--A", tmp_path / "A" / "set.json", "--B", tmp_path / "B" / "set.json",
              "--C", tmp_path / "C" / "set.json", "--T", "4", "--alpha", "1/2",
              "--beta", "3/4", "--gamma", "3/4", "--eta", "1/4",
              "-o", tmp_path / "cert.json"])
    assert rc == 0
    cert = json.loads((tmp_path / "cert.json").read_text())
    assert cert["variant"] == "c3"
    assert all(ok for _, ok in cert["checks"])


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{broken")
    rc = run(["analyze", "--input", bad, "--s", "1/2", "-o", tmp_path / "x.json"])
    assert rc == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"]["kind"] == "validation"
    assert "line 1" in err["error"]["message"]

    rc = run(["analyze", "--input", tmp_path / "missing.json", "--s", "1/2",
              "-o", tmp_path / "x.json"])
    assert rc == 1
    capsys.readouterr()

    # hypothesis violation: sharpness inputs against c4's condition
    out = tmp_path / "sharp"
    run(["construct", "sharpness", "--q", "12", "--alpha", "1/2", "--eta", "1/5",
         "--beta", "1/4", "--gamma", "1/2", "-o", out])
    rc = run(["trace", "c4", "--A", out / "A.json", "--B", out / "B.json",
              "--C", out / "C.json", "--T", "2", "--alpha", "1/2", "--gamma", "1/2",
              "--eta", "1/5", "-o", tmp_path / "cert.json"])
    assert rc == 2
    err = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert err["error"]["kind"] == "hypothesis"

    # unknown flags are rejected
    assert run(["analyze", "--nope"]) == 1
    # invalid rational
    assert run(["analyze", "--input", bad, "--s", "half", "-o", tmp_path / "y.json"]) == 1


def test_byte_identical_reruns(tmp_path, monkeypatch):
    args = ["construct", "random", "--kind", "katztao", "--q", "10", "--T", "2",
            "--s", "1/2", "--seed", "3"]
    run(args + ["-o", tmp_path / "one"])
    run(args + ["-o", tmp_path / "two"])
    a = (tmp_path / "one" / "set.json").read_bytes()
    b = (tmp_path / "two" / "set.json").read_bytes()
    assert a == b

    monkeypatch.setenv("SUMLAB_SEED", "11")
    run(args + ["-o", tmp_path / "three"])
    manifest = json.loads((tmp_path / "three" / "manifest.json").read_text())
    assert manifest["seed"] == 11
    assert (tmp_path / "three" / "set.json").read_bytes() != a


def test_expand_jobs_deterministic(tmp_path):
    run(["construct", "random", "--kind", "katztao", "--q", "10", "--T", "2",
         "--s", "1/2", "--seed", "3", "-o", tmp_path / "A"])
    run(["construct", "random", "--kind", "katztao", "--q", "10", "--T", "2",
         "--s", "1/2", "--seed", "4", "-o", tmp_path / "B"])
    run(["construct", "random", "--kind", "frostman", "--q", "10", "--T", "2",
         "--s", "1/2", "--seed", "5", "-o", tmp_path / "C"])
    base = None
    for jobs, name in ((1, "j1"), (4, "j4")):
        rc = run(["expand", "--A", tmp_path / "A" / "set.json",
                  "--B", tmp_path / "B" / "set.json", "--C", tmp_path / "C" / "set.json",
                  "--theta", "1/4", "--jobs", jobs, "-o", tmp_path / f"{name}.json"])
        assert rc == 0
        data = (tmp_path / f"{name}.json").read_bytes()
        if base is None:
            base = data
        assert data == base


def test_strict_sharpness_rejected_without_round(tmp_path):
    rc = run(["construct", "sharpness", "--q", "18", "--alpha", "1/2", "--eta", "1/5",
              "--beta", "1/4", "--gamma", "1/2", "-o", tmp_path / "s18"])
    assert rc == 1
    rc = run(["construct", "sharpness", "--q", "18", "--alpha", "1/2", "--eta", "1/5",
              "--beta", "1/4", "--gamma", "1/2", "--round", "-o", tmp_path / "s18"])
    assert rc == 0
