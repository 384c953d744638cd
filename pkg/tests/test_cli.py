from __future__ import annotations

import json

import pytest

from diagcell.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.mark.parametrize("family,n,dim", [("tl", 4, 14), ("brauer", 2, 3), ("jones", 2, 3)])
def test_dim(capsys, family, n, dim):
    code, out, _ = run(capsys, "dim", "--family", family, "--n", str(n), "--format", "json")
    doc = json.loads(out)
    assert code == 0
    assert doc["dim"] == doc["cross_check"] == dim
    assert {"family", "n", "ring", "delta", "command", "result", "certificates"} <= set(doc)


@pytest.mark.parametrize("family", ["brauer", "tl", "jones"])
def test_verify_passes(capsys, family):
    code, out, _ = run(capsys, "verify", "--family", family, "--n", "4", "--ring", "5", "--delta", "2", "--format", "json")
    assert code == 0 and json.loads(out)["result"] == "ok"


def test_verify_skips_group_algebra(capsys):
    code, out, _ = run(capsys, "verify", "--family", "group_cyclic", "--n", "3")
    assert code == 0 and "skipped" in out


def test_verify_mutated_dump_fails(capsys, tmp_path):
    path = tmp_path / "m.json"
    assert main(["dump", "--family", "tl", "--n", "3", "--ring", "5", "--delta", "2", "--mutate", "1", "2", "3", "--out", str(path)]) == 0
    code, out, _ = run(capsys, "verify", "--load", str(path), "--format", "json")
    doc = json.loads(out)
    assert code == 1 and doc["result"] == "fail" and doc["certificates"]


def test_gram_csv(capsys):
    code, out, _ = run(capsys, "gram", "--family", "tl", "--n", "3", "--ring", "Q", "--delta", "3/7", "--lambda", "1", "--format", "csv")
    assert code == 0
    assert out.splitlines()[1:] == ["n=3; 1 [2 3],3/7,1", "n=3; [1 2] 3,1,3/7"]
    code, out, _ = run(capsys, "gram", "--family", "tl", "--n", "3", "--lambda", "2", "--format", "csv")
    assert code == 0 and out.strip() == ""


def test_cover(capsys):
    code, out, _ = run(capsys, "cover", "--family", "tl", "--n", "5", "--ring", "5", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["height"] == doc["width"] == 4


def test_tor_and_oracle(capsys):
    code, out, _ = run(capsys, "tor", "--family", "jones", "--n", "5", "--ring", "5", "--compare-oracle", "5", "--format", "json")
    doc = json.loads(out)
    assert code == 0 and doc["dims"] == [1, 1, 1, 1] and doc["agrees"]


def test_tor_cap_exit_code(capsys):
    code, out, _ = run(capsys, "tor", "--family", "tl", "--n", "5", "--cap", "10")
    assert code == 2 and "partial" in out


def test_usage_errors(capsys):
    assert main(["dim", "--family", "tl", "--n", "3", "--ring", "4"]) == 3
    assert main(["dim", "--n", "3"]) == 3
    assert main(["dim", "--family", "tl", "--n", "3", "--format", "csv"]) == 3
    assert main(["cover", "--family", "jones", "--n", "3"]) == 3
    with pytest.raises(SystemExit) as exc:
        main(["dim", "--family", "nope", "--n", "3"])
    assert exc.value.code == 3
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 3


def test_reports_are_deterministic(capsys, tmp_path):
    outs = []
    for k in range(2):
        path = tmp_path / f"r{k}.txt"
        assert main(["tor", "--family", "tl", "--n", "4", "--ring", "3", "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]


def test_sweep(capsys):
    code, out, _ = run(capsys, "sweep", "--run", "tor", "--family", "tl", "--n", "3", "--rings", "2,5", "--deltas", "0,1", "--qmax", "2", "--format", "json")
    docs = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(docs) == 4
    assert all(d["dims"] == [1, 0, 0] for d in docs)
    assert {(d["ring"], d["delta"]) for d in docs} == {("F_2", "0 mod 2"), ("F_2", "1 mod 2"), ("F_5", "0 mod 5"), ("F_5", "1 mod 5")}
