import json

import pytest

from latin_trades.cli import main
from latin_trades.compose import cyclic_trade
from latin_trades.trade import Trade, verify_trade


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, (json.loads(out) if out.strip() else None), err


def test_construct_and_verify_round_trip(tmp_path, capsys):
    path = tmp_path / "t.json"
    rpath = tmp_path / "r.json"
    code, status, err = run(capsys, "construct", "--k", "5", "--m", "7", "--out", str(path),
                            "--recipe-out", str(rpath))
    assert code == 0 and status["verdict"] == "EXISTS"
    assert "EXISTS" in err
    t = Trade.from_json(path.read_text())
    assert t.params == (3, 5, 7) and verify_trade(t).ok
    assert json.loads(rpath.read_text())["kind"] == status["recipe"]["kind"]
    code, rep, _ = run(capsys, "verify", str(path))
    assert code == 0 and rep["ok"]


@pytest.mark.parametrize("k, m, code, verdict", [
    (4, 6, 2, "NONEXISTENT"), (3, 7, 2, "NONEXISTENT"), (4, 11, 3, "UNKNOWN"),
    (5, 6, 3, "UNKNOWN"), (7, 100, 0, "EXISTS"),
])
def test_construct_verdicts(capsys, k, m, code, verdict):
    got, status, _ = run(capsys, "construct", "--k", str(k), "--m", str(m))
    assert got == code and status["verdict"] == verdict
    assert status.get("reason") or status.get("recipe")


def test_construct_other_mu(capsys):
    code, status, _ = run(capsys, "construct", "--mu", "4", "--k", "5", "--m", "5")
    assert code == 0 and status["trade"]["mu"] == 4
    code, _, err = run(capsys, "construct", "--mu", "4", "--k", "5", "--m", "7")
    assert code == 1 and "error" in err


def test_verify_corrupted(tmp_path, capsys):
    d = cyclic_trade(3, 4).to_dict()
    d["cells"][0]["entries"][1] = d["cells"][0]["entries"][0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    code, rep, err = run(capsys, "verify", str(path))
    assert code == 2 and not rep["ok"]
    rules = {v["rule"] for v in rep["violations"]}
    assert "DISTINCT-ENTRIES" in rules
    assert "verification failed" in err


def test_verify_out_of_range(tmp_path, capsys):
    d = cyclic_trade(3, 3).to_dict()
    d["cells"][0]["entries"][0] = 9
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    code, rep, _ = run(capsys, "verify", str(path))
    assert code == 2 and rep["violations"][0]["rule"] == "SHAPE"


def test_verify_unreadable(tmp_path, capsys):
    path = tmp_path / "junk.json"
    path.write_text("{not json")
    assert run(capsys, "verify", str(path))[0] == 1
    assert run(capsys, "verify", str(tmp_path / "missing.json"))[0] == 1


def test_verify_base_row(tmp_path, capsys):
    code, row, _ = run(capsys, "catalog", "--emit", "8", "9")
    assert code == 0 and row["m"] == 9
    path = tmp_path / "b.json"
    path.write_text(json.dumps({k: row[k] for k in ("mu", "m", "entries")}))
    code, rep, _ = run(capsys, "verify", "--base-row", str(path))
    assert code == 0 and rep["ok"] and rep["expansion"]["ok"]
    row["entries"][0]["symbols"][0] = row["entries"][1]["symbols"][0]
    path.write_text(json.dumps({k: row[k] for k in ("mu", "m", "entries")}))
    code, rep, _ = run(capsys, "verify", "--base-row", str(path))
    assert code == 2 and not rep["ok"]


def test_catalog(capsys):
    code, data, err = run(capsys, "catalog", "--list")
    assert code == 0 and len(data["entries"]) == 26
    assert run(capsys, "catalog", "--emit", "4", "11")[0] == 3


def test_partition(tmp_path, capsys):
    path = tmp_path / "t.json"
    run(capsys, "construct", "--mu", "3", "--k", "3", "--m", "9", "--out", str(path))
    code, data, _ = run(capsys, "partition", str(path))
    assert code == 0 and data["count"] == 3
    t = Trade.from_json(path.read_text())
    assert sum(len(b["trade"]["cells"]) for b in data["blocks"]) == len(t.cells)
    path.write_text(cyclic_trade(3, 4).to_json())
    assert run(capsys, "partition", str(path))[0] == 2


def test_search_modes(tmp_path, capsys):
    out = tmp_path / "w.json"
    code, data, _ = run(capsys, "search", "--mode", "base-row", "--mu", "3", "--k", "5",
                        "--m", "7", "--out", str(out))
    assert code == 0 and data["verdict"] == "FOUND" and out.exists()
    code, data, _ = run(capsys, "search", "--mode", "trade", "--mu", "3", "--k", "3", "--m", "4")
    assert code == 2 and data["verdict"] == "NONE"
    assert {"nodes", "wall_time", "depth_histogram"} <= data.keys()
    code, data, _ = run(capsys, "--seed", "4", "search", "--mode", "hunt", "--mu", "3",
                        "--k", "9", "--m", "11", "--budget", "20")
    assert code == 0


def test_search_checkpoint(tmp_path, capsys):
    ck = tmp_path / "ck.json"
    args = ["search", "--mode", "base-row", "--mu", "3", "--k", "4", "--m", "7",
            "--checkpoint", str(ck)]
    code, data, _ = run(capsys, *args, "--nodes", "50")
    assert code == 3 and ck.exists()
    code, data, _ = run(capsys, *args)
    assert code == 2 and data["verdict"] == "NONE"


def test_search_usage_errors(capsys):
    assert run(capsys, "search", "--mode", "trade", "--k", "3")[0] == 1
    assert run(capsys, "search", "--mode", "trade", "--mu", "3", "--k", "3", "--m", "3",
               "--prunes", "bogus")[0] == 1
    assert run(capsys, "construct", "--k", "x", "--m", "3")[0] == 1
    assert run(capsys, "construct", "--k", "6", "--m", "5")[0] == 1
    assert run(capsys)[0] == 1


def test_sweep(capsys):
    code, data, err = run(capsys, "sweep", "--kmax", "7", "--mmax", "12")
    assert code == 0
    cells = {(c["k"], c["m"]): c["verdict"] for c in data["cells"]}
    assert cells[(4, 6)] == cells[(4, 7)] == "NONEXISTENT"
    assert cells[(4, 11)] == cells[(5, 6)] == "UNKNOWN"
    assert cells[(3, 9)] == "EXISTS"
    assert "k\\m" in err


def test_sweep_parallel_matches(capsys):
    _, a, _ = run(capsys, "sweep", "--kmax", "6", "--mmax", "10")
    _, b, _ = run(capsys, "sweep", "--kmax", "6", "--mmax", "10", "--jobs", "2")
    assert a == b
