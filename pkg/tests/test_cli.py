import json

import pytest

from lattice_winding.cli import main


def run_cli(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_and_total_winding(tmp_path, capsys):
    walk = tmp_path / "w.csv"
    code, _, _ = run_cli(capsys, "simulate", "-n", "40", "--seed", "3", "--out", str(walk))
    assert code == 0
    lines = walk.read_text().splitlines()
    assert lines[0].startswith("#") and len(lines) == 42
    code, out, _ = run_cli(capsys, "total-winding", "--walk", str(walk))
    assert code == 0
    a = json.loads(out)
    code, out, _ = run_cli(capsys, "total-winding", "-n", "40", "--seed", "3")
    assert json.loads(out) == a


def test_index_field(capsys):
    code, out, _ = run_cli(capsys, "index-field", "-n", "20", "--seed", "1")
    assert code == 0
    assert set(json.loads(out)) >= {"lattice", "cells", "split_cells", "signed_area"}


def test_excursions(capsys):
    code, out, _ = run_cli(capsys, "excursions", "-n", "300", "--z", "0.5,0.5")
    assert code == 0
    assert "excursions" in json.loads(out)
    code, _, err = run_cli(capsys, "excursions", "-n", "300", "--z", "1,0.5")
    assert code == 2 and "edge" in err


def test_experiment_roundtrip(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"experiment": "dehn_avg", "n_values": [8, 16, 32], "samples": 30}))
    code, out, _ = run_cli(capsys, "experiment", str(cfg), "--out", str(tmp_path / "res"), "--workers", "2")
    assert code == 0
    files = json.loads(out)["files"]
    assert all((tmp_path / "res").joinpath(p.split("/")[-1]).exists() for p in files.values())


def test_exit_codes(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"experiment": "belisle", "colour": 1}))
    assert run_cli(capsys, "experiment", str(bad))[0] == 2
    assert run_cli(capsys, "experiment", str(tmp_path / "missing.json"))[0] == 3
    ok = tmp_path / "ok.json"
    ok.write_text(json.dumps({"experiment": "dehn_avg", "n_values": [8], "samples": 3}))
    blocker = tmp_path / "blocker"
    blocker.write_text("")
    assert run_cli(capsys, "experiment", str(ok), "--out", str(blocker / "x"))[0] == 3
    with pytest.raises(SystemExit) as e:
        main(["simulate", "-n", "notanumber"])
    assert e.value.code == 2
    with pytest.raises(SystemExit) as e:
        main(["nosuchcommand"])
    assert e.value.code == 2


def test_small_estimators(capsys):
    code, out, _ = run_cli(capsys, "belisle", "-n", "1000", "--samples", "40")
    assert code == 0 and 0 <= json.loads(out)["ks"] <= 1
    code, out, _ = run_cli(capsys, "werner", "--paths", "2", "-m", "500", "-k", "1", "2", "--max-depth", "20")
    assert code == 0 and set(json.loads(out)) == {"1", "2"}
    code, out, _ = run_cli(capsys, "spitzer", "--paths", "100", "-m", "64")
    assert code == 0 and json.loads(out)["paths"] == 100
    code, out, _ = run_cli(capsys, "dehn", "-n", "4")
    assert code == 0 and json.loads(out)["mean"] == "2/9"
    code, out, _ = run_cli(capsys, "dehn", "--mode", "rnd", "-n", "50", "-d", "3", "--samples", "3")
    assert code == 0
    assert run_cli(capsys, "dehn", "-n", "5")[0] == 2
