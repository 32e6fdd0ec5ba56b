from __future__ import annotations

import json

import pytest

from ratl2.cli import load_config, main

TARGET = {"a": -0.4, "b": 0.4, "density": {"kind": "expr", "expr": "1"}}


def write_config(tmp_path, **over):
    doc = {"target": TARGET, "degrees": {"min": 1, "max": 4}, "starts": 6, "seed": 7, "outputs": "out"}
    doc.update(over)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(doc))
    return path


@pytest.fixture(scope="module")
def solved(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("cli")
    cfg = write_config(tmp)
    assert main(["solve", "-c", str(cfg)]) == 0
    run = next((tmp / "out" / "runs").glob("*.json"))
    return cfg, run


def _csv(path):
    return path.read_text().strip().splitlines()


def test_solve_writes_run_record(solved):
    cfg, run = solved
    doc = json.loads(run.read_text())
    assert run.stem == doc["config_hash"] == load_config(cfg).hash
    assert set(doc) == {"config_hash", "config", "tool_version", "degrees", "wall_time"}
    assert sorted(doc["degrees"], key=int) == ["1", "2", "3", "4"]
    for entry in doc["degrees"].values():
        assert len(entry["records"]) >= 1 and entry["converged_fraction"] == 1.0


def test_solve_deterministic(solved, tmp_path):
    cfg, run = solved
    cfg2 = tmp_path / "config.json"
    cfg2.write_text(cfg.read_text())
    assert main(["solve", "-c", str(cfg2)]) == 0
    a = json.loads(run.read_text())
    b = json.loads((tmp_path / "out" / "runs" / run.name).read_text())
    a.pop("wall_time"), b.pop("wall_time")
    assert a == b


def test_bad_interval_is_usage_error(tmp_path, capsys):
    cfg = write_config(tmp_path, target={**TARGET, "a": 0.5, "b": 0.3})
    assert main(["solve", "-c", str(cfg)]) == 1
    assert "a < b required" in capsys.readouterr().err


@pytest.mark.parametrize("over", [{"degrees": [0]}, {"degrees": [70]}, {"starts": 0}])
def test_bad_fields_are_usage_errors(tmp_path, over):
    assert main(["solve", "-c", str(write_config(tmp_path, **over))]) == 1


def test_missing_files(tmp_path, solved):
    cfg, _ = solved
    assert main(["solve", "-c", str(tmp_path / "nope.json")]) == 1
    assert main(["verify", "-c", str(cfg), "-r", str(tmp_path / "nope.json")]) == 1


def test_verify_needs_two_degrees(tmp_path, capsys):
    cfg = write_config(tmp_path, degrees=[3])
    assert main(["solve", "-c", str(cfg)]) == 0
    run = next((tmp_path / "out" / "runs").glob("*.json"))
    assert main(["verify", "-c", str(cfg), "-r", str(run)]) == 1
    assert "need ≥ 2 degrees" in capsys.readouterr().err


def test_verify_outputs(solved):
    cfg, run = solved
    assert main(["verify", "-c", str(cfg), "-r", str(run)]) == 0
    out = cfg.parent / "out"
    asym = _csv(out / "asymptotics.csv")
    poles = _csv(out / "poles.csv")
    assert asym[0] == "n,sup_error,predicted,ratio_deviation" and len(asym) == 5
    assert poles[0] == "n,sum_abs_im,max_abs_im,ks_distance" and len(poles) == 5
    dev = [float(r.split(",")[3]) for r in asym[1:]]
    assert all(x > y for x, y in zip(dev, dev[1:]))


def test_criterion_outputs(solved):
    cfg, run = solved
    assert main(["criterion", "-c", str(cfg), "-r", str(run)]) == 0
    rows = _csv(cfg.parent / "out" / "criterion.csv")
    assert rows[0] == "n,min_ratio,winding,passed"
    for row in rows[1:]:
        n, ratio, wn, passed = row.split(",")
        assert int(wn) == 1 - 2 * int(n) and passed == "true" and float(ratio) > 2


def test_criterion_self_check(solved):
    cfg, run = solved
    assert main(["criterion", "-c", str(cfg), "-r", str(run), "--self-check"]) == 0
    for row in _csv(cfg.parent / "out" / "criterion.csv")[1:]:
        assert float(row.split(",")[1]) == 0.0 and row.endswith("false")


def test_criterion_custom_nu(solved, tmp_path):
    from ratl2.certify import SignedMeasureSamples
    cfg, run = solved
    nu = tmp_path / "nu.json"
    nu.write_text(json.dumps(SignedMeasureSamples.arcsine(-0.4, 0.4).to_json()))
    assert main(["criterion", "-c", str(cfg), "-r", str(run), "--nu", str(nu)]) == 0


def test_report_outputs(solved, tmp_path):
    _, run = solved
    assert main(["report", "-r", str(run), "-o", str(tmp_path / "rep")]) == 0
    poles = _csv(tmp_path / "rep" / "pole_locations.csv")
    values = _csv(tmp_path / "rep" / "critical_values.csv")
    assert poles[0] == "n,index,re,im" and len(poles) - 1 >= 1 + 2 + 3 + 4
    assert values[0].startswith("n,distinct,value") and len(values) >= 5
    summary = json.loads((tmp_path / "rep" / "summary.json").read_text())
    assert set(summary["distinct_per_degree"]) == {"1", "2", "3", "4"}


def test_version(capsys):
    with pytest.raises(SystemExit) as info:
        main(["--version"])
    assert info.value.code == 0 and "ratl2" in capsys.readouterr().out
