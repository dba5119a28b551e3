import csv
import json

import pytest

from finsler_iso.cli import main, parse_grid
from finsler_iso.jacobi import critical_radius


def _run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_parse_grid():
    assert parse_grid(None) is None
    assert parse_grid("0.1, 0.5") == (0.1, 0.5)
    assert parse_grid("a0") == (critical_radius(),)


def test_verify_grid_writes_one_file_per_radius(tmp_path, capsys):
    assert _run(tmp_path, "verify", "--grid", "0.1,0.2944,0.5,0.9") == 0
    files = sorted(p.name for p in tmp_path.glob("verify_a*.json"))
    assert len(files) == 4
    doc = json.loads((tmp_path / "verify_a0.5.json").read_text())
    assert doc["passed"] and doc["regime"] == "hyperbolic"
    rows = list(csv.DictReader(open(tmp_path / "verify_summary.csv")))
    assert [r["passed"] for r in rows] == ["true"] * 4


def test_verify_boundary_radius_is_config_error(tmp_path, capsys):
    assert _run(tmp_path, "verify", "--grid", "0.995") == 1
    assert "BoundaryError" in capsys.readouterr().err


def test_verify_wrong_multiplier_fails(tmp_path, capsys):
    assert _run(tmp_path, "verify", "--grid", "0.5", "--lambda-override", "0.1") == 2
    doc = json.loads((tmp_path / "verify_a0.5.json").read_text())
    assert not doc["passed"] and "extremality" in doc["failures"]


def test_density_scan(tmp_path, capsys):
    assert _run(tmp_path, "density-scan", "--grid", "0,0.5") == 0
    rows = list(csv.DictReader(open(tmp_path / "density_scan.csv")))
    assert float(rows[0]["sigma_closed"]) == 1.0
    assert float(rows[1]["sigma_closed"]) == pytest.approx(1 / 1.375, rel=1e-15)
    assert all(float(r["abs_error"]) < 1e-12 for r in rows)


def test_jacobi_scan(tmp_path, capsys):
    assert _run(tmp_path, "jacobi-scan", "--grid", "0.1,a0,0.5") == 0
    rows = list(csv.DictReader(open(tmp_path / "jacobi_scan.csv")))
    assert [r["regime"] for r in rows] == ["oscillatory", "critical", "hyperbolic"]
    assert all(r["first_zero_or_none"] == "none" for r in rows)
    assert float(rows[0]["would_be_zero"]) == pytest.approx(6.69515, abs=1e-5)


def test_optimize_small(tmp_path, capsys):
    assert _run(tmp_path, "optimize", "--grid", "0.5", "--starts", "2", "--modes", "4") == 0
    out = capsys.readouterr().out
    assert "searched class" in out and "COUNTEREXAMPLE" not in out
    doc = json.loads((tmp_path / "optimize.json").read_text())
    assert len(doc["runs"]) == 2 and doc["potential_counterexample"] is False


def test_optimize_euclidean_ratio(tmp_path, capsys):
    assert _run(tmp_path, "optimize", "--grid", "0.5", "--starts", "1", "--modes", "4", "--euclidean-mode") == 0
    rows = list(csv.DictReader(open(tmp_path / "optimize.csv")))
    assert float(rows[0]["isoperimetric_ratio"]) == pytest.approx(1.0, abs=1e-5)


def test_local_max_small(tmp_path, capsys):
    assert _run(tmp_path, "local-max", "--grid", "0.5", "--trials", "20") == 0
    doc = json.loads((tmp_path / "local_max.json").read_text())
    assert doc["all_negative"] and len(doc["rows"]) == 20


@pytest.mark.parametrize("argv", [
    ["optimize", "--starts", "0"],
    ["local-max", "--trials", "0"],
    ["verify", "--seed", "-1"],
    ["verify", "--grid", "abc"],
    ["optimize", "--grid", "0.1,0.2"],
])
def test_config_errors(tmp_path, capsys, argv):
    assert _run(tmp_path, *argv) == 1


def test_unknown_subcommand_exit_code(capsys):
    with pytest.raises(SystemExit) as info:
        main(["nonsense"])
    assert info.value.code == 1


def test_outputs_are_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a", tmp_path / "b"
    for d in (a, b):
        assert main(["local-max", "--grid", "0.4", "--trials", "5", "--seed", "11", "--out", str(d)]) == 0
    for name in ("local_max.csv", "local_max.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_env_overrides_out(tmp_path, monkeypatch, capsys):
    target = tmp_path / "env"
    monkeypatch.setenv("FINSLER_ISO_OUT", str(target))
    assert main(["density-scan", "--grid", "0.5", "--out", str(tmp_path / "flag")]) == 0
    assert (target / "density_scan.csv").exists()
    assert not (tmp_path / "flag").exists()
