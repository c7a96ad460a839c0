import csv
import io
import json

import pytest
from click.testing import CliRunner

from eitbleach import __version__
from eitbleach.cli import execute, main, run_scenario, validate_scenario, InputError
from eitbleach.output import config_hash


def invoke(*args):
    return CliRunner().invoke(main, list(args), catch_exceptions=False)


def read_csv(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# config_sha256=")
    return lines[0], list(csv.reader(io.StringIO("\n".join(lines[1:]))))


def test_spectrum_four_series(tmp_path):
    r = invoke("spectrum", "--out", str(tmp_path))
    assert r.exit_code == 0
    _, rows = read_csv(tmp_path / "spectrum.csv")
    assert rows[0] == ["delta", "gamma/Gamma=0", "gamma/Gamma=0.5", "gamma/Gamma=1", "gamma/Gamma=5"]
    assert len(rows) == 802
    mid = rows[401]
    assert float(mid[0]) == 0.0 and float(mid[1]) < 1e-10  # perfect transparency
    assert [float(v) for v in mid[1:]] == sorted(float(v) for v in mid[1:])


def test_transmittance_series_and_reference(tmp_path):
    assert invoke("transmittance", "--out", str(tmp_path)).exit_code == 0
    _, rows = read_csv(tmp_path / "transmittance.csv")
    assert rows[0] == ["I0", "I_p=0.01", "I_p=0.1", "I_p=1", "I_p=10", "two_state"]
    for k in range(1, 6):
        col = [float(r[k]) for r in rows[1:]]
        assert all(b >= a - 1e-12 for a, b in zip(col, col[1:]))


def test_copropagating_transmittance(tmp_path):
    r = invoke("transmittance", "--arrangement", "copropagating", "--out", str(tmp_path))
    assert r.exit_code == 0
    header, rows = read_csv(tmp_path / "transmittance.csv")
    assert len(rows[0]) == 6


@pytest.mark.parametrize("verb,files", [
    (["bleach-curve"], ["bleach_curve.csv"]),
    (["propagate"], ["propagate.csv"]),
    (["propagate", "--arrangement", "copropagating"], ["propagate.csv"]),
    (["design", "--preset", "rb"], ["design.csv"]),
    (["mb-filter"], ["mb_field.csv", "mb_psd.csv", "mb_summary.json"]),
])
def test_verbs_emit(tmp_path, verb, files):
    assert invoke(*verb, "--out", str(tmp_path)).exit_code == 0
    assert sorted(p.name for p in tmp_path.iterdir()) == sorted(files)


def test_json_format(tmp_path):
    assert invoke("design", "--format", "json", "--out", str(tmp_path)).exit_code == 0
    doc = json.loads((tmp_path / "design.json").read_text())
    assert doc["meta"]["eitbleach"] == __version__
    assert doc["design"]["alpha0"] == pytest.approx(244.0, rel=1e-3)


def test_header_hash_matches_resolved_config(tmp_path):
    scen = {"command": "propagate", "params": {"n_samples": 5}, "seed": 3}
    assert execute(scen, tmp_path) == 0
    header, _ = read_csv(tmp_path / "propagate.csv")
    from eitbleach.cli import resolve
    assert f"config_sha256={config_hash(resolve(scen))}" in header
    assert f"eitbleach={__version__}" in header and "numpy=" in header and "scipy=" in header


def test_deterministic_bytes(tmp_path):
    scen = {"command": "mb_filter", "params": {"grid": {"n_time": 256, "n_space": 10}}, "seed": 5}
    assert execute(scen, tmp_path / "a") == 0 and execute(scen, tmp_path / "b") == 0
    for name in ("mb_field.csv", "mb_psd.csv", "mb_summary.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
    scen["seed"] = 6
    assert execute(scen, tmp_path / "c") == 0
    assert (tmp_path / "c" / "mb_field.csv").read_bytes() != (tmp_path / "a" / "mb_field.csv").read_bytes()


@pytest.mark.parametrize("scen,field", [
    ({"command": "spectrum", "params": {"n_points": 1}}, "params.n_points"),
    ({"command": "warp"}, "command"),
    ({"command": "design", "params": {"preset": "cs"}}, "params.preset"),
    ({"command": "propagate", "params": {"length": -1}}, "params.length"),
    ({"command": "propagate", "bogus": 1}, "<root>"),
    ({"command": "design", "params": {"preset": "rb", "dephasing": "angular"}}, "params.dephasing"),
])
def test_malformed_config_exit_2_no_output(tmp_path, capsys, scen, field):
    out = tmp_path / "out"
    assert execute(scen, out) == 2
    err = json.loads(capsys.readouterr().err.strip())
    assert err["status"] == "error" and err["kind"] == "schema" and err["field"] == field
    assert not out.exists()


def test_unreadable_config(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert run_scenario(bad, tmp_path / "out") == 2
    assert not (tmp_path / "out").exists()
    r = CliRunner().invoke(main, ["spectrum", "--config", str(bad), "--out", str(tmp_path / "o2")])
    assert r.exit_code == 2 and not (tmp_path / "o2").exists()


def test_solver_failure_exit_3(tmp_path, capsys):
    # one space step through a very dense medium: the fixed point does not settle
    scen = {"command": "mb_filter", "params": {"xi": 1e13, "grid": {"n_time": 256, "n_space": 1}}}
    assert execute(scen, tmp_path / "out") == 3
    err = json.loads(capsys.readouterr().err.strip())
    assert err["kind"] == "solver" and "MBConvergenceError" in err["message"]
    assert "last relative changes" in err["message"]
    assert not (tmp_path / "out").exists()


def test_run_scenario_file(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"command": "design", "params": {"preset": "nv"},
                                "out": str(tmp_path / "o"), "format": "json"}))
    r = CliRunner().invoke(main, ["run", str(path)])
    assert r.exit_code == 0 and (tmp_path / "o" / "design.json").exists()


def test_validate_scenario_accepts_defaults():
    for cmd in ("spectrum", "bleach_curve", "propagate", "transmittance", "mb_filter", "design"):
        validate_scenario({"command": cmd})
    with pytest.raises(InputError):
        validate_scenario([])


def test_copropagating_design_without_pump_ratio_is_input_error(tmp_path):
    scen = {"command": "design", "params": {"arrangement": "copropagating"}}
    assert execute(scen, tmp_path) == 2
