import json

import pytest

from maxshape import cli

SOLVE = {
    "command": "solve",
    "domain": {"kind": "unit_square"},
    "functional": {"name": "Inradius"},
    "optimizer": {"L": 1.0, "grid_h": 0.03125, "schedule": {"iterations": 8, "generation_size": 4}},
    "seed": 5,
}


def write(tmp_path, cfg, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return path


def levels(diags):
    return [(d[0], d[1]) for d in diags]


def test_empty_config_is_single_fatal(tmp_path):
    path = tmp_path / "empty.json"
    path.write_text("")
    assert levels(cli.validate_config(path)) == [("fatal", "")]


def test_unknown_and_missing_keys(tmp_path):
    cfg = {"command": "solve", "domain": {"kind": "unit_square"}, "bogus": 1}
    keys = {d[1] for d in cli.validate_config(write(tmp_path, cfg))}
    assert {"bogus", "functional", "optimizer"} <= keys


def test_infeasible_length_reported(tmp_path):
    cfg = json.loads(json.dumps(SOLVE))
    cfg["optimizer"]["L"] = 1e6
    diags = cli.validate_config(write(tmp_path, cfg))
    assert any(d[1] == "optimizer.L" and "InfeasibleLength" in d[2] for d in diags)
    assert cli.main(["--config", str(write(tmp_path, cfg)), "--quiet"]) == cli.EXIT_ERROR


def test_valid_config_has_no_diagnostics(tmp_path):
    assert cli.validate_config(write(tmp_path, SOLVE)) == []


def test_solve_writes_outputs(tmp_path):
    out = tmp_path / "out"
    code = cli.main(["--config", str(write(tmp_path, SOLVE)), "--out", str(out), "--quiet"])
    assert code == cli.EXIT_OK
    for name in ("result.json", "trace.csv", "density.csv", "network.svg", "field.svg", "density.svg"):
        assert (out / name).exists(), name
    result = json.loads((out / "result.json").read_text())
    assert result["constraints"]["connected"] and result["constraints"]["length_ok"]


def test_seed_override_changes_run(tmp_path):
    path = write(tmp_path, SOLVE)
    cli.main(["--config", str(path), "--out", str(tmp_path / "a"), "--quiet"])
    cli.main(["--config", str(path), "--out", str(tmp_path / "b"), "--seed", "6", "--quiet"])
    a = json.loads((tmp_path / "a" / "result.json").read_text())
    b = json.loads((tmp_path / "b" / "result.json").read_text())
    assert a["seed"] == 5 and b["seed"] == 6


def test_audit_of_solve_result(tmp_path):
    out = tmp_path / "out"
    cli.main(["--config", str(write(tmp_path, SOLVE)), "--out", str(out), "--quiet"])
    cfg = {"command": "audit", "network": str(out / "result.json"), "audit": {"h": 0.03125}}
    code = cli.main(["--config", str(write(tmp_path, cfg, "audit.json")), "--out", str(tmp_path / "aud"),
                     "--quiet"])
    assert code == cli.EXIT_OK
    assert json.loads((tmp_path / "aud" / "audit.json").read_text())["summary"]["pass"]


def test_audit_flags_irregular_network(tmp_path):
    from maxshape.audit import dyadic_fan

    net = dyadic_fan(8)
    cfg = {"command": "audit", "network": net.to_dict(), "audit": {"points": [[0.0, 0.0]],
                                                                  "radii": [2.0 ** -n for n in range(1, 9)]}}
    code = cli.main(["--config", str(write(tmp_path, cfg)), "--out", str(tmp_path / "o"), "--quiet"])
    assert code == cli.EXIT_VIOLATION


def test_evaluate_torsion(tmp_path):
    cfg = {"command": "evaluate", "domain": {"kind": "unit_square"}, "functional": "TorsionMax",
           "grid_h": 0.03125, "render": False}
    out = tmp_path / "o"
    assert cli.main(["--config", str(write(tmp_path, cfg)), "--out", str(out), "--quiet"]) == 0
    res = json.loads((out / "result.json").read_text())
    assert res["value"] == pytest.approx(0.0737, rel=0.02)
    assert (out / "field.csv").exists()


def test_fixtures_command(tmp_path):
    cfg = {"command": "fixtures", "fixtures": {"depth": 6}, "render": False}
    out = tmp_path / "o"
    assert cli.main(["--config", str(write(tmp_path, cfg)), "--out", str(out), "--quiet"]) == 0
    data = json.loads((out / "fixtures.json").read_text())
    assert data["fixtures"]["dyadic_fan_report"]["non_ahlfors"]


def test_validate_subcommand(tmp_path, capsys):
    assert cli.main(["validate", "--config", str(write(tmp_path, SOLVE))]) == 0
    assert "0 diagnostic" in capsys.readouterr().out


def test_shipped_configs_validate():
    from pathlib import Path

    for path in sorted((Path(__file__).parent.parent / "configs").glob("*.json")):
        if path.name.startswith("domain_"):
            continue
        assert cli.validate_config(path) == [], path.name
