import json

import numpy as np
import pytest

from sunflows import cli
from sunflows.errors import InvalidShape
from sunflows.scenario import (
    ScenarioConfig,
    derived_rng,
    emit_report,
    export_trajectory,
    parse_report,
    run_scenario,
)


def small_config(**kw):
    base = dict(space="double", n=2, family="h", seed=42, points=3)
    base.update(kw)
    return ScenarioConfig(**base)


def test_minimal_double_scenario_passes():
    rep = run_scenario(small_config())
    assert rep.passed
    names = {c.name for c in rep.checks}
    assert "flow-bracket" in names and "isotropy-crafted" in names


def test_reports_are_deterministic():
    r1 = run_scenario(small_config())
    r2 = run_scenario(small_config())
    assert emit_report(r1, "json") == emit_report(r2, "json")
    assert emit_report(r1, "text") == emit_report(r2, "text")
    r3 = run_scenario(small_config(seed=7))
    assert emit_report(r1, "json") != emit_report(r3, "json")


def test_json_roundtrip_preserves_residuals():
    rep = run_scenario(small_config(checks=["iwasawa-roundtrip", "posdef-roundtrip"]))
    data = parse_report(emit_report(rep, "json"))
    assert data["schema_version"] == "1"
    by_name = {c["name"]: c for c in data["checks"]}
    for c in rep.checks:
        assert by_name[c.name]["residual"] == c.residual


def test_text_format_one_line_per_check():
    rep = run_scenario(small_config(checks=["root-datum-exact", "dual-basis"]))
    text = emit_report(rep, "text")
    lines = [l for l in text.splitlines() if l.startswith("[")]
    assert len(lines) == 2
    assert all(l.startswith("[PASS]") or l.startswith("[FAIL]") for l in lines)


def test_unknown_check_rejected():
    with pytest.raises(InvalidShape):
        run_scenario(small_config(checks=["no-such-check"]))


def test_config_validation_clauses():
    with pytest.raises(InvalidShape) as err:
        ScenarioConfig(space="torus").validate()
    assert "clause space" in str(err.value)
    with pytest.raises(InvalidShape) as err:
        ScenarioConfig(space="double", n=1).validate()
    assert "clause group-size" in str(err.value)
    with pytest.raises(InvalidShape) as err:
        ScenarioConfig(space="double", family="q").validate()
    assert "clause double-family" in str(err.value)
    from sunflows.errors import AssumptionViolation
    with pytest.raises(AssumptionViolation) as err:
        ScenarioConfig(space="moduli", n=2, m=0, holes=3,
                       family={"intervals": [[1, 3]]}).validate()
    assert "m0-proper" in str(err.value)
    with pytest.raises(InvalidShape) as err:
        ScenarioConfig.from_dict({"space": "double", "bogus": 1})
    assert "unknown config fields" in str(err.value)


def test_derived_rngs_differ_by_name():
    a = derived_rng(1, "x").standard_normal(4)
    b = derived_rng(1, "y").standard_normal(4)
    c = derived_rng(1, "x").standard_normal(4)
    assert np.allclose(a, c)
    assert not np.allclose(a, b)


def test_trajectory_export_periodicity_and_header():
    cfg = small_config()
    text = export_trajectory(cfg, {
        "name": "loop",
        "family": "h",
        "generator": 2,  # the coroot alcove generator closes after 2*pi
        "times": {"start": 0.0, "stop": 2 * np.pi, "num": 9},
    })
    lines = text.strip().splitlines()
    assert lines[0].startswith("#")
    header = lines[2].split(",")
    assert header[0] == "tau"
    assert any(h.startswith("conserved:") for h in header)
    first = np.array([float(v) for v in lines[3].split(",")[1:]])
    last = np.array([float(v) for v in lines[-1].split(",")[1:]])
    n_components = sum(1 for h in header if not h.startswith(("tau", "conserved:")))
    assert np.max(np.abs(first[:n_components] - last[:n_components])) <= 1e-8
    # conserved columns report deviation from the initial value
    cons = np.array([float(v) for v in lines[-1].split(",")[1 + n_components:]])
    assert np.max(cons) <= 1e-10


def test_trajectory_export_empty_grid_is_header_only():
    cfg = small_config()
    text = export_trajectory(cfg, {"name": "empty", "times": []})
    lines = text.strip().splitlines()
    assert len(lines) == 3  # two comment lines plus the column header
    assert lines[2].startswith("tau")


def test_trajectory_rejects_bad_requests():
    cfg = small_config()
    with pytest.raises(InvalidShape):
        export_trajectory(cfg, {"family": "nope"})
    with pytest.raises(InvalidShape):
        export_trajectory(cfg, {"family": "h", "generator": 99})


def test_cli_verify_flow_report(tmp_path, capsys):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps({
        "space": "double", "n": 2, "family": "h", "seed": 42, "points": 2,
        "checks": ["iwasawa-roundtrip", "torus-periodicity", "conservation"],
        "flow_exports": [{"name": "demo", "family": "h", "generator": 2,
                          "times": {"start": 0.0, "stop": 6.283185307179586, "num": 5}}],
    }))
    out = tmp_path / "out"
    code = cli.main(["verify", str(cfg_path), "--out", str(out)])
    assert code == 0
    assert (out / "report.json").exists() and (out / "report.txt").exists()
    capsys.readouterr()

    code = cli.main(["flow", str(cfg_path), "--out", str(out)])
    assert code == 0
    assert (out / "demo.csv").exists()
    capsys.readouterr()

    code = cli.main(["report", str(out / "report.json"), "--format", "text"])
    assert code == 0
    captured = capsys.readouterr().out
    assert "overall: PASS" in captured

    code = cli.main(["report", str(out / "report.json"), "--format", "json"])
    assert code == 0


def test_cli_rejects_invalid_family(tmp_path, capsys):
    cfg_path = tmp_path / "bad.json"
    cfg_path.write_text(json.dumps({
        "space": "moduli", "n": 2, "m": 0, "holes": 3,
        "family": {"intervals": [[1, 3]]}, "seed": 1,
    }))
    code = cli.main(["verify", str(cfg_path)])
    assert code == 2
    err = capsys.readouterr().err
    assert "m0-proper" in err


def test_cli_seed_override_changes_report(tmp_path, capsys):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps({
        "space": "double", "n": 2, "family": "h", "seed": 42, "points": 2,
        "checks": ["conservation"],
    }))
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert cli.main(["verify", str(cfg_path), "--out", str(out1)]) == 0
    assert cli.main(["verify", str(cfg_path), "--out", str(out2), "--seed", "43"]) == 0
    capsys.readouterr()
    j1 = json.loads((out1 / "report.json").read_text())
    j2 = json.loads((out2 / "report.json").read_text())
    assert j1["seed"] == 42 and j2["seed"] == 43


def test_cli_env_output_dir(tmp_path, monkeypatch, capsys):
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps({
        "space": "double", "n": 2, "family": "h", "seed": 42, "points": 2,
        "checks": ["posdef-roundtrip"],
    }))
    outdir = tmp_path / "envout"
    monkeypatch.setenv("SUNFLOWS_OUTPUT_DIR", str(outdir))
    assert cli.main(["verify", str(cfg_path)]) == 0
    capsys.readouterr()
    assert (outdir / "report.json").exists()


def test_cli_exit_code_reflects_failures(tmp_path, capsys):
    # an absurd tolerance scale turns tiny nonzero residuals into failures
    cfg_path = tmp_path / "config.json"
    cfg_path.write_text(json.dumps({
        "space": "double", "n": 2, "family": "h", "seed": 42, "points": 2,
        "checks": ["iwasawa-roundtrip"],
    }))
    code = cli.main(["verify", str(cfg_path), "--out", str(tmp_path / "o"),
                     "--tol-scale", "1e-30"])
    assert code == 1
    out = capsys.readouterr().out
    assert "overall: FAIL" in out
