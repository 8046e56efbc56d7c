import json
import subprocess
import sys

import pytest

from starcomplex.cli import bundled_scenario_names, main, resolve_scenario_path
from starcomplex.runner import Scenario, run_scenario

EXPECTED_EXIT = {
    "s3_permutation": 0,
    "trivial_split": 0,
    "z2_additive": 0,
    "z2_conjugated": 0,
    "z2_extend": 0,
    "z2_failing": 1,
    "z2_invalid": 2,
    "z2_sign_character": 0,
    "z3_rotation": 0,
}


def run_cli(*args):
    proc = subprocess.run(
        [sys.executable, "-m", "starcomplex.cli", *args],
        capture_output=True,
        text=True,
    )
    return proc.returncode, proc.stdout, proc.stderr


def test_bundled_names_match_expectations():
    assert set(bundled_scenario_names()) == set(EXPECTED_EXIT)


@pytest.mark.parametrize("name", sorted(EXPECTED_EXIT))
def test_bundled_exit_codes(name):
    code, _, err = run_cli("run", name)
    assert code == EXPECTED_EXIT[name], err


def test_invalid_scenario_diagnostics():
    code, out, err = run_cli("run", "z2_invalid")
    assert code == 2
    assert "missing the map for element 's'" in err
    assert out == ""


def test_json_reports_byte_identical(tmp_path):
    for name in ("z2_sign_character", "z2_failing", "z2_extend"):
        out1 = tmp_path / f"{name}_1.json"
        out2 = tmp_path / f"{name}_2.json"
        run_cli("report", name, "--format", "json", "--output", str(out1))
        run_cli("report", name, "--format", "json", "--output", str(out2))
        assert out1.read_bytes() == out2.read_bytes()


def test_failure_witness_replays():
    scenario = Scenario.load(resolve_scenario_path("z2_failing"))
    report, code = run_scenario(scenario)
    assert code == 1
    task = report["tasks"][0]
    assert task["kind"] == "check_mc"
    assert task["outcome"] == "fail"
    witness = task["witnesses"][0]
    assert witness["tuple"] == ["s", "s"]
    # the recorded difference replays: deserialize and recompute the residual
    from starcomplex import mc_residual
    from starcomplex.serialize import symbol_from_json

    diff = symbol_from_json(witness["difference"]["symbol"], scenario.dimension)
    residual = mc_residual(scenario.cochains["a_x"])
    assert residual.value(("s", "s")) == diff


def test_check_subcommands():
    code, out, _ = run_cli("check", "mc", "z2_sign_character", "--cochain", "sign")
    assert code == 0
    assert "[PASS] check_mc sign" in out
    code, out, _ = run_cli("check", "mc", "z2_failing", "--cochain", "a_x")
    assert code == 1
    code, out, _ = run_cli("check", "dga", "z2_sign_character")
    assert code == 0
    code, out, _ = run_cli(
        "check", "cocycle", "z2_additive", "--additive", "S"
    )
    assert code == 0
    code, out, _ = run_cli(
        "check", "cocycle", "z2_sign_character", "--multiplicative", "sign"
    )
    assert code == 0


def test_unknown_cochain_is_validation_error():
    code, out, err = run_cli("check", "mc", "z2_sign_character", "--cochain", "nope")
    assert code == 2


def test_solve_subcommands():
    code, out, _ = run_cli(
        "solve", "mc", "z2_extend", "--order", "3", "--p0", "pullback", "--p1", "p1"
    )
    assert code == 0
    code, out, _ = run_cli(
        "solve", "rigidity", "z2_conjugated", "--cochain", "conjugated"
    )
    assert code == 0


def test_cohomology_subcommand_json():
    code, out, _ = run_cli(
        "cohomology", "trivial_split",
        "--xi-degree", "0", "--cochain-degree", "1", "--x-degree", "1",
        "--p0", "trivial", "--format", "json",
    )
    assert code == 0
    report = json.loads(out)
    task = report["tasks"][0]
    assert task["detail"]["H_dim"] == 0
    assert task["detail"]["window_closed"] is True


def test_scenarios_listing():
    code, out, _ = run_cli("scenarios")
    assert code == 0
    assert "z2_extend" in out.split()


def test_main_in_process(capsys):
    assert main(["run", "z2_sign_character"]) == 0
    out = capsys.readouterr().out
    assert "summary:" in out


def test_report_determinism_in_process():
    scenario_path = resolve_scenario_path("z2_conjugated")
    from starcomplex.runner import report_to_json

    r1, _ = run_scenario(Scenario.load(scenario_path))
    r2, _ = run_scenario(Scenario.load(scenario_path))
    assert report_to_json(r1) == report_to_json(r2)


def test_solve_rigidity_order_beyond_truncation_exit_2():
    code, _, err = run_cli(
        "solve", "rigidity", "z2_conjugated", "--cochain", "conjugated", "--order", "9"
    )
    assert code == 2


def test_solve_mc_wrong_slice_degree_exit_2(tmp_path):
    raw = json.loads(open(resolve_scenario_path("z2_extend")).read())
    raw["slices"]["p1"]["degree"] = 2
    raw["slices"]["p1"]["values"] = {"e,e": []}
    path = tmp_path / "bad_slice.json"
    path.write_text(json.dumps(raw))
    code, out, _ = run_cli(
        "solve", "mc", str(path), "--order", "2", "--p0", "pullback", "--p1", "p1"
    )
    assert code == 2
    assert "degree 1" in out  # task-level validation errors land in the report


def test_malformed_file_exit_2(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, err = run_cli("run", str(bad))
    assert code == 2
    assert "bad JSON" in err


def test_report_defaults_to_json():
    code, out, _ = run_cli("report", "z2_sign_character")
    assert code == 0
    json.loads(out)


def test_file_references_resolve_relative_to_scenario(tmp_path):
    raw = json.loads(open(resolve_scenario_path("z2_sign_character")).read())
    (tmp_path / "group.json").write_text(json.dumps(raw["group"]))
    (tmp_path / "action.json").write_text(json.dumps(raw["action"]))
    raw["group"] = {"$file": "group.json"}
    raw["action"] = {"$file": "action.json"}
    path = tmp_path / "split_scenario.json"
    path.write_text(json.dumps(raw))
    code, out, err = run_cli("run", str(path))
    assert code == 0, err
    # and a dangling reference is a validation error with a location
    raw["group"] = {"$file": "missing.json"}
    path.write_text(json.dumps(raw))
    code, _, err = run_cli("run", str(path))
    assert code == 2
    assert "cannot read referenced file" in err
