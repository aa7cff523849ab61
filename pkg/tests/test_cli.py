import json

import pytest

from hopfcalc.cli import run
from hopfcalc.hopf import build_cyclic_group_algebra, render_structure_constants


def invoke(capsys, argv):
    code = run(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_list_examples_contains_registry(capsys):
    code, out, err = invoke(capsys, ["list-examples"])
    assert code == 0
    payload = json.loads(out)
    names = [e["name"] for e in payload["examples"]]
    for name in ("radford", "torus", "group-c2", "smash-demo"):
        assert name in names
    assert payload["schema"] == 1


def test_unknown_example_is_a_usage_error(capsys):
    code, out, err = invoke(capsys, ["verify", "moebius"])
    assert code == 2


def test_unknown_flag_is_a_usage_error(capsys):
    code, out, err = invoke(capsys, ["verify", "group-c2", "--frobenius", "1"])
    assert code == 2


def test_unknown_suite_is_a_usage_error(capsys):
    code, out, err = invoke(capsys, ["verify", "group-c2", "--suite", "nope"])
    assert code == 2
    assert "unknown suite" in err


def test_group_c2_verify_passes_and_emits_json(capsys):
    code, out, err = invoke(capsys, ["verify", "group-c2", "--ideal", "zero"])
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] is True
    assert payload["summary"].get("fail", 0) == 0
    suites = [r["suite"] for r in payload["reports"]]
    assert "hopf-axioms" in suites and "fodc" in suites


def test_group_c2_full_ideal(capsys):
    code, out, err = invoke(capsys, ["verify", "group-c2", "--ideal", "full"])
    assert code == 0


def test_suite_filter(capsys):
    code, out, err = invoke(capsys, ["verify", "group-c2", "--suite", "hopf-axioms"])
    assert code == 0
    payload = json.loads(out)
    assert [r["suite"] for r in payload["reports"]] == ["hopf-axioms"]


def test_cohomology_group_c2(capsys):
    code, out, err = invoke(capsys, ["cohomology", "group-c2", "--ideal", "zero", "--max-degree", "1"])
    assert code == 0
    payload = json.loads(out)
    assert payload["dims"] == {"H0": 1, "H1": 1}


def test_cohomology_radford(capsys):
    code, out, err = invoke(capsys, ["cohomology", "radford", "--max-degree", "3"])
    assert code == 0
    payload = json.loads(out)
    assert payload["dims"] == {"H0": 2, "H1": 4, "H2": 2, "H3": 0}


def test_user_hopf_roundtrip(tmp_path, capsys):
    text = render_structure_constants(build_cyclic_group_algebra(4))
    path = tmp_path / "c4.hopf"
    path.write_text(text)
    code, out, err = invoke(capsys, ["verify", "user-hopf", "--file", str(path)])
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] is True


def test_user_hopf_broken_antipode_fails(tmp_path, capsys):
    text = render_structure_constants(build_cyclic_group_algebra(4))
    # corrupt the antipode: send generator 1 to itself instead of its inverse
    text = text.replace("ANTIPODE 1 -> 3 : 1", "ANTIPODE 1 -> 1 : 1")
    text = text.replace("ANTIPODE 3 -> 1 : 1", "ANTIPODE 3 -> 3 : 1")
    path = tmp_path / "bad.hopf"
    path.write_text(text)
    code, out, err = invoke(capsys, ["verify", "user-hopf", "--file", str(path)])
    assert code == 1
    payload = json.loads(out)
    assert payload["ok"] is False
    assert payload["summary"]["fail"] >= 1


def test_user_hopf_missing_file_is_usage_error(capsys):
    code, out, err = invoke(capsys, ["verify", "user-hopf"])
    assert code == 2


def test_radford_single_suite_deterministic(capsys):
    argv = ["verify", "radford", "--r", "2", "--n", "2", "--ideal", "zero", "--seed", "7", "--suite", "hopf-galois"]
    code1, out1, _ = invoke(capsys, argv)
    code2, out2, _ = invoke(capsys, argv)
    assert code1 == code2 == 0
    assert out1 == out2


def test_torus_single_suite_through_cli(capsys):
    code, out, err = invoke(
        capsys, ["verify", "torus", "--M", "8", "--window", "2", "--suite", "cleft-derivation"]
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] is True
    identities = [c["identity"] for c in payload["reports"][0]["checks"]]
    assert "cleft.sigma-closed-form" in identities


def test_torus_order_two_angle_uses_fallback_deformation(capsys):
    code, out, err = invoke(
        capsys, ["verify", "torus", "--M", "2", "--window", "2", "--suite", "cleft-derivation"]
    )
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_radford_r3_runs_with_truncation_obstruction_reported(capsys):
    code, out, err = invoke(capsys, ["verify", "radford", "--r", "3", "--suite", "higher-forms"])
    assert code == 0
    payload = json.loads(out)
    checks = payload["reports"][0]["checks"]
    assert checks[0]["identity"] == "truncation-obstruction"
    assert "no degree-two-trivial prolongation" in checks[0]["witness"]


def test_user_hopf_with_ideal_file_builds_the_quotient_calculus(tmp_path, capsys):
    text = render_structure_constants(build_cyclic_group_algebra(4))
    hopf_path = tmp_path / "c4.hopf"
    hopf_path.write_text(text)
    ideal_path = tmp_path / "ideal.txt"
    # the ideal generated by (g^2 - 1): a proper quotient remains
    ideal_path.write_text("# span of the squared generator shifted by the unit\n1*2 - 1*0\n")
    code, out, err = invoke(
        capsys,
        ["verify", "user-hopf", "--file", str(hopf_path), "--ideal-file", str(ideal_path)],
    )
    assert code == 0
    payload = json.loads(out)
    assert payload["ok"] is True
    suites = [r["suite"] for r in payload["reports"]]
    assert "ideal-calculus" in suites


def test_shipped_sample_data_verifies(capsys):
    import pathlib

    root = pathlib.Path(__file__).resolve().parent.parent
    code, out, err = invoke(
        capsys,
        [
            "verify",
            "user-hopf",
            "--file",
            str(root / "sample-data" / "c4.hopf"),
            "--ideal-file",
            str(root / "sample-data" / "c4-ideal.txt"),
        ],
    )
    assert code == 0
    assert json.loads(out)["ok"] is True


def test_cohomology_torus_windowed(capsys):
    code, out, err = invoke(capsys, ["cohomology", "torus", "--M", "8", "--window", "3", "--max-degree", "2"])
    assert code == 0
    payload = json.loads(out)
    # window semantics: the kernel in degree zero is the zero-grade column
    # (the q-integer [n] vanishes only at n = 0 on this window)
    assert payload["dims"] == {"H0": 7, "H1": 7, "H2": 0}
    assert payload["window"] == 3
