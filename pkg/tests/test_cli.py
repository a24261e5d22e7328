import json
import subprocess
import sys

import pytest

from blaschkelab import cli


def run_cli(args, capsys):
    code = cli.main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def exit_code(args, capsys):
    """Exit status whether main returns it or argparse raises SystemExit."""
    try:
        code = cli.main(list(args))
    except SystemExit as exc:
        code = exc.code
    capsys.readouterr()
    return code


def run_json(args, capsys):
    code, out, err = run_cli(args, capsys)
    return code, json.loads(out)


# ---------------------------------------------------------------- thresholds


def test_thresholds_json(capsys):
    code, payload = run_json(["thresholds", "--k", "3"], capsys)
    assert code == 0
    rows = {row["k"]: row["threshold"] for row in payload["monomial_thresholds"]}
    assert rows[1] == 1.0
    assert round(rows[2], 4) == 0.6309
    assert rows[3] == 0.5
    assert round(payload["z2_head_adjusted_bound"], 4) == -0.7937


def test_thresholds_csv(capsys):
    code, out, _ = run_cli(["thresholds", "--k", "2", "--format", "csv"], capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("# config")
    assert lines[1] == "kind,k,threshold"
    assert lines[2] == "monomial,1,1"
    assert lines[-1].startswith("z2-head-adjusted,2,-0.79374465423")


# ---------------------------------------------------------------- criterion


def test_criterion_holds_exit_zero(capsys):
    code, payload = run_json(
        ["criterion", "--alpha", "-1", "--k", "2", "--s0", "2", "--nmax", "5000"], capsys
    )
    assert code == 0
    assert payload["holds"] is True
    assert payload["violations"] == []
    assert payload["first_violation_index"] is None
    assert "not checked numerically" in payload["note"]


def test_criterion_fails_exit_two(capsys):
    code, payload = run_json(
        ["criterion", "--alpha", "-1", "--k", "2", "--nmax", "5000"], capsys
    )
    assert code == 2
    assert payload["holds"] is False
    assert payload["first_violation_index"] == 0


def test_criterion_csv_one_row_per_violation(capsys):
    code, out, _ = run_cli(
        ["criterion", "--alpha", "-1", "--k", "2", "--nmax", "5000", "--format", "csv"],
        capsys,
    )
    assert code == 2
    lines = [l for l in out.splitlines() if l and not l.startswith("#")]
    assert lines[0] == "condition,index,lhs,rhs"
    assert lines[1].startswith("a,0,1,0.6666")
    assert len(lines) == 2


def test_criterion_concavity_mode(capsys):
    code, payload = run_json(
        ["criterion", "--alpha", "0.5", "--k", "1", "--mode", "concavity", "--nmax", "2000"],
        capsys,
    )
    assert code == 0
    assert payload["holds"] is True


def test_criterion_weights_literal(capsys):
    code, payload = run_json(
        ["criterion", "--weights", "steep-head", "--k", "6", "--nmax", "2000"], capsys
    )
    assert code == 2
    assert payload["holds"] is False
    assert len(payload["violations"]) >= 1


def test_criterion_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["criterion", "--k", "2"])
    assert exc.value.code == 64
    capsys.readouterr()
    with pytest.raises(SystemExit) as exc:
        cli.main(["criterion", "--alpha", "-1", "--weights", "power:0", "--k", "2"])
    assert exc.value.code == 64
    capsys.readouterr()


def test_criterion_s0_only_in_shift_mode(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["criterion", "--alpha", "0", "--k", "1", "--mode", "concavity", "--s0", "2"])
    assert exc.value.code == 64
    capsys.readouterr()


# ---------------------------------------------------------------- scan


def test_scan_grid(capsys):
    code, out, _ = run_cli(
        [
            "scan", "--alpha-min", "-1", "--alpha-max", "0", "--alpha-steps", "3",
            "--k", "2", "--nmax", "2000", "--format", "csv",
        ],
        capsys,
    )
    assert code == 0
    lines = [l for l in out.splitlines() if l and not l.startswith("#")]
    assert lines[0] == "alpha,k,s0,holds,first_violation_index"
    assert len(lines) == 1 + 6  # 3 alphas x 2 strides
    assert "-1,2,0,false,0" in lines
    assert "0,2,0,true," in lines


def test_scan_tracking_s0(capsys):
    code, out, _ = run_cli(
        [
            "scan", "--alpha-min", "-1", "--alpha-max", "-1", "--alpha-steps", "1",
            "--k", "3", "--s0", "k", "--nmax", "2000", "--format", "csv",
        ],
        capsys,
    )
    assert code == 0
    rows = [l for l in out.splitlines() if l and not l.startswith("#")][1:]
    assert rows == ["-1,1,1,true,", "-1,2,2,true,", "-1,3,3,true,"]


# ---------------------------------------------------------------- decompose / bnorm


def test_decompose_grouping(capsys):
    code, out, _ = run_cli(
        [
            "decompose", "--f", "1,0;1,0;1,0;1,0", "--blaschke", "zeros=0,0;0,0",
            "--alpha", "-1", "--format", "csv",
        ],
        capsys,
    )
    assert code == 0
    rows = [l for l in out.splitlines() if l and not l.startswith("#")][1:]
    assert rows[0].split(",", 2)[0] == "0"
    assert '"1,0;1,0"' in rows[0]
    assert '"1,0;1,0"' in rows[1]


def test_decompose_depth_exhausted(tmp_path, capsys):
    out_file = tmp_path / "dump.json"
    code = cli.main(
        [
            "decompose", "--f", "0,0;0,0;0,0;0,0;0,0;0,0;0,0;1,0",
            "--blaschke", "zeros=0.5,0", "--depth", "2", "--out", str(out_file),
        ]
    )
    capsys.readouterr()
    assert code == 2
    payload = json.loads(out_file.read_text())
    assert payload["depth_exhausted"] is True
    assert payload["depth_used"] == 2
    assert payload["residual_norm"] > 1e-9


def test_bnorm_shift_ratio_one(capsys):
    code, payload = run_json(
        ["bnorm", "--f", "1,0;2,0;3,0", "--blaschke", "zeros=0,0", "--alpha", "-1"], capsys
    )
    assert code == 0
    assert payload["ratio"] == 1.0
    assert payload["b_norm"] == pytest.approx(payload["diag_norm"], abs=1e-12)
    assert payload["unsupported_regime"] is False


def test_bnorm_flags_unsupported_regime(capsys):
    code, payload = run_json(
        ["bnorm", "--f", "1,0;1,0", "--blaschke", "zeros=0,0", "--alpha", "1.5"], capsys
    )
    assert code == 0
    assert payload["unsupported_regime"] is True


# ---------------------------------------------------------------- wsp-test


def write_descriptor(tmp_path, text, name="exp.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return str(p)


def test_wsp_test_affine_generator(tmp_path, capsys):
    desc = write_descriptor(
        tmp_path,
        "generators = 1,0;0.7,0\n"
        "blaschke = zeros=0,0;0,0\n"
        "ip = taylor\n"
        "alpha = -1\n"
        "N = 64\n"
        "N_compare = 40\n",
    )
    code, payload = run_json(["wsp-test", "--descriptor", desc], capsys)
    assert code == 0
    assert payload["defect"] <= 1e-9
    assert payload["dims"] == {"G": 33, "M": 33, "W": 1}
    assert payload["N"] == 64
    assert payload["N_compare"] == 40


def test_wsp_test_output_is_single_line(tmp_path, capsys):
    desc = write_descriptor(
        tmp_path,
        "generators = 1,0\nblaschke = zeros=0,0\nip = taylor\nalpha = 0\nN = 32\nN_compare = 16\n",
    )
    code, out, _ = run_cli(["wsp-test", "--descriptor", desc], capsys)
    assert code == 0
    assert out.count("\n") == 1
    assert out.endswith("}\n")


def test_wsp_test_seeded_random_generators(tmp_path, capsys):
    desc = write_descriptor(
        tmp_path,
        "generators = random:2:5\n"
        "blaschke = zeros=0,0;0,0\n"
        "ip = taylor\n"
        "alpha = -1\n"
        "N = 48\n"
        "N_compare = 24\n"
        "seed = 11\n",
    )
    code, payload = run_json(["wsp-test", "--descriptor", desc], capsys)
    assert code == 0
    assert payload["config"]["seed"] == 11
    code2, payload2 = run_json(["wsp-test", "--descriptor", desc], capsys)
    assert payload2 == payload


def test_wsp_test_max_defect_exit(tmp_path, capsys):
    desc = write_descriptor(
        tmp_path,
        "generators = 1,0;0.5,0\n"
        "blaschke = zeros=0,0;0,0\n"
        "ip = taylor\n"
        "alpha = -1\n"
        "N = 48\n"
        "N_compare = 24\n"
        "max_defect = 1e-30\n",
    )
    code, payload = run_json(["wsp-test", "--descriptor", desc], capsys)
    assert code == 2


def test_wsp_test_badic_ip(tmp_path, capsys):
    desc = write_descriptor(
        tmp_path,
        "generators = 1,0;0.5,0\n"
        "blaschke = zeros=0,0;0,0\n"
        "ip = badic\n"
        "alpha = -1\n"
        "N = 48\n"
        "N_compare = 24\n",
    )
    code, payload = run_json(["wsp-test", "--descriptor", desc], capsys)
    assert code == 0
    assert payload["defect"] <= 1e-9


def test_wsp_test_descriptor_errors(tmp_path, capsys):
    bad = write_descriptor(tmp_path, "generators = 1,0\nbogus_key = 7\n")
    assert exit_code(["wsp-test", "--descriptor", bad], capsys) == 64
    dup = write_descriptor(tmp_path, "alpha = 1\nalpha = 2\ngenerators = 1,0\n", "dup.cfg")
    assert exit_code(["wsp-test", "--descriptor", dup], capsys) == 64


# ---------------------------------------------------------------- operator-check


def test_operator_check_monomial(capsys):
    code, payload = run_json(
        ["operator-check", "--k", "2", "--alpha", "-0.5", "--N", "48"], capsys
    )
    assert code == 0
    assert payload["holds"] is True
    code, payload = run_json(
        ["operator-check", "--k", "2", "--alpha", "-1", "--N", "48"], capsys
    )
    assert code == 2
    assert payload["holds"] is False
    assert payload["min_eig"] < -1e-6


def test_operator_check_inner_function_isometry(capsys):
    # multiplication by an inner function on the plain norm is isometric
    code, payload = run_json(
        ["operator-check", "--blaschke", "zeros=0.5,0", "--alpha", "0", "--N", "24"], capsys
    )
    assert code == 0
    assert payload["min_eig"] >= -1e-9


def test_operator_check_requires_exactly_one_operator(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["operator-check", "--alpha", "0", "--N", "8"])
    assert exc.value.code == 64
    capsys.readouterr()


# ---------------------------------------------------------------- plumbing


def test_output_file_and_stdout_match(tmp_path, capsys):
    out_file = tmp_path / "t.json"
    code = cli.main(["thresholds", "--k", "2", "--out", str(out_file)])
    captured = capsys.readouterr()
    assert code == 0
    assert captured.out == ""
    cli.main(["thresholds", "--k", "2"])
    assert capsys.readouterr().out == out_file.read_text()


def test_twelve_significant_digits(capsys):
    code, out, _ = run_cli(["thresholds", "--k", "2"], capsys)
    assert "0.630929753571" in out
    assert "0.63092975357145" not in out


def test_unknown_subcommand_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["frobnicate"])
    assert exc.value.code == 64
    capsys.readouterr()


def test_console_script_installed():
    proc = subprocess.run(
        ["blaschkelab", "thresholds", "--k", "1"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["monomial_thresholds"][0]["threshold"] == 1.0


def test_module_main_matches_script():
    proc = subprocess.run(
        [sys.executable, "-m", "blaschkelab", "thresholds", "--k", "1"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["monomial_thresholds"][0]["k"] == 1
