import json
import subprocess
import sys

import pytest

from hypercube_spectra import cli
from hypercube_spectra.inequality import SweepResult


def run_cli(capsys, *argv):
    code = cli.main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_analyze_family_parity(capsys):
    code, out, _ = run_cli(capsys, "analyze", "--family", "parity:s=3,n=3")
    assert code == 0
    doc = json.loads(out)
    assert doc["status"] == "ok"
    assert doc["version"]
    assert doc["input"]["n"] == 3
    assert doc["payload"]["entropy_bits"] == 0.0
    assert doc["payload"]["influence_total"] == "3"


def test_analyze_hex_and_family_agree(capsys):
    code, out, _ = run_cli(capsys, "family", "--family", "majority:n=3", "--emit-hex")
    assert code == 0
    hex_table = json.loads(out)["payload"]["hex"]
    code, via_hex, _ = run_cli(capsys, "analyze", "--fn", hex_table, "--n", "3")
    assert code == 0
    code, via_family, _ = run_cli(capsys, "analyze", "--family", "majority:n=3")
    assert code == 0
    assert json.loads(via_hex)["payload"] == json.loads(via_family)["payload"]
    assert json.loads(via_hex)["input"] == json.loads(via_family)["input"]


def test_byte_identical_reruns(capsys):
    _, first, _ = run_cli(capsys, "analyze", "--family", "tribes:w=2,s=2")
    _, second, _ = run_cli(capsys, "analyze", "--family", "tribes:w=2,s=2")
    assert first == second


def test_dimension_cap_is_usage_error(capsys):
    code, out, err = run_cli(capsys, "analyze", "--fn", "ff", "--n", "50")
    assert code == 1
    assert json.loads(out)["status"] == "error"
    assert "error" in err


def test_mutually_exclusive_inputs(capsys):
    code, _, err = run_cli(capsys, "analyze", "--fn", "69", "--n", "3", "--family", "parity:s=2")
    assert code == 1
    assert "not both" in err


def test_unknown_flag_is_exit_one(capsys):
    code, _, err = run_cli(capsys, "analyze", "--wat")
    assert code == 1
    assert err


def test_spectrum_json_and_csv(capsys):
    code, out, _ = run_cli(capsys, "spectrum", "--family", "majority:n=3")
    assert code == 0
    payload = json.loads(out)["payload"]
    assert payload["coeffs"] == [0, 4, 4, 0, 4, 0, 0, -4]
    assert payload["parseval_ok"] is True
    code, out, _ = run_cli(capsys, "spectrum", "--family", "majority:n=3", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[0] == "mask,coeff"
    assert lines[1] == "0,0"
    assert len(lines) == 9


def test_moments_json_and_csv(capsys):
    code, out, _ = run_cli(
        capsys, "moments", "--family", "majority:n=3", "--eps", "0.1,0.25", "--coords", "1,2,3"
    )
    assert code == 0
    payload = json.loads(out)["payload"]
    assert payload["coords"] == [1, 2, 3]
    assert payload["values"][1] == pytest.approx(4.0 ** (-0.25))
    code, out, _ = run_cli(
        capsys, "moments", "--family", "majority:n=3", "--eps", "0.1:0.3:0.1", "--format", "csv"
    )
    lines = out.strip().splitlines()
    assert lines[0] == "eps,value"
    assert len(lines) == 4  # 0.1, 0.2, 0.3


def test_chain_report(capsys):
    code, out, _ = run_cli(capsys, "chain", "--family", "majority:n=3", "--eps", "0.25")
    assert code == 0
    doc = json.loads(out)
    assert doc["status"] == "ok"
    payload = doc["payload"]
    assert payload["order"] == [1, 2, 3]
    assert payload["final"] == pytest.approx(4.0 ** (-0.25))
    assert len(payload["steps"]) == 3
    for step in payload["steps"]:
        assert step["delta"] >= step["floor"] - 1e-9


def test_q31_report(capsys):
    code, out, _ = run_cli(capsys, "q31", "--family", "and:n=4")
    assert code == 0
    payload = json.loads(out)["payload"]
    assert payload["worst"] == "7/4"
    assert payload["per_coord"][0]["ratio"] == "7/4"


def test_verify_lemma24_ok(capsys):
    code, out, _ = run_cli(capsys, "verify", "lemma24", "--grid", "40", "--eps", "0.1,0.3")
    assert code == 0
    doc = json.loads(out)
    assert doc["status"] == "ok"
    assert doc["payload"]["grid"]["violations"] == 0


def test_verify_eq27_with_random(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "eq27", "--grid", "30", "--eps", "0.2", "--random", "500", "--seed", "1"
    )
    assert code == 0
    payload = json.loads(out)["payload"]
    assert payload["random"]["violations"] == 0


def test_verify_violation_exits_two(capsys, monkeypatch):
    forged = SweepResult("lemma24", 10, 1, -1.0, (0.5, 0.5, 0.1))
    monkeypatch.setattr(cli, "sweep_gap", lambda kind, grid: forged)
    code, out, _ = run_cli(capsys, "verify", "lemma24", "--grid", "10", "--eps", "0.1")
    assert code == 2
    assert json.loads(out)["status"] == "violation"


def test_verify_lemma22_and_lemma31(capsys):
    code, out, _ = run_cli(capsys, "verify", "lemma22", "--trials", "40", "--max-n", "6")
    assert code == 0
    assert json.loads(out)["payload"]["failures"] == 0
    code, out, _ = run_cli(
        capsys, "verify", "lemma31", "--trials", "6", "--max-n", "5", "--eps", "0.1,0.4"
    )
    assert code == 0
    payload = json.loads(out)["payload"]
    assert payload["violations"] == 0
    assert payload["min_margin"] >= -1e-9


def test_verify_theorem_exhaustive(capsys):
    code, out, _ = run_cli(capsys, "verify", "theorem", "--max-n", "3")
    assert code == 0
    payload = json.loads(out)["payload"]
    assert payload["checked"] == 270
    assert payload["violations"] == 0
    assert payload["max_entropy_over_bound"] < 1.0


def test_verify_theorem_sampled(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "theorem", "--random", "200", "--n", "7", "--seed", "9"
    )
    assert code == 0
    payload = json.loads(out)["payload"]
    assert payload["checked"] == 200
    assert payload["violations"] == 0


def test_search_cli_json_lines(capsys):
    code, out, _ = run_cli(capsys, "search", "--n", "2", "--mode", "exhaustive", "--workers", "1")
    assert code == 0
    lines = out.strip().splitlines()
    assert len(lines) == 5
    records = [json.loads(line) for line in lines]
    assert [r["metric"] for r in records] == sorted(r["metric"] for r in records)
    assert all("context" in r for r in records)


def test_search_cli_worker_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("HYPERCUBE_SPECTRA_WORKERS", "2")
    code, out_env, _ = run_cli(
        capsys, "search", "--n", "6", "--mode", "sample", "--count", "128", "--seed", "5"
    )
    assert code == 0
    monkeypatch.delenv("HYPERCUBE_SPECTRA_WORKERS")
    code, out_one, _ = run_cli(
        capsys,
        "search", "--n", "6", "--mode", "sample", "--count", "128", "--seed", "5",
        "--workers", "1",
    )
    assert code == 0
    assert out_env == out_one


def test_search_cli_resume(capsys, tmp_path):
    path = str(tmp_path / "cli-ckpt.json")
    code, straight, _ = run_cli(
        capsys, "search", "--n", "3", "--mode", "exhaustive", "--workers", "1"
    )
    assert code == 0
    code, out, _ = run_cli(
        capsys,
        "search", "--n", "3", "--mode", "exhaustive", "--checkpoint", path,
        "--workers", "1",
    )
    assert code == 0
    assert out == straight
    code, resumed, _ = run_cli(capsys, "search", "--resume", "--checkpoint", path)
    assert code == 0
    assert resumed == straight


def test_search_cli_usage_errors(capsys):
    code, _, err = run_cli(capsys, "search", "--n", "3", "--mode", "sample", "--count", "5")
    assert code == 1
    assert "seed" in err
    code, _, err = run_cli(capsys, "search", "--resume")
    assert code == 1
    assert "checkpoint" in err


def test_family_first_even_group_report(capsys):
    code, out, _ = run_cli(
        capsys, "family", "--family", "first-even-group:s=1,t=4", "--emit-hex"
    )
    assert code == 0
    payload = json.loads(out)["payload"]
    assert payload["n"] == 4
    limits = payload["limits"]
    assert limits["deviation_bound"] == 0.125
    assert limits["deviations_ok"] is True
    assert "term_sum_limit" in payload
    assert len(payload["influences"]) == 4


def test_family_targets_filter(capsys):
    code, out, _ = run_cli(
        capsys, "family", "--family", "minblock:s=2,t=2", "--targets", "influences"
    )
    assert code == 0
    payload = json.loads(out)["payload"]
    assert "influences" in payload
    assert "limits" not in payload
    code, _, err = run_cli(
        capsys, "family", "--family", "minblock:s=2,t=2", "--targets", "nope"
    )
    assert code == 1
    assert "unknown targets" in err


def test_console_script_is_installed():
    result = subprocess.run(
        [sys.executable, "-m", "hypercube_spectra.cli", "analyze", "--family", "dictator:n=2"],
        capture_output=True,
        text=True,
    )
    assert result.returncode == 0
    assert json.loads(result.stdout)["payload"]["entropy_bits"] == 0.0
