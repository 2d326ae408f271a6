import json
import math

import pytest

from singletsim import DEFAULT_SEED
from singletsim.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out


def run_json(capsys, *argv):
    code, out = run_cli(capsys, *argv)
    return code, json.loads(out)


def test_simulate_report(capsys, tmp_path):
    code, report = run_json(
        capsys,
        "simulate", "--spin", "3/2", "--a", "0,0,1", "--b", "0,0,1",
        "--trials", "200000", "--seed", "42",
    )
    assert code == 0
    assert report["schema"] == 1
    assert report["chain"]["comm_cost"] == 2
    assert report["results"]["cbits_per_trial"] == 2
    assert report["results"]["quantum_target"] == pytest.approx(-1.25)
    corr = report["results"]["correlation"]
    assert abs(corr["mean"] - (-1.25)) <= 5 * corr["std_error"]
    assert report["results"]["z_score_vs_target"] <= 5
    counts = report["results"]["marginal_alpha"]["counts"]
    assert set(counts) == {"3/2", "1/2", "-1/2", "-3/2"}
    assert sum(counts.values()) == 200000
    assert report["results"]["marginal_alpha"]["uniformity"]["p_value"] > 0.001


def test_simulate_spin_zero(capsys):
    code, report = run_json(capsys, "simulate", "--spin", "0", "--trials", "100")
    assert code == 0
    assert report["chain"]["comm_cost"] == 0
    assert report["results"]["marginal_alpha"]["counts"] == {"0": 100}
    assert report["results"]["marginal_alpha"]["uniformity"] is None
    assert report["results"]["quantum_target"] == 0.0


def test_simulate_deterministic_across_workers(capsys, tmp_path):
    out1 = tmp_path / "w1.json"
    out4 = tmp_path / "w4.json"
    args = ["simulate", "--spin", "2", "--trials", "150000", "--seed", "7"]
    assert main(args + ["--workers", "1", "--out", str(out1)]) == 0
    assert main(args + ["--workers", "4", "--out", str(out4)]) == 0
    capsys.readouterr()
    assert out1.read_bytes() == out4.read_bytes()


def test_simulate_deterministic_across_backends(capsys, tmp_path):
    from singletsim.backend import available_backends

    if "cython" not in available_backends():
        pytest.skip("compiled kernel not built")
    outputs = []
    for backend in ("cython", "python"):
        path = tmp_path / f"{backend}.json"
        code = main([
            "simulate", "--spin", "5/2", "--trials", "60000", "--seed", "13",
            "--backend", backend, "--out", str(path),
        ])
        assert code == 0
        outputs.append(path.read_bytes())
    capsys.readouterr()
    assert outputs[0] == outputs[1]


def test_simulate_env_seed_override(capsys, monkeypatch):
    monkeypatch.setenv("SINGLET_SIM_SEED", "0x2a")
    code, report = run_json(capsys, "simulate", "--spin", "1/2", "--trials", "10")
    assert code == 0 and report["config"]["seed"] == 42
    code, report = run_json(
        capsys, "simulate", "--spin", "1/2", "--trials", "10", "--seed", "7"
    )
    assert code == 0 and report["config"]["seed"] == 7
    monkeypatch.delenv("SINGLET_SIM_SEED")
    code, report = run_json(capsys, "simulate", "--spin", "1/2", "--trials", "10")
    assert code == 0 and report["config"]["seed"] == DEFAULT_SEED


def test_simulate_spherical_directions(capsys):
    code, report = run_json(
        capsys,
        "simulate", "--spin", "1/2", "--trials", "10", "--spherical",
        "--a", "0,0", "--b", f"{math.pi},0",
    )
    assert code == 0
    assert report["config"]["a"][2] == pytest.approx(1.0)
    assert report["config"]["b"][2] == pytest.approx(-1.0)


def test_simulate_rejects_non_unit_direction(capsys):
    code, out = run_cli(capsys, "simulate", "--spin", "1/2", "--a", "0,0,2")
    assert code == 2
    assert json.loads(out)["error"]["type"] == "ValueError"


def test_simulate_rejects_bad_spin(capsys):
    code, out = run_cli(capsys, "simulate", "--spin", "2/3")
    assert code == 2
    assert "error" in json.loads(out)


def test_simulate_csv_and_table_formats(capsys):
    code, out = run_cli(
        capsys, "simulate", "--spin", "1", "--trials", "5000", "--format", "csv"
    )
    assert code == 0
    header, *rows = out.strip().splitlines()
    assert header == "alpha,beta,probability"
    assert all(len(r.split(",")) == 3 for r in rows)
    code, out = run_cli(
        capsys, "simulate", "--spin", "1", "--trials", "5000", "--format", "table"
    )
    assert code == 0 and "correlation" in out


def test_simulate_transcript_dump(capsys, tmp_path):
    path = tmp_path / "transcripts.jsonl"
    code, _ = run_json(
        capsys,
        "simulate", "--spin", "5/2", "--trials", "50", "--dump-transcripts", str(path),
    )
    assert code == 0
    lines = path.read_text().strip().splitlines()
    assert len(lines) == 50
    rec = json.loads(lines[7])
    assert rec["trial"] == 7
    assert len(rec["cbits"]) == 2 and len(rec["f_bits"]) == 1
    assert set(rec["cbits"]) <= {1, -1}
    # alpha serialized as "p/2" string for half-integer spin
    assert isinstance(rec["alpha"], str) and rec["alpha"].endswith("/2")


def test_cost_table(capsys):
    code, report = run_json(capsys, "cost-table", "--spin-max", "4")
    assert code == 0
    rows = {r["spin"]: r for r in report["rows"]}
    assert rows["2"]["comm_cost"] == 2 and rows["2"]["n_nu"] == 1
    assert rows["1"]["comm_cost"] == 1 and rows["1"]["n_nu"] == 1
    assert rows["7/2"]["comm_cost"] == 3
    assert rows["3"]["f_biases"] == {"3": "1/3", "7": "5/7"}
    assert rows["2"]["f_biases"] == {"5": "3/5"}
    code, out = run_cli(capsys, "cost-table", "--spin-max", "3", "--format", "csv")
    assert code == 0
    assert out.splitlines()[0] == "s,d,binary,n_c,n_lambda,n_mu,n_nu,f_biases"


def test_verify_small_run_passes(capsys):
    code, report = run_json(
        capsys,
        "verify", "--spin-max", "2", "--pairs", "2", "--trials", "20000", "--seed", "11",
    )
    assert code == 0
    assert report["ok"] is True
    assert len(report["spins"]) == 4


def test_verify_single_cbit_regime(capsys):
    # the s = 1/2 row is the one-cbit protocol
    code, report = run_json(
        capsys, "verify", "--spin-max", "1/2", "--pairs", "2", "--trials", "20000"
    )
    assert code == 0 and report["ok"] is True
    assert len(report["spins"]) == 1
    assert report["spins"][0]["comm_cost"] == 1


def test_verify_detects_bias_perturbation(capsys):
    code, report = run_json(
        capsys,
        "verify", "--spin-max", "2", "--pairs", "1", "--trials", "5000",
        "--perturb-bias", "0.01",
    )
    assert code == 1
    assert report["ok"] is False


def test_verify_detects_coefficient_perturbation(capsys):
    code, report = run_json(
        capsys,
        "verify", "--spin-max", "3/2", "--pairs", "1", "--trials", "5000",
        "--perturb-coeff", "1",
    )
    assert code == 1
    assert report["ok"] is False


def test_verify_spin_max_guard(capsys):
    code, out = run_cli(capsys, "verify", "--spin-max", "21", "--pairs", "1", "--trials", "10")
    assert code == 2
    assert "error" in json.loads(out)


def test_compare_joint_spin_half_is_moment_determined(capsys):
    code, report = run_json(
        capsys, "compare-joint", "--spin", "1/2", "--a", "0.6,0,0.8", "--b", "0,0,1"
    )
    assert code == 0
    res = report["results"]
    assert res["total_variation"] <= 1e-9
    assert res["marginals_and_correlation_agree"] is True


def test_compare_joint_spin_one_reports_distance(capsys):
    code, report = run_json(capsys, "compare-joint", "--spin", "1", "--a", "0,0,1", "--b", "0,0,1")
    assert code == 0
    res = report["results"]
    assert res["marginals_and_correlation_agree"] is True
    assert abs(res["correlation_protocol"] - res["correlation_quantum"]) <= 1e-9
    assert res["total_variation"] >= 0.0


def test_compare_joint_clamps_near_unit_cosine(capsys):
    # (1,1,1)/sqrt(3) dotted with itself lands an ulp above 1; the harness
    # must clamp instead of rejecting
    c = "0.5773502691896258,0.5773502691896258,0.5773502691896258"
    code, report = run_json(capsys, "compare-joint", "--spin", "1/2", "--a", c, "--b", c)
    assert code == 0
    assert report["results"]["cos_ab"] == 1.0


def test_compare_joint_spin_zero_point_mass(capsys):
    code, report = run_json(capsys, "compare-joint", "--spin", "0")
    assert code == 0
    res = report["results"]
    assert res["protocol_joint"] == [{"alpha": 0, "beta": 0, "probability": 1.0}]
    assert res["quantum_joint"] == [{"alpha": 0, "beta": 0, "probability": 1.0}]
    assert res["total_variation"] <= 1e-12


def test_primitives_check_small(capsys):
    code, report = run_json(capsys, "primitives-check", "--trials", "50000", "--seed", "3")
    assert code == 0
    assert report["ok"] is True
    assert len(report["checks"]) >= 20


def test_csv_render_for_primitives(capsys):
    code, out = run_cli(
        capsys, "primitives-check", "--trials", "5000", "--format", "csv"
    )
    assert code == 0
    assert out.splitlines()[0] == "name,n_samples,estimate,target,std_error,z_score,passed"
