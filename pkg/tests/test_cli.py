"""End-to-end command-line runs (in-process via main())."""

import csv
import json

import pytest

from entpack.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    record = json.loads(captured.out.strip().splitlines()[-1]) if captured.out.strip() else None
    err = json.loads(captured.err.strip().splitlines()[-1]) if captured.err.strip() else None
    return code, record, err


def test_count(capsys):
    code, record, _ = run_cli(capsys, "count", "--n", "5", "--t-max", "6")
    assert code == 0
    assert record["full_states"] == 210
    assert record["reduced_states"] == 99
    assert record["lower_bound"] == pytest.approx(39.0625)
    assert record["enumeration"] == "verified"


def test_count_large_grid(capsys):
    code, record, _ = run_cli(capsys, "count", "--n", "7", "--t-max", "11")
    assert code == 0
    assert record["full_states"] == 12376


def test_count_infeasible(capsys):
    code, _, err = run_cli(capsys, "count", "--n", "7", "--t-max", "6")
    assert code == 2
    assert err["error"] == "infeasible"


def test_solve_analytic_vs_policy_iteration(capsys, tmp_path):
    out1 = tmp_path / "a.json"
    out2 = tmp_path / "b.json"
    code, rec1, _ = run_cli(
        capsys, "solve", "--regime", "far-term", "--n", "2",
        "--method", "analytic-n2", "--out", str(out1),
    )
    assert code == 0
    code, rec2, _ = run_cli(
        capsys, "solve", "--regime", "far-term", "--n", "2",
        "--method", "policy-iteration", "--out", str(out2),
    )
    assert code == 0
    assert rec1["value_empty"] == pytest.approx(rec2["value_empty"], rel=1e-9)


def test_solve_infeasible_exit_code(capsys):
    code, _, err = run_cli(
        capsys, "solve", "--regime", "near-term", "--n", "7",
        "--method", "policy-iteration",
    )
    assert code == 2
    assert err["error"] == "infeasible"


def test_solve_analytic_rejects_big_n(capsys):
    code, _, err = run_cli(
        capsys, "solve", "--regime", "near-term", "--n", "3", "--method", "analytic-n2"
    )
    assert code == 2


def test_sweep_and_ratios(capsys, tmp_path):
    out = tmp_path / "sweep.csv"
    code, record, _ = run_cli(
        capsys, "sweep", "--regime", "near-term", "--n", "2", "--n-max", "3",
        "--method", "policy-iteration", "--method", "heuristic", "--out", str(out),
    )
    assert code == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert {r["method"] for r in rows} == {"policy-iteration", "heuristic"}
    assert {r["n"] for r in rows} == {"2", "3"}
    assert all(r["evaluation_kind"] == "exact" for r in rows)
    ratio_rows = list(csv.DictReader((tmp_path / "sweep_ratios.csv").read_text().splitlines()))
    h_ratios = [float(r["ratio_to_optimal"]) for r in ratio_rows if r["method"] == "heuristic"]
    assert all(abs(x - 1.0) < 1e-9 for x in h_ratios)


def test_heatmap_roundtrip(capsys, tmp_path):
    pol = tmp_path / "pol.json"
    run_cli(
        capsys, "solve", "--regime", "near-term", "--n", "4",
        "--method", "policy-iteration", "--out", str(pol),
    )
    out = tmp_path / "hm.csv"
    code, record, _ = run_cli(capsys, "heatmap", str(pol), "--out", str(out))
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("# aggregate=reduced")
    rows = list(csv.DictReader(lines[1:]))
    assert len(rows) == 1 + 3 * 6  # one zero-viable cell plus (n-1) x t_max grid


def test_heatmap_rejects_stochastic(capsys, tmp_path):
    pol = tmp_path / "ran.json"
    run_cli(
        capsys, "solve", "--regime", "near-term", "--n", "3",
        "--method", "random", "--out", str(pol),
    )
    code, _, err = run_cli(capsys, "heatmap", str(pol), "--out", str(tmp_path / "x.csv"))
    assert code == 2


def test_simulate_deterministic_output(capsys, tmp_path):
    pol = tmp_path / "pol.json"
    run_cli(
        capsys, "solve", "--regime", "near-term", "--n", "2",
        "--method", "heuristic", "--out", str(pol),
    )
    code, rec1, _ = run_cli(
        capsys, "simulate", str(pol), "--episodes", "20000", "--seed", "11"
    )
    assert code == 0
    code, rec2, _ = run_cli(
        capsys, "simulate", str(pol), "--episodes", "20000", "--seed", "11"
    )
    assert rec1["mean"] == rec2["mean"]
    assert rec1["std_error"] == rec2["std_error"]


def test_simulate_appends_results_row(capsys, tmp_path):
    pol = tmp_path / "pol.json"
    run_cli(
        capsys, "solve", "--regime", "near-term", "--n", "2",
        "--method", "heuristic", "--out", str(pol),
    )
    out = tmp_path / "results.csv"
    run_cli(
        capsys, "simulate", str(pol), "--episodes", "5000", "--seed", "3",
        "--out", str(out),
    )
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert rows[0]["evaluation_kind"] == "simulated"
    assert rows[0]["episodes"] == "5000"


def test_simulate_step_cap_exit_code(capsys, tmp_path):
    import numpy as np

    from entpack.actions import synthetic_action_space
    from entpack.policies import constant_policy
    from entpack.serialize import save_policy
    from entpack.statespace import enumerate_states

    actions = synthetic_action_space([(0.5, 1)])
    space = enumerate_states(2, 6)
    pol = tmp_path / "doomed.json"
    save_policy(pol, constant_policy(space, 0), actions, regime="custom")
    code, _, err = run_cli(
        capsys, "simulate", str(pol), "--episodes", "5", "--seed", "1",
        "--step-cap", "4000",
    )
    assert code == 4
    assert err["error"] == "step-cap"


def test_solve_reduced_space_and_simulate(capsys, tmp_path):
    pol = tmp_path / "red.json"
    code, rec_red, _ = run_cli(
        capsys, "solve", "--regime", "far-term", "--n", "4",
        "--method", "policy-iteration", "--reduced", "--out", str(pol),
    )
    assert code == 0
    code, rec_full, _ = run_cli(
        capsys, "solve", "--regime", "far-term", "--n", "4",
        "--method", "policy-iteration", "--full",
    )
    assert rec_red["value_empty"] == pytest.approx(rec_full["value_empty"], rel=1e-9)
    code, sim, _ = run_cli(
        capsys, "simulate", str(pol), "--episodes", "200000", "--seed", "2"
    )
    assert code == 0
    assert abs(sim["mean"] - rec_red["value_empty"]) <= 3.0 * sim["std_error"]


def test_config_file_with_flag_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"regime": "near-term", "n": 2, "method": "heuristic"}))
    code, record, _ = run_cli(capsys, "solve", "--config", str(cfg))
    assert code == 0
    assert record["n"] == 2 and record["method"] == "heuristic"
    # flag overrides the config value
    code, record, _ = run_cli(capsys, "solve", "--config", str(cfg), "--n", "3")
    assert code == 0
    assert record["n"] == 3


def test_config_raw_regime(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps(
            {
                "raw": {
                    "memory_lifetime": 20000.0,
                    "p_det": 5e-4,
                    "batch_size": 1000,
                    "f_app": 0.5,
                },
                "n": 2,
                "method": "analytic-n2",
            }
        )
    )
    code, record, _ = run_cli(capsys, "solve", "--config", str(cfg))
    assert code == 0
    assert record["regime"] == "custom"


def test_sweep_tags_failed_cells(capsys, tmp_path):
    # analytic-n2 only applies at n=2; the n=3 cell must carry an error tag
    # without aborting the sweep
    out = tmp_path / "r.csv"
    code, record, _ = run_cli(
        capsys, "sweep", "--regime", "near-term", "--n", "2", "--n-max", "3",
        "--method", "analytic-n2", "--out", str(out),
    )
    assert code == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    tags = {r["n"]: r["evaluation_kind"] for r in rows}
    assert tags["2"] == "exact"
    assert tags["3"] == "error:infeasible"
