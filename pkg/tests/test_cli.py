"""Command line interface: subcommands, exit codes, output files."""

import json

import numpy as np
import pytest

from expverk import harness
from expverk.cli import main
from expverk.errors import DivergenceError, UnreliableReferenceError
from expverk.tableau import Tableau, builtin, dump


def test_run_writes_csv_and_json(tmp_path, capsys):
    prefix = str(tmp_path / "study")
    code = main([
        "run", "--problem", "scalar-quadratic", "--methods", "mverk41,sverk41",
        "--k", "4..6", "--repeats", "1", "--out", prefix,
    ])
    assert code == 0
    out = capsys.readouterr().out
    assert "scalar-quadratic/mverk41: fitted order" in out
    assert "scalar-quadratic/sverk41: fitted order" in out

    csv_text = (tmp_path / "study.csv").read_text().splitlines()
    assert csv_text[0] == harness.CSV_HEADER
    assert len(csv_text) == 1 + 2 * 3  # header + 2 methods x 3 rows

    payload = json.loads((tmp_path / "study.json").read_text())
    assert payload["config"]["problem"] == "scalar-quadratic"
    assert payload["config"]["methods"] == ["mverk41", "sverk41"]
    assert payload["config"]["k"] == [4, 5, 6]
    assert payload["config"]["tableau"] is None
    assert "numpy" in payload["config"]
    assert len(payload["reports"]) == 2
    for rep in payload["reports"]:
        assert 3.5 <= rep["fitted_order"] <= 4.5


def test_run_without_out_prints_only(capsys):
    code = main([
        "run", "--problem", "scalar-quadratic", "--methods", "erk-krogstad4",
        "--k", "5", "--repeats", "1",
    ])
    assert code == 0
    assert "fitted order" in capsys.readouterr().out


def test_run_parallel_timing_mode(tmp_path):
    code = main([
        "run", "--problem", "scalar-quadratic", "--methods", "mverk41,mverk42",
        "--k", "4..5", "--repeats", "1", "--timing", "parallel",
    ])
    assert code == 0


def test_exact_problem_reports_roundoff_floor(capsys):
    """mverk41 is exact on the homogeneous scalar problem, so every row
    sits at the floor and the summary says so instead of fitting."""
    code = main([
        "run", "--problem", "scalar-linear", "--methods", "mverk41",
        "--k", "4..8", "--repeats", "1",
    ])
    assert code == 0
    assert "exact to roundoff" in capsys.readouterr().out


def test_param_override_changes_problem(tmp_path):
    prefix = str(tmp_path / "ac")
    code = main([
        "run", "--problem", "allen-cahn", "--param", "n=16", "--k", "5..6",
        "--t-end", "0.5", "--methods", "mverk41", "--repeats", "1",
        "--out", prefix,
    ])
    assert code == 0
    payload = json.loads((tmp_path / "ac.json").read_text())
    assert payload["config"]["problem_params"]["n"] == 16
    assert payload["config"]["dim"] == 15


def test_unknown_problem_exit_2(capsys):
    assert main(["run", "--problem", "heat", "--k", "4"]) == 2
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "ConfigError"
    assert "heat" in err["message"]


def test_unknown_method_exit_2(capsys):
    code = main([
        "run", "--problem", "scalar-quadratic", "--methods", "rk5", "--k", "4",
    ])
    assert code == 2


def test_unknown_param_exit_2(capsys):
    code = main([
        "run", "--problem", "scalar-quadratic", "--param", "mass=3", "--k", "4",
    ])
    assert code == 2
    assert "mass" in json.loads(capsys.readouterr().err)["message"]


def test_bad_k_range_exit_2():
    assert main(["run", "--problem", "scalar-quadratic", "--k", "8..4"]) == 2
    assert main(["run", "--problem", "scalar-quadratic", "--k", "abc"]) == 2


def test_non_dyadic_span_exit_2(capsys):
    code = main([
        "run", "--problem", "scalar-quadratic", "--k", "4..5",
        "--t-end", "0.3", "--methods", "mverk41", "--repeats", "1",
    ])
    assert code == 2
    assert "whole steps" in json.loads(capsys.readouterr().err)["message"]


def test_small_ref_factor_exit_2():
    code = main([
        "run", "--problem", "scalar-quadratic", "--k", "4..5",
        "--ref-factor", "16", "--methods", "mverk41",
    ])
    assert code == 2


def test_divergence_exit_3(monkeypatch, capsys):
    # wind has no closed form, so the run must build a numerical reference.
    monkeypatch.setattr(
        harness, "reference_solution",
        lambda *a, **k: (_ for _ in ()).throw(DivergenceError("boom", step=3)),
    )
    code = main([
        "run", "--problem", "wind", "--k", "4", "--methods", "mverk41",
    ])
    assert code == 3
    assert json.loads(capsys.readouterr().err)["error"] == "DivergenceError"


def test_unreliable_reference_exit_4(monkeypatch, capsys):
    monkeypatch.setattr(
        harness, "reference_solution",
        lambda *a, **k: (_ for _ in ()).throw(UnreliableReferenceError("gap")),
    )
    code = main([
        "run", "--problem", "wind", "--k", "4", "--methods", "mverk41",
    ])
    assert code == 4
    assert json.loads(capsys.readouterr().err)["error"] == "UnreliableReferenceError"


# ---------------------------------------------------------------------------
# custom tableaux


def test_custom_tableau_drives_generic_stepper(tmp_path):
    path = tmp_path / "three8.json"
    dump(builtin("three-eighths"), path)
    prefix = str(tmp_path / "custom")
    code = main([
        "run", "--problem", "scalar-quadratic", "--methods", "mverk4,sverk4",
        "--k", "4..6", "--repeats", "1", "--tableau", str(path),
        "--out", prefix,
    ])
    assert code == 0
    payload = json.loads((tmp_path / "custom.json").read_text())
    meta = payload["config"]["tableau"]
    assert meta["path"] == str(path)
    assert len(meta["sha256"]) == 64
    for rep in payload["reports"]:
        assert 3.5 <= rep["fitted_order"] <= 4.5


def test_generic_stepper_without_tableau_exit_2(capsys):
    code = main([
        "run", "--problem", "scalar-quadratic", "--methods", "mverk4", "--k", "4",
    ])
    assert code == 2
    assert "tableau" in json.loads(capsys.readouterr().err)["message"]


def test_low_order_tableau_warns_but_runs(tmp_path, capsys):
    t = builtin("classical-rk4")
    b = t.b.copy()
    b[0] += 1e-3
    b[3] -= 1e-3
    path = tmp_path / "off.json"
    dump(Tableau(A=t.A, b=b), path)
    code = main([
        "run", "--problem", "scalar-quadratic", "--methods", "mverk4",
        "--k", "4..5", "--repeats", "1", "--tableau", str(path),
    ])
    captured = capsys.readouterr()
    assert code == 0
    assert "fourth-order" in captured.err


def test_check_tableau_pass(tmp_path, capsys):
    path = tmp_path / "classical.json"
    dump(builtin("classical-rk4"), path)
    code = main(["check-tableau", str(path)])
    out = capsys.readouterr().out
    assert code == 0
    assert out.count("residual") == 8
    assert "satisfied" in out


def test_check_tableau_fail(tmp_path, capsys):
    t = builtin("classical-rk4")
    b = t.b.copy()
    b[1] += 1e-6
    path = tmp_path / "broken.json"
    dump(Tableau(A=t.A, b=b), path)
    code = main(["check-tableau", str(path)])
    assert code == 1
    assert "NOT satisfied" in capsys.readouterr().out


def test_check_tableau_missing_file_exit_2(tmp_path):
    assert main(["check-tableau", str(tmp_path / "nope.json")]) == 2


def test_argparse_usage_errors():
    with pytest.raises(SystemExit) as exc_info:
        main(["run"])  # --problem is required
    assert exc_info.value.code == 2
    with pytest.raises(SystemExit) as exc_info:
        main([])  # a subcommand is required
    assert exc_info.value.code == 2
