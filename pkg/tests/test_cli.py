"""End-to-end command-line tests driving ``orbitq.cli.main`` in process."""

import json

import pytest

from orbitq.cli import main

BENCH_FLAGS = ["--lambda0", "0.15", "--lambda1", "0.05", "--lambda2", "0.01",
               "--mu", "0.44", "--alpha1", "0.25", "--alpha2", "0.1"]


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def run_json(capsys, argv):
    code, out, err = run(capsys, argv)
    assert code == 0, err
    return json.loads(out)


def data_rows(text):
    """CSV lines with the leading # comments stripped."""
    return [line for line in text.strip().splitlines()
            if not line.startswith("#")]


@pytest.fixture
def params_file(tmp_path):
    path = tmp_path / "params.json"
    path.write_text(json.dumps({
        "lambda0": 0.15, "lambda1": 0.05, "lambda2": 0.01,
        "mu": 0.44, "alpha1": 0.25, "alpha2": 0.1,
    }))
    return str(path)


# -- stability ---------------------------------------------------------------


def test_stability_inline_flags(capsys):
    payload = run_json(capsys, ["stability"] + BENCH_FLAGS)
    assert payload["stability"]["stable"] is True
    assert payload["stability"]["criterion1"] is True
    assert payload["derived"]["rho"] == pytest.approx(0.763636, abs=1e-6)
    assert payload["provenance"]["params"]["mu"] == 0.44
    assert set(payload["provenance"]["overrides"]) == {
        "lambda0", "lambda1", "lambda2", "mu", "alpha1", "alpha2"}


def test_stability_file_plus_override(capsys, params_file):
    payload = run_json(
        capsys, ["stability", "--params", params_file, "--mu", "0.5"])
    assert payload["provenance"]["params"]["mu"] == 0.5
    assert payload["provenance"]["overrides"] == {"mu": 0.5}
    assert payload["provenance"]["params"]["lambda0"] == 0.15


def test_stability_csv_format(capsys):
    code, out, _ = run(capsys, ["stability", "--format", "csv"] + BENCH_FLAGS)
    assert code == 0
    assert out.startswith("# tool: orbitq")
    rows = data_rows(out)
    assert rows[0] == "key,value"
    keys = {line.split(",")[0] for line in rows[1:]}
    assert "stability.stable" in keys
    assert "derived.rho" in keys


def test_incomplete_rate_flags_is_an_input_error(capsys):
    code, _, err = run(capsys, ["stability", "--mu", "0.44"])
    assert code == 2
    assert "missing" in err


def test_missing_params_file(capsys):
    code, _, err = run(capsys, ["stability", "--params", "/no/such/file.json"])
    assert code == 2
    assert "cannot read" in err


# -- decay -------------------------------------------------------------------


def test_decay_profile_json(capsys):
    payload = run_json(capsys, ["decay"] + BENCH_FLAGS)
    assert payload["profile"]["decay_rate"] == pytest.approx(
        0.583140, abs=1e-6)
    assert payload["marginal_sum"] is not None


def test_decay_marginal_needs_balance(capsys):
    # strongly pooled but not strongly balanced: profile fine, no marginal
    flags = ["--lambda0", "0.04", "--lambda1", "0.01", "--lambda2", "0.01",
             "--mu", "0.44", "--alpha1", "0.25", "--alpha2", "0.25"]
    payload = run_json(capsys, ["decay"] + flags)
    assert payload["marginal_sum"] is None


def test_decay_outside_pooled_regime_exits_3(capsys):
    flags = ["--lambda0", "0.01", "--lambda1", "0.12", "--lambda2", "0.01",
             "--mu", "0.44", "--alpha1", "0.25", "--alpha2", "0.1"]
    code, _, err = run(capsys, ["decay"] + flags)
    assert code == 3
    assert "pool" in err


def test_decay_table(capsys):
    code, out, _ = run(capsys, ["decay", "--table", "--m-max", "4",
                                "--l-range=-2..2"] + BENCH_FLAGS)
    assert code == 0
    assert "# decay_rate: 0.58314" in out
    rows = data_rows(out)
    assert rows[0] == "m,l,busy,idle"
    assert len(rows) == 1 + 5 * 5


def test_decay_table_bad_range(capsys):
    code, _, err = run(capsys, ["decay", "--table", "--l-range", "oops"]
                       + BENCH_FLAGS)
    assert code == 2
    assert "bad range" in err


# -- approx ------------------------------------------------------------------


def test_approx_grid_csv(capsys):
    code, out, _ = run(capsys, ["approx", "--i-max", "5", "--j-max", "5"]
                       + BENCH_FLAGS)
    assert code == 0
    rows = data_rows(out)
    assert rows[0] == "i,j,server,value,tag"
    assert len(rows) == 1 + 6 * 6 * 2
    tags = {line.rsplit(",", 1)[1] for line in rows[1:]}
    assert tags == {"near-origin", "asymptotic"}


def test_approx_ratio_curve(capsys):
    code, out, _ = run(capsys, ["approx", "--ratio-k-max", "10"]
                       + BENCH_FLAGS)
    assert code == 0
    rows = data_rows(out)
    assert rows[0] == "k,ratio"
    assert len(rows) == 11
    assert rows[1].startswith("0,")


# -- solve -------------------------------------------------------------------


def test_solve_writes_grid_and_diagnostics(capsys, tmp_path):
    grid_path = tmp_path / "grid.csv"
    diag_path = tmp_path / "diag.json"
    with pytest.warns(UserWarning, match="truncation-edge"):
        code, _, _ = run(capsys, ["solve", "--n-max", "12",
                                  "--out", str(grid_path),
                                  "--diagnostics", str(diag_path)]
                         + BENCH_FLAGS)
    assert code == 0
    rows = data_rows(grid_path.read_text())
    assert rows[0] == "i,j,k,probability"
    assert len(rows) == 1 + 13 * 13 * 2
    diag = json.loads(diag_path.read_text())
    assert diag["n_max"] == 12
    assert diag["residual_norm"] < 1e-10
    assert "provenance" in diag


# -- simulate ----------------------------------------------------------------


def test_simulate_scenario(capsys):
    payload = run_json(capsys, ["simulate", "--scenario", "criterion1-pooled",
                                "--horizon", "200", "--seed", "9"])
    assert payload["scenario"] == "criterion1-pooled"
    assert payload["stability"]["stable"] is True
    assert payload["summary"]["n_events"] > 0
    assert payload["summary"]["rng"] == "splitmix64"


def test_simulate_inline_with_trajectory(capsys, tmp_path):
    traj_path = tmp_path / "traj.csv"
    payload = run_json(capsys, ["simulate", "--horizon", "50", "--seed", "4",
                                "--trajectory-out", str(traj_path)]
                       + BENCH_FLAGS)
    assert payload["summary"]["warmup"] == 25.0
    text = traj_path.read_text()
    assert text.startswith("# tool: orbitq")
    rows = data_rows(text)
    assert rows[0] == "time,n1,n2,busy"
    assert len(rows) == 1 + 51


def test_simulate_rejects_bad_warmup(capsys):
    code, _, err = run(capsys, ["simulate", "--horizon", "10",
                                "--warmup", "10"] + BENCH_FLAGS)
    assert code == 2
    assert "warmup" in err


# -- validate ----------------------------------------------------------------


def test_validate_passes_on_benchmark(capsys, tmp_path):
    report_path = tmp_path / "report.json"
    code, out, _ = run(capsys, ["validate", "--out", str(report_path)])
    assert code == 0
    assert "INFO" in out
    assert "FAIL" not in out
    summary_line = out.strip().splitlines()[-1]
    assert summary_line.endswith("checks passed")
    n_pass, n_total = summary_line.split()[0].split("/")
    assert n_pass == n_total
    report = json.loads(report_path.read_text())
    assert report["passed"] is True
    assert len(report["checks"]) == int(n_total)


def test_validate_outside_regime_exits_3(capsys):
    code, _, err = run(capsys, ["validate", "--lambda0", "0.001"])
    assert code == 3
    assert err.startswith("error:")


# -- sweep -------------------------------------------------------------------


def test_sweep_grid(capsys, tmp_path):
    out_dir = tmp_path / "sweep"
    code, out, _ = run(capsys, [
        "sweep", "--vary", "mu=0.44,0.5", "--out-dir", str(out_dir), "--",
        "stability", "--lambda0", "0.15", "--lambda1", "0.05",
        "--lambda2", "0.01", "--alpha1", "0.25", "--alpha2", "0.1",
        "--mu", "0.44",
    ])
    assert code == 0
    assert "wrote 2 points" in out
    index = json.loads((out_dir / "index.json").read_text())
    assert index["command"] == "stability"
    assert [pt["overrides"]["mu"] for pt in index["points"]] == [0.44, 0.5]
    second = json.loads((out_dir / "stability_001.json").read_text())
    assert second["provenance"]["params"]["mu"] == 0.5


def test_sweep_needs_wrapped_command(capsys, tmp_path):
    code, _, err = run(capsys, ["sweep", "--vary", "mu=0.4",
                                "--out-dir", str(tmp_path)])
    assert code == 2
    assert "wrapped command" in err


def test_sweep_rejects_unknown_parameter(capsys, tmp_path):
    code, _, err = run(capsys, ["sweep", "--vary", "nu=0.4",
                                "--out-dir", str(tmp_path), "--",
                                "stability"])
    assert code == 2
    assert "unknown parameter" in err


# -- parser-level behavior ---------------------------------------------------


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.startswith("orbitq ")


def test_unknown_subcommand_exits_2(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
