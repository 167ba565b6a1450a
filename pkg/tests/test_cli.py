import json

import pytest

from adaptive_qae import cli
from adaptive_qae.bench import AggregateRow, load_report


def _json_out(capsys):
    return json.loads(capsys.readouterr().out)


def test_estimate_exact(capsys):
    code = cli.main(["estimate", "--p", "0.2", "--epsilon", "1e-3", "--exact-oracle", "--assume-p-le-half"])
    out = _json_out(capsys)
    assert code == 0
    assert out["n_oracle"] == 37900 and out["total_shots"] == 700
    assert out["p_lo"] <= 0.2 <= out["p_hi"] and out["width"] <= 1e-3
    assert [r["m"] for r in out["rounds"]] == [0, 1, 4, 17, 67, 289]


@pytest.mark.parametrize("method", ["mlae", "iqae_cp", "iqae_ch"])
def test_estimate_baselines(capsys, method):
    assert cli.main(["estimate", "--p", "0.3", "--epsilon", "1e-3", "--method", method, "--seed", "4"]) == 0
    out = _json_out(capsys)
    assert out["p_lo"] <= out["estimate"] <= out["p_hi"]


@pytest.mark.parametrize(
    "argv",
    [
        ["estimate", "--p", "1.5", "--epsilon", "1e-3"],
        ["estimate", "--p", "0.2", "--epsilon", "0"],
        ["estimate", "--p", "0.2", "--epsilon", "1e-3", "--K", "4"],
        ["estimate", "--p", "0.2"],
        ["bench", "--scenario", "nope", "--out", "x.csv"],
        ["bench", "--scenario", "uniform_p", "--out", "x.csv", "--methods", "qpe"],
        ["fit", "--in", "/nonexistent/report.csv", "--y", "n_oracle"],
    ],
)
def test_config_errors_exit_2(argv, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    with pytest.raises(SystemExit) as exc:
        raise SystemExit(cli.main(argv))
    assert exc.value.code == 2


def test_bench_then_fit(tmp_path, capsys):
    out = tmp_path / "b.csv"
    argv = [
        "bench", "--scenario", "uniform_p", "--out", str(out), "--epsilons", "1e-3,1e-4,1e-5",
        "--n-p-samples", "5", "--methods", "adaptive,iqae_cp", "--seed", "3",
    ]
    assert cli.main(argv) == 0
    rows, meta = load_report(out)
    assert {r.method for r in rows} == {"adaptive", "iqae_cp"} and len(rows) == 6
    assert meta["master_seed"] == "3"

    # several methods without --method is ambiguous
    assert cli.main(["fit", "--in", str(out), "--y", "n_oracle"]) == 2
    capsys.readouterr()
    assert cli.main(["fit", "--in", str(out), "--y", "n_oracle", "--method", "adaptive"]) == 0
    fit = _json_out(capsys)
    assert fit["n_points"] == 3 and -1.3 < fit["slope"] < -0.7


def test_bench_json(tmp_path):
    out = tmp_path / "b.json"
    argv = [
        "bench", "--scenario", "boundary_p_025", "--out", str(out), "--format", "json",
        "--epsilons", "1e-3", "--n-p-samples", "3", "--exact-oracle",
    ]
    assert cli.main(argv) == 0
    payload = json.loads(out.read_text())
    assert [r["method"] for r in payload["rows"]] == ["adaptive", "iqae_cp"]
    assert payload["metadata"]["exact_oracle"] is True


def test_bench_failure_threshold(tmp_path, monkeypatch):
    rows = [AggregateRow("adaptive", 1e-3, 8, 1.0, 1.0, 1.0, 1.0, 1e-4, 0.9, 0.8, 2)]
    monkeypatch.setattr(cli, "run_experiment", lambda config, workers=1: rows)
    argv = ["bench", "--scenario", "uniform_p", "--out", str(tmp_path / "f.csv")]
    assert cli.main(argv) == 3
    rows[0] = AggregateRow("adaptive", 1e-3, 9, 1.0, 1.0, 1.0, 1.0, 1e-4, 0.9, 0.8, 1)
    assert cli.main(argv) == 0


def test_module_entry_point():
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "adaptive_qae", "estimate", "--p", "0.1", "--epsilon", "1e-2", "--exact-oracle"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["p_lo"] <= 0.1
