"""Tests for the command-line interface."""

import json

import pytest
from click.testing import CliRunner

from rigabench.cli import main
from rigabench.bench import rows_from_csv
from rigabench.problems import gen_knapsack, gen_tsp, load_instance


@pytest.fixture
def runner():
    return CliRunner()


def write_config(path, **overrides):
    data = dict(
        problem="knapsack",
        n=2,
        size=6,
        families=["WS"],
        methods=["two_phase"],
        runs=2,
    )
    data.update(overrides)
    path.write_text(json.dumps(data))
    return path


def test_help_lists_all_subcommands(runner):
    result = runner.invoke(main, ["--help"])
    assert result.exit_code == 0
    for name in ("gen", "run", "report", "serve"):
        assert name in result.output


# ---------------------------------------------------------------------- gen


def test_gen_writes_loadable_knapsack(runner, tmp_path):
    out = tmp_path / "instance.txt"
    result = runner.invoke(
        main,
        ["gen", "--problem", "knapsack", "--size", "8", "-n", "3",
         "--seed", "4", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert load_instance(out) == gen_knapsack(8, 3, seed=4)


def test_gen_writes_loadable_tsp(runner, tmp_path):
    out = tmp_path / "instance.txt"
    result = runner.invoke(
        main,
        ["gen", "--problem", "tsp", "--size", "5", "-n", "2", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert load_instance(out) == gen_tsp(5, 2, seed=0)


def test_gen_rejects_undersized_instance(runner, tmp_path):
    result = runner.invoke(
        main,
        ["gen", "--problem", "tsp", "--size", "2", "-n", "2",
         "--out", str(tmp_path / "x.txt")],
    )
    assert result.exit_code == 2
    assert "four cities" in result.output


# ---------------------------------------------------------------------- run


def test_run_with_config_writes_csv_and_table(runner, tmp_path):
    config = write_config(tmp_path / "config.json")
    out = tmp_path / "results.csv"
    result = runner.invoke(
        main, ["run", "--config", str(config), "--out", str(out)]
    )
    assert result.exit_code == 0, result.output
    assert "two_phase" in result.output and "error_pct" in result.output
    rows = rows_from_csv(out.read_text())
    assert [r.seed for r in rows] == [0, 1]


def test_run_flags_override_config(runner, tmp_path):
    config = write_config(tmp_path / "config.json")
    out = tmp_path / "results.csv"
    result = runner.invoke(
        main,
        ["run", "--config", str(config), "--runs", "1", "--methods", "ils",
         "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    rows = rows_from_csv(out.read_text())
    assert [(r.method, r.seed) for r in rows] == [("ils", 0)]


def test_run_works_from_flags_alone(runner):
    result = runner.invoke(
        main,
        ["run", "--problem", "knapsack", "--size", "6", "-n", "2",
         "--families", "WS", "--methods", "two_phase", "--runs", "1"],
    )
    assert result.exit_code == 0, result.output
    assert "two_phase" in result.output


def test_run_rejects_unregistered_method(runner, tmp_path):
    config = write_config(tmp_path / "config.json", methods=["annealing"])
    result = runner.invoke(main, ["run", "--config", str(config)])
    assert result.exit_code == 2
    assert "unregistered" in result.output


def test_run_rejects_malformed_json(runner, tmp_path):
    config = tmp_path / "config.json"
    config.write_text("{not json")
    result = runner.invoke(main, ["run", "--config", str(config)])
    assert result.exit_code == 2


def test_run_rejects_missing_config_file(runner, tmp_path):
    result = runner.invoke(
        main, ["run", "--config", str(tmp_path / "absent.json")]
    )
    assert result.exit_code == 2


def test_run_exits_3_when_runs_time_out(runner, tmp_path):
    config = write_config(tmp_path / "config.json", timeout_s=1e-9)
    out = tmp_path / "results.csv"
    result = runner.invoke(
        main, ["run", "--config", str(config), "--out", str(out)]
    )
    assert result.exit_code == 3
    assert "timeout" in result.output
    rows = rows_from_csv(out.read_text())  # rows are still written
    assert all("timeout" in r.flags for r in rows)


def test_run_accepts_worker_flag(runner, tmp_path):
    config = write_config(tmp_path / "config.json")
    result = runner.invoke(
        main, ["run", "--config", str(config), "--workers", "2"]
    )
    assert result.exit_code == 0, result.output


# ------------------------------------------------------------------- report


def test_report_prints_aggregate_table(runner, tmp_path):
    config = write_config(tmp_path / "config.json")
    out = tmp_path / "results.csv"
    assert runner.invoke(
        main, ["run", "--config", str(config), "--out", str(out)]
    ).exit_code == 0
    result = runner.invoke(main, ["report", str(out)])
    assert result.exit_code == 0, result.output
    assert "two_phase" in result.output
    assert "WS" in result.output


def test_report_rejects_garbage_csv(runner, tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("just,some\nnoise,1\n")
    result = runner.invoke(main, ["report", str(bad)])
    assert result.exit_code == 2


def test_report_rejects_empty_csv(runner, tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("seed,method,family,n,size,time_s,queries,error_pct,flags\n")
    result = runner.invoke(main, ["report", str(empty)])
    assert result.exit_code == 2
    assert "no runs" in result.output


# -------------------------------------------------------------------- serve


def test_serve_help_mentions_persistence(runner):
    result = runner.invoke(main, ["serve", "--help"])
    assert result.exit_code == 0
    assert "--state-dir" in result.output
