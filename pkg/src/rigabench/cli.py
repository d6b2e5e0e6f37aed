"""Command-line entry points: instance generation, benchmark runs, report
tables, and the elicitation session service."""

import json
import sys
from pathlib import Path

import click

from .bench import (
    WORKERS_ENV,
    ExperimentConfig,
    aggregate,
    format_table,
    rows_from_csv,
    run_experiment,
)
from .problems import gen_knapsack, gen_tsp, save_instance


class ConfigError(click.ClickException):
    """Invalid configuration or input file; exits with status 2."""

    exit_code = 2


def _split_csv_flag(value: str | None) -> list[str] | None:
    if value is None:
        return None
    return [part.strip() for part in value.split(",") if part.strip()]


@click.group()
def main() -> None:
    """Interactive preference-elicitation workbench."""


@main.command()
@click.option(
    "--problem",
    type=click.Choice(["knapsack", "tsp"]),
    required=True,
    help="Instance kind to generate.",
)
@click.option("--size", type=int, required=True, help="Item or city count.")
@click.option("--objectives", "-n", "n", type=int, required=True, help="Objective count.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, writable=True, path_type=Path),
    required=True,
    help="Instance file to write.",
)
def gen(problem: str, size: int, n: int, seed: int, out: Path) -> None:
    """Generate a seeded random instance file."""
    try:
        if problem == "knapsack":
            instance = gen_knapsack(size, n, seed)
        else:
            instance = gen_tsp(size, n, seed)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    save_instance(instance, out)
    click.echo(f"wrote {problem} size={size} n={n} seed={seed} to {out}")


@main.command()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    default=None,
    help="JSON experiment config; flags below override its fields.",
)
@click.option("--problem", type=click.Choice(["knapsack", "tsp"]), default=None)
@click.option("--size", type=int, default=None)
@click.option("--objectives", "-n", "n", type=int, default=None)
@click.option("--families", default=None, help="Comma-separated family names.")
@click.option("--methods", default=None, help="Comma-separated method names.")
@click.option("--runs", type=int, default=None)
@click.option("--timeout-s", type=float, default=None)
@click.option(
    "--out",
    type=click.Path(dir_okay=False, writable=True, path_type=Path),
    default=None,
    help="Write the per-run CSV here.",
)
@click.option("--workers", type=int, default=None, help=f"Overrides ${WORKERS_ENV}.")
def run(
    config_path: Path | None,
    problem: str | None,
    size: int | None,
    n: int | None,
    families: str | None,
    methods: str | None,
    runs: int | None,
    timeout_s: float | None,
    out: Path | None,
    workers: int | None,
) -> None:
    """Run a benchmark campaign and print the aggregate table.

    Exits 0 on success, 2 on a configuration problem, 3 when the only
    failures were timed-out runs.
    """
    data: dict = {}
    if config_path is not None:
        try:
            data = json.loads(config_path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read {config_path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"{config_path} must hold a JSON object")
    overrides = {
        "problem": problem,
        "size": size,
        "n": n,
        "families": _split_csv_flag(families),
        "methods": _split_csv_flag(methods),
        "runs": runs,
        "timeout_s": timeout_s,
    }
    data.update({k: v for k, v in overrides.items() if v is not None})
    try:
        config = ExperimentConfig.from_json(data)
        result = run_experiment(config, workers=workers)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    if out is not None:
        out.write_text(result.csv())
        click.echo(f"wrote {len(result.rows)} rows to {out}", err=True)
    click.echo(format_table(result.metrics))
    if result.timed_out:
        click.echo(f"{result.timed_out} run(s) exceeded the timeout", err=True)
        sys.exit(3)


@main.command()
@click.argument(
    "csv_path", type=click.Path(exists=True, dir_okay=False, path_type=Path)
)
def report(csv_path: Path) -> None:
    """Aggregate a per-run CSV into the metric table."""
    try:
        rows = rows_from_csv(csv_path.read_text())
    except (OSError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    if not rows:
        raise ConfigError(f"{csv_path} holds no runs")
    click.echo(format_table(aggregate(rows)))


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", type=int, default=8000, show_default=True)
@click.option(
    "--state-dir",
    type=click.Path(file_okay=False, path_type=Path),
    default=None,
    envvar="RIGABENCH_STATE_DIR",
    help="Directory for session persistence (defaults to in-memory only).",
)
def serve(host: str, port: int, state_dir: Path | None) -> None:
    """Serve the interactive elicitation session API over HTTP."""
    import uvicorn

    from .service import build_app

    uvicorn.run(build_app(state_dir=state_dir), host=host, port=port)


if __name__ == "__main__":
    main()
