"""Seeded experiment harness: runs elicitation methods over generated
instances and emits per-run CSV rows plus aggregate metric tables."""

import csv
import io
import math
import os
import time
from collections.abc import Callable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

from .baselines import IlsConfig, SimulatedDm, gen_hidden, ils_run, two_phase_run
from .core import RigaConfig, RunTrace, riga_kcss_run, riga_run, riga_s_run
from .prefs import Family, PreferenceModel
from .problems import (
    Instance,
    InstanceTooLargeError,
    Solution,
    enumerate_pareto_small,
    gen_knapsack,
    gen_tsp,
    solve_exact_small,
)

WORKERS_ENV = "RIGABENCH_WORKERS"
TIMEOUT_FLAG = "timeout"
CSV_COLUMNS = (
    "seed",
    "method",
    "family",
    "n",
    "size",
    "time_s",
    "queries",
    "error_pct",
    "flags",
)

_RIGA_RUNNERS = {"riga": riga_run, "riga_kcss": riga_kcss_run, "riga_s": riga_s_run}
METHOD_NAMES = ("riga", "riga_kcss", "riga_s", "ils", "two_phase")
_PROBLEMS = ("knapsack", "tsp")


def _allowed_options(method: str) -> frozenset[str]:
    if method in _RIGA_RUNNERS:
        fixed = {"family", "orientation", "seed"}
        return frozenset(f.name for f in fields(RigaConfig)) - fixed
    if method == "ils":
        return frozenset(f.name for f in fields(IlsConfig)) - {"seed"}
    return frozenset({"delta"})


@dataclass(frozen=True)
class ExperimentConfig:
    """One benchmark campaign: a problem shape, the preference families and
    methods to cross, and the seed list that makes every run reproducible.

    ``seeds`` defaults to ``range(runs)``; when given explicitly its length
    must equal ``runs``.  Per-method options (``method_configs``) may not
    set seeds, families, or orientations — those come from the campaign.
    """

    problem: str
    n: int
    size: int
    families: tuple[Family, ...]
    methods: tuple[str, ...]
    method_configs: dict[str, dict] = field(default_factory=dict)
    runs: int = 50
    seeds: tuple[int, ...] | None = None
    timeout_s: float | None = None

    def __post_init__(self) -> None:
        if self.problem not in _PROBLEMS:
            raise ValueError(f"unknown problem {self.problem!r}; pick from {_PROBLEMS}")
        if self.n < 2:
            raise ValueError("need at least two objectives")
        minimum = 4 if self.problem == "tsp" else 2
        if self.size < minimum:
            raise ValueError(f"{self.problem} instances need size >= {minimum}")
        object.__setattr__(self, "families", tuple(Family(f) for f in self.families))
        if not self.families:
            raise ValueError("need at least one family")
        if len(set(self.families)) != len(self.families):
            raise ValueError("duplicate families")
        object.__setattr__(self, "methods", tuple(self.methods))
        if not self.methods:
            raise ValueError("need at least one method")
        unknown = [m for m in self.methods if m not in METHOD_NAMES]
        if unknown:
            raise ValueError(f"unregistered methods {unknown}; pick from {METHOD_NAMES}")
        if len(set(self.methods)) != len(self.methods):
            raise ValueError("duplicate methods")
        configs = {str(k): dict(v) for k, v in self.method_configs.items()}
        object.__setattr__(self, "method_configs", configs)
        for method, options in configs.items():
            if method not in METHOD_NAMES:
                raise ValueError(f"method_configs for unregistered method {method!r}")
            extra = set(options) - _allowed_options(method)
            if extra:
                raise ValueError(
                    f"unknown {method} options {sorted(extra)}; "
                    f"allowed: {sorted(_allowed_options(method))}"
                )
        if self.runs < 1:
            raise ValueError("runs must be at least 1")
        if self.seeds is None:
            object.__setattr__(self, "seeds", tuple(range(self.runs)))
        else:
            object.__setattr__(self, "seeds", tuple(int(s) for s in self.seeds))
            if len(self.seeds) != self.runs:
                raise ValueError(
                    f"{len(self.seeds)} seeds given but runs={self.runs}; "
                    "they must match when both are set"
                )
        if self.timeout_s is not None and self.timeout_s <= 0:
            raise ValueError("timeout_s must be positive when set")

    def to_json(self) -> dict:
        return {
            "problem": self.problem,
            "n": self.n,
            "size": self.size,
            "families": [f.value for f in self.families],
            "methods": list(self.methods),
            "method_configs": {k: dict(v) for k, v in self.method_configs.items()},
            "runs": self.runs,
            "seeds": list(self.seeds),
            "timeout_s": self.timeout_s,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown config keys {sorted(unknown)}")
        for key in ("problem", "n", "size", "families", "methods"):
            if key not in data:
                raise ValueError(f"config is missing required key {key!r}")
        seeds = data.get("seeds")
        runs = data.get("runs", len(seeds) if seeds is not None else 50)
        return cls(
            problem=str(data["problem"]),
            n=int(data["n"]),
            size=int(data["size"]),
            families=tuple(Family(f) for f in data["families"]),
            methods=tuple(str(m) for m in data["methods"]),
            method_configs={
                str(k): dict(v) for k, v in data.get("method_configs", {}).items()
            },
            runs=int(runs),
            seeds=None if seeds is None else tuple(int(s) for s in seeds),
            timeout_s=None if data.get("timeout_s") is None else float(data["timeout_s"]),
        )


@dataclass(frozen=True)
class RunRow:
    """One method execution on one seeded instance; the CSV row unit."""

    seed: int
    method: str
    family: Family
    n: int
    size: int
    time_s: float
    queries: int
    error_pct: float
    flags: tuple[str, ...] = ()


@dataclass(frozen=True)
class MetricsRow:
    """Aggregate over one (method, family) cell; timed-out runs are counted
    but excluded from every mean."""

    method: str
    family: Family
    n: int
    mean_time_s: float
    mean_queries: float
    mean_error_pct: float
    completed: int
    timed_out: int

    def __post_init__(self) -> None:
        if self.mean_error_pct < 0:
            raise ValueError("mean error cannot be negative")
        if self.completed < 0 or self.timed_out < 0:
            raise ValueError("counts cannot be negative")


@dataclass(frozen=True)
class ExperimentResult:
    """Per-run rows in execution order plus their aggregation."""

    rows: tuple[RunRow, ...]
    metrics: tuple[MetricsRow, ...]

    @property
    def timed_out(self) -> int:
        return sum(1 for r in self.rows if TIMEOUT_FLAG in r.flags)

    def csv(self) -> str:
        return rows_to_csv(self.rows)


# ---------------------------------------------------------------------------
# Metrics


def error_pct(returned: Solution, instance: Instance, hidden: PreferenceModel) -> float:
    """Gap to the hidden-preference optimum as a percentage of its value."""
    try:
        optimum = solve_exact_small(instance, hidden)
    except InstanceTooLargeError as exc:
        raise InstanceTooLargeError(
            f"{exc}; error_pct needs the exact oracle, benchmark a smaller instance"
        ) from exc
    best = hidden.evaluate(optimum.cost)
    value = hidden.evaluate(returned.cost)
    if best == 0.0:
        return 0.0 if value == 0.0 else math.inf
    return 100.0 * abs(value - best) / abs(best)


def _mean(values: Sequence[float]) -> float:
    return math.fsum(values) / len(values) if values else math.nan


def aggregate(rows: Sequence[RunRow]) -> tuple[MetricsRow, ...]:
    """Group rows by (method, family) in first-appearance order and average
    the completed runs of each group."""
    groups: dict[tuple[str, Family], list[RunRow]] = {}
    for row in rows:
        groups.setdefault((row.method, row.family), []).append(row)
    out = []
    for (method, family), group in groups.items():
        ok = [r for r in group if TIMEOUT_FLAG not in r.flags]
        out.append(
            MetricsRow(
                method=method,
                family=family,
                n=group[0].n,
                mean_time_s=_mean([r.time_s for r in ok]),
                mean_queries=_mean([float(r.queries) for r in ok]),
                mean_error_pct=_mean([r.error_pct for r in ok]),
                completed=len(ok),
                timed_out=len(group) - len(ok),
            )
        )
    return tuple(out)


# ---------------------------------------------------------------------------
# CSV emission


def rows_to_csv(rows: Sequence[RunRow]) -> str:
    """Serialize rows; floats use repr so parsing them back is exact."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in rows:
        writer.writerow(
            [
                r.seed,
                r.method,
                r.family.value,
                r.n,
                r.size,
                repr(r.time_s),
                r.queries,
                repr(r.error_pct),
                ";".join(r.flags),
            ]
        )
    return buf.getvalue()


def rows_from_csv(text: str) -> tuple[RunRow, ...]:
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != list(CSV_COLUMNS):
        raise ValueError(
            f"CSV columns {reader.fieldnames} do not match {list(CSV_COLUMNS)}"
        )
    rows = []
    for record in reader:
        if any(v is None for v in record.values()):
            raise ValueError(f"short CSV row: {record}")
        rows.append(
            RunRow(
                seed=int(record["seed"]),
                method=record["method"],
                family=Family(record["family"]),
                n=int(record["n"]),
                size=int(record["size"]),
                time_s=float(record["time_s"]),
                queries=int(record["queries"]),
                error_pct=float(record["error_pct"]),
                flags=tuple(f for f in record["flags"].split(";") if f),
            )
        )
    return tuple(rows)


def _format_cell(value: float, digits: int) -> str:
    return "-" if math.isnan(value) else f"{value:.{digits}f}"


def format_table(metrics: Sequence[MetricsRow]) -> str:
    """Plain-text aggregate table, one line per (method, family) cell."""
    header = ("method", "family", "n", "runs", "timeouts", "time_s", "queries", "error_pct")
    body = [
        (
            m.method,
            m.family.value,
            str(m.n),
            str(m.completed),
            str(m.timed_out),
            _format_cell(m.mean_time_s, 3),
            _format_cell(m.mean_queries, 1),
            _format_cell(m.mean_error_pct, 3),
        )
        for m in metrics
    ]
    widths = [max(len(row[c]) for row in [header, *body]) for c in range(len(header))]
    lines = [
        "  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip()
        for row in [header, *body]
    ]
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# Execution


def _gen_instance(problem: str, size: int, n: int, seed: int) -> Instance:
    if problem == "knapsack":
        return gen_knapsack(size, n, seed)
    return gen_tsp(size, n, seed)


def _dispatch(
    method: str,
    instance: Instance,
    family: Family,
    dm: SimulatedDm,
    options: Mapping,
    seed: int,
    pareto: list[Solution] | None,
) -> tuple[Solution, RunTrace]:
    if method in _RIGA_RUNNERS:
        config = RigaConfig.default_for(instance, family, seed=seed, **options)
        return _RIGA_RUNNERS[method](instance, config, dm)
    if method == "ils":
        return ils_run(instance, family, dm, IlsConfig(seed=seed, **options))
    return two_phase_run(
        instance, family, dm, delta=float(options.get("delta", 0.0)), pareto=pareto
    )


def _run_single(
    config: ExperimentConfig,
    method: str,
    family: Family,
    seed: int,
    clock: Callable[[], float],
) -> RunRow:
    instance = _gen_instance(config.problem, config.size, config.n, seed)
    hidden = gen_hidden(family, config.n, instance.orientation, seed)
    dm = SimulatedDm(hidden)
    options = config.method_configs.get(method, {})
    # The Pareto front is an input to the comparison phase, not part of the
    # timed method, matching how its generation cost is reported.
    pareto = enumerate_pareto_small(instance) if method == "two_phase" else None
    start = clock()
    solution, trace = _dispatch(method, instance, family, dm, options, seed, pareto)
    elapsed = clock() - start
    gap = error_pct(solution, instance, hidden)
    timed_out = config.timeout_s is not None and elapsed > config.timeout_s
    return RunRow(
        seed=seed,
        method=method,
        family=family,
        n=config.n,
        size=config.size,
        time_s=elapsed,
        queries=trace.total_queries,
        error_pct=gap,
        flags=(TIMEOUT_FLAG,) if timed_out else (),
    )


def run_experiment(
    config: ExperimentConfig,
    workers: int | None = None,
    clock: Callable[[], float] = time.perf_counter,
) -> ExperimentResult:
    """Run every (method, family, seed) combination on a fresh instance and
    fresh hidden decision maker; rows come back in that nesting order
    regardless of worker count.

    ``workers`` defaults to the RIGABENCH_WORKERS environment variable (1 if
    unset).  ``clock`` is injectable so timing-sensitive behavior is testable;
    runs that exceed ``config.timeout_s`` are flagged, not interrupted.
    """
    if workers is None:
        workers = int(os.environ.get(WORKERS_ENV, "1"))
    if workers < 1:
        raise ValueError("workers must be at least 1")
    tasks = [
        (method, family, seed)
        for method in config.methods
        for family in config.families
        for seed in config.seeds
    ]
    if workers == 1:
        rows = [_run_single(config, *task, clock) for task in tasks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda task: _run_single(config, *task, clock), tasks))
    return ExperimentResult(tuple(rows), aggregate(rows))
