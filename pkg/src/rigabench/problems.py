"""Multi-objective problem instances, sub-solvers, and Pareto tooling.

Knapsack instances use unit item weights (a cardinality budget), so the
capacity is an item count and weighted-sum greedy selection is exact. TSP
instances carry one symmetric integer cost matrix per objective. A catalog
instance is a bare list of alternatives, useful when the alternatives are
already enumerated.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .prefs import CostVector, Family, Orientation, PreferenceModel, featurize_rows

EXACT_SUBSET_LIMIT = 10_000_000
EXACT_TSP_CITIES = 10
KNAPSACK_EVALS_PER_ITEM = 50
TSP_SWEEP_BUDGET = 30
IMPROVE_TOL = 1e-12


class InstanceParseError(ValueError):
    """Malformed instance file; the message names the offending line."""


class InstanceTooLargeError(ValueError):
    """Exhaustive enumeration would exceed the size guards."""


@dataclass(frozen=True)
class KnapsackInstance:
    """Unit-weight knapsack: pick ``capacity`` items maximizing value."""

    items: tuple[tuple[float, ...], ...]
    capacity: int
    seed: int = 0

    def __post_init__(self) -> None:
        items = tuple(tuple(float(v) for v in row) for row in self.items)
        object.__setattr__(self, "items", items)
        if len(items) < 2:
            raise ValueError("need at least two items")
        n = len(items[0])
        if n < 2 or any(len(row) != n for row in items):
            raise ValueError("items must share one dimension of at least 2")
        if any(v < 1 for row in items for v in row):
            raise ValueError("item values must be positive integers")
        if not 0 <= self.capacity <= len(items):
            raise ValueError("capacity must be between 0 and the item count")

    @property
    def problem(self) -> str:
        return "knapsack"

    @property
    def orientation(self) -> Orientation:
        return Orientation.MAXIMIZE

    @property
    def n(self) -> int:
        return len(self.items[0])

    @property
    def size(self) -> int:
        return len(self.items)

    def value_matrix(self) -> np.ndarray:
        return np.asarray(self.items, dtype=float)


@dataclass(frozen=True)
class TspInstance:
    """Symmetric multi-objective TSP: one cost matrix per objective."""

    costs: tuple[tuple[tuple[float, ...], ...], ...]
    seed: int = 0

    def __post_init__(self) -> None:
        layers = tuple(
            tuple(tuple(float(v) for v in row) for row in layer) for layer in self.costs
        )
        object.__setattr__(self, "costs", layers)
        if len(layers) < 2:
            raise ValueError("need at least two objectives")
        size = len(layers[0])
        if size < 2:
            raise ValueError("need at least two cities")
        for L, layer in enumerate(layers):
            if len(layer) != size or any(len(row) != size for row in layer):
                raise ValueError(f"cost layer {L} is not {size}x{size}")
            for r in range(size):
                for c in range(r + 1, size):
                    if layer[r][c] != layer[c][r]:
                        raise ValueError(
                            f"cost layer {L} is asymmetric at ({r},{c})"
                        )
            if any(v < 0 for row in layer for v in row):
                raise ValueError(f"cost layer {L} has negative entries")

    @property
    def problem(self) -> str:
        return "tsp"

    @property
    def orientation(self) -> Orientation:
        return Orientation.MINIMIZE

    @property
    def n(self) -> int:
        return len(self.costs)

    @property
    def size(self) -> int:
        return len(self.costs[0])

    def cost_array(self) -> np.ndarray:
        return np.asarray(self.costs, dtype=float)


@dataclass(frozen=True)
class CatalogInstance:
    """Explicit list of alternatives with a fixed optimization sense."""

    options: tuple[CostVector, ...]
    orientation: Orientation

    def __post_init__(self) -> None:
        if not self.options:
            raise ValueError("catalog must offer at least one option")
        n = self.options[0].n
        if any(y.n != n for y in self.options):
            raise ValueError("catalog options must share one dimension")

    @property
    def problem(self) -> str:
        return "catalog"

    @property
    def n(self) -> int:
        return self.options[0].n

    @property
    def size(self) -> int:
        return len(self.options)


Instance = KnapsackInstance | TspInstance | CatalogInstance


@dataclass(frozen=True)
class Solution:
    """A feasible solution: chosen item indices, a tour, or a catalog pick."""

    encoding: tuple[int, ...]
    cost: CostVector
    budget_exhausted: bool = False


# ---------------------------------------------------------------------------
# Generation and file I/O


def gen_knapsack(items: int, n: int, seed: int) -> KnapsackInstance:
    """Random instance: values uniform in {1..1000}^n, capacity items/2."""
    if items < 2:
        raise ValueError("need at least two items")
    rng = np.random.default_rng(seed)
    values = rng.integers(1, 1001, size=(items, n))
    return KnapsackInstance(
        tuple(tuple(float(v) for v in row) for row in values), items // 2, seed
    )


def gen_tsp(cities: int, n: int, seed: int) -> TspInstance:
    """Random instance: n independent symmetric cost layers in {1..1000}."""
    if cities < 4:
        raise ValueError("need at least four cities")
    rng = np.random.default_rng(seed)
    layers = []
    for _ in range(n):
        m = np.zeros((cities, cities), dtype=float)
        iu = np.triu_indices(cities, k=1)
        m[iu] = rng.integers(1, 1001, size=len(iu[0]))
        m = m + m.T
        layers.append(tuple(tuple(float(v) for v in row) for row in m))
    return TspInstance(tuple(layers), seed)


def save_instance(instance: KnapsackInstance | TspInstance, path: str | Path) -> None:
    """Plain-text dump: header ``problem n size seed``, then the data rows."""
    lines = [f"{instance.problem} {instance.n} {instance.size} {instance.seed}"]
    if isinstance(instance, KnapsackInstance):
        for row in instance.items:
            lines.append(" ".join(str(int(v)) for v in row))
    else:
        for layer in instance.costs:
            for row in layer:
                lines.append(" ".join(str(int(v)) for v in row))
            lines.append("")
    Path(path).write_text("\n".join(lines).rstrip("\n") + "\n")


def _int_token(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise InstanceParseError(f"line {lineno}: {token!r} is not an integer") from None


def load_instance(path: str | Path) -> KnapsackInstance | TspInstance:
    """Parse an instance file; errors carry the offending line number."""
    rows: list[tuple[int, list[str]]] = []
    for lineno, line in enumerate(Path(path).read_text().splitlines(), start=1):
        tokens = line.split()
        if tokens:
            rows.append((lineno, tokens))
    if not rows:
        raise InstanceParseError("line 1: empty instance file")
    header_line, header = rows[0]
    if len(header) != 4:
        raise InstanceParseError(
            f"line {header_line}: header must be 'problem n size seed'"
        )
    problem = header[0]
    n, size, seed = (_int_token(t, header_line) for t in header[1:])
    if problem not in ("knapsack", "tsp"):
        raise InstanceParseError(f"line {header_line}: unknown problem {problem!r}")
    if n < 2 or size < 2:
        raise InstanceParseError(f"line {header_line}: need n >= 2 and size >= 2")
    data = rows[1:]
    expected = size if problem == "knapsack" else n * size
    if len(data) != expected:
        got_line = data[expected][0] if len(data) > expected else header_line
        raise InstanceParseError(
            f"line {got_line}: expected {expected} data rows, found {len(data)}"
        )
    width = n if problem == "knapsack" else size
    parsed: list[list[int]] = []
    for lineno, tokens in data:
        if len(tokens) != width:
            raise InstanceParseError(
                f"line {lineno}: expected {width} integers, got {len(tokens)}"
            )
        parsed.append([_int_token(t, lineno) for t in tokens])

    if problem == "knapsack":
        for (lineno, _), row in zip(data, parsed):
            if any(v < 1 for v in row):
                raise InstanceParseError(f"line {lineno}: item values must be >= 1")
        return KnapsackInstance(
            tuple(tuple(float(v) for v in row) for row in parsed), size // 2, seed
        )

    layers = []
    for L in range(n):
        block = parsed[L * size : (L + 1) * size]
        block_lines = data[L * size : (L + 1) * size]
        for r in range(size):
            for c in range(size):
                if block[r][c] != block[c][r]:
                    raise InstanceParseError(
                        f"line {block_lines[r][0]}: layer {L} asymmetric at "
                        f"({r},{c}): {block[r][c]} != {block[c][r]}"
                    )
                if block[r][c] < 0:
                    raise InstanceParseError(
                        f"line {block_lines[r][0]}: negative cost at ({r},{c})"
                    )
        layers.append(tuple(tuple(float(v) for v in row) for row in block))
    return TspInstance(tuple(layers), seed)


def load_tsp(path: str | Path) -> TspInstance:
    instance = load_instance(path)
    if not isinstance(instance, TspInstance):
        raise InstanceParseError(f"{path} does not hold a tsp instance")
    return instance


def load_knapsack(path: str | Path) -> KnapsackInstance:
    instance = load_instance(path)
    if not isinstance(instance, KnapsackInstance):
        raise InstanceParseError(f"{path} does not hold a knapsack instance")
    return instance


# ---------------------------------------------------------------------------
# Cost evaluation and feasibility


def knapsack_cost(instance: KnapsackInstance, chosen: tuple[int, ...]) -> CostVector:
    values = instance.value_matrix()
    total = values[list(chosen)].sum(axis=0) if chosen else np.zeros(instance.n)
    return CostVector(tuple(total))


def tour_cost(instance: TspInstance, tour: tuple[int, ...]) -> CostVector:
    c = instance.cost_array()
    total = np.zeros(instance.n)
    for k in range(len(tour)):
        total += c[:, tour[k], tour[(k + 1) % len(tour)]]
    return CostVector(tuple(total))


def solution_cost(instance: Instance, encoding: tuple[int, ...]) -> CostVector:
    if isinstance(instance, KnapsackInstance):
        return knapsack_cost(instance, encoding)
    if isinstance(instance, TspInstance):
        return tour_cost(instance, encoding)
    return instance.options[encoding[0]]


def check_feasible(instance: Instance, encoding: tuple[int, ...]) -> None:
    """Raises if the encoding is not a feasible solution of the instance."""
    if isinstance(instance, KnapsackInstance):
        if len(set(encoding)) != len(encoding):
            raise ValueError("duplicate item indices")
        if len(encoding) > instance.capacity:
            raise ValueError("capacity exceeded")
        if any(not 0 <= i < instance.size for i in encoding):
            raise ValueError("item index out of range")
        if tuple(sorted(encoding)) != encoding:
            raise ValueError("knapsack encoding must be sorted")
    elif isinstance(instance, TspInstance):
        if sorted(encoding) != list(range(instance.size)) or encoding[0] != 0:
            raise ValueError("encoding is not a city-0-anchored permutation")
    else:
        if len(encoding) != 1 or not 0 <= encoding[0] < instance.size:
            raise ValueError("catalog encoding must be one valid option index")


def _finish(
    instance: Instance,
    encoding: tuple[int, ...],
    budget_exhausted: bool = False,
) -> Solution:
    check_feasible(instance, encoding)
    return Solution(encoding, solution_cost(instance, encoding), budget_exhausted)


# ---------------------------------------------------------------------------
# Fixed-parameter solvers


def _batch_values(model: PreferenceModel, rows: np.ndarray) -> np.ndarray:
    return featurize_rows(model.family, rows) @ model.coords()


def _pick(values: np.ndarray, orientation: Orientation) -> int:
    """First-index argbest for the orientation."""
    return int(np.argmin(values) if orientation is Orientation.MINIMIZE else np.argmax(values))


def _solve_catalog(instance: CatalogInstance, model: PreferenceModel) -> Solution:
    rows = np.asarray([y.values for y in instance.options])
    idx = _pick(_batch_values(model, rows), instance.orientation)
    return _finish(instance, (idx,))


def _solve_knapsack_ws(instance: KnapsackInstance, model: PreferenceModel) -> Solution:
    # Unit weights make greedy exact: take the top-capacity aggregated values.
    agg = instance.value_matrix() @ model.coords()
    order = np.argsort(-agg, kind="stable")[: instance.capacity]
    return _finish(instance, tuple(sorted(int(i) for i in order)))


def _solve_knapsack_local(
    instance: KnapsackInstance, model: PreferenceModel, budget: int | None
) -> Solution:
    values = instance.value_matrix()
    size, capacity = instance.size, instance.capacity
    max_evals = KNAPSACK_EVALS_PER_ITEM * size if budget is None else budget

    # Marginal-gain greedy seed.
    chosen: list[int] = []
    cur = np.zeros(instance.n)
    for _ in range(capacity):
        free = [i for i in range(size) if i not in set(chosen)]
        cand = cur + values[free]
        best = _pick(_batch_values(model, cand), instance.orientation)
        chosen.append(free[best])
        cur = cand[best]
    seed_value = float(_batch_values(model, cur[None, :])[0])

    # 1-out/1-in swap local search, first improvement.
    cur_value = seed_value
    evals = 0
    exhausted = False
    improved = True
    while improved and not exhausted:
        improved = False
        for out_pos in range(len(chosen)):
            free = sorted(set(range(size)) - set(chosen))
            if not free:
                break
            if evals >= max_evals:
                exhausted = True
                break
            cand = cur - values[chosen[out_pos]] + values[free]
            vals = _batch_values(model, cand)
            evals += len(free)
            better = np.flatnonzero(vals > cur_value + IMPROVE_TOL)
            if better.size:
                k = int(better[0])
                chosen[out_pos] = free[k]
                cur = cand[k]
                cur_value = float(vals[k])
                improved = True
                break

    assert cur_value >= seed_value - 1e-9  # never worse than the seed
    return _finish(instance, tuple(sorted(chosen)), exhausted)


def _nearest_neighbor_tour(costs: np.ndarray) -> list[int]:
    summed = costs.sum(axis=0)
    size = summed.shape[0]
    tour = [0]
    free = list(range(1, size))
    while free:
        last = tour[-1]
        nxt = int(np.argmin(summed[last, free]))
        tour.append(free.pop(nxt))
    return tour


def _two_opt(
    tour: list[int],
    costs: np.ndarray,
    model: PreferenceModel,
    sweep_budget: int,
) -> tuple[list[int], np.ndarray, float, int, bool]:
    """First-improvement 2-opt to a local optimum or the sweep budget.

    Costs are symmetric, so reversing a segment only swaps the two boundary
    edges. Returns (tour, cost vector, value, sweeps used, truncated).
    """
    size = len(tour)
    cur_vec = np.zeros(costs.shape[0])
    for k in range(size):
        cur_vec += costs[:, tour[k], tour[(k + 1) % size]]
    cur_value = float(_batch_values(model, cur_vec[None, :])[0])
    sweeps = 0
    moves = 0
    truncated = False
    improved = True
    while improved:
        if sweeps >= sweep_budget:
            truncated = True
            break
        improved = False
        sweeps += 1
        for i in range(1, size - 1):
            for j in range(i + 1, size):
                after = tour[(j + 1) % size]
                delta = (
                    costs[:, tour[i - 1], tour[j]]
                    + costs[:, tour[i], after]
                    - costs[:, tour[i - 1], tour[i]]
                    - costs[:, tour[j], after]
                )
                new_vec = cur_vec + delta
                new_value = float(_batch_values(model, new_vec[None, :])[0])
                if new_value < cur_value - IMPROVE_TOL:
                    tour[i : j + 1] = reversed(tour[i : j + 1])
                    cur_vec = new_vec
                    cur_value = new_value
                    improved = True
                    moves += 1
                    assert moves < size**4  # strict improvement must terminate
    return tour, cur_vec, cur_value, sweeps, truncated


def _solve_tsp(
    instance: TspInstance, model: PreferenceModel, budget: int | None, seed: int
) -> Solution:
    costs = instance.cost_array()
    size = instance.size
    max_sweeps = TSP_SWEEP_BUDGET if budget is None else budget

    # Nearest-neighbor seed under summed costs, improved by 2-opt; leftover
    # sweeps fund 2-opt restarts from random tours.
    nn = _nearest_neighbor_tour(costs)
    seed_vec = np.zeros(instance.n)
    for k in range(size):
        seed_vec += costs[:, nn[k], nn[(k + 1) % size]]
    seed_value = float(_batch_values(model, seed_vec[None, :])[0])

    best_tour, _, best_value, used, truncated = _two_opt(nn, costs, model, max_sweeps)
    best_truncated = truncated
    rng = np.random.default_rng(seed)
    while used < max_sweeps and not truncated and size > 3:
        restart = [0] + [int(c) for c in rng.permutation(np.arange(1, size))]
        tour, _, value, sweeps, truncated = _two_opt(
            restart, costs, model, max_sweeps - used
        )
        used += sweeps
        if value < best_value - IMPROVE_TOL:
            best_tour = tour
            best_value = value
            best_truncated = truncated
    assert best_value <= seed_value + 1e-9  # never worse than the seed
    return _finish(instance, tuple(best_tour), best_truncated)


def solve_fixed(
    instance: Instance,
    model: PreferenceModel,
    budget: int | None = None,
    seed: int = 0,
) -> Solution:
    """Near-optimal solution for one concrete parameter vector.

    Knapsack: exact greedy for WS, greedy plus swap local search otherwise
    (budget counts swap evaluations, default 50 per item). TSP: nearest
    neighbor under summed costs, then 2-opt with random restarts while the
    sweep budget (default 30 full sweeps) lasts; ``seed`` drives the restart
    tours only. Catalog: exact scan. ``budget_exhausted`` is set when the
    returned solution's local search was cut off before a local optimum.
    """
    if model.n != instance.n:
        raise ValueError(f"model has {model.n} objectives, instance has {instance.n}")
    if isinstance(instance, CatalogInstance):
        return _solve_catalog(instance, model)
    if isinstance(instance, KnapsackInstance):
        if model.family is Family.WS:
            return _solve_knapsack_ws(instance, model)
        return _solve_knapsack_local(instance, model, budget)
    return _solve_tsp(instance, model, budget, seed)


# ---------------------------------------------------------------------------
# Exact enumeration


def _canonical_tours(size: int):
    """All undirected Hamiltonian cycles anchored at city 0, one direction
    each (second city smaller than last)."""
    for rest in itertools.permutations(range(1, size)):
        if rest[0] < rest[-1]:
            yield (0, *rest)


def _knapsack_subsets(instance: KnapsackInstance):
    """Candidate encodings for the exact optimum: positive values mean a
    maximal solution always fills the capacity."""
    return itertools.combinations(range(instance.size), instance.capacity)


def _guard_exact(instance: Instance) -> None:
    if isinstance(instance, KnapsackInstance):
        if (
            math.comb(instance.size, instance.capacity) > EXACT_SUBSET_LIMIT
            and instance.size > 25
        ):
            raise InstanceTooLargeError(
                f"C({instance.size},{instance.capacity}) subsets exceed the "
                "exact-enumeration guard"
            )
    elif isinstance(instance, TspInstance):
        if instance.size > EXACT_TSP_CITIES:
            raise InstanceTooLargeError(
                f"{instance.size} cities exceed the exact-enumeration guard "
                f"of {EXACT_TSP_CITIES}"
            )


def _enumerate_costs(instance: Instance) -> tuple[list[tuple[int, ...]], np.ndarray]:
    """All candidate encodings with their cost rows (Pareto-sufficient set)."""
    _guard_exact(instance)
    if isinstance(instance, KnapsackInstance):
        encodings = list(_knapsack_subsets(instance))
        values = instance.value_matrix()
        enc = np.array(encodings, dtype=np.intp).reshape(len(encodings), -1)
        if enc.shape[1]:
            rows = values[enc].sum(axis=1)
        else:
            rows = np.zeros((len(encodings), instance.n))
        return encodings, rows
    if isinstance(instance, TspInstance):
        encodings = list(_canonical_tours(instance.size))
        costs = instance.cost_array()
        perms = np.array(encodings)
        rows = np.zeros((len(encodings), instance.n))
        for k in range(instance.size):
            a = perms[:, k]
            b = perms[:, (k + 1) % instance.size]
            rows += costs[:, a, b].T
        return encodings, rows
    encodings = [(i,) for i in range(instance.size)]
    return encodings, np.asarray([y.values for y in instance.options])


def solve_exact_small(instance: Instance, model: PreferenceModel) -> Solution:
    """Exact f-optimum by exhaustive enumeration, guarded by size limits."""
    if model.n != instance.n:
        raise ValueError(f"model has {model.n} objectives, instance has {instance.n}")
    encodings, rows = _enumerate_costs(instance)
    orientation = instance.orientation
    best = _pick(_batch_values(model, rows), orientation)
    return _finish(instance, encodings[best])


def pareto_indices(rows: np.ndarray, orientation: Orientation) -> list[int]:
    """Indices of the non-dominated rows, stable order, duplicates kept once.

    Rows are scanned in best-first aggregate order so candidates only need
    checking against already-accepted rows: a dominator never has a worse
    coordinate sum, and an equal sum forces equality.
    """
    rows = np.asarray(rows, dtype=float)
    if orientation is Orientation.MAXIMIZE:
        rows = -rows
    order = np.argsort(rows.sum(axis=1), kind="stable")
    front_rows: list[np.ndarray] = []
    kept: list[int] = []
    for idx in order:
        y = rows[idx]
        if front_rows:
            f = np.vstack(front_rows)
            equal = (f == y).all(axis=1)
            dominated = (f <= y).all(axis=1) & (f < y).any(axis=1)
            if equal.any() or dominated.any():
                continue
        front_rows.append(y)
        kept.append(int(idx))
    kept.sort()
    return kept


def pareto_filter(
    points: list[CostVector], orientation: Orientation
) -> list[CostVector]:
    """Non-dominated subset of the points, stable order, duplicates once."""
    if not points:
        return []
    rows = np.asarray([y.values for y in points])
    return [points[i] for i in pareto_indices(rows, orientation)]


def enumerate_pareto_small(instance: Instance) -> list[Solution]:
    """All Pareto-optimal solutions of a small instance."""
    encodings, rows = _enumerate_costs(instance)
    kept = pareto_indices(rows, instance.orientation)
    return [
        Solution(encodings[i], CostVector(tuple(rows[i]))) for i in kept
    ]
