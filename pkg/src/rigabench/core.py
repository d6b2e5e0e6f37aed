"""The regret-based interactive genetic loop (RIGA) and its two variants.

Populations are pairs of a parameter point and the solution bred for it.
Each generation fills the population with offspring — parameter-space
crossover and mutation followed by a solver call, or encoding-space
operators for the RIGA_S variant — then runs a minimax-regret elicitation
phase against the decision maker and keeps the pairs whose solutions are
closest to the incumbent recommendation.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
import time
from dataclasses import dataclass, field
from typing import Callable, Mapping, Protocol, Sequence, runtime_checkable

import numpy as np

from .lp import Sense
from .prefs import (
    CostVector,
    Family,
    Monotone,
    Orientation,
    model_from_coords,
    owa_monotone_for,
)
from .problems import (
    Instance,
    KnapsackInstance,
    Solution,
    TspInstance,
    check_feasible,
    solution_cost,
    solve_fixed,
)
from .regret import (
    MMR_ZERO_TOL,
    InconsistentPreferenceError,
    ParameterPolytope,
    PolytopeTooLargeError,
    PreferenceStatement,
    QueriesExhaustedError,
    RegretCache,
    css_query,
    enumerate_vertices,
    mmr_cached,
    pair_key,
    sample_polytope,
    statement_to_constraint,
)

REPAIR_BISECTION_STEPS = 30
REPAIR_TOL = 1e-7
WARM_VERTEX_COMBINATIONS = 20_000


class Answer(str, enum.Enum):
    """Which of the two presented cost vectors the decision maker prefers."""

    PREFERS_A = "A"
    PREFERS_B = "B"


@runtime_checkable
class DmOracle(Protocol):
    """Anything that can compare two cost vectors; must always answer."""

    def answer(self, a: CostVector, b: CostVector) -> Answer: ...


@dataclass(frozen=True)
class QueryContext:
    """What the elicitor knew when it chose to ask: where in the run the
    query sits, the regret before it, and the pool it was chosen from."""

    generation: int
    round_index: int
    mmr: float
    mmr_start: float
    pool: tuple[CostVector, ...]


@runtime_checkable
class QueryObserver(Protocol):
    """Optional oracle extension: an oracle implementing this receives the
    phase context right before each answer is requested (interactive
    frontends use it to report progress and normalize displayed values)."""

    def observe_query(self, context: QueryContext) -> None: ...


@dataclass(frozen=True)
class Pair:
    """One population member: a parameter point and the solution bred for it.

    ``omega`` is ``None`` for offspring bred by encoding-space operators
    (the RIGA_S variant), which carry no parameter provenance. ``origin``
    records how the member was produced ("vertex", "sampled", "offspring",
    or "encoding"); ``repaired`` flags parameter points pulled back into
    the polytope after preference cuts invalidated them.
    """

    omega: tuple[float, ...] | None
    solution: Solution
    origin: str = "offspring"
    repaired: bool = False

    @property
    def cost(self) -> CostVector:
        return self.solution.cost


@dataclass(frozen=True)
class RigaConfig:
    """Run parameters for the interactive genetic loop.

    ``delta`` is the elicitation stopping threshold as a fraction of each
    phase's starting minimax regret; 0 demands (numerically) zero regret.
    """

    family: Family
    orientation: Orientation
    generations: int
    population_size: int
    survivors: int
    mutation_rate: float = 0.5
    sigma: float = 0.1
    delta: float = 0.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.generations < 1:
            raise ValueError(f"generations must be >= 1, got {self.generations}")
        if not 1 <= self.survivors < self.population_size:
            raise ValueError(
                f"need 1 <= survivors < population_size, got "
                f"{self.survivors} of {self.population_size}"
            )
        if not 0.0 <= self.mutation_rate <= 1.0:
            raise ValueError(f"mutation_rate must be in [0, 1], got {self.mutation_rate}")
        if self.sigma < 0.0:
            raise ValueError(f"sigma must be >= 0, got {self.sigma}")
        if self.delta < 0.0:
            raise ValueError(f"delta must be >= 0, got {self.delta}")

    @classmethod
    def default_for(cls, instance: Instance, family: Family, **overrides) -> "RigaConfig":
        """Problem-tuned defaults: knapsack runs 10 generations of 20,
        routing runs 20 generations of 40; both keep 5 survivors."""
        if isinstance(instance, TspInstance):
            base: dict = {"generations": 20, "population_size": 40, "survivors": 5}
        else:
            base = {"generations": 10, "population_size": 20, "survivors": 5}
        base["family"] = family
        base["orientation"] = instance.orientation
        base.update(overrides)
        return cls(**base)

    def to_json(self) -> dict:
        return {
            "family": self.family.value,
            "orientation": self.orientation.value,
            "generations": self.generations,
            "population_size": self.population_size,
            "survivors": self.survivors,
            "mutation_rate": self.mutation_rate,
            "sigma": self.sigma,
            "delta": self.delta,
            "seed": self.seed,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RigaConfig":
        return cls(
            family=Family(data["family"]),
            orientation=Orientation(data["orientation"]),
            generations=int(data["generations"]),
            population_size=int(data["population_size"]),
            survivors=int(data["survivors"]),
            mutation_rate=float(data.get("mutation_rate", 0.5)),
            sigma=float(data.get("sigma", 0.1)),
            delta=float(data.get("delta", 0.0)),
            seed=int(data.get("seed", 0)),
        )


@dataclass(frozen=True)
class QueryRecord:
    """One comparison put to the decision maker, with the recorded answer.

    ``accepted`` is False only when the answer's constraint was rejected
    for emptying the parameter polytope.
    """

    a: CostVector
    b: CostVector
    answer: Answer
    generation: int = 0
    round_index: int = 0
    accepted: bool = True

    def to_json(self) -> dict:
        return {
            "a": list(self.a.values),
            "b": list(self.b.values),
            "answer": self.answer.value,
            "generation": self.generation,
            "round": self.round_index,
            "accepted": self.accepted,
        }


@dataclass(frozen=True)
class GenerationRecord:
    """Per-generation snapshot: who was in the population, how much regret
    the elicitation phase removed, and what it recommended."""

    index: int
    population: tuple[CostVector, ...]
    mmr_before: float
    mmr_after: float
    queries: int
    x_star: CostVector
    repaired: int = 0

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "population": [list(c.values) for c in self.population],
            "mmr_before": self.mmr_before,
            "mmr_after": self.mmr_after,
            "queries": self.queries,
            "x_star": list(self.x_star.values),
            "repaired": self.repaired,
        }


@dataclass
class RunTrace:
    """Complete record of one interactive run."""

    method: str
    family: Family
    orientation: Orientation
    generations: list[GenerationRecord] = field(default_factory=list)
    queries: list[QueryRecord] = field(default_factory=list)
    recommendation: CostVector | None = None
    warnings: list[str] = field(default_factory=list)
    wall_time_s: float = 0.0

    @property
    def total_queries(self) -> int:
        return len(self.queries)

    @property
    def accepted_queries(self) -> int:
        return sum(1 for q in self.queries if q.accepted)

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "family": self.family.value,
            "orientation": self.orientation.value,
            "generations": [g.to_json() for g in self.generations],
            "queries": [q.to_json() for q in self.queries],
            "recommendation": (
                list(self.recommendation.values) if self.recommendation else None
            ),
            "warnings": list(self.warnings),
            "totals": {"queries": self.total_queries, "wall_time_s": self.wall_time_s},
        }

    def fingerprint(self) -> str:
        """Digest of the run content with timing zeroed: equal fingerprints
        mean bit-identical traces."""
        data = self.to_json()
        data["totals"]["wall_time_s"] = 0.0
        return hashlib.sha256(json.dumps(data, sort_keys=True).encode()).hexdigest()


def initial_population(
    instance: Instance,
    family: Family,
    polytope: ParameterPolytope,
    rng: np.random.Generator,
    fallback_count: int,
    solver_seed: int = 0,
    warnings: list[str] | None = None,
) -> list[Pair]:
    """One pair per extreme point of the parameter region, each solved for
    its own parameters; falls back to hit-and-run samples (with a warning)
    when vertex enumeration is infeasible."""
    try:
        points = enumerate_vertices(polytope)
        origin = "vertex"
    except PolytopeTooLargeError:
        points = sample_polytope(polytope, fallback_count, rng)
        origin = "sampled"
        if warnings is not None:
            warnings.append(
                f"vertex enumeration infeasible in dimension {polytope.dim}; "
                f"initial population sampled instead"
            )
    pairs = []
    for point in points:
        model = model_from_coords(family, point, polytope.orientation)
        solution = solve_fixed(instance, model, seed=solver_seed)
        pairs.append(Pair(tuple(float(v) for v in point), solution, origin))
    return pairs


def crossover(
    omega_a: Sequence[float],
    omega_b: Sequence[float],
    rng: np.random.Generator,
    polytope: ParameterPolytope | None = None,
) -> np.ndarray:
    """Convex combination with a uniform coefficient; convexity keeps the
    child inside any region both parents inhabit (asserted when given)."""
    wa = np.asarray(omega_a, dtype=float)
    wb = np.asarray(omega_b, dtype=float)
    if wa.shape != wb.shape:
        raise ValueError(f"parent dimensions differ: {wa.shape} vs {wb.shape}")
    lam = float(rng.random())
    child = lam * wa + (1.0 - lam) * wb
    if polytope is not None:
        assert polytope.contains(child, tol=REPAIR_TOL), "crossover left the polytope"
    return child


def _pull_feasible(
    point: np.ndarray,
    anchor: np.ndarray,
    polytope: ParameterPolytope,
    steps: int = REPAIR_BISECTION_STEPS,
) -> np.ndarray:
    """Bisect along the segment from a feasible anchor toward ``point`` and
    return the feasible iterate nearest ``point`` (the anchor at worst)."""
    best = np.asarray(anchor, dtype=float)
    point = np.asarray(point, dtype=float)
    lo, hi = 0.0, 1.0
    for _ in range(steps):
        mid = 0.5 * (lo + hi)
        candidate = anchor + mid * (point - anchor)
        if polytope.contains(candidate, tol=REPAIR_TOL):
            best = candidate
            lo = mid
        else:
            hi = mid
    return best


def mutate(
    omega: Sequence[float],
    mutation_rate: float,
    sigma: float,
    rng: np.random.Generator,
    family: Family,
    polytope: ParameterPolytope,
) -> np.ndarray:
    """With probability ``mutation_rate``, perturb one coordinate by a
    Gaussian draw, clamp to nonnegative, renormalize to sum 1, restore the
    family's shape (weight order for OWA), and bisect back toward the
    pre-mutation point if a learned constraint is violated. Identity
    otherwise; the result is always feasible."""
    parent = np.asarray(omega, dtype=float)
    if rng.random() >= mutation_rate:
        return parent.copy()
    mutant = parent.copy()
    coord = int(rng.integers(mutant.size))
    mutant[coord] += float(rng.normal(0.0, sigma))
    mutant = np.maximum(mutant, 0.0)
    total = mutant.sum()
    if total <= 1e-12:
        return parent.copy()
    mutant /= total
    if family is Family.OWA:
        mutant = np.sort(mutant)
        if owa_monotone_for(polytope.orientation) is Monotone.NON_INCREASING:
            mutant = mutant[::-1]
    if polytope.contains(mutant, tol=REPAIR_TOL):
        return mutant
    return _pull_feasible(mutant, parent, polytope)


def select_k(population: Sequence[Pair], x_index: int, k: int) -> list[Pair]:
    """The ``k`` pairs whose solution costs are Euclidean-nearest to the
    incumbent's, the incumbent's own pair always included, ties broken by
    insertion order; survivors keep their original order."""
    if not 1 <= k <= len(population):
        raise ValueError(f"need 1 <= k <= {len(population)}, got {k}")
    target = population[x_index].cost.as_array()
    others = sorted(
        (i for i in range(len(population)) if i != x_index),
        key=lambda i: (
            float(np.linalg.norm(population[i].cost.as_array() - target)),
            i,
        ),
    )
    keep = sorted([x_index] + others[: k - 1])
    return [population[i] for i in keep]


@dataclass
class PhaseResult:
    """Outcome of one elicitation phase."""

    polytope: ParameterPolytope
    x_index: int
    mmr_start: float
    mmr_end: float
    queries: list[QueryRecord]
    inconsistent: bool = False
    warnings: list[str] = field(default_factory=list)


def _phase_done(mmr_value: float, mmr_start: float, delta: float) -> bool:
    if mmr_value <= MMR_ZERO_TOL:
        return True
    return delta > 0.0 and mmr_value <= delta * mmr_start


def _warm_cache(
    cache: RegretCache, pool: Sequence[CostVector], polytope: ParameterPolytope
) -> None:
    """Refresh every pairwise regret from an explicit vertex description
    when enumeration is cheap; otherwise leave the stale bounds in place
    for LP-based pruning."""
    constraints = polytope.all_constraints()
    n_eq = sum(1 for c in constraints if c.sense is Sense.EQ)
    active = polytope.dim - n_eq
    if active < 0 or math.comb(len(constraints) - n_eq, active) > WARM_VERTEX_COMBINATIONS:
        return
    try:
        vertices = enumerate_vertices(polytope)
    except PolytopeTooLargeError:
        return
    cache.warm_from_vertices(pool, vertices)


def elicitation_phase(
    pool: Sequence[CostVector],
    polytope: ParameterPolytope,
    dm: DmOracle,
    delta: float,
    cache: RegretCache | None = None,
    generation: int = 0,
    round_index: int = 0,
) -> PhaseResult:
    """Ask current-solution-strategy queries until the minimax regret falls
    to ``delta`` times its phase-start value (to numerical zero when
    ``delta`` is 0), then return the shrunken polytope and the index of the
    max-regret minimizer."""
    if not pool:
        raise ValueError("pool must be nonempty")
    cache = cache if cache is not None else RegretCache(polytope)
    _warm_cache(cache, pool, polytope)
    observer = dm if isinstance(dm, QueryObserver) else None
    asked: set[frozenset] = set()
    records: list[QueryRecord] = []
    warnings: list[str] = []
    inconsistent = False
    distinct = len({c.values for c in pool})
    limit = distinct * (distinct - 1) // 2
    mmr_value, x_index = mmr_cached(pool, polytope, cache)
    mmr_start = mmr_value
    while not _phase_done(mmr_value, mmr_start, delta):
        assert len(records) < limit, "query count exceeded the distinct-pair bound"
        try:
            i, j = css_query(pool, polytope, asked=asked, cache=cache)
        except QueriesExhaustedError:
            warnings.append("elicitation stalled: every informative pair was asked")
            break
        a, b = pool[i], pool[j]
        key = pair_key(a, b)
        try:
            statement_to_constraint(
                PreferenceStatement(a, b), polytope.family, polytope.orientation
            )
        except ValueError:
            # The pair is indistinguishable under the family (equal feature
            # vectors): no answer can carry information, so suppress it.
            asked.add(key)
            continue
        if observer is not None:
            observer.observe_query(
                QueryContext(generation, round_index, mmr_value, mmr_start, tuple(pool))
            )
        answer = dm.answer(a, b)
        preferred, other = (a, b) if answer is Answer.PREFERS_A else (b, a)
        asked.add(key)
        try:
            polytope = polytope.with_statement(PreferenceStatement(preferred, other))
        except InconsistentPreferenceError:
            # Unreachable for any answer to a CSS query with positive regret
            # (either direction leaves a nonempty region); kept as insurance
            # against tolerance collapse in nearly-degenerate polytopes.
            records.append(QueryRecord(a, b, answer, generation, round_index, False))
            warnings.append("inconsistent answer rejected; elicitation stopped early")
            inconsistent = True
            break
        records.append(QueryRecord(a, b, answer, generation, round_index))
        cache.advance()
        _warm_cache(cache, pool, polytope)
        mmr_value, x_index = mmr_cached(pool, polytope, cache)
    return PhaseResult(
        polytope, x_index, mmr_start, mmr_value, records, inconsistent, warnings
    )


def _repair_survivors(
    population: Sequence[Pair], polytope: ParameterPolytope
) -> tuple[list[Pair], int]:
    """Pull surviving parameter points back into the polytope after the
    elicitation cuts of the previous generation; solutions are kept."""
    repaired: list[Pair] = []
    count = 0
    anchor: np.ndarray | None = None
    for pair in population:
        if pair.omega is None or polytope.contains(
            np.asarray(pair.omega, dtype=float), tol=REPAIR_TOL
        ):
            repaired.append(pair)
            continue
        if anchor is None:
            anchor = polytope.feasible_point()
            assert anchor is not None, "cannot repair inside an empty polytope"
        point = _pull_feasible(np.asarray(pair.omega, dtype=float), anchor, polytope)
        repaired.append(
            Pair(tuple(float(v) for v in point), pair.solution, pair.origin, True)
        )
        count += 1
    return repaired, count


def _assert_closure(population: Sequence[Pair], polytope: ParameterPolytope) -> None:
    for pair in population:
        if pair.omega is not None:
            assert polytope.contains(
                np.asarray(pair.omega, dtype=float), tol=REPAIR_TOL
            ), "population parameter point left the polytope"


def _fill_parameter_offspring(
    instance: Instance,
    config: RigaConfig,
    survivors: Sequence[Pair],
    polytope: ParameterPolytope,
    rng: np.random.Generator,
) -> list[Pair]:
    """Breed parameter points from uniformly chosen distinct survivor pairs
    and solve for each child."""
    population = list(survivors)
    parents = list(survivors)
    while len(population) < config.population_size:
        if len(parents) >= 2:
            ia, ib = rng.choice(len(parents), size=2, replace=False)
            omega_a = parents[int(ia)].omega
            omega_b = parents[int(ib)].omega
        else:
            omega_a = omega_b = parents[0].omega
        child = crossover(omega_a, omega_b, rng, polytope)
        child = mutate(
            child, config.mutation_rate, config.sigma, rng, config.family, polytope
        )
        model = model_from_coords(config.family, child, config.orientation)
        solution = solve_fixed(instance, model, seed=config.seed)
        population.append(
            Pair(tuple(float(v) for v in child), solution, "offspring")
        )
    return population


def _knapsack_encoding_crossover(
    instance: KnapsackInstance,
    enc_a: tuple[int, ...],
    enc_b: tuple[int, ...],
    rng: np.random.Generator,
) -> tuple[int, ...]:
    """One-point crossover on the item-membership bitstring, repaired to
    the capacity by random drops and adds."""
    size, capacity = instance.size, instance.capacity
    cut = int(rng.integers(1, size)) if size > 1 else 0
    chosen = sorted({i for i in enc_a if i < cut} | {i for i in enc_b if i >= cut})
    while len(chosen) > capacity:
        chosen.pop(int(rng.integers(len(chosen))))
    missing = sorted(set(range(size)) - set(chosen))
    while len(chosen) < capacity:
        chosen.append(missing.pop(int(rng.integers(len(missing)))))
    return tuple(sorted(chosen))


def _knapsack_swap(
    instance: KnapsackInstance, encoding: tuple[int, ...], rng: np.random.Generator
) -> tuple[int, ...]:
    """Swap the membership bits of two random positions (a no-op when both
    are in or both are out)."""
    if instance.size < 2:
        return encoding
    i, j = (int(v) for v in rng.choice(instance.size, size=2, replace=False))
    chosen = set(encoding)
    if (i in chosen) == (j in chosen):
        return encoding
    chosen.symmetric_difference_update((i, j))
    return tuple(sorted(chosen))


def _tsp_order_crossover(
    enc_a: tuple[int, ...], enc_b: tuple[int, ...], rng: np.random.Generator
) -> tuple[int, ...]:
    """Order crossover on the non-depot segment: keep a random slice of the
    first parent and fill the remaining positions in second-parent order."""
    rest_a, rest_b = list(enc_a[1:]), list(enc_b[1:])
    m = len(rest_a)
    if m < 2:
        return tuple(enc_a)
    lo, hi = sorted(int(v) for v in rng.choice(m + 1, size=2, replace=False))
    segment = rest_a[lo:hi]
    seg_set = set(segment)
    filler = [c for c in rest_b if c not in seg_set]
    child = filler[:lo] + segment + filler[lo:]
    return (enc_a[0], *child)


def _tsp_swap(encoding: tuple[int, ...], rng: np.random.Generator) -> tuple[int, ...]:
    """Exchange two random non-depot positions of the tour."""
    rest = list(encoding[1:])
    if len(rest) < 2:
        return encoding
    i, j = rng.choice(len(rest), size=2, replace=False)
    rest[int(i)], rest[int(j)] = rest[int(j)], rest[int(i)]
    return (encoding[0], *rest)


def _fill_encoding_offspring(
    instance: Instance,
    config: RigaConfig,
    survivors: Sequence[Pair],
    polytope: ParameterPolytope,
    rng: np.random.Generator,
) -> list[Pair]:
    """Breed solutions directly on their encodings (no solver call): one-point
    or order crossover plus swap mutation at the mutation rate."""
    population = list(survivors)
    parents = list(survivors)
    while len(population) < config.population_size:
        if len(parents) >= 2:
            ia, ib = rng.choice(len(parents), size=2, replace=False)
            pa, pb = parents[int(ia)], parents[int(ib)]
        else:
            pa = pb = parents[0]
        enc_a, enc_b = pa.solution.encoding, pb.solution.encoding
        if isinstance(instance, KnapsackInstance):
            encoding = _knapsack_encoding_crossover(instance, enc_a, enc_b, rng)
            if rng.random() < config.mutation_rate:
                encoding = _knapsack_swap(instance, encoding, rng)
        elif isinstance(instance, TspInstance):
            encoding = _tsp_order_crossover(enc_a, enc_b, rng)
            if rng.random() < config.mutation_rate:
                encoding = _tsp_swap(encoding, rng)
        else:
            # Catalog alternatives have no recombinable structure; inherit
            # one parent's choice outright.
            encoding = enc_a if rng.random() < 0.5 else enc_b
        check_feasible(instance, encoding)
        solution = Solution(encoding, solution_cost(instance, encoding))
        population.append(Pair(None, solution, "encoding"))
    return population


def _assert_trace_consistency(trace: RunTrace, polytope: ParameterPolytope) -> None:
    assert trace.accepted_queries == len(polytope.learned), (
        f"{trace.accepted_queries} accepted answers but "
        f"{len(polytope.learned)} learned constraints"
    )


def _check_run_inputs(instance: Instance, config: RigaConfig) -> None:
    if config.orientation is not instance.orientation:
        raise ValueError(
            f"config orientation {config.orientation.value!r} does not match "
            f"instance orientation {instance.orientation.value!r}"
        )


FillFn = Callable[
    [Instance, RigaConfig, Sequence[Pair], ParameterPolytope, np.random.Generator],
    list[Pair],
]


def _run(
    instance: Instance,
    config: RigaConfig,
    dm: DmOracle,
    method: str,
    fill: FillFn,
    successive_selection: bool,
) -> tuple[Solution, RunTrace]:
    """Shared driver for the three variants: breed, elicit, select."""
    started = time.perf_counter()
    _check_run_inputs(instance, config)
    trace = RunTrace(method, config.family, config.orientation)
    rng = np.random.default_rng(config.seed)
    polytope = ParameterPolytope.base_for(config.family, instance.n, config.orientation)
    population = initial_population(
        instance,
        config.family,
        polytope,
        rng,
        fallback_count=config.population_size,
        solver_seed=config.seed,
        warnings=trace.warnings,
    )
    cache = RegretCache(polytope)
    best: Pair | None = None
    for generation in range(1, config.generations + 1):
        population, repaired = _repair_survivors(population, polytope)
        population = fill(instance, config, population, polytope, rng)
        _assert_closure(population, polytope)
        if successive_selection:
            polytope, best, selected, record, stop = _select_successively(
                config, dm, polytope, cache, population, generation, repaired, trace
            )
        else:
            pool = [pair.cost for pair in population]
            phase = elicitation_phase(
                pool, polytope, dm, config.delta, cache=cache, generation=generation
            )
            polytope = phase.polytope
            trace.queries.extend(phase.queries)
            trace.warnings.extend(phase.warnings)
            best = population[phase.x_index]
            record = GenerationRecord(
                index=generation,
                population=tuple(pool),
                mmr_before=phase.mmr_start,
                mmr_after=phase.mmr_end,
                queries=len(phase.queries),
                x_star=best.cost,
                repaired=repaired,
            )
            selected = select_k(population, phase.x_index, config.survivors)
            stop = phase.inconsistent
        trace.generations.append(record)
        _assert_trace_consistency(trace, polytope)
        if stop:
            break
        if generation < config.generations:
            population = selected
    assert best is not None
    rounds = config.survivors if successive_selection else 1
    budget = config.generations * rounds * config.population_size**2
    assert trace.total_queries <= budget, "query budget exceeded"
    trace.recommendation = best.cost
    trace.wall_time_s = time.perf_counter() - started
    return best.solution, trace


def _select_successively(
    config: RigaConfig,
    dm: DmOracle,
    polytope: ParameterPolytope,
    cache: RegretCache,
    population: list[Pair],
    generation: int,
    repaired: int,
    trace: RunTrace,
) -> tuple[ParameterPolytope, Pair, list[Pair], GenerationRecord, bool]:
    """Pick survivors one at a time, re-eliciting at the same threshold over
    the remaining pairs; all pairs sharing the chosen cost are removed so
    the remaining set's regrets stay well defined."""
    remaining = list(enumerate(population))
    selected: list[tuple[int, Pair]] = []
    first_x: Pair | None = None
    mmr_before = mmr_after = 0.0
    queries = 0
    inconsistent = False
    for round_index in range(1, config.survivors + 1):
        if not remaining:
            break
        pool = [pair.cost for _, pair in remaining]
        phase = elicitation_phase(
            pool,
            polytope,
            dm,
            config.delta,
            cache=cache,
            generation=generation,
            round_index=round_index,
        )
        polytope = phase.polytope
        trace.queries.extend(phase.queries)
        trace.warnings.extend(phase.warnings)
        queries += len(phase.queries)
        chosen_index, chosen = remaining[phase.x_index]
        if round_index == 1:
            mmr_before = phase.mmr_start
            first_x = chosen
        mmr_after = phase.mmr_end
        selected.append((chosen_index, chosen))
        remaining = [
            (i, pair)
            for i, pair in remaining
            if pair.cost.values != chosen.cost.values
        ]
        if phase.inconsistent:
            inconsistent = True
            break
    assert first_x is not None
    record = GenerationRecord(
        index=generation,
        population=tuple(pair.cost for pair in population),
        mmr_before=mmr_before,
        mmr_after=mmr_after,
        queries=queries,
        x_star=first_x.cost,
        repaired=repaired,
    )
    survivors = [pair for _, pair in sorted(selected, key=lambda item: item[0])]
    return polytope, first_x, survivors, record, inconsistent


def riga_run(
    instance: Instance, config: RigaConfig, dm: DmOracle
) -> tuple[Solution, RunTrace]:
    """The full interactive loop: breed parameter points, solve for them,
    elicit preferences by minimax regret, keep the nearest survivors."""
    return _run(
        instance, config, dm, "riga", _fill_parameter_offspring,
        successive_selection=False,
    )


def riga_kcss_run(
    instance: Instance, config: RigaConfig, dm: DmOracle
) -> tuple[Solution, RunTrace]:
    """Variant that replaces distance-based selection with repeated
    elicit-and-remove rounds, one per survivor slot."""
    return _run(
        instance, config, dm, "riga_kcss", _fill_parameter_offspring,
        successive_selection=True,
    )


def riga_s_run(
    instance: Instance, config: RigaConfig, dm: DmOracle
) -> tuple[Solution, RunTrace]:
    """Variant that breeds offspring directly on solution encodings (no
    solver calls after the initial population)."""
    return _run(
        instance, config, dm, "riga_s", _fill_encoding_offspring,
        successive_selection=False,
    )
