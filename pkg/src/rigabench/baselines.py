"""Simulated decision maker, hidden-parameter generation, and the ILS and
Two-Phase comparison methods.

Both comparison methods reuse the same elicitation phase as the genetic
loop, so their traces share its JSON schema and downstream metrics apply
uniformly.
"""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .core import Answer, DmOracle, GenerationRecord, RunTrace, elicitation_phase
from .prefs import (
    CostVector,
    Family,
    Monotone,
    Orientation,
    PreferenceModel,
    model_from_coords,
    owa_monotone_for,
    param_dim,
    sample_simplex,
)
from .problems import (
    CatalogInstance,
    Instance,
    KnapsackInstance,
    Solution,
    TspInstance,
    enumerate_pareto_small,
    pareto_indices,
    solution_cost,
    solve_fixed,
)
from .regret import ParameterPolytope, RegretCache

HIDDEN_FEASIBLE_TOL = 1e-7


@dataclass(frozen=True)
class SimulatedDm:
    """Deterministic oracle answering from a concrete hidden model: the
    alternative with the better hidden value wins, ties going to the first."""

    hidden: PreferenceModel

    def answer(self, a: CostVector, b: CostVector) -> Answer:
        fa, fb = self.hidden.evaluate(a), self.hidden.evaluate(b)
        if self.hidden.orientation is Orientation.MINIMIZE:
            return Answer.PREFERS_A if fa <= fb else Answer.PREFERS_B
        return Answer.PREFERS_A if fa >= fb else Answer.PREFERS_B

    def assert_consistent_with(self, polytope: ParameterPolytope) -> None:
        """The hidden parameters realize every answer, so no sequence of
        them may ever cut the hidden point away."""
        if (
            self.hidden.family is polytope.family
            and self.hidden.orientation is polytope.orientation
        ):
            assert polytope.contains(self.hidden.coords(), tol=HIDDEN_FEASIBLE_TOL), (
                "learned constraints exclude the hidden parameters"
            )


def _sample_parameters(
    family: Family, n: int, orientation: Orientation, rng: np.random.Generator
) -> np.ndarray:
    """Uniform simplex point shaped for the family: sorted for OWA, spread
    over all Mobius masses for Choquet2 (nonnegative masses make a belief
    function, hence a valid convex capacity)."""
    monotone = owa_monotone_for(orientation) if family is Family.OWA else Monotone.NONE
    return sample_simplex(param_dim(family, n), rng, monotone)


def gen_hidden(
    family: Family, n: int, orientation: Orientation, seed: int
) -> PreferenceModel:
    """Reproducible hidden decision-maker parameters for simulations."""
    rng = np.random.default_rng(seed)
    return model_from_coords(family, _sample_parameters(family, n, orientation, rng), orientation)


def _check_hidden(dm: DmOracle, polytope: ParameterPolytope) -> None:
    if isinstance(dm, SimulatedDm):
        dm.assert_consistent_with(polytope)


@dataclass(frozen=True)
class IlsConfig:
    """Iterated-local-search elicitation thresholds and restart budget."""

    delta_start: float = 0.1
    delta_move: float = 0.4
    starts: int = 100
    seed: int = 0
    max_moves: int = 1000


def _neighborhood(instance: Instance, solution: Solution) -> list[Solution]:
    """All single-move neighbors: item swaps for knapsack, 2-opt segment
    reversals for tours, and every other option for catalogs."""
    if isinstance(instance, KnapsackInstance):
        chosen = list(solution.encoding)
        outside = sorted(set(range(instance.size)) - set(chosen))
        neighbors = []
        for drop in chosen:
            base = [i for i in chosen if i != drop]
            for add in outside:
                encoding = tuple(sorted(base + [add]))
                neighbors.append(Solution(encoding, solution_cost(instance, encoding)))
        return neighbors
    if isinstance(instance, TspInstance):
        tour = list(solution.encoding)
        size = len(tour)
        neighbors = []
        for i in range(1, size - 1):
            for j in range(i + 1, size):
                encoding = tuple(tour[:i] + tour[i : j + 1][::-1] + tour[j + 1 :])
                neighbors.append(Solution(encoding, solution_cost(instance, encoding)))
        return neighbors
    if isinstance(instance, CatalogInstance):
        current = solution.encoding[0]
        return [
            Solution((i,), option)
            for i, option in enumerate(instance.options)
            if i != current
        ]
    raise TypeError(f"unsupported instance type {type(instance).__name__}")


def _pareto_neighbors(
    neighbors: list[Solution], orientation: Orientation
) -> list[Solution]:
    rows = np.asarray([s.cost.values for s in neighbors], dtype=float)
    return [neighbors[i] for i in pareto_indices(rows, orientation)]


def _starting_solutions(
    instance: Instance, family: Family, config: IlsConfig
) -> list[Solution]:
    """Knapsack starts from the single arithmetic-mean greedy optimum; other
    problems from solver runs under randomly sampled parameters."""
    orientation = instance.orientation
    if isinstance(instance, KnapsackInstance):
        n = instance.n
        mean = model_from_coords(Family.WS, (1.0 / n,) * n, orientation)
        return [solve_fixed(instance, mean, seed=config.seed)]
    rng = np.random.default_rng(config.seed)
    solutions = []
    for _ in range(config.starts):
        point = _sample_parameters(family, instance.n, orientation, rng)
        model = model_from_coords(family, point, orientation)
        solutions.append(solve_fixed(instance, model, seed=config.seed))
    return solutions


def ils_run(
    instance: Instance,
    family: Family,
    dm: DmOracle,
    config: IlsConfig | None = None,
) -> tuple[Solution, RunTrace]:
    """Iterated local search with regret-guided moves: elicit over starting
    solutions to a loose threshold, then repeatedly elicit over the
    Pareto-filtered neighborhood and move to the max-regret minimizer,
    stopping when no neighbor beats the incumbent."""
    started = time.perf_counter()
    config = config if config is not None else IlsConfig()
    orientation = instance.orientation
    trace = RunTrace("ils", family, orientation)
    polytope = ParameterPolytope.base_for(family, instance.n, orientation)
    cache = RegretCache(polytope)

    starts = _starting_solutions(instance, family, config)
    phase = elicitation_phase(
        [s.cost for s in starts], polytope, dm, config.delta_start, cache=cache
    )
    polytope = phase.polytope
    trace.queries.extend(phase.queries)
    trace.warnings.extend(phase.warnings)
    incumbent = starts[phase.x_index]
    trace.generations.append(
        GenerationRecord(
            index=0,
            population=tuple(s.cost for s in starts),
            mmr_before=phase.mmr_start,
            mmr_after=phase.mmr_end,
            queries=len(phase.queries),
            x_star=incumbent.cost,
        )
    )
    _check_hidden(dm, polytope)

    visited = {incumbent.cost.values}
    for move in range(1, config.max_moves + 1):
        neighbors = _neighborhood(instance, incumbent)
        if not neighbors:
            break
        pool = [incumbent] + _pareto_neighbors(neighbors, orientation)
        phase = elicitation_phase(
            [s.cost for s in pool],
            polytope,
            dm,
            config.delta_move,
            cache=cache,
            generation=move,
        )
        polytope = phase.polytope
        trace.queries.extend(phase.queries)
        trace.warnings.extend(phase.warnings)
        chosen = pool[phase.x_index]
        trace.generations.append(
            GenerationRecord(
                index=move,
                population=tuple(s.cost for s in pool),
                mmr_before=phase.mmr_start,
                mmr_after=phase.mmr_end,
                queries=len(phase.queries),
                x_star=chosen.cost,
            )
        )
        _check_hidden(dm, polytope)
        if phase.x_index == 0:
            break  # the incumbent minimizes max regret: local optimum
        incumbent = chosen
        if incumbent.cost.values in visited:
            trace.warnings.append("revisited a solution; stopping the walk")
            break
        visited.add(incumbent.cost.values)
    else:
        trace.warnings.append(f"move budget of {config.max_moves} exhausted")

    trace.recommendation = incumbent.cost
    trace.wall_time_s = time.perf_counter() - started
    return incumbent, trace


def two_phase_run(
    instance: Instance,
    family: Family,
    dm: DmOracle,
    delta: float = 0.0,
    pareto: list[Solution] | None = None,
) -> tuple[Solution, RunTrace]:
    """Exhaustive Pareto enumeration followed by regret-based elicitation
    over the whole front; a precomputed (possibly approximate) front may be
    supplied for instances beyond the enumeration guards."""
    if pareto is None:
        pareto = enumerate_pareto_small(instance)
    started = time.perf_counter()
    orientation = instance.orientation
    trace = RunTrace("two_phase", family, orientation)
    polytope = ParameterPolytope.base_for(family, instance.n, orientation)
    phase = elicitation_phase(
        [s.cost for s in pareto], polytope, dm, delta, generation=1
    )
    trace.queries.extend(phase.queries)
    trace.warnings.extend(phase.warnings)
    _check_hidden(dm, phase.polytope)
    chosen = pareto[phase.x_index]
    trace.generations.append(
        GenerationRecord(
            index=1,
            population=tuple(s.cost for s in pareto),
            mmr_before=phase.mmr_start,
            mmr_after=phase.mmr_end,
            queries=len(phase.queries),
            x_star=chosen.cost,
        )
    )
    trace.recommendation = chosen.cost
    trace.wall_time_s = time.perf_counter() - started
    return chosen, trace
