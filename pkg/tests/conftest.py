"""Shared generators and independent oracles used across test modules."""

from __future__ import annotations

import itertools

import numpy as np
import pytest

from rigabench.prefs import (
    Capacity,
    CostVector,
    Family,
    MobiusMasses2,
    Monotone,
    Orientation,
    OwaWeights,
    PreferenceModel,
    owa_monotone_for,
    sample_simplex,
    subsets,
)


def random_monotone_capacity(n: int, rng: np.random.Generator) -> Capacity:
    """Random normalized monotone capacity via the max-of-seeds construction:
    v(A) = max_{B subseteq A} x_B with x_B ~ U(0,1), rescaled to v(N)=1."""
    seeds = {a: float(rng.uniform(0.0, 1.0)) for a in subsets(n)}
    seeds[frozenset()] = 0.0
    table: dict[frozenset, float] = {frozenset(): 0.0}
    for a in subsets(n):
        if not a:
            continue
        best = seeds[a]
        for j in a:
            best = max(best, table[a - {j}])
        table[a] = best
    full = frozenset(range(n))
    scale = table[full]
    table = {a: v / scale for a, v in table.items()}
    return Capacity(n, table)


def random_submodular_capacity(n: int, rng: np.random.Generator) -> Capacity:
    """Random submodular capacity: concave transform of a modular function,
    v(A) = (sum_{j in A} w_j / sum w)^alpha with alpha in (0, 1]."""
    w = rng.uniform(0.2, 1.0, n)
    alpha = float(rng.uniform(0.3, 1.0))
    total = w.sum()
    table = {a: float((sum(w[j] for j in a) / total) ** alpha) if a else 0.0 for a in subsets(n)}
    return Capacity(n, table)


def random_belief_masses(n: int, rng: np.random.Generator) -> MobiusMasses2:
    """Random nonnegative (belief-function) 2-additive Mobius masses."""
    d = n + n * (n - 1) // 2
    coords = sample_simplex(d, rng)
    return MobiusMasses2(tuple(coords[:n]), tuple(coords[n:]))


def random_model(
    family: Family, n: int, rng: np.random.Generator, orientation: Orientation = Orientation.MINIMIZE
) -> PreferenceModel:
    """Random valid parameter point for a family."""
    if family is Family.CHOQUET2:
        return PreferenceModel(family, random_belief_masses(n, rng), orientation)
    if family is Family.OWA:
        monotone = owa_monotone_for(orientation)
        return PreferenceModel(family, OwaWeights(tuple(sample_simplex(n, rng, monotone)), monotone), orientation)
    return PreferenceModel(family, OwaWeights(tuple(sample_simplex(n, rng))), orientation)


def dominates(u: CostVector, v: CostVector, orientation: Orientation) -> bool:
    """Naive Pareto dominance test (independent oracle)."""
    ua, va = u.as_array(), v.as_array()
    if orientation is Orientation.MAXIMIZE:
        ua, va = -ua, -va
    return bool(np.all(ua <= va) and np.any(ua < va))


def pareto_filter_naive(points: list[CostVector], orientation: Orientation) -> list[CostVector]:
    """Quadratic-check Pareto filter: keep a point iff nothing dominates it
    and it is the first occurrence among equal points."""
    kept = []
    for i, p in enumerate(points):
        if any(dominates(q, p, orientation) for q in points):
            continue
        if any(q.values == p.values for q in points[:i]):
            continue
        kept.append(p)
    return kept


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20260819)
