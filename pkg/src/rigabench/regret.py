"""Admissible-parameter polytope and minimax-regret machinery.

The polytope is a value type: adding a preference statement produces a new
polytope (statements that would empty it are rejected). PMR/MR/MMR are
computed by the in-package simplex; ties always resolve to the first index
so every caller sees deterministic results.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .lp import LpResult, LpStatus, Sense, lp_dump, simplex_maximize
from .prefs import (
    CostVector,
    Family,
    Monotone,
    Orientation,
    featurize,
    owa_monotone_for,
    param_dim,
)

FEAS_TOL = 1e-9
VERTEX_TOL = 1e-7
MMR_ZERO_TOL = 1e-6
SKIP_MARGIN = 1e-7
MAX_VERTEX_DIM = 25
MAX_VERTEX_COMBINATIONS = 2_000_000


class InconsistentPreferenceError(Exception):
    """A preference statement would empty the admissible polytope."""

    def __init__(self, statement: "PreferenceStatement"):
        self.statement = statement
        super().__init__(
            f"statement prefers {statement.preferred.values} over "
            f"{statement.other.values} but no admissible parameter remains"
        )


class InfeasiblePolytopeError(Exception):
    """A regret query hit an (invariantly impossible) empty polytope."""


class PolytopeTooLargeError(Exception):
    """Vertex enumeration refused; callers should fall back to sampling."""


class QueriesExhaustedError(Exception):
    """Every unordered pair involving the current solution was already asked
    this phase; the elicitation phase must stop."""


@dataclass(frozen=True)
class LinearConstraint:
    """One face ``a . omega {<=,>=,=} b`` of the parameter polytope."""

    a: tuple[float, ...]
    b: float
    sense: Sense

    def __post_init__(self) -> None:
        a = tuple(float(v) for v in self.a)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", float(self.b))
        if not any(v != 0.0 for v in a):
            raise ValueError("constraint row must have a nonzero coefficient")

    def satisfied_by(self, point: np.ndarray, tol: float = FEAS_TOL) -> bool:
        lhs = float(np.dot(self.a, point))
        if self.sense is Sense.LE:
            return lhs <= self.b + tol
        if self.sense is Sense.GE:
            return lhs >= self.b - tol
        return abs(lhs - self.b) <= tol

    def to_json(self) -> dict:
        return {"a": list(self.a), "b": self.b, "sense": self.sense.value}

    @classmethod
    def from_json(cls, data: Mapping) -> "LinearConstraint":
        return cls(tuple(data["a"]), data["b"], Sense(data["sense"]))


@dataclass(frozen=True)
class PreferenceStatement:
    """One answered comparison: ``preferred`` was chosen over ``other``."""

    preferred: CostVector
    other: CostVector

    def __post_init__(self) -> None:
        if self.preferred.n != self.other.n:
            raise ValueError("statement vectors must have equal dimension")
        if self.preferred.values == self.other.values:
            raise ValueError("statement vectors must differ")


def statement_to_constraint(
    statement: PreferenceStatement, family: Family, orientation: Orientation
) -> LinearConstraint:
    """Linear face induced by a statement: f(preferred) <= f(other) for every
    admissible parameter, expressed through the family's feature map."""
    diff = featurize(family, statement.preferred) - featurize(family, statement.other)
    if orientation is Orientation.MAXIMIZE:
        diff = -diff
    if float(np.max(np.abs(diff))) <= 1e-12:
        raise ValueError(
            "statement carries no information for this family "
            f"(identical feature vectors for {statement.preferred.values} and "
            f"{statement.other.values})"
        )
    return LinearConstraint(tuple(diff), 0.0, Sense.LE)


def _is_plain_nonnegativity(c: LinearConstraint) -> bool:
    """True for single-coordinate ``omega_j >= 0`` rows, which the simplex
    already enforces through its x >= 0 standard form."""
    if c.b != 0.0:
        return False
    nz = [v for v in c.a if v != 0.0]
    if len(nz) != 1:
        return False
    v = nz[0]
    return (c.sense is Sense.GE and v > 0.0) or (c.sense is Sense.LE and v < 0.0)


@dataclass(frozen=True)
class ParameterPolytope:
    """The convex set of parameters consistent with all statements so far."""

    dim: int
    family: Family
    orientation: Orientation
    base: tuple[LinearConstraint, ...]
    learned: tuple[LinearConstraint, ...] = ()

    @classmethod
    def base_for(
        cls, family: Family, n: int, orientation: Orientation
    ) -> "ParameterPolytope":
        """Initial region: normalization, nonnegativity, and for OWA the
        orientation's weight-monotonicity chain."""
        d = param_dim(family, n)
        rows: list[LinearConstraint] = [
            LinearConstraint((1.0,) * d, 1.0, Sense.EQ)
        ]
        for j in range(d):
            e = [0.0] * d
            e[j] = 1.0
            rows.append(LinearConstraint(tuple(e), 0.0, Sense.GE))
        if family is Family.OWA:
            ascending = owa_monotone_for(orientation) is Monotone.NON_DECREASING
            for j in range(n - 1):
                chain = [0.0] * d
                if ascending:
                    chain[j], chain[j + 1] = 1.0, -1.0
                else:
                    chain[j], chain[j + 1] = -1.0, 1.0
                rows.append(LinearConstraint(tuple(chain), 0.0, Sense.LE))
        return cls(d, family, orientation, tuple(rows))

    def all_constraints(self) -> tuple[LinearConstraint, ...]:
        return self.base + self.learned

    def lp_rows(self) -> tuple[np.ndarray, np.ndarray, list[Sense]]:
        """Constraint rows for the simplex, dropping the plain nonnegativity
        faces its standard form already implies."""
        rows = [c for c in self.all_constraints() if not _is_plain_nonnegativity(c)]
        a = np.array([c.a for c in rows], dtype=float)
        b = np.array([c.b for c in rows], dtype=float)
        return a, b, [c.sense for c in rows]

    def contains(self, point: np.ndarray, tol: float = FEAS_TOL) -> bool:
        return all(c.satisfied_by(point, tol) for c in self.all_constraints())

    def feasible_point(self) -> np.ndarray | None:
        a, b, senses = self.lp_rows()
        res = simplex_maximize(np.zeros(self.dim), a, b, senses)
        return res.point if res.ok else None

    def is_feasible(self) -> bool:
        return self.feasible_point() is not None

    def with_constraint(self, constraint: LinearConstraint) -> "ParameterPolytope":
        if len(constraint.a) != self.dim:
            raise ValueError(f"constraint has {len(constraint.a)} coefficients, expected {self.dim}")
        return ParameterPolytope(
            self.dim, self.family, self.orientation, self.base, self.learned + (constraint,)
        )

    def with_statement(self, statement: PreferenceStatement) -> "ParameterPolytope":
        """New polytope with the statement's face added; raises
        ``InconsistentPreferenceError`` if that would empty the region."""
        constraint = statement_to_constraint(statement, self.family, self.orientation)
        candidate = self.with_constraint(constraint)
        if not candidate.is_feasible():
            raise InconsistentPreferenceError(statement)
        return candidate

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "family": self.family.value,
            "orientation": self.orientation.value,
            "base": [c.to_json() for c in self.base],
            "learned": [c.to_json() for c in self.learned],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "ParameterPolytope":
        return cls(
            int(data["dim"]),
            Family(data["family"]),
            Orientation(data["orientation"]),
            tuple(LinearConstraint.from_json(c) for c in data["base"]),
            tuple(LinearConstraint.from_json(c) for c in data["learned"]),
        )


def lp_solve(c: Sequence[float], polytope: ParameterPolytope) -> LpResult:
    """Maximize ``c . omega`` over the polytope."""
    a, b, senses = polytope.lp_rows()
    return simplex_maximize(np.asarray(c, dtype=float), a, b, senses)


def dump_lp(c: Sequence[float], polytope: ParameterPolytope) -> str:
    """Plain-text tableau of ``maximize c . omega`` over the polytope."""
    a, b, senses = polytope.lp_rows()
    return lp_dump(np.asarray(c, dtype=float), a, b, senses)


def _pmr_objective(
    x: CostVector, other: CostVector, family: Family, orientation: Orientation
) -> np.ndarray:
    diff = featurize(family, x) - featurize(family, other)
    if orientation is Orientation.MAXIMIZE:
        diff = -diff
    return diff


def pmr(x: CostVector, other: CostVector, polytope: ParameterPolytope) -> float:
    """Pairwise max regret: the worst-case loss of choosing ``x`` over
    ``other`` across the admissible polytope."""
    if x.values == other.values:
        return 0.0
    objective = _pmr_objective(x, other, polytope.family, polytope.orientation)
    res = lp_solve(objective, polytope)
    if res.status is LpStatus.INFEASIBLE:
        raise InfeasiblePolytopeError("polytope is empty; invariant breach")
    if res.status is LpStatus.UNBOUNDED:  # pragma: no cover - region is bounded
        raise InfeasiblePolytopeError("polytope is unbounded; invariant breach")
    return res.objective


def mr(
    x: CostVector, pool: Sequence[CostVector], polytope: ParameterPolytope
) -> tuple[float, int]:
    """Max regret of ``x`` against a pool; returns (value, adversary index),
    ties to the first index."""
    if not pool:
        raise ValueError("pool must be nonempty")
    best_val = -math.inf
    best_j = -1
    for j, other in enumerate(pool):
        val = pmr(x, other, polytope)
        if val > best_val:
            best_val = val
            best_j = j
    return best_val, best_j


def mmr(pool: Sequence[CostVector], polytope: ParameterPolytope) -> tuple[float, int]:
    """Minimax regret over a pool; returns (value, argmin index), ties to the
    first index."""
    if not pool:
        raise ValueError("pool must be nonempty")
    best_val = math.inf
    best_i = -1
    for i, x in enumerate(pool):
        val, _ = mr(x, pool, polytope)
        if val < best_val:
            best_val = val
            best_i = i
    return best_val, best_i


def pair_key(a: CostVector, b: CostVector) -> frozenset:
    """Unordered key of a compared pair (by cost values)."""
    return frozenset((a.values, b.values))


class RegretCache:
    """Stale upper bounds on PMR values for one elicitation run.

    During a run the polytope only shrinks, and PMR is monotone
    non-increasing under shrinkage, so any previously computed value stays a
    valid upper bound. The cached bounds let minimax-regret scans skip most
    LP calls while returning bitwise the same (value, argmin) as the naive
    scan: a row is skipped only when its bound proves it cannot strictly
    beat the incumbent, which is exactly when the naive scan would keep the
    earlier index anyway.
    """

    def __init__(self, polytope: ParameterPolytope):
        self.family = polytope.family
        self.orientation = polytope.orientation
        self._ub: dict[tuple, float] = {}
        self._stamp: dict[tuple, int] = {}
        self._epoch = 0

    def advance(self) -> None:
        """Mark that the polytope shrank: cached values become stale bounds."""
        self._epoch += 1

    def upper_bound(self, a: CostVector, b: CostVector) -> float:
        return self._ub.get((a.values, b.values), math.inf)

    def is_fresh(self, a: CostVector, b: CostVector) -> bool:
        return self._stamp.get((a.values, b.values), -1) == self._epoch

    def exact_pmr(self, a: CostVector, b: CostVector, polytope: ParameterPolytope) -> float:
        key = (a.values, b.values)
        if self._stamp.get(key, -1) == self._epoch:
            return self._ub[key]
        val = pmr(a, b, polytope)
        self._ub[key] = val
        self._stamp[key] = self._epoch
        return val

    def warm_from_vertices(
        self, pool: Sequence[CostVector], vertices: Sequence[np.ndarray]
    ) -> None:
        """Seed exact PMR values for every ordered pair from an explicit
        vertex description of the current polytope (a linear objective is
        maximized at a vertex)."""
        if not vertices:
            return
        vmat = np.asarray(vertices, dtype=float)
        phis = np.asarray([featurize(self.family, y) for y in pool], dtype=float)
        if self.orientation is Orientation.MAXIMIZE:
            phis = -phis
        scores = phis @ vmat.T  # (pool, vertices)
        for i, a in enumerate(pool):
            for j, b in enumerate(pool):
                val = 0.0 if a.values == b.values else float(np.max(scores[i] - scores[j]))
                key = (a.values, b.values)
                self._ub[key] = val
                self._stamp[key] = self._epoch


def _unique_costs(pool: Sequence[CostVector]) -> tuple[list[CostVector], list[int]]:
    """Distinct cost vectors in first-appearance order, plus the original
    index of each one's first occurrence."""
    seen: dict[tuple, int] = {}
    uniques: list[CostVector] = []
    firsts: list[int] = []
    for idx, y in enumerate(pool):
        if y.values not in seen:
            seen[y.values] = len(uniques)
            uniques.append(y)
            firsts.append(idx)
    return uniques, firsts


def mmr_cached(
    pool: Sequence[CostVector], polytope: ParameterPolytope, cache: RegretCache
) -> tuple[float, int]:
    """Exact minimax regret using the cache's stale bounds to prune LP calls.

    Equivalent to ``mmr`` (same value, same first-index argmin) because a
    candidate row is abandoned only once its exact running maximum or stale
    bounds prove it cannot strictly beat the incumbent. Bounds are trusted
    only with a ``SKIP_MARGIN`` of slack: re-solving a pair after the
    polytope shrank can exceed the stale value by LP roundoff dust.
    """
    if not pool:
        raise ValueError("pool must be nonempty")
    uniques, firsts = _unique_costs(pool)
    best_val = math.inf
    best_i = -1
    for i, x in enumerate(uniques):
        # Max regret of x, aborted as soon as it provably reaches best_val.
        others = sorted(
            (j for j in range(len(uniques)) if j != i),
            key=lambda j: -cache.upper_bound(x, uniques[j]),
        )
        cur = 0.0  # pmr(x, x) = 0 is always in the pool
        complete = True
        for j in others:
            if cur >= best_val:
                complete = False
                break
            if cache.upper_bound(x, uniques[j]) <= cur - SKIP_MARGIN:
                break  # descending bounds: nothing later can raise cur
            cur = max(cur, cache.exact_pmr(x, uniques[j], polytope))
        if complete and cur < best_val:
            best_val = cur
            best_i = i
    return best_val, firsts[best_i]


def css_query(
    pool: Sequence[CostVector],
    polytope: ParameterPolytope,
    asked: set[frozenset] | None = None,
    cache: RegretCache | None = None,
) -> tuple[int, int]:
    """Current-solution-strategy query: the minimax-regret solution against
    its worst-case adversary (next-best adversary if that unordered pair was
    already asked this phase). Returns pool indices (i, j).
    """
    if len(pool) < 2:
        raise ValueError("need at least two solutions to query")
    asked = asked if asked is not None else set()
    if cache is None:
        cache = RegretCache(polytope)
    _, i = mmr_cached(pool, polytope, cache)
    x = pool[i]
    uniques, firsts = _unique_costs(pool)
    candidates = [
        (uc, firsts[k])
        for k, uc in enumerate(uniques)
        if uc.values != x.values
    ]
    scored = [
        (cache.exact_pmr(x, uc, polytope), idx, uc) for uc, idx in candidates
    ]
    scored.sort(key=lambda t: (-t[0], t[1]))
    for _, idx, uc in scored:
        if pair_key(x, uc) not in asked:
            return i, idx
    raise QueriesExhaustedError(
        "every pair involving the minimax-regret solution was already asked"
    )


def enumerate_vertices(
    polytope: ParameterPolytope, dedup_tol: float = VERTEX_TOL
) -> list[np.ndarray]:
    """All extreme points by active-set enumeration, sorted lexicographically.

    Refuses (``PolytopeTooLargeError``) when the dimension or the number of
    active-set combinations is too large; callers then use
    ``sample_polytope`` as an approximate fallback.
    """
    d = polytope.dim
    if d > MAX_VERTEX_DIM:
        raise PolytopeTooLargeError(
            f"dimension {d} > {MAX_VERTEX_DIM}; fall back to sample_polytope"
        )
    constraints = polytope.all_constraints()
    eq = [c for c in constraints if c.sense is Sense.EQ]
    ineq = [c for c in constraints if c.sense is not Sense.EQ]
    n_eq = len(eq)
    k = d - n_eq
    if k < 0:
        raise PolytopeTooLargeError("more equalities than dimensions")
    if math.comb(len(ineq), k) > MAX_VERTEX_COMBINATIONS:
        raise PolytopeTooLargeError(
            f"C({len(ineq)},{k}) active sets exceed the enumeration budget; "
            "fall back to sample_polytope"
        )
    eq_a = np.array([c.a for c in eq], dtype=float).reshape(n_eq, d)
    eq_b = np.array([c.b for c in eq], dtype=float)

    points: list[np.ndarray] = []
    for combo in itertools.combinations(range(len(ineq)), k):
        mat = np.vstack([eq_a] + [np.asarray(ineq[i].a, dtype=float) for i in combo])
        rhs = np.concatenate([eq_b, [ineq[i].b for i in combo]])
        try:
            x = np.linalg.solve(mat, rhs)
        except np.linalg.LinAlgError:
            continue
        if not np.all(np.isfinite(x)):
            continue
        if np.max(np.abs(mat @ x - rhs)) > 1e-7:
            continue
        if not polytope.contains(x, tol=VERTEX_TOL):
            continue
        if any(np.linalg.norm(x - p) <= dedup_tol for p in points):
            continue
        points.append(x)
    points.sort(key=lambda p: tuple(p))
    return points


def sample_polytope(
    polytope: ParameterPolytope,
    count: int,
    rng: np.random.Generator,
    burn_in: int = 1000,
) -> list[np.ndarray]:
    """Approximate fallback: hit-and-run samples from the polytope interior."""
    d = polytope.dim
    starts = []
    for j in range(d):
        c = np.zeros(d)
        c[j] = 1.0
        res = lp_solve(c, polytope)
        if res.ok:
            starts.append(res.point)
    if not starts:
        raise InfeasiblePolytopeError("cannot sample an empty polytope")
    x = np.mean(starts, axis=0)

    constraints = polytope.all_constraints()
    eq_rows = np.array(
        [c.a for c in constraints if c.sense is Sense.EQ], dtype=float
    ).reshape(-1, d)
    ineq: list[tuple[np.ndarray, float]] = []
    for c in constraints:
        if c.sense is Sense.LE:
            ineq.append((np.asarray(c.a, dtype=float), c.b))
        elif c.sense is Sense.GE:
            ineq.append((-np.asarray(c.a, dtype=float), -c.b))

    if eq_rows.size:
        _, s, vt = np.linalg.svd(eq_rows)
        rank = int(np.sum(s > 1e-12))
        null_basis = vt[rank:].T  # (d, k)
    else:
        null_basis = np.eye(d)
    if null_basis.shape[1] == 0:
        return [x.copy() for _ in range(count)]

    samples: list[np.ndarray] = []
    step = 0
    while len(samples) < count:
        direction = null_basis @ rng.standard_normal(null_basis.shape[1])
        norm = np.linalg.norm(direction)
        if norm < 1e-12:
            continue
        direction /= norm
        t_lo, t_hi = -math.inf, math.inf
        for a, b in ineq:
            denom = float(np.dot(a, direction))
            slack = b - float(np.dot(a, x))
            if denom > 1e-12:
                t_hi = min(t_hi, slack / denom)
            elif denom < -1e-12:
                t_lo = max(t_lo, slack / denom)
        if not (math.isfinite(t_lo) and math.isfinite(t_hi)) or t_hi <= t_lo:
            continue
        x = x + rng.uniform(t_lo, t_hi) * direction
        step += 1
        if step > burn_in:
            samples.append(x.copy())
    return samples
