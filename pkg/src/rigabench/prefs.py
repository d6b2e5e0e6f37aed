"""Cost vectors and the three aggregation-function families (WS, OWA, Choquet).

Every family is linear in its parameter vector once the cost vector is
fixed; ``featurize`` reifies that: for a matching family and parameter
point, ``model.evaluate(y) == dot(model.coords(), featurize(family, y))``.

The fixed Choquet parameter order — singleton masses by ascending index,
then pair masses in lexicographic ``(i, j)`` order with ``i < j`` — is the
contract shared by ``featurize``, the LP engine and JSON serialization.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

TOL = 1e-9


class Orientation(str, enum.Enum):
    """Optimization sense; smaller aggregated values win under MINIMIZE."""

    MINIMIZE = "min"
    MAXIMIZE = "max"


class Family(str, enum.Enum):
    """Aggregation families: weighted sum, ordered weighted average,
    2-additive Choquet integral (Mobius representation)."""

    WS = "WS"
    OWA = "OWA"
    CHOQUET2 = "Choquet2"


class Monotone(str, enum.Enum):
    NONE = "none"
    NON_DECREASING = "nondecreasing"
    NON_INCREASING = "nonincreasing"


def owa_monotone_for(orientation: Orientation) -> Monotone:
    """OWA weight-chain direction that favors balanced solutions.

    Minimization uses non-decreasing rank weights (the largest costs get
    the largest weights); maximization mirrors this.
    """
    if orientation is Orientation.MINIMIZE:
        return Monotone.NON_DECREASING
    return Monotone.NON_INCREASING


@dataclass(frozen=True)
class CostVector:
    """A point in objective space: one value per objective."""

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        vals = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", vals)
        if len(vals) < 2:
            raise ValueError(f"cost vector needs at least 2 objectives, got {len(vals)}")
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"cost vector has non-finite entries: {vals}")

    @property
    def n(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def to_json(self) -> dict:
        return {"values": list(self.values), "n": self.n}

    @classmethod
    def from_json(cls, data: Mapping) -> "CostVector":
        vec = cls(tuple(data["values"]))
        if "n" in data and int(data["n"]) != vec.n:
            raise ValueError(f"declared n={data['n']} but got {vec.n} values")
        return vec


@dataclass(frozen=True)
class OwaWeights:
    """Normalized rank weights; with ``monotone=NONE`` they double as
    plain weighted-sum weights attached to objectives."""

    w: tuple[float, ...]
    monotone: Monotone = Monotone.NONE

    def __post_init__(self) -> None:
        w = tuple(float(v) for v in self.w)
        object.__setattr__(self, "w", w)
        if len(w) < 2:
            raise ValueError("need at least 2 weights")
        if abs(sum(w) - 1.0) > TOL:
            raise ValueError(f"weights must sum to 1, got {sum(w)!r}")
        if any(v < -TOL or v > 1.0 + TOL for v in w):
            raise ValueError(f"weights must lie in [0, 1], got {w}")
        if self.monotone is Monotone.NON_DECREASING:
            if any(w[j] > w[j + 1] + TOL for j in range(len(w) - 1)):
                raise ValueError(f"weights not non-decreasing: {w}")
        elif self.monotone is Monotone.NON_INCREASING:
            if any(w[j] + TOL < w[j + 1] for j in range(len(w) - 1)):
                raise ValueError(f"weights not non-increasing: {w}")

    @property
    def n(self) -> int:
        return len(self.w)


class NonMonotoneCapacityError(ValueError):
    """A set function failed capacity monotonicity; carries the violating
    nested pair (smaller, larger)."""

    def __init__(self, smaller: frozenset, larger: frozenset, v_small: float, v_large: float):
        self.smaller = smaller
        self.larger = larger
        super().__init__(
            f"capacity not monotone: v({sorted(smaller)})={v_small!r} > "
            f"v({sorted(larger)})={v_large!r}"
        )


def subsets(n: int) -> Iterable[frozenset]:
    """All subsets of {0..n-1}, smallest first."""
    items = range(n)
    for k in range(n + 1):
        for combo in itertools.combinations(items, k):
            yield frozenset(combo)


@dataclass(frozen=True, eq=False)
class Capacity:
    """Dense normalized monotone set function on {0..n-1}; small n only."""

    n: int
    table: Mapping[frozenset, float]

    def __post_init__(self) -> None:
        if self.n > 12:
            raise ValueError(f"dense capacity limited to n <= 12, got {self.n}")
        table = {frozenset(k): float(v) for k, v in self.table.items()}
        object.__setattr__(self, "table", table)
        expected = set(subsets(self.n))
        if set(table) != expected:
            raise ValueError("capacity table must cover every subset of {0..n-1}")
        if abs(table[frozenset()]) > TOL:
            raise ValueError(f"v(empty) must be 0, got {table[frozenset()]!r}")
        full = frozenset(range(self.n))
        if abs(table[full] - 1.0) > TOL:
            raise ValueError(f"v(N) must be 1, got {table[full]!r}")
        for a in expected:
            va = table[a]
            for j in range(self.n):
                if j in a:
                    continue
                b = a | {j}
                if va > table[b] + TOL:
                    raise NonMonotoneCapacityError(a, b, va, table[b])

    def value(self, coalition: Iterable[int]) -> float:
        return self.table[frozenset(coalition)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Capacity):
            return NotImplemented
        return self.n == other.n and self.table == other.table


def pair_order(n: int) -> list[tuple[int, int]]:
    """The fixed lexicographic order of objective pairs (i < j)."""
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@dataclass(frozen=True)
class MobiusMasses2:
    """Mobius masses of a 2-additive capacity: singleton masses by index,
    pair masses in ``pair_order`` sequence."""

    singles: tuple[float, ...]
    pairs: tuple[float, ...]

    def __post_init__(self) -> None:
        singles = tuple(float(v) for v in self.singles)
        pairs = tuple(float(v) for v in self.pairs)
        object.__setattr__(self, "singles", singles)
        object.__setattr__(self, "pairs", pairs)
        n = len(singles)
        if n < 2:
            raise ValueError("need at least 2 objectives")
        if len(pairs) != n * (n - 1) // 2:
            raise ValueError(
                f"expected {n * (n - 1) // 2} pair masses for n={n}, got {len(pairs)}"
            )
        total = sum(singles) + sum(pairs)
        if abs(total - 1.0) > TOL:
            raise ValueError(f"masses must sum to 1, got {total!r}")
        # 2-additive monotonicity: m({j}) + sum_{i in A} m({i,j}) >= 0 for
        # every A not containing j; the binding A collects the negative pairs.
        order = pair_order(n)
        for j in range(n):
            worst = singles[j]
            for (i, k), mass in zip(order, pairs):
                if j in (i, k) and mass < 0.0:
                    worst += mass
            if worst < -TOL:
                raise ValueError(
                    f"2-additive monotonicity violated at objective {j}: "
                    f"worst-case marginal {worst!r} < 0"
                )

    @property
    def n(self) -> int:
        return len(self.singles)

    def coords(self) -> np.ndarray:
        return np.asarray(self.singles + self.pairs, dtype=float)

    def to_mobius_map(self) -> dict[frozenset, float]:
        m: dict[frozenset, float] = {frozenset(): 0.0}
        for j, v in enumerate(self.singles):
            m[frozenset({j})] = v
        for (i, j), v in zip(pair_order(self.n), self.pairs):
            m[frozenset({i, j})] = v
        return m


def eval_ws(w: OwaWeights, y: CostVector) -> float:
    """Weighted sum of the cost vector."""
    if w.n != y.n:
        raise ValueError(f"dimension mismatch: {w.n} weights vs {y.n} objectives")
    return float(np.dot(w.w, y.values))


def eval_owa(w: OwaWeights, y: CostVector) -> float:
    """Ordered weighted average: weights apply to the ascending-sorted vector."""
    if w.n != y.n:
        raise ValueError(f"dimension mismatch: {w.n} weights vs {y.n} objectives")
    return float(np.dot(w.w, np.sort(y.values)))


def eval_choquet_capacity(cap: Capacity, y: CostVector) -> float:
    """Choquet integral of ``y`` w.r.t. a (full) capacity.

    Sum over ranks of (y_(j) - y_(j-1)) * v({(j),...,(n)}) with y_(0) = 0;
    sorting ties are broken by original index (the value is tie-independent).
    """
    if cap.n != y.n:
        raise ValueError(f"dimension mismatch: capacity n={cap.n} vs {y.n} objectives")
    order = np.argsort(y.values, kind="stable")
    total = 0.0
    prev = 0.0
    for pos in range(y.n):
        coalition = frozenset(int(i) for i in order[pos:])
        val = y.values[order[pos]]
        total += (val - prev) * cap.table[coalition]
        prev = val
    return total


def eval_choquet_mobius(m: MobiusMasses2, y: CostVector) -> float:
    """Choquet integral via 2-additive Mobius masses:
    sum_j m({j}) y_j + sum_{i<j} m({i,j}) min(y_i, y_j)."""
    if m.n != y.n:
        raise ValueError(f"dimension mismatch: masses n={m.n} vs {y.n} objectives")
    vals = y.as_array()
    total = float(np.dot(m.singles, vals))
    for (i, j), mass in zip(pair_order(m.n), m.pairs):
        total += mass * min(vals[i], vals[j])
    return total


def mobius_from_capacity(cap: Capacity) -> dict[frozenset, float]:
    """Full Mobius inverse m(A) = sum_{B subseteq A} (-1)^{|A \\ B|} v(B)."""
    masses: dict[frozenset, float] = {}
    for a in subsets(cap.n):
        total = 0.0
        elems = sorted(a)
        for k in range(len(elems) + 1):
            for combo in itertools.combinations(elems, k):
                b = frozenset(combo)
                total += (-1) ** (len(a) - len(b)) * cap.table[b]
        masses[a] = total
    return masses


def capacity_from_mobius(masses: Mapping[frozenset, float], n: int) -> Capacity:
    """Reconstruct v(A) = sum_{B subseteq A} m(B); raises
    ``NonMonotoneCapacityError`` if the result is not a capacity."""
    norm = {frozenset(k): float(v) for k, v in masses.items()}
    table: dict[frozenset, float] = {}
    for a in subsets(n):
        elems = sorted(a)
        total = 0.0
        for k in range(len(elems) + 1):
            for combo in itertools.combinations(elems, k):
                total += norm.get(frozenset(combo), 0.0)
        table[a] = total
    return Capacity(n, table)


def param_dim(family: Family, n: int) -> int:
    """Parameter-space dimension of a family at n objectives."""
    if family is Family.CHOQUET2:
        return n + n * (n - 1) // 2
    return n


def featurize(family: Family, y: CostVector) -> np.ndarray:
    """Feature vector phi(y) such that f(y) = dot(coords, phi(y)).

    WS: y itself; OWA: y sorted ascending; Choquet2: y followed by the
    pairwise minima in ``pair_order`` sequence.
    """
    vals = y.as_array()
    if family is Family.WS:
        return vals
    if family is Family.OWA:
        return np.sort(vals)
    if family is Family.CHOQUET2:
        mins = [min(vals[i], vals[j]) for i, j in pair_order(y.n)]
        return np.concatenate([vals, np.asarray(mins, dtype=float)])
    raise ValueError(f"unknown family {family!r}")


def featurize_rows(family: Family, rows: np.ndarray) -> np.ndarray:
    """Row-wise ``featurize`` for an (m, n) matrix of cost vectors."""
    rows = np.asarray(rows, dtype=float)
    if family is Family.WS:
        return rows
    if family is Family.OWA:
        return np.sort(rows, axis=1)
    if family is Family.CHOQUET2:
        n = rows.shape[1]
        mins = [np.minimum(rows[:, i], rows[:, j]) for i, j in pair_order(n)]
        return np.column_stack([rows] + mins)
    raise ValueError(f"unknown family {family!r}")


def sample_simplex(
    dim: int, rng: np.random.Generator, monotone: Monotone = Monotone.NONE
) -> np.ndarray:
    """Uniform point on the (dim-1)-simplex via exponential spacings;
    sorting makes it uniform over the ordered simplex."""
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    point = rng.exponential(1.0, dim)
    point /= point.sum()
    if monotone is Monotone.NON_DECREASING:
        point = np.sort(point)
    elif monotone is Monotone.NON_INCREASING:
        point = np.sort(point)[::-1]
    return point


@dataclass(frozen=True)
class PreferenceModel:
    """Family tag plus a concrete parameter point and optimization sense."""

    family: Family
    params: OwaWeights | MobiusMasses2
    orientation: Orientation

    def __post_init__(self) -> None:
        if self.family is Family.CHOQUET2:
            if not isinstance(self.params, MobiusMasses2):
                raise TypeError("Choquet2 models take MobiusMasses2 parameters")
        else:
            if not isinstance(self.params, OwaWeights):
                raise TypeError(f"{self.family.value} models take OwaWeights parameters")

    @property
    def n(self) -> int:
        return self.params.n

    def evaluate(self, y: CostVector) -> float:
        if self.family is Family.WS:
            return eval_ws(self.params, y)
        if self.family is Family.OWA:
            return eval_owa(self.params, y)
        return eval_choquet_mobius(self.params, y)

    def coords(self) -> np.ndarray:
        if self.family is Family.CHOQUET2:
            return self.params.coords()
        return np.asarray(self.params.w, dtype=float)

    def to_json(self) -> dict:
        if self.family is Family.CHOQUET2:
            params = {"singles": list(self.params.singles), "pairs": list(self.params.pairs)}
        else:
            params = {"w": list(self.params.w), "monotone": self.params.monotone.value}
        return {
            "family": self.family.value,
            "orientation": self.orientation.value,
            "params": params,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PreferenceModel":
        family = Family(data["family"])
        orientation = Orientation(data["orientation"])
        raw = data["params"]
        if family is Family.CHOQUET2:
            params: OwaWeights | MobiusMasses2 = MobiusMasses2(
                tuple(raw["singles"]), tuple(raw["pairs"])
            )
        else:
            params = OwaWeights(tuple(raw["w"]), Monotone(raw.get("monotone", "none")))
        return cls(family, params, orientation)


def model_from_coords(
    family: Family, coords: Sequence[float], orientation: Orientation
) -> PreferenceModel:
    """Build a concrete model from a parameter point in canonical order."""
    coords = tuple(float(v) for v in coords)
    if family is Family.CHOQUET2:
        k = int((math.isqrt(8 * len(coords) + 1) - 1) // 2)
        # d = n + n(n-1)/2  =>  n is the k with k(k+1)/2 = d
        n = k
        if n * (n + 1) // 2 != len(coords):
            raise ValueError(f"coordinate count {len(coords)} is not n + n(n-1)/2 for any n")
        params: OwaWeights | MobiusMasses2 = MobiusMasses2(coords[:n], coords[n:])
    elif family is Family.OWA:
        params = OwaWeights(coords, owa_monotone_for(orientation))
    else:
        params = OwaWeights(coords, Monotone.NONE)
    return PreferenceModel(family, params, orientation)
