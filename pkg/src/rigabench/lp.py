"""Dense two-phase simplex with Bland's rule.

Solves ``maximize c.x  s.t.  A x {<=,>=,=} b,  x >= 0`` deterministically
and without any external solver. Intended for the small dense programs of
the regret engine (a few dozen variables, a few hundred rows); Bland's
pivoting rule keeps the heavily degenerate polytope programs from cycling.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

PIVOT_TOL = 1e-9
FEAS_TOL = 1e-8
MAX_PIVOTS_FACTOR = 2000


class Sense(str, enum.Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class LpStatus(str, enum.Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpResult:
    status: LpStatus
    objective: float
    point: np.ndarray | None

    @property
    def ok(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _pivot(tableau: np.ndarray, basis: np.ndarray, row: int, col: int) -> None:
    tableau[row] /= tableau[row, col]
    for i in range(tableau.shape[0]):
        if i != row and tableau[i, col] != 0.0:
            tableau[i] -= tableau[i, col] * tableau[row]
    basis[row] = col


def _price_out(costs: np.ndarray, tableau: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Reduced-cost row for the current basis: c - c_B . (B^-1 A)."""
    reduced = costs.astype(float).copy()
    for i, bi in enumerate(basis):
        cb = costs[bi]
        if cb != 0.0:
            reduced -= cb * tableau[i, :-1]
    return reduced


def _run_phase(
    tableau: np.ndarray, basis: np.ndarray, costs: np.ndarray, max_pivots: int
) -> LpStatus:
    """Pivot to optimality for ``maximize costs . x``; Bland's rule throughout."""
    for _ in range(max_pivots):
        reduced = _price_out(costs, tableau, basis)
        entering = -1
        for j in range(reduced.shape[0]):
            if reduced[j] > PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return LpStatus.OPTIMAL
        col = tableau[:, entering]
        leaving = -1
        best_ratio = np.inf
        for i in range(tableau.shape[0]):
            if col[i] > PIVOT_TOL:
                ratio = tableau[i, -1] / col[i]
                if ratio < best_ratio - PIVOT_TOL or (
                    abs(ratio - best_ratio) <= PIVOT_TOL
                    and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            return LpStatus.UNBOUNDED
        _pivot(tableau, basis, leaving, entering)
    raise RuntimeError("simplex exceeded its pivot budget (should not happen with Bland's rule)")


def simplex_maximize(
    c: np.ndarray, a: np.ndarray, b: np.ndarray, senses: list[Sense]
) -> LpResult:
    """Two-phase simplex for ``maximize c.x  s.t.  a x {sense} b,  x >= 0``."""
    c = np.asarray(c, dtype=float)
    a = np.asarray(a, dtype=float).copy()
    b = np.asarray(b, dtype=float).copy()
    if a.ndim != 2 or a.shape != (len(b), len(c)):
        raise ValueError(f"shape mismatch: A{a.shape}, b({len(b)}), c({len(c)})")
    m, nvar = a.shape
    senses = list(senses)

    # Normalize to b >= 0 so slack columns can seed the basis.
    flip = {Sense.LE: Sense.GE, Sense.GE: Sense.LE, Sense.EQ: Sense.EQ}
    for i in range(m):
        if b[i] < 0.0:
            a[i] = -a[i]
            b[i] = -b[i]
            senses[i] = flip[senses[i]]

    n_slack = sum(1 for s in senses if s is not Sense.EQ)
    artificial_rows = [i for i, s in enumerate(senses) if s is not Sense.LE]
    n_art = len(artificial_rows)
    ncols = nvar + n_slack + n_art

    tableau = np.zeros((m, ncols + 1))
    tableau[:, :nvar] = a
    tableau[:, -1] = b
    basis = np.full(m, -1, dtype=int)

    slack_at = nvar
    art_at = nvar + n_slack
    for i, s in enumerate(senses):
        if s is Sense.LE:
            tableau[i, slack_at] = 1.0
            basis[i] = slack_at
            slack_at += 1
        elif s is Sense.GE:
            tableau[i, slack_at] = -1.0
            slack_at += 1
        if s is not Sense.LE:
            tableau[i, art_at] = 1.0
            basis[i] = art_at
            art_at += 1

    max_pivots = MAX_PIVOTS_FACTOR * (m + ncols)

    if n_art:
        phase1 = np.zeros(ncols)
        phase1[nvar + n_slack :] = -1.0
        status = _run_phase(tableau, basis, phase1, max_pivots)
        if status is not LpStatus.OPTIMAL:  # pragma: no cover - phase 1 is bounded
            raise RuntimeError("phase 1 cannot be unbounded")
        art_total = sum(
            tableau[i, -1] for i in range(m) if basis[i] >= nvar + n_slack
        )
        if art_total > FEAS_TOL:
            return LpResult(LpStatus.INFEASIBLE, float("nan"), None)
        # Drive leftover degenerate artificials out of the basis.
        drop_rows = []
        for i in range(m):
            if basis[i] < nvar + n_slack:
                continue
            pivot_col = -1
            for j in range(nvar + n_slack):
                if abs(tableau[i, j]) > PIVOT_TOL:
                    pivot_col = j
                    break
            if pivot_col >= 0:
                _pivot(tableau, basis, i, pivot_col)
            else:
                drop_rows.append(i)
        if drop_rows:
            keep = [i for i in range(m) if i not in drop_rows]
            tableau = tableau[keep]
            basis = basis[keep]
            m = len(keep)

    # Artificial columns are dead from here on.
    tableau = np.delete(tableau, np.s_[nvar + n_slack : ncols], axis=1)
    ncols = nvar + n_slack

    costs = np.zeros(ncols)
    costs[:nvar] = c
    status = _run_phase(tableau, basis, costs, max_pivots)
    if status is LpStatus.UNBOUNDED:
        return LpResult(LpStatus.UNBOUNDED, float("inf"), None)

    x = np.zeros(ncols)
    for i in range(m):
        x[basis[i]] = tableau[i, -1]
    point = x[:nvar]
    return LpResult(LpStatus.OPTIMAL, float(np.dot(c, point)), point)


def lp_dump(c: np.ndarray, a: np.ndarray, b: np.ndarray, senses: list[Sense]) -> str:
    """Plain-text tableau of an LP, for debugging."""
    lines = ["maximize"]
    lines.append("  " + "  ".join(f"{v:+.6g}*x{j}" for j, v in enumerate(np.asarray(c, dtype=float))))
    lines.append("subject to (x >= 0)")
    a = np.asarray(a, dtype=float)
    for row, sense, rhs in zip(a, senses, np.asarray(b, dtype=float)):
        coeffs = " ".join(f"{v:>12.6g}" for v in row)
        lines.append(f"  [ {coeffs} ]  {sense.value:>2}  {rhs:.6g}")
    return "\n".join(lines)
