"""Tests for problem instances, sub-solvers, and Pareto tooling."""

from __future__ import annotations

import numpy as np
import pytest

from conftest import pareto_filter_naive

from rigabench.prefs import (
    CostVector,
    Family,
    Monotone,
    MobiusMasses2,
    Orientation,
    OwaWeights,
    PreferenceModel,
)
from rigabench.problems import (
    CatalogInstance,
    InstanceParseError,
    InstanceTooLargeError,
    KnapsackInstance,
    TspInstance,
    check_feasible,
    enumerate_pareto_small,
    gen_knapsack,
    gen_tsp,
    load_instance,
    load_knapsack,
    load_tsp,
    pareto_filter,
    save_instance,
    solution_cost,
    solve_exact_small,
    solve_fixed,
)


def ws_model(w, orientation=Orientation.MAXIMIZE) -> PreferenceModel:
    return PreferenceModel(Family.WS, OwaWeights(tuple(w), Monotone.NONE), orientation)


def owa_model(w, orientation=Orientation.MAXIMIZE) -> PreferenceModel:
    mono = (
        Monotone.NON_INCREASING
        if orientation is Orientation.MAXIMIZE
        else Monotone.NON_DECREASING
    )
    return PreferenceModel(Family.OWA, OwaWeights(tuple(w), mono), orientation)


# ---------------------------------------------------------------------------
# Generators


def test_gen_knapsack_paper_scale():
    inst = gen_knapsack(100, 5, 42)
    assert inst.size == 100 and inst.n == 5 and inst.capacity == 50
    values = inst.value_matrix()
    assert values.min() >= 1 and values.max() <= 1000
    assert np.array_equal(values, values.astype(int))


def test_gen_knapsack_small_capacity():
    assert gen_knapsack(4, 2, 1).capacity == 2


def test_gen_knapsack_deterministic():
    assert gen_knapsack(20, 3, 7) == gen_knapsack(20, 3, 7)
    assert gen_knapsack(20, 3, 7) != gen_knapsack(20, 3, 8)


def test_gen_tsp_shapes_and_symmetry():
    inst = gen_tsp(50, 3, 11)
    assert inst.size == 50 and inst.n == 3
    arr = inst.cost_array()
    for layer in arr:
        assert np.array_equal(layer, layer.T)
        assert np.all(np.diag(layer) == 0)
        off = layer[~np.eye(50, dtype=bool)]
        assert off.min() >= 1 and off.max() <= 1000


def test_gen_tsp_walkthrough_scale_and_determinism():
    assert gen_tsp(6, 3, 5) == gen_tsp(6, 3, 5)
    assert gen_tsp(6, 3, 5) != gen_tsp(6, 3, 6)


# ---------------------------------------------------------------------------
# File format


def test_knapsack_round_trip(tmp_path):
    inst = gen_knapsack(12, 3, 9)
    path = tmp_path / "kp.txt"
    save_instance(inst, path)
    assert load_knapsack(path) == inst


def test_tsp_round_trip(tmp_path):
    inst = gen_tsp(7, 4, 13)
    path = tmp_path / "tsp.txt"
    save_instance(inst, path)
    assert load_tsp(path) == inst


def test_load_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("knapsack 3 12\n")
    with pytest.raises(InstanceParseError, match="line 1"):
        load_instance(path)
    path.write_text("subsetsum 3 4 0\n1 2 3\n1 2 3\n1 2 3\n1 2 3\n")
    with pytest.raises(InstanceParseError, match="unknown problem"):
        load_instance(path)


def test_load_rejects_non_integer(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("knapsack 2 2 0\n1 2\n3 x\n")
    with pytest.raises(InstanceParseError, match="line 3"):
        load_instance(path)


def test_load_rejects_wrong_width(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("knapsack 3 2 0\n1 2 3\n4 5\n")
    with pytest.raises(InstanceParseError, match="line 3.*expected 3"):
        load_instance(path)


def test_load_rejects_row_count_mismatch(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("knapsack 2 3 0\n1 2\n3 4\n")
    with pytest.raises(InstanceParseError, match="expected 3 data rows"):
        load_instance(path)
    path.write_text("knapsack 2 2 0\n1 2\n3 4\n5 6\n")
    with pytest.raises(InstanceParseError, match="line 4"):
        load_instance(path)


def test_load_rejects_asymmetry(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text(
        "tsp 2 3 0\n"
        "0 5 7\n5 0 9\n7 9 0\n"
        "0 1 2\n1 0 3\n9 3 0\n"  # [2][0] != [0][2]
    )
    with pytest.raises(InstanceParseError, match="layer 1 asymmetric"):
        load_instance(path)


def test_load_wrong_kind(tmp_path):
    path = tmp_path / "kp.txt"
    save_instance(gen_knapsack(4, 2, 0), path)
    with pytest.raises(InstanceParseError):
        load_tsp(path)


def test_loaded_capacity_is_half_the_items(tmp_path):
    path = tmp_path / "kp.txt"
    save_instance(gen_knapsack(9, 2, 3), path)
    assert load_knapsack(path).capacity == 4


# ---------------------------------------------------------------------------
# solve_fixed


def test_knapsack_ws_degenerate_weights():
    inst = KnapsackInstance(
        ((10.0, 1.0), (30.0, 1.0), (20.0, 1.0), (5.0, 1.0)), capacity=2
    )
    sol = solve_fixed(inst, ws_model([1.0, 0.0]))
    assert sol.encoding == (1, 2)  # the two largest first coordinates
    assert sol.cost.values == (50.0, 2.0)


def test_knapsack_ws_greedy_is_exact(rng):
    for trial in range(100):
        inst = gen_knapsack(8, 3, 1000 + trial)
        w = rng.dirichlet(np.ones(3))
        model = ws_model(w)
        fast = solve_fixed(inst, model)
        exact = solve_exact_small(inst, model)
        assert model.evaluate(fast.cost) == pytest.approx(
            model.evaluate(exact.cost), abs=1e-9
        )


def test_knapsack_owa_near_exact():
    for trial in range(50):
        inst = gen_knapsack(12, 3, 2000 + trial)
        model = owa_model([0.5, 0.3, 0.2])  # non-increasing for Maximize
        got = model.evaluate(solve_fixed(inst, model).cost)
        best = model.evaluate(solve_exact_small(inst, model).cost)
        assert got <= best + 1e-9
        assert got >= best * 0.98  # within 2 percent


def test_tsp_ws_near_exact():
    for trial in range(50):
        inst = gen_tsp(8, 3, 3000 + trial)
        model = ws_model([0.5, 0.25, 0.25], Orientation.MINIMIZE)
        got = model.evaluate(solve_fixed(inst, model).cost)
        best = model.evaluate(solve_exact_small(inst, model).cost)
        assert got >= best - 1e-9
        assert got <= best * 1.05  # within 5 percent


def test_tsp_four_cities_exact_is_best_of_three():
    inst = gen_tsp(4, 2, 77)
    model = ws_model([0.5, 0.5], Orientation.MINIMIZE)
    tours = [(0, 1, 2, 3), (0, 1, 3, 2), (0, 2, 1, 3)]
    best = min(model.evaluate(solution_cost(inst, t)) for t in tours)
    sol = solve_exact_small(inst, model)
    assert model.evaluate(sol.cost) == pytest.approx(best, abs=1e-9)
    assert sol.encoding in tours


def test_full_capacity_has_unique_solution():
    inst = KnapsackInstance(((3.0, 1.0), (2.0, 5.0), (4.0, 4.0)), capacity=3)
    model = owa_model([0.7, 0.3])
    fast = solve_fixed(inst, model)
    exact = solve_exact_small(inst, model)
    assert fast.encoding == exact.encoding == (0, 1, 2)


def test_single_item_capacity_picks_best_item():
    inst = KnapsackInstance(
        ((10.0, 1.0), (5.0, 5.0), (1.0, 10.0)), capacity=1
    )
    model = owa_model([0.9, 0.1])
    sol = solve_exact_small(inst, model)
    per_item = [model.evaluate(CostVector(v)) for v in inst.items]
    assert sol.encoding == (int(np.argmax(per_item)),)


def test_choquet_knapsack_feasible_and_not_worse_than_greedy(rng):
    inst = gen_knapsack(10, 3, 4004)
    model = PreferenceModel(
        Family.CHOQUET2,
        MobiusMasses2((0.3, 0.3, 0.2), (0.1, 0.1, 0.0)),
        Orientation.MAXIMIZE,
    )
    sol = solve_fixed(inst, model)
    check_feasible(inst, sol.encoding)
    assert len(sol.encoding) == inst.capacity
    assert sol.cost == solution_cost(inst, sol.encoding)


def test_budget_exhaustion_flag():
    inst = gen_knapsack(12, 3, 5005)
    sol = solve_fixed(inst, owa_model([0.5, 0.3, 0.2]), budget=1)
    assert sol.budget_exhausted
    tsp = gen_tsp(8, 3, 5006)
    sol2 = solve_fixed(tsp, ws_model([0.4, 0.3, 0.3], Orientation.MINIMIZE), budget=0)
    assert sol2.budget_exhausted
    full = solve_fixed(tsp, ws_model([0.4, 0.3, 0.3], Orientation.MINIMIZE))
    assert not full.budget_exhausted


def test_catalog_solvers():
    options = (
        CostVector((5.0, 5.0)),
        CostVector((1.0, 9.0)),
        CostVector((1.0, 9.0)),
    )
    inst = CatalogInstance(options, Orientation.MINIMIZE)
    model = ws_model([1.0, 0.0], Orientation.MINIMIZE)
    assert solve_fixed(inst, model).encoding == (1,)  # first-index tie
    assert solve_exact_small(inst, model).encoding == (1,)
    inst_max = CatalogInstance(options, Orientation.MAXIMIZE)
    model_max = ws_model([1.0, 0.0])
    assert solve_fixed(inst_max, model_max).encoding == (0,)


def test_model_dimension_mismatch_rejected():
    inst = gen_knapsack(6, 3, 1)
    with pytest.raises(ValueError):
        solve_fixed(inst, ws_model([0.5, 0.5]))


# ---------------------------------------------------------------------------
# Feasibility checks


def test_check_feasible_rejections():
    kp = gen_knapsack(6, 2, 0)  # capacity 3
    with pytest.raises(ValueError):
        check_feasible(kp, (0, 0))
    with pytest.raises(ValueError):
        check_feasible(kp, (0, 1, 2, 3))
    with pytest.raises(ValueError):
        check_feasible(kp, (2, 1))
    with pytest.raises(ValueError):
        check_feasible(kp, (0, 9))
    tsp = gen_tsp(5, 2, 0)
    with pytest.raises(ValueError):
        check_feasible(tsp, (1, 2, 3, 4, 0))
    with pytest.raises(ValueError):
        check_feasible(tsp, (0, 1, 2, 3))
    cat = CatalogInstance((CostVector((1.0, 2.0)),), Orientation.MINIMIZE)
    with pytest.raises(ValueError):
        check_feasible(cat, (1,))


# ---------------------------------------------------------------------------
# Exact enumeration guards


def test_exact_guards():
    with pytest.raises(InstanceTooLargeError):
        solve_exact_small(gen_tsp(11, 2, 0), ws_model([0.5, 0.5], Orientation.MINIMIZE))
    big = gen_knapsack(60, 2, 0)
    with pytest.raises(InstanceTooLargeError):
        solve_exact_small(big, ws_model([0.5, 0.5]))


# ---------------------------------------------------------------------------
# Pareto tooling


def test_pareto_filter_basic():
    pts = [CostVector((1.0, 2.0)), CostVector((2.0, 1.0)), CostVector((2.0, 2.0))]
    kept = pareto_filter(pts, Orientation.MINIMIZE)
    assert [y.values for y in kept] == [(1.0, 2.0), (2.0, 1.0)]


def test_pareto_filter_singleton_and_duplicates():
    single = [CostVector((3.0, 4.0))]
    assert pareto_filter(single, Orientation.MINIMIZE) == single
    dupes = [CostVector((1.0, 1.0)), CostVector((1.0, 1.0))]
    kept = pareto_filter(dupes, Orientation.MINIMIZE)
    assert len(kept) == 1 and kept[0] is dupes[0]


def test_pareto_filter_matches_quadratic_oracle(rng):
    for orientation in (Orientation.MINIMIZE, Orientation.MAXIMIZE):
        pts = [
            CostVector(tuple(rng.integers(1, 20, size=4).astype(float)))
            for _ in range(200)
        ]
        fast = pareto_filter(pts, orientation)
        slow = pareto_filter_naive(pts, orientation)
        assert [y.values for y in fast] == [y.values for y in slow]


def test_enumerate_pareto_matches_recursive_oracle(rng):
    # Independent oracle: recursive enumeration of every subset up to the
    # capacity, then the quadratic Pareto check.
    inst = gen_knapsack(10, 3, 6006)

    subsets: list[tuple[int, ...]] = []

    def rec(i: int, chosen: list[int]) -> None:
        if i == inst.size:
            subsets.append(tuple(chosen))
            return
        rec(i + 1, chosen)
        if len(chosen) < inst.capacity:
            chosen.append(i)
            rec(i + 1, chosen)
            chosen.pop()

    rec(0, [])
    oracle_costs = pareto_filter_naive(
        [solution_cost(inst, s) for s in subsets], Orientation.MAXIMIZE
    )
    fast = enumerate_pareto_small(inst)
    assert sorted(s.cost.values for s in fast) == sorted(
        y.values for y in oracle_costs
    )
    for s in fast:
        check_feasible(inst, s.encoding)
        assert s.cost == solution_cost(inst, s.encoding)


def test_identical_layers_pareto_is_single_objective_optimum():
    values = tuple(
        (float(v), float(v)) for v in (8, 3, 5, 9, 1, 7)
    )
    inst = KnapsackInstance(values, capacity=3)
    front = enumerate_pareto_small(inst)
    assert len(front) == 1
    exact = solve_exact_small(inst, ws_model([0.5, 0.5]))
    assert front[0].cost == exact.cost


def test_enumerate_pareto_tsp_small():
    inst = gen_tsp(6, 3, 7007)
    front = enumerate_pareto_small(inst)
    assert 1 <= len(front) <= 60  # (6-1)!/2 canonical tours
    for s in front:
        check_feasible(inst, s.encoding)
    # No front member dominates another.
    for a in front:
        for b in front:
            if a is b:
                continue
            av, bv = np.array(a.cost.values), np.array(b.cost.values)
            assert not ((av <= bv).all() and (av < bv).any())
