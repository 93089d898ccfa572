"""Treewidth: validation, exact solver, covering bags, bounds, .td format."""

from __future__ import annotations

import random

import pytest

from chipwidth.brambles import gen_grid_bramble, gen_torus_fg, min_hitting_set
from chipwidth.graphs import Graph, make_elementary, make_family, row_collapse_minor
from chipwidth.treewidth import (
    NotATreeError,
    SolverLimits,
    TdFormatError,
    TreeDecomposition,
    covering_bag,
    decomposition_from_elimination_order,
    degeneracy,
    exact_treewidth,
    min_fill_order,
    read_td,
    treewidth_bounds_report,
    validate_tree_decomposition,
    write_td,
)


def mask(*vs: int) -> int:
    out = 0
    for v in vs:
        out |= 1 << v
    return out


P3 = make_elementary("path", 3)


# --- validation ----------------------------------------------------------------


def test_validate_accepts_solver_output():
    g = make_family("grid", 3, 3)
    res = exact_treewidth(g)
    report = validate_tree_decomposition(g, res.decomposition)
    assert report.valid and report.condition is None


def test_validate_condition1_vertex_missing():
    td = TreeDecomposition((mask(0, 1), mask(1)), ((0, 1),), 3)
    report = validate_tree_decomposition(P3, td)
    assert not report.valid and report.condition == 1 and report.witness == 2


def test_validate_condition2_edge_uncovered():
    td = TreeDecomposition((mask(0, 1), mask(2)), ((0, 1),), 3)
    report = validate_tree_decomposition(P3, td)
    assert not report.valid and report.condition == 2 and report.witness == (1, 2)


def test_validate_condition3_disconnected_trace():
    td = TreeDecomposition((mask(0, 1), mask(1, 2), mask(0)), ((0, 1), (1, 2)), 3)
    report = validate_tree_decomposition(P3, td)
    assert not report.valid and report.condition == 3 and report.witness == 0


def test_validate_rejects_non_tree():
    cyclic = TreeDecomposition((mask(0, 1), mask(1, 2), mask(0, 2)),
                               ((0, 1), (1, 2), (0, 2)), 3)
    with pytest.raises(NotATreeError):
        validate_tree_decomposition(P3, cyclic)
    disconnected = TreeDecomposition((mask(0, 1), mask(1, 2), mask(2)),
                                     ((0, 1), (0, 1)), 3)
    with pytest.raises(NotATreeError):
        validate_tree_decomposition(P3, disconnected)


def test_width_is_largest_bag_minus_one():
    td = TreeDecomposition((mask(0, 1), mask(1, 2)), ((0, 1),), 3)
    assert td.width == 1 and td.num_bags == 2


# --- elimination orders and heuristics -----------------------------------------


def test_decomposition_from_elimination_order_cycle():
    c5 = make_elementary("cycle", 5)
    td = decomposition_from_elimination_order(c5, [0, 1, 2, 3, 4])
    assert validate_tree_decomposition(c5, td).valid
    assert td.width == 2


def test_degeneracy_values():
    assert degeneracy(make_elementary("path", 5)) == 1
    assert degeneracy(make_family("grid", 3, 4)) == 2
    assert degeneracy(make_family("toroidal_grid", 4, 3)) == 4
    k4 = Graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    assert degeneracy(k4) == 3


def test_min_fill_upper_bound():
    order, width = min_fill_order(make_elementary("path", 4))
    assert width == 1 and sorted(order) == [0, 1, 2, 3]
    g = make_family("grid", 3, 3)
    _, w = min_fill_order(g)
    assert w >= exact_treewidth(g).treewidth


# --- exact solver ---------------------------------------------------------------


def test_exact_small_graphs():
    assert exact_treewidth(make_elementary("path", 5)).treewidth == 1
    assert exact_treewidth(make_elementary("cycle", 6)).treewidth == 2
    k4 = Graph(4, [(i, j) for i in range(4) for j in range(i + 1, 4)])
    assert exact_treewidth(k4).treewidth == 3
    assert exact_treewidth(make_family("grid", 2, 2)).treewidth == 2


def test_exact_result_invariants():
    res = exact_treewidth(make_family("grid", 3, 3))
    assert res.treewidth == 3
    assert res.proof_status == "exact" and res.lower == res.upper == 3
    assert res.decomposition.width == 3
    assert validate_tree_decomposition(make_family("grid", 3, 3), res.decomposition).valid
    assert res.states > 0 and res.elapsed >= 0.0


def test_methods_agree():
    g = make_family("stacked_prism", 4, 2)
    a = exact_treewidth(g, SolverLimits(method="dp"))
    b = exact_treewidth(g, SolverLimits(method="bb", time_budget=30.0))
    assert a.treewidth == b.treewidth == 3
    assert a.method == "subset_dp" and b.method == "branch_and_bound"


def test_valid_lower_hint_preserves_answer():
    g = make_family("grid", 3, 3)
    res = exact_treewidth(g, SolverLimits(lower_bound_hint=3))
    assert res.treewidth == 3 and res.proof_status == "exact"


def test_relabeling_invariance():
    rng = random.Random(11)
    for g in (make_family("grid", 3, 3),
              make_family("stacked_prism", 4, 2),
              make_elementary("cycle", 5)):
        want = exact_treewidth(g).treewidth
        perm = list(range(g.n))
        rng.shuffle(perm)
        assert exact_treewidth(g.relabeled(perm)).treewidth == want


def test_torus_square_value():
    assert exact_treewidth(make_family("toroidal_grid", 3, 3)).treewidth == 5


# --- minors only lower the width -------------------------------------------------


def test_row_collapse_width_drop():
    # collapsing one row of Y_{2n,n} leaves the (2n-1)-prism, one narrower
    for n in (2, 3):
        y = make_family("stacked_prism", 2 * n, n)
        collapsed = row_collapse_minor(y, 0)
        wide = exact_treewidth(y).treewidth
        narrow = exact_treewidth(collapsed).treewidth
        assert narrow == 2 * n - 1
        assert narrow <= wide


# --- covering bags ----------------------------------------------------------------


def test_covering_bag_grid():
    g = make_family("grid", 3, 3)
    td = exact_treewidth(g).decomposition
    b = gen_grid_bramble(g)
    hit = covering_bag(td, b)
    assert td.bags[hit.node] == hit.bag
    assert all(hit.bag & e for e in b.elements)


def test_covering_bag_torus():
    g = make_family("toroidal_grid", 4, 3)
    td = exact_treewidth(g).decomposition
    b = gen_torus_fg(g)
    hit = covering_bag(td, b)
    assert all(hit.bag & e for e in b.elements)
    assert hit.bag.bit_count() >= min_hitting_set(b).order


# --- family bounds report ----------------------------------------------------------


def test_bounds_report_grid_and_prism():
    r = treewidth_bounds_report(make_family("grid", 3, 4))
    assert (r.predicted_low, r.predicted_high, r.exact) == (3, 3, 3)
    assert r.bramble_label == "grid_b" and r.bramble_order == 3
    r = treewidth_bounds_report(make_family("stacked_prism", 7, 2))
    assert (r.predicted_low, r.predicted_high, r.exact) == (4, 4, 4)


def test_bounds_report_open_interval_prism():
    r = treewidth_bounds_report(make_family("stacked_prism", 4, 2))
    assert (r.predicted_low, r.predicted_high) == (3, 4)
    assert not r.predicted_exact and "open" in r.note
    assert r.minor_lower == 3
    assert r.predicted_low <= r.exact <= r.predicted_high


def test_bounds_report_square_torus():
    r = treewidth_bounds_report(make_family("toroidal_grid", 4, 4))
    assert (r.predicted_low, r.predicted_high) == (6, 7)
    assert r.exact == 6 and "open" in r.note


def test_bounds_report_torus_margin_two():
    # the stock four-piece torus family tops out at order 5 on this instance,
    # one short of the predicted width; the exact solver still lands inside
    r = treewidth_bounds_report(make_family("toroidal_grid", 5, 3))
    assert (r.predicted_low, r.predicted_high, r.exact) == (6, 6, 6)
    assert r.bramble_label == "torus_cde" and r.bramble_order == 5


# --- .td format ----------------------------------------------------------------------


def test_td_round_trip_byte_identical():
    for g in (make_family("grid", 3, 3), make_family("toroidal_grid", 4, 3)):
        td = exact_treewidth(g).decomposition
        text = write_td(td)
        assert write_td(read_td(text)) == text


def test_td_round_trip_preserves_validity():
    g = make_family("stacked_prism", 5, 3)
    td = exact_treewidth(g).decomposition
    again = read_td(write_td(td))
    assert validate_tree_decomposition(g, again).valid
    assert again.width == td.width


def test_td_rejections():
    with pytest.raises(TdFormatError):
        read_td("b 1 1 2\n")  # bag before header
    with pytest.raises(TdFormatError):
        read_td("s td 2 2 3\nb 1 1 2\n")  # missing bag 2
    with pytest.raises(TdFormatError):
        read_td("s td 1 2 3\nb 1 1 2\nb 1 2 3\n")  # repeated bag id
    with pytest.raises(TdFormatError):
        read_td("s td 1 2 3\nb 2 1 2\n")  # bag id out of range
    with pytest.raises(TdFormatError):
        read_td("s td 1 2 3\nb 1 1 4\n")  # vertex out of range
    with pytest.raises(TdFormatError):
        read_td("s td 1 3 3\nb 1 1 2\n")  # declared bag size wrong
    with pytest.raises(TdFormatError):
        read_td("s td 2 2 3\ns td 2 2 3\nb 1 1 2\nb 2 2 3\n1 2\n")  # two headers
