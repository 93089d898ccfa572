"""Brambles: classification, exact hitting sets, family generators, format."""

from __future__ import annotations

from itertools import combinations

import pytest

from chipwidth.brambles import (
    Bramble,
    BrambleError,
    ElementLimitError,
    OrderBudgetError,
    WrongRegimeError,
    classify_family,
    gen_grid_bramble,
    gen_prism_b1,
    gen_prism_b2,
    gen_torus_cde,
    gen_torus_fg,
    is_connected_set,
    min_hitting_set,
    read_bramble,
    sets_touch,
    verify_order_certificate,
    write_bramble,
)
from chipwidth.graphs import (
    Graph,
    InvalidFamilyError,
    bits_list,
    line_vertices,
    make_elementary,
    make_family,
)


def mask(*vs: int) -> int:
    out = 0
    for v in vs:
        out |= 1 << v
    return out


def complete_graph(k: int) -> Graph:
    return Graph(k, [(i, j) for i in range(k) for j in range(i + 1, k)])


def oracle_order(elements: tuple[int, ...], n: int) -> int:
    """Smallest hitting set by plain subset enumeration."""
    for size in range(n + 1):
        for combo in combinations(range(n), size):
            s = mask(*combo)
            if all(s & e for e in elements):
                return size
    raise AssertionError("unhittable family")


# --- predicates ------------------------------------------------------------------


def test_connected_set_and_touching():
    p4 = make_elementary("path", 4)
    assert is_connected_set(p4, mask(0, 1, 2))
    assert not is_connected_set(p4, mask(0, 2))
    assert sets_touch(p4, mask(0), mask(1))  # edge joins them
    assert sets_touch(p4, mask(0, 1), mask(1, 2))  # shared vertex
    assert not sets_touch(p4, mask(0), mask(3))


def test_classify_not_a_bramble():
    p4 = make_elementary("path", 4)
    c = classify_family(p4, (mask(0), mask(3)))
    assert c.verdict == "not_bramble" and c.counterexample == (0, 1)
    c = classify_family(p4, (mask(0, 2), mask(1)))
    assert c.verdict == "not_bramble" and c.counterexample == (0, 0)


def test_classify_bramble_not_strict():
    c4 = make_elementary("cycle", 4)
    c = classify_family(c4, (mask(0, 1), mask(2, 3)))
    assert c.verdict == "bramble" and c.counterexample == (0, 1)


def test_classify_strict():
    g = make_family("grid", 3, 3)
    c = classify_family(g, gen_grid_bramble(g).elements)
    assert c.verdict == "strict_bramble" and c.counterexample is None


# --- exact minimum hitting sets ----------------------------------------------------


def test_hitting_set_k4_edges():
    k4 = complete_graph(4)
    b = Bramble.from_elements(k4, [mask(i, j) for i, j in k4.edges], "k4_edges")
    cert = min_hitting_set(b)
    assert cert.order == 3 == oracle_order(b.elements, 4)
    assert bits_list(cert.witness) == [0, 1, 2]  # lexicographically least cover


def test_hitting_set_k5_triples():
    k5 = complete_graph(5)
    b = Bramble.from_elements(
        k5, [mask(*c) for c in combinations(range(5), 3)], "k5_triples"
    )
    assert classify_family(k5, b.elements).verdict == "strict_bramble"
    cert = min_hitting_set(b)
    assert cert.order == 3 == oracle_order(b.elements, 5)


def test_hitting_set_engines_agree():
    k5 = complete_graph(5)
    b = Bramble.from_elements(
        k5, [mask(*c) for c in combinations(range(5), 3)], "k5_triples"
    )
    bb = min_hitting_set(b)
    full = min_hitting_set(b, exhaustive=True)
    assert (bb.order, bb.witness) == (full.order, full.witness)
    assert full.proof == "exhaustive" and bb.proof == "branch_and_bound"


def test_hitting_set_budget_error():
    k5 = complete_graph(5)
    b = Bramble.from_elements(
        k5, [mask(*c) for c in combinations(range(5), 3)], "k5_triples"
    )
    with pytest.raises(OrderBudgetError) as exc:
        min_hitting_set(b, budget=2)
    assert exc.value.lower >= 3


def test_witness_hits_everything():
    g = make_family("stacked_prism", 5, 3)
    b = gen_prism_b2(g)
    cert = min_hitting_set(b)
    assert all(cert.witness & e for e in b.elements)
    assert cert.witness.bit_count() == cert.order


# --- certificates --------------------------------------------------------------------


def test_order_certificate_verdicts():
    g = make_family("grid", 3, 4)
    b = gen_grid_bramble(g)
    good = verify_order_certificate(b, 3)
    assert good.verdict == "pass" and good.witness["order"] == 3
    assert good.claim["claimed_order"] == 3 and good.timing is not None
    bad = verify_order_certificate(b, 4)
    assert bad.verdict == "fail" and bad.witness["order"] == 3


# --- family generators ----------------------------------------------------------------


def test_grid_bramble_crosses():
    g = make_family("grid", 3, 4)
    b = gen_grid_bramble(g)
    assert len(b) == 12
    cross = line_vertices(g, "row", 1) | line_vertices(g, "column", 2)
    assert cross in b.elements
    assert min_hitting_set(b).order == 3
    assert classify_family(g, b.elements).verdict == "strict_bramble"


def test_prism_b1_structure_and_order():
    g = make_family("stacked_prism", 7, 3)
    b = gen_prism_b1(g)
    assert len(b) == 315
    assert classify_family(g, b.elements).verdict == "strict_bramble"
    assert min_hitting_set(b).order == 6


def test_prism_b2_order():
    g = make_family("stacked_prism", 5, 3)
    b = gen_prism_b2(g)
    assert len(b) == 285
    assert classify_family(g, b.elements).verdict == "strict_bramble"
    assert min_hitting_set(b).order == 5


def test_torus_cde_margin_two_order():
    # at column margin two the three shapes degenerate enough that one full
    # row plus two neighbours meets every element, capping the order at 5
    g = make_family("toroidal_grid", 5, 3)
    b = gen_torus_cde(g)
    assert len(b) == 345
    assert classify_family(g, b.elements).verdict == "strict_bramble"
    s = line_vertices(g, "row", 0) | mask(3, 4)  # (1,0) and (1,1)
    assert all(s & e for e in b.elements)
    assert min_hitting_set(b).order == 5


def test_torus_cde_wide_margin_order():
    # with four spare columns every small transversal misses some element
    g = make_family("toroidal_grid", 7, 3)
    b = gen_torus_cde(g)
    assert classify_family(g, b.elements).verdict == "strict_bramble"
    assert min_hitting_set(b).order == 6


def test_torus_fg_non_strict_order():
    g = make_family("toroidal_grid", 4, 3)
    b = gen_torus_fg(g)
    assert len(b) == 180
    c = classify_family(g, b.elements)
    assert c.verdict == "bramble" and c.counterexample is not None
    i, j = c.counterexample
    assert not (b.elements[i] & b.elements[j])
    cert = min_hitting_set(b)
    assert cert.order == 6
    two_rows = line_vertices(g, "row", 0) | line_vertices(g, "row", 1)
    assert all(two_rows & e for e in b.elements)


def test_generator_regime_errors():
    with pytest.raises(WrongRegimeError):
        gen_prism_b1(make_family("stacked_prism", 5, 3))  # needs 2n < m
    with pytest.raises(WrongRegimeError):
        gen_prism_b2(make_family("stacked_prism", 7, 3))  # needs m < 2n
    with pytest.raises(WrongRegimeError):
        gen_torus_cde(make_family("toroidal_grid", 4, 3))  # needs m >= n+2
    with pytest.raises(WrongRegimeError):
        gen_torus_fg(make_family("toroidal_grid", 5, 3))  # needs m = n+1
    with pytest.raises(InvalidFamilyError):
        gen_grid_bramble(make_family("toroidal_grid", 4, 3))


def test_generator_element_cap():
    with pytest.raises(ElementLimitError):
        gen_prism_b1(make_family("stacked_prism", 7, 3), max_elements=10)


def test_bramble_needs_elements():
    with pytest.raises(BrambleError):
        Bramble.from_elements(make_elementary("path", 3), [], "empty")


# --- file format -----------------------------------------------------------------------


def test_bramble_format_round_trip():
    g = make_family("grid", 3, 3)
    b = gen_grid_bramble(g)
    text = write_bramble(b)
    back = read_bramble(text, g)
    assert set(back.elements) == set(b.elements)
    assert write_bramble(back) == text  # canonical order makes bytes stable


def test_bramble_format_rejections():
    g = make_family("grid", 3, 3)
    with pytest.raises(BrambleError):
        read_bramble("b 1 5\n1 2\n", g)  # vertex count mismatch
    with pytest.raises(BrambleError):
        read_bramble("b 2 9\n1 2\n", g)  # element count mismatch
    with pytest.raises(BrambleError):
        read_bramble("b 1 9\n1 99\n", g)  # vertex out of range
