"""Chip-firing: reduction, equivalence, the gonality game, divisor format."""

from __future__ import annotations

from math import comb

import pytest

from chipwidth.chipfiring import (
    ChipFiringError,
    Divisor,
    FiringScript,
    MultiplicityLostError,
    apply_firing_script,
    divisors_equivalent,
    exact_gonality,
    gen_winning_divisor,
    is_winning_divisor,
    q_reduce,
    read_divisor,
    write_divisor,
)
from chipwidth.graphs import (
    Graph,
    InvalidFamilyError,
    make_elementary,
    make_family,
    minor_step,
)

C4 = make_elementary("cycle", 4)


def complete_graph(k: int) -> Graph:
    return Graph(k, [(i, j) for i in range(k) for j in range(i + 1, k)])


# --- divisors and scripts -------------------------------------------------------


def test_divisor_constructors():
    d = Divisor.of(C4, {1: 2, 3: -1})
    assert d.chips == (0, 2, 0, -1) and d.degree == 1
    assert not d.is_effective
    assert Divisor.zero(C4).degree == 0
    with pytest.raises(ChipFiringError):
        Divisor.of(C4, [1, 2, 3])
    with pytest.raises(ChipFiringError):
        Divisor.of(C4, {7: 1})


def test_script_normalization():
    s = FiringScript.of(C4, [2, -1, 0, 3])
    assert s.normalized().counts == (3, 0, 1, 4)
    with pytest.raises(ChipFiringError):
        FiringScript.of(C4, [1, 2])


def test_apply_single_fire():
    d = Divisor.of(C4, [3, 0, 0, 0])
    s = FiringScript.of(C4, [1, 0, 0, 0])
    assert apply_firing_script(C4, d, s).chips == (1, 1, 0, 1)


def test_apply_preserves_degree():
    d = Divisor.of(C4, [1, -2, 5, 0])
    s = FiringScript.of(C4, [4, 0, -3, 2])
    assert apply_firing_script(C4, d, s).degree == d.degree


def test_global_fire_is_identity():
    d = Divisor.of(C4, [1, 2, 0, -1])
    s = FiringScript.of(C4, [1, 1, 1, 1])
    assert apply_firing_script(C4, d, s).chips == d.chips


# --- q-reduction -----------------------------------------------------------------


def test_q_reduce_cycle_fixture():
    reduced, script = q_reduce(C4, Divisor.of(C4, [0, 1, 0, 1]), 0)
    assert reduced.chips == (2, 0, 0, 0)
    assert apply_firing_script(C4, Divisor.of(C4, [0, 1, 0, 1]), script).chips == reduced.chips
    assert min(script.counts) == 0


def test_q_reduce_handles_debt():
    p2 = make_elementary("path", 2)
    reduced, _ = q_reduce(p2, Divisor.of(p2, [0, -1]), 0)
    assert reduced.chips == (-1, 0)  # debt moves to q, the rest is effective


def test_q_reduce_idempotent():
    d = Divisor.of(C4, [5, -2, 1, 0])
    once, _ = q_reduce(C4, d, 0)
    twice, script = q_reduce(C4, once, 0)
    assert twice.chips == once.chips
    assert script.counts == (0, 0, 0, 0)


def test_q_reduce_other_base_vertex():
    reduced, _ = q_reduce(C4, Divisor.of(C4, [0, 1, 0, 1]), 2)
    assert reduced.chips == (0, 0, 2, 0)


def test_equivalence_and_witness_script():
    eq, script = divisors_equivalent(C4, Divisor.of(C4, [2, 0, 0, 0]),
                                     Divisor.of(C4, [0, 1, 0, 1]))
    assert eq and script is not None
    moved = apply_firing_script(C4, Divisor.of(C4, [2, 0, 0, 0]), script)
    assert moved.chips == (0, 1, 0, 1)


def test_inequivalent_single_chips():
    eq, script = divisors_equivalent(C4, Divisor.of(C4, [1, 0, 0, 0]),
                                     Divisor.of(C4, [0, 1, 0, 0]))
    assert not eq and script is None


# --- the gonality game -------------------------------------------------------------


def test_winning_checks_on_triangle():
    c3 = make_elementary("cycle", 3)
    wins, fail = is_winning_divisor(c3, Divisor.of(c3, [1, 1, 0]))
    assert wins and fail is None
    wins, fail = is_winning_divisor(c3, Divisor.of(c3, [1, 0, 0]))
    assert not wins and fail is not None
    with pytest.raises(ChipFiringError):
        is_winning_divisor(c3, Divisor.of(c3, [2, -1, 0]))


def test_gonality_small_graphs():
    assert exact_gonality(make_elementary("path", 4)).gonality == 1
    assert exact_gonality(C4).gonality == 2
    assert exact_gonality(make_elementary("cycle", 5)).gonality == 2
    assert exact_gonality(complete_graph(4)).gonality == 3


def test_gonality_prism_with_losing_proof():
    y = make_family("stacked_prism", 4, 2)
    res = exact_gonality(y)
    assert res.gonality == 4 and res.status == "exact"
    assert res.winning_divisor is not None
    assert is_winning_divisor(y, res.winning_divisor)[0]
    # everything one degree down loses, with a named refuting vertex each
    assert len(res.losing_proof) == comb(y.n + 2, 3)
    chips, fail_v = res.losing_proof[17]
    assert sum(chips) == 3 and 0 <= fail_v < y.n
    assert not is_winning_divisor(y, Divisor(chips))[0]


def test_gonality_budget_degrades_to_lower_bound():
    res = exact_gonality(C4, enumeration_cap=3)
    assert res.status == "lower_bound_only" and res.gonality is None
    assert res.lower == 1


def test_winning_generators_families():
    cases = [
        ("stacked_prism", 5, 3, "column_ones", 5),
        ("stacked_prism", 5, 3, "row_twos", 6),
        ("stacked_prism", 7, 2, "row_twos", 4),
        ("toroidal_grid", 4, 3, "row_twos", 6),
        ("toroidal_grid", 4, 3, "column_twos", 8),
        ("toroidal_grid", 5, 3, "row_twos", 6),
    ]
    for kind, m, n, style, degree in cases:
        g = make_family(kind, m, n)
        d = gen_winning_divisor(g, style)
        assert d.degree == degree
        assert is_winning_divisor(g, d)[0]


def test_winning_generator_index_shift():
    g = make_family("stacked_prism", 5, 3)
    d = gen_winning_divisor(g, "column_ones", index=2)
    assert d.degree == 5 and is_winning_divisor(g, d)[0]


def test_winning_generator_rejections():
    with pytest.raises(InvalidFamilyError):
        gen_winning_divisor(make_family("toroidal_grid", 4, 3), "column_ones")
    with pytest.raises(InvalidFamilyError):
        gen_winning_divisor(make_family("grid", 3, 3), "row_twos")
    with pytest.raises(InvalidFamilyError):
        gen_winning_divisor(make_elementary("cycle", 5), "row_twos")


# --- lossy minors are refused ---------------------------------------------------------


def test_lossy_contraction_refused():
    k3 = Graph(3, [(0, 1), (1, 2), (0, 2)])
    lossy = minor_step(k3, "contract_edge", (0, 1))
    assert lossy.lossy_contraction
    with pytest.raises(MultiplicityLostError):
        q_reduce(lossy, Divisor.zero(lossy), 0)
    with pytest.raises(MultiplicityLostError):
        exact_gonality(lossy)


# --- divisor file format -----------------------------------------------------------------


def test_divisor_format_round_trip():
    d = Divisor.of(C4, [2, 0, -1, 3])
    text = write_divisor(C4, d)
    assert read_divisor(text, C4).chips == d.chips
    assert write_divisor(C4, read_divisor(text, C4)) == text


def test_divisor_format_rejections():
    with pytest.raises(ChipFiringError):
        read_divisor("d 4 2\n1 1\n", C4)  # declared degree wrong
    with pytest.raises(ChipFiringError):
        read_divisor("d 5 1\n1 1\n", C4)  # vertex count mismatch
    with pytest.raises(ChipFiringError):
        read_divisor("d 4 2\n1 1\n1 1\n", C4)  # vertex assigned twice
    with pytest.raises(ChipFiringError):
        read_divisor("d 4 1\n9 1\n", C4)  # vertex out of range
    with pytest.raises(ChipFiringError):
        read_divisor("1 1\n", C4)  # missing header
