"""Chip-firing: divisors, q-reduction, equivalence, and the gonality game.

A divisor assigns an integer chip count to every vertex. Firing a vertex
sends one chip along each incident edge; a firing script fires each vertex
a given number of times, changing the divisor by the Laplacian action
d - L s. The q-reduced representative of a divisor class (computed by
debt consolidation followed by Dhar's burning loop) is unique, which makes
equivalence decidable and drives the winning test of the gonality game:
d wins iff for every vertex v the v-reduced form of d - (v) is effective.

Edge multiplicities matter here, so these operations refuse graphs whose
contraction history collapsed parallel edges (Graph.lossy_contraction).
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from math import comb
from typing import Iterable, Iterator, Sequence

from .graphs import GRID_KINDS, Graph, InvalidFamilyError, iter_bits, line_vertices


class ChipFiringError(Exception):
    """Base error for chip-firing operations."""


class MultiplicityLostError(ChipFiringError):
    """The graph discarded parallel edges during contraction; chip-firing
    results on it would be wrong."""


class EnumerationBudgetError(ChipFiringError):
    """Divisor enumeration would exceed the configured cap."""


@dataclass(frozen=True)
class Divisor:
    """Integer chips per vertex."""

    chips: tuple[int, ...]

    @classmethod
    def of(cls, g: Graph, chips: Iterable[int] | dict[int, int]) -> "Divisor":
        if isinstance(chips, dict):
            vec = [0] * g.n
            for v, c in chips.items():
                if not 0 <= v < g.n:
                    raise ChipFiringError(f"vertex {v} out of range")
                vec[v] = c
        else:
            vec = list(chips)
            if len(vec) != g.n:
                raise ChipFiringError(f"divisor has {len(vec)} entries, graph has {g.n}")
        return cls(tuple(int(c) for c in vec))

    @classmethod
    def zero(cls, g: Graph) -> "Divisor":
        return cls((0,) * g.n)

    @property
    def degree(self) -> int:
        return sum(self.chips)

    @property
    def is_effective(self) -> bool:
        return all(c >= 0 for c in self.chips)


@dataclass(frozen=True)
class FiringScript:
    """How many times each vertex fires (negative = borrows)."""

    counts: tuple[int, ...]

    @classmethod
    def of(cls, g: Graph, counts: Iterable[int]) -> "FiringScript":
        vec = tuple(int(c) for c in counts)
        if len(vec) != g.n:
            raise ChipFiringError(f"script has {len(vec)} entries, graph has {g.n}")
        return cls(vec)

    def normalized(self) -> "FiringScript":
        """Shift so the minimum entry is zero; same divisor action."""
        low = min(self.counts)
        return FiringScript(tuple(c - low for c in self.counts))


def _check_graph(g: Graph) -> None:
    if g.lossy_contraction:
        raise MultiplicityLostError(
            "graph lost parallel edges in a contraction; chip-firing refuses it"
        )


def _check_divisor(g: Graph, d: Divisor) -> None:
    if len(d.chips) != g.n:
        raise ChipFiringError(f"divisor has {len(d.chips)} entries, graph has {g.n}")


def apply_firing_script(g: Graph, d: Divisor, s: FiringScript) -> Divisor:
    """d - L s: each vertex v loses deg(v)*s[v] chips and gains one chip per
    firing of each neighbor."""
    _check_graph(g)
    _check_divisor(g, d)
    if len(s.counts) != g.n:
        raise ChipFiringError(f"script has {len(s.counts)} entries, graph has {g.n}")
    out = list(d.chips)
    for v in range(g.n):
        sv = s.counts[v]
        if sv:
            out[v] -= g.degree(v) * sv
            for u in g.neighbors(v):
                out[u] += sv
    return Divisor(tuple(out))


def _fire_set(g: Graph, chips: list[int], members: int) -> None:
    # simultaneous firing of a vertex set: only boundary edges move chips
    for v in iter_bits(members):
        outside = g.adj[v] & ~members
        k = outside.bit_count()
        if k:
            chips[v] -= k
            for u in iter_bits(outside):
                chips[u] += 1


_LOOP_CAP = 10_000_000


def q_reduce(g: Graph, d: Divisor, q: int) -> tuple[Divisor, FiringScript]:
    """Unique q-reduced representative of d's class, with the script used.

    Stage 1 repeatedly fires {q} + every out-of-debt vertex until no vertex
    but q is in debt. Stage 2 runs Dhar's burning from q and fires the
    unburnt set until the fire consumes everything. The returned script is
    normalized to minimum entry zero and satisfies
    apply_firing_script(g, d, script) == reduced.
    """
    _check_graph(g)
    _check_divisor(g, d)
    if not 0 <= q < g.n:
        raise ChipFiringError(f"vertex {q} out of range")
    if not g.is_connected():
        raise ChipFiringError("q-reduction needs a connected graph")
    n = g.n
    chips = list(d.chips)
    script = [0] * n
    qbit = 1 << q

    for _ in range(_LOOP_CAP):
        if all(chips[v] >= 0 for v in range(n) if v != q):
            break
        members = qbit
        for v in range(n):
            if v != q and chips[v] >= 0:
                members |= 1 << v
        _fire_set(g, chips, members)
        for v in iter_bits(members):
            script[v] += 1
    else:
        raise ChipFiringError("internal: debt consolidation failed to settle")

    full = g.full_mask
    for _ in range(_LOOP_CAP):
        burnt = qbit
        growing = True
        while growing:
            growing = False
            for v in iter_bits(full & ~burnt):
                if chips[v] < (g.adj[v] & burnt).bit_count():
                    burnt |= 1 << v
                    growing = True
        unburnt = full & ~burnt
        if not unburnt:
            break
        _fire_set(g, chips, unburnt)
        for v in iter_bits(unburnt):
            script[v] += 1
    else:
        raise ChipFiringError("internal: burning loop failed to stabilize")

    return Divisor(tuple(chips)), FiringScript(tuple(script)).normalized()


def divisors_equivalent(
    g: Graph, d1: Divisor, d2: Divisor
) -> tuple[bool, FiringScript | None]:
    """Same divisor class? If so, also a script with d1 - L s = d2."""
    _check_graph(g)
    _check_divisor(g, d1)
    _check_divisor(g, d2)
    if d1.degree != d2.degree:
        return False, None
    r1, s1 = q_reduce(g, d1, 0)
    r2, s2 = q_reduce(g, d2, 0)
    if r1.chips != r2.chips:
        return False, None
    diff = FiringScript(
        tuple(a - b for a, b in zip(s1.counts, s2.counts))
    ).normalized()
    return True, diff


def is_winning_divisor(g: Graph, d: Divisor) -> tuple[bool, int | None]:
    """Can d pay off any single opponent chip? Returns the first vertex
    where it cannot (lowest id), or None when d wins everywhere."""
    _check_graph(g)
    _check_divisor(g, d)
    if not d.is_effective:
        raise ChipFiringError("the gonality game starts from an effective divisor")
    for v in range(g.n):
        attacked = list(d.chips)
        attacked[v] -= 1
        reduced, _ = q_reduce(g, Divisor(tuple(attacked)), v)
        if reduced.chips[v] < 0:
            return False, v
    return True, None


@dataclass(frozen=True)
class GonalityResult:
    """Outcome of exact_gonality.

    status "exact" means gonality is the least degree of a winning divisor
    and losing_proof lists, for every effective divisor of degree
    gonality - 1, the first opponent vertex that defeats it. Budget or
    max_degree exhaustion yields status "lower_bound_only" with gonality
    None and lower = 1 + the largest fully refuted degree.
    """

    gonality: int | None
    status: str  # exact | lower_bound_only
    winning_divisor: Divisor | None
    losing_proof: tuple[tuple[tuple[int, ...], int], ...]
    lower: int
    divisors_checked: int


def _effective_divisors(n: int, degree: int) -> Iterator[tuple[int, ...]]:
    """All chip tuples of the given degree, in ascending lexicographic order."""

    def rec(prefix: list[int], left: int, slots: int) -> Iterator[tuple[int, ...]]:
        if slots == 1:
            yield tuple(prefix + [left])
            return
        for c in range(left + 1):
            yield from rec(prefix + [c], left - c, slots - 1)

    yield from rec([], degree, n)


def exact_gonality(
    g: Graph,
    max_degree: int | None = None,
    enumeration_cap: int = 10_000_000,
) -> GonalityResult:
    """Least degree of a winning divisor, by plain exhaustive enumeration.

    Degrees are scanned upward; within a degree, divisors are tried in
    lexicographic order, so the reported winner is the lexicographically
    least one of minimum degree. No symmetry reduction is attempted.
    """
    _check_graph(g)
    if max_degree is None:
        max_degree = g.n  # one chip everywhere always wins
    checked = 0
    last_losing: list[tuple[tuple[int, ...], int]] = []
    for k in range(max_degree + 1):
        count = comb(g.n + k - 1, k) if k else 1
        if checked + count > enumeration_cap:
            return GonalityResult(None, "lower_bound_only", None,
                                  tuple(last_losing), k, checked)
        losing: list[tuple[tuple[int, ...], int]] = []
        for chips in _effective_divisors(g.n, k):
            checked += 1
            win, fail_v = is_winning_divisor(g, Divisor(chips))
            if win:
                return GonalityResult(k, "exact", Divisor(chips),
                                      tuple(last_losing), k, checked)
            losing.append((chips, fail_v))
        last_losing = losing
    return GonalityResult(None, "lower_bound_only", None,
                          tuple(last_losing), max_degree + 1, checked)


def gen_winning_divisor(g: Graph, style: str, index: int = 0) -> Divisor:
    """Known winning divisors for prisms and toroidal grids.

    column_ones (prism): one chip on each vertex of a column, degree m.
    row_twos (prism or torus): two chips on each vertex of a row, degree 2n.
    column_twos (torus): two chips on each vertex of a column, degree 2m.
    """
    _check_graph(g)
    fam = g.family
    if fam is None or fam.kind not in GRID_KINDS:
        raise InvalidFamilyError("winning divisor generator needs a family graph")
    styles = {
        "stacked_prism": ("column_ones", "row_twos"),
        "toroidal_grid": ("row_twos", "column_twos"),
    }
    allowed = styles.get(fam.kind, ())
    if style not in allowed:
        raise InvalidFamilyError(
            f"style {style!r} is not defined on {fam.kind} (choose from {allowed})"
        )
    if style == "column_ones":
        mask = line_vertices(g, "column", index)
        amount = 1
    elif style == "row_twos":
        mask = line_vertices(g, "row", index)
        amount = 2
    else:
        mask = line_vertices(g, "column", index)
        amount = 2
    chips = [0] * g.n
    for v in iter_bits(mask):
        chips[v] = amount
    return Divisor(tuple(chips))


# --- divisor file format ------------------------------------------------------
#
# Header "d <num_vertices> <degree>", then one "v chips" line per vertex
# with nonzero chips (vertices 1-indexed, chips may be negative); "c" lines
# are comments.


def write_divisor(g: Graph, d: Divisor) -> str:
    _check_divisor(g, d)
    lines = [f"d {g.n} {d.degree}"]
    for v, c in enumerate(d.chips):
        if c:
            lines.append(f"{v + 1} {c}")
    return "\n".join(lines) + "\n"


def read_divisor(text: str, g: Graph) -> Divisor:
    header_seen = False
    declared_degree = 0
    chips = [0] * g.n
    assigned: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if not header_seen:
            if parts[0] != "d" or len(parts) != 3:
                raise ChipFiringError(f"line {lineno}: expected 'd <vertices> <degree>'")
            if int(parts[1]) != g.n:
                raise ChipFiringError(
                    f"divisor is over {parts[1]} vertices, graph has {g.n}"
                )
            declared_degree = int(parts[2])
            header_seen = True
            continue
        if len(parts) != 2:
            raise ChipFiringError(f"line {lineno}: expected '<vertex> <chips>'")
        v = int(parts[0]) - 1
        if not 0 <= v < g.n:
            raise ChipFiringError(f"line {lineno}: vertex out of range")
        if v in assigned:
            raise ChipFiringError(f"line {lineno}: vertex {v + 1} assigned twice")
        assigned.add(v)
        chips[v] = int(parts[1])
    if not header_seen:
        raise ChipFiringError("missing header line")
    d = Divisor(tuple(chips))
    if d.degree != declared_degree:
        raise ChipFiringError(
            f"declared degree {declared_degree}, chips sum to {d.degree}"
        )
    return d
