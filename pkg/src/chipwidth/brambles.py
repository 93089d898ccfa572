"""Brambles on grid-like graphs: classification, generators, exact order.

A bramble is a family of connected vertex sets that pairwise touch (share a
vertex or an edge between them); it is strict when all pairs share a vertex.
The order of a bramble is the size of a minimum hitting set, computed here
exactly by branch and bound. A bramble of order w certifies treewidth
>= w - 1, and a strict one certifies treewidth >= w.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Iterator

from .certificates import Certificate
from .graphs import (
    Graph,
    InvalidFamilyError,
    bit,
    bits_list,
    iter_bits,
    line_vertices,
    mask_connected,
    mask_of,
)

DEFAULT_ELEMENT_LIMIT = 2_000_000

NOT_BRAMBLE = "not_bramble"
BRAMBLE = "bramble"
STRICT_BRAMBLE = "strict_bramble"


class BrambleError(Exception):
    """Base error for bramble handling."""


class WrongRegimeError(BrambleError):
    """Family parameters outside the regime where the construction works."""


class ElementLimitError(BrambleError):
    """Generator would materialize more elements than the configured cap."""


class OrderBudgetError(BrambleError):
    """No hitting set within the budget; carries the best known bounds."""

    def __init__(self, lower: int, upper: int):
        super().__init__(f"no hitting set within budget; order in [{lower}, {upper}]")
        self.lower = lower
        self.upper = upper


@dataclass(frozen=True)
class Bramble:
    """Deduplicated element masks over a graph, tagged with a family label."""

    graph: Graph
    elements: tuple[int, ...]
    label: str = "custom"

    @classmethod
    def from_elements(
        cls,
        graph: Graph,
        elements: Iterable[int],
        label: str = "custom",
        max_elements: int = DEFAULT_ELEMENT_LIMIT,
    ) -> "Bramble":
        seen: dict[int, None] = {}
        for e in elements:
            if e == 0:
                raise BrambleError("empty element")
            if e >> graph.n:
                raise BrambleError("element contains a vertex outside the graph")
            if e not in seen:
                if len(seen) >= max_elements:
                    raise ElementLimitError(
                        f"more than {max_elements} distinct elements; raise the cap"
                    )
                seen[e] = None
        if not seen:
            raise BrambleError("bramble needs at least one element")
        return cls(graph, tuple(seen), label)

    def __len__(self) -> int:
        return len(self.elements)


@dataclass(frozen=True)
class Classification:
    """verdict is not_bramble, bramble, or strict_bramble. counterexample
    names the offending element pair: a non-touching pair for not_bramble,
    or a touching-but-disjoint pair witnessing non-strictness; an element
    that is itself empty or disconnected appears paired with itself."""

    verdict: str
    counterexample: tuple[int, int] | None = None


@dataclass(frozen=True)
class OrderCertificate:
    """Exact minimum hitting set: its size, the lexicographically least
    optimal witness, and which proof produced it."""

    order: int
    witness: int
    proof: str  # branch_and_bound | exhaustive


def is_connected_set(g: Graph, s: int) -> bool:
    """Is the induced subgraph on the mask connected? Empty is an error."""
    if s == 0:
        raise ValueError("empty vertex set")
    if s >> g.n:
        raise ValueError("set contains a vertex outside the graph")
    return mask_connected(g.adj, s)


def sets_touch(g: Graph, a: int, b: int) -> bool:
    """Share a vertex, or some edge joins them."""
    if a & b:
        return True
    return bool(g.neighborhood(a) & b)


def classify_family(g: Graph, elements: Iterable[int]) -> Classification:
    elems = list(elements)
    for i, e in enumerate(elems):
        if e == 0 or not is_connected_set(g, e):
            return Classification(NOT_BRAMBLE, (i, i))
    hoods = [g.neighborhood(e) | e for e in elems]
    disjoint_pair: tuple[int, int] | None = None
    for i in range(len(elems)):
        for j in range(i + 1, len(elems)):
            if elems[i] & elems[j]:
                continue
            if hoods[i] & elems[j]:
                if disjoint_pair is None:
                    disjoint_pair = (i, j)
            else:
                return Classification(NOT_BRAMBLE, (i, j))
    if disjoint_pair is None:
        return Classification(STRICT_BRAMBLE)
    return Classification(BRAMBLE, disjoint_pair)


# --- exact minimum hitting set ----------------------------------------------


def _greedy_hitting_set(elements: list[int], n: int) -> int:
    unhit = list(elements)
    chosen = 0
    while unhit:
        counts = [0] * n
        for e in unhit:
            for v in iter_bits(e):
                counts[v] += 1
        v = max(range(n), key=lambda u: (counts[u], -u))
        chosen |= bit(v)
        unhit = [e for e in unhit if not e >> v & 1]
    return chosen


def _packing_bound(elements: list[int]) -> int:
    taken = 0
    count = 0
    for e in elements:
        if not e & taken:
            taken |= e
            count += 1
    return count


def _prune_supersets(elements: tuple[int, ...]) -> list[int]:
    # hitting a subset hits every superset, so supersets are redundant
    if len(elements) > 5000:
        return list(elements)
    by_size = sorted(elements, key=lambda e: e.bit_count())
    kept: list[int] = []
    for e in by_size:
        if not any(s & e == s for s in kept):
            kept.append(e)
    return kept


def _min_unhit_element(unhit: list[int]) -> int:
    best = unhit[0]
    best_key = (best.bit_count(), best & -best, best)
    for e in unhit[1:]:
        key = (e.bit_count(), e & -e, e)
        if key < best_key:
            best, best_key = e, key
    return best


def _branch_and_bound(elements: list[int], budget: int) -> int | None:
    """Size of a minimum hitting set, or None if it exceeds the budget."""
    best: int | None = None

    def search(chosen_count: int, unhit: list[int]) -> None:
        nonlocal best
        if not unhit:
            if best is None or chosen_count < best:
                best = chosen_count
            return
        bound = chosen_count + _packing_bound(unhit)
        if bound > budget or (best is not None and bound >= best):
            return
        element = _min_unhit_element(unhit)
        for v in iter_bits(element):
            search(chosen_count + 1, [e for e in unhit if not e >> v & 1])

    search(0, elements)
    return best


def _exists_hitting_set(elements: list[int], size: int, allowed: int) -> bool:
    """Can `size` vertices drawn from the allowed mask hit everything?"""
    if not elements:
        return True
    if size <= 0:
        return False
    usable = [e & allowed for e in elements]
    if any(e == 0 for e in usable):
        return False
    if _packing_bound(usable) > size:
        return False
    element = _min_unhit_element(usable)
    for v in iter_bits(element):
        rest = [e for e, u in zip(elements, usable) if not u >> v & 1]
        if _exists_hitting_set(rest, size - 1, allowed):
            return True
    return False


def _lex_least_witness(elements: list[int], order: int, n: int) -> int:
    witness = 0
    remaining = elements
    floor = 0
    for slot in range(order):
        left = order - slot - 1
        for v in range(floor, n):
            rest = [e for e in remaining if not e >> v & 1]
            allowed = ((1 << n) - 1) & ~((1 << (v + 1)) - 1)
            if _exists_hitting_set(rest, left, allowed):
                witness |= bit(v)
                remaining = rest
                floor = v + 1
                break
        else:
            raise AssertionError("witness reconstruction lost feasibility")
    return witness


def min_hitting_set(
    b: Bramble, budget: int | None = None, exhaustive: bool = False
) -> OrderCertificate:
    """Exact minimum hitting set of the bramble's elements.

    Branches on the vertices of a minimum-cardinality unhit element (ties to
    the element containing the lowest vertex id) with a greedy disjoint
    packing lower bound. The witness is the lexicographically least optimal
    hitting set, so equal inputs always give byte-equal certificates. A
    budget smaller than the true order raises OrderBudgetError carrying the
    best known bounds.
    """
    n = b.graph.n
    if budget is None:
        budget = n
    elements = _prune_supersets(b.elements)
    if exhaustive:
        for size in range(0, min(budget, n) + 1):
            for combo in combinations(range(n), size):
                m = mask_of(combo)
                if all(e & m for e in elements):
                    return OrderCertificate(size, m, "exhaustive")
        raise OrderBudgetError(min(budget, n) + 1, n)
    greedy = _greedy_hitting_set(elements, n)
    upper = greedy.bit_count()
    optimum = _branch_and_bound(elements, min(budget, upper))
    if optimum is None:
        raise OrderBudgetError(
            max(_packing_bound(elements), budget + 1), upper
        )
    witness = _lex_least_witness(elements, optimum, n)
    return OrderCertificate(optimum, witness, "branch_and_bound")


def verify_order_certificate(b: Bramble, claimed_order: int) -> Certificate:
    """Recompute the order and compare against the claim."""
    t0 = time.monotonic()
    cert = min_hitting_set(b)
    elapsed = time.monotonic() - t0
    return Certificate(
        claim={
            "type": "bramble_order",
            "label": b.label,
            "elements": len(b),
            "claimed_order": claimed_order,
        },
        verdict="pass" if cert.order == claimed_order else "fail",
        witness={
            "order": cert.order,
            "hitting_set": [v + 1 for v in bits_list(cert.witness)],
        },
        proof=cert.proof,
        timing=elapsed,
    )


# --- generators --------------------------------------------------------------


def _require_family(g: Graph, kind: str, what: str) -> tuple[int, int]:
    fam = g.family
    if fam is None or fam.kind != kind:
        raise InvalidFamilyError(f"{what} needs a {kind} graph")
    return fam.m, fam.n


def gen_grid_bramble(g: Graph, max_elements: int = DEFAULT_ELEMENT_LIMIT) -> Bramble:
    """Crosses: the union of row i and column j, for every (i, j)."""
    m, n = _require_family(g, "grid", "grid bramble")

    def gen() -> Iterator[int]:
        for i in range(m):
            row = line_vertices(g, "row", i)
            for j in range(n):
                yield row | line_vertices(g, "column", j)

    return Bramble.from_elements(g, gen(), "grid_b", max_elements)


def gen_prism_b1(g: Graph, max_elements: int = DEFAULT_ELEMENT_LIMIT) -> Bramble:
    """Tall-prism bramble: a column missing one vertex plus two full rows
    that avoid the deleted point. Needs 2n < m; order is 2n."""
    m, n = _require_family(g, "stacked_prism", "prism bramble b1")
    if not 2 * n < m:
        raise WrongRegimeError(f"b1 needs 2n < m, got m={m}, n={n}")
    rows = [line_vertices(g, "row", i) for i in range(m)]
    cols = [line_vertices(g, "column", j) for j in range(n)]

    def gen() -> Iterator[int]:
        for j in range(n):
            for d in range(m):
                cut = cols[j] & ~bit(d * n + j)
                for r1, r2 in combinations((r for r in range(m) if r != d), 2):
                    yield cut | rows[r1] | rows[r2]

    return Bramble.from_elements(g, gen(), "prism_b1", max_elements)


def gen_prism_b2(g: Graph, max_elements: int = DEFAULT_ELEMENT_LIMIT) -> Bramble:
    """Wide-prism bramble: crosses, one row plus two cut columns, and two
    rows plus two columns cut in a common row. Needs m < 2n; order is m."""
    m, n = _require_family(g, "stacked_prism", "prism bramble b2")
    if not m < 2 * n:
        raise WrongRegimeError(f"b2 needs m < 2n, got m={m}, n={n}")
    rows = [line_vertices(g, "row", i) for i in range(m)]
    cols = [line_vertices(g, "column", j) for j in range(n)]

    def gen() -> Iterator[int]:
        # crosses
        for r in range(m):
            for j in range(n):
                yield rows[r] | cols[j]
        # one row, two columns, each column cut in a distinct row off the row
        for r in range(m):
            for j1, j2 in combinations(range(n), 2):
                for d1 in range(m):
                    if d1 == r:
                        continue
                    for d2 in range(m):
                        if d2 == r or d2 == d1:
                            continue
                        yield (
                            rows[r]
                            | (cols[j1] & ~bit(d1 * n + j1))
                            | (cols[j2] & ~bit(d2 * n + j2))
                        )
        # two rows, two columns cut in one common row avoiding both rows
        for r1, r2 in combinations(range(m), 2):
            for j1, j2 in combinations(range(n), 2):
                for d in range(m):
                    if d == r1 or d == r2:
                        continue
                    yield (
                        rows[r1]
                        | rows[r2]
                        | (cols[j1] & ~bit(d * n + j1))
                        | (cols[j2] & ~bit(d * n + j2))
                    )

    return Bramble.from_elements(g, gen(), "prism_b2", max_elements)


def gen_torus_cde(g: Graph, max_elements: int = DEFAULT_ELEMENT_LIMIT) -> Bramble:
    """Wide-torus bramble of order 2n, defined for m >= n + 2.

    Three shapes: a cut column with four cut rows (no column taking three of
    the row cuts), a full column with three cut rows (cuts not all aligned),
    and two cut columns with three rows all cut in one outside column.
    """
    m, n = _require_family(g, "toroidal_grid", "torus bramble cde")
    if not m >= n + 2:
        raise WrongRegimeError(f"cde needs m >= n + 2, got m={m}, n={n}")
    rows = [line_vertices(g, "row", i) for i in range(m)]
    cols = [line_vertices(g, "column", j) for j in range(n)]

    def cut_row(r: int, c: int) -> int:
        return rows[r] & ~bit(r * n + c)

    def cut_col(j: int, d: int) -> int:
        return cols[j] & ~bit(d * n + j)

    def gen() -> Iterator[int]:
        for j in range(n):
            others = [c for c in range(n) if c != j]
            # C: cut column + four cut rows, row cuts never 3-aligned
            for rs in combinations(range(m), 4):
                outside = [d for d in range(m) if d not in rs]
                for d in outside:
                    base = cut_col(j, d)
                    for cuts in _product_no_triple(others, 4):
                        e = base
                        for r, c in zip(rs, cuts):
                            e |= cut_row(r, c)
                        yield e
            # D: full column + three cut rows, cuts not all in one column
            for rs in combinations(range(m), 3):
                for cuts in _product_not_constant(others, 3):
                    e = cols[j]
                    for r, c in zip(rs, cuts):
                        e |= cut_row(r, c)
                    yield e
        # E: two cut columns + three rows cut in a common outside column
        for j1, j2 in combinations(range(n), 2):
            for rs in combinations(range(m), 3):
                outside = [d for d in range(m) if d not in rs]
                shared = [c for c in range(n) if c != j1 and c != j2]
                for d1 in outside:
                    c1 = cut_col(j1, d1)
                    for d2 in outside:
                        base = c1 | cut_col(j2, d2)
                        for c in shared:
                            e = base
                            for r in rs:
                                e |= cut_row(r, c)
                            yield e

    return Bramble.from_elements(g, gen(), "torus_cde", max_elements)


def _product_no_triple(choices: list[int], count: int) -> Iterator[tuple[int, ...]]:
    """Tuples over choices where no value occurs three or more times."""
    from itertools import product

    for tup in product(choices, repeat=count):
        if max(tup.count(c) for c in set(tup)) < 3:
            yield tup


def _product_not_constant(choices: list[int], count: int) -> Iterator[tuple[int, ...]]:
    from itertools import product

    for tup in product(choices, repeat=count):
        if any(c != tup[0] for c in tup):
            yield tup


def gen_torus_fg(g: Graph, max_elements: int = DEFAULT_ELEMENT_LIMIT) -> Bramble:
    """Near-square-torus bramble of order 2n for m = n + 1. Not strict:
    shapes are a cut column plus a full row, and a cut column plus two cut
    rows. The first two rows together form a hitting set of size 2n."""
    m, n = _require_family(g, "toroidal_grid", "torus bramble fg")
    if m != n + 1:
        raise WrongRegimeError(f"fg needs m = n + 1, got m={m}, n={n}")
    rows = [line_vertices(g, "row", i) for i in range(m)]
    cols = [line_vertices(g, "column", j) for j in range(n)]

    def gen() -> Iterator[int]:
        for j in range(n):
            for d in range(m):
                cut = cols[j] & ~bit(d * n + j)
                # F: cut column + one full row avoiding the cut
                for r in range(m):
                    if r != d:
                        yield cut | rows[r]
                # G: cut column + two cut rows avoiding the cut
                for r1, r2 in combinations((r for r in range(m) if r != d), 2):
                    for c1 in range(n):
                        if c1 == j:
                            continue
                        left = rows[r1] & ~bit(r1 * n + c1)
                        for c2 in range(n):
                            if c2 == j:
                                continue
                            yield cut | left | (rows[r2] & ~bit(r2 * n + c2))

    return Bramble.from_elements(g, gen(), "torus_fg", max_elements)


# --- bramble file format ------------------------------------------------------
#
# Header "b <num_elements> <num_vertices>", then one line of 1-indexed
# vertex ids per element; "c" lines are comments.


def write_bramble(b: Bramble) -> str:
    lines = [f"b {len(b.elements)} {b.graph.n}"]
    for e in sorted(b.elements, key=lambda x: bits_list(x)):
        lines.append(" ".join(str(v + 1) for v in iter_bits(e)))
    return "\n".join(lines) + "\n"


def read_bramble(text: str, g: Graph, label: str = "custom") -> Bramble:
    header: tuple[int, int] | None = None
    elements: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if header is None:
            if parts[0] != "b" or len(parts) != 3:
                raise BrambleError(f"line {lineno}: expected 'b <elements> <vertices>'")
            header = (int(parts[1]), int(parts[2]))
            if header[1] != g.n:
                raise BrambleError(
                    f"bramble is over {header[1]} vertices, graph has {g.n}"
                )
            continue
        verts = [int(p) - 1 for p in parts]
        if any(not 0 <= v < g.n for v in verts):
            raise BrambleError(f"line {lineno}: vertex out of range")
        elements.append(mask_of(verts))
    if header is None:
        raise BrambleError("missing header line")
    if len(elements) != header[0]:
        raise BrambleError(f"declared {header[0]} elements, found {len(elements)}")
    return Bramble.from_elements(g, elements, label)
