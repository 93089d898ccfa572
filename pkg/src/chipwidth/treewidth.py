"""Exact treewidth, tree decompositions, and the covering-bag argument.

The exact solver answers "is treewidth <= k" by depth-first search over
elimination prefixes with memoized failed states. Each state is the bitmask
of already-eliminated vertices; the fill degree of a remaining vertex v is
the size of Q(S, v), the neighborhood of v's component in the graph induced
by S + {v}. Iterating k upward from a lower bound until the first success
yields the exact value together with a witness elimination order.

Run exhaustively (the default for graphs up to 22 vertices) the search
visits every feasible prefix at most once, which makes it the classic
subset dynamic program in top-down form. Above that size it runs under a
wall-clock budget as a branch and bound and reports bounds when the budget
runs out.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Sequence

from .graphs import (
    GRID_KINDS,
    Graph,
    InvalidFamilyError,
    bits_list,
    iter_bits,
    mask_connected,
    mask_of,
)

DP_VERTEX_LIMIT = 22
DEFAULT_MAX_STATES = 100_000_000
DEFAULT_BB_TIME = 60.0


class DecompositionError(Exception):
    """Base error for decomposition handling."""


class NotATreeError(DecompositionError):
    """The node/edge structure of a decomposition is not a tree."""


class TdFormatError(DecompositionError):
    """Malformed .td input."""


@dataclass(frozen=True)
class TreeDecomposition:
    """Bags indexed by node id 0..k-1 plus tree edges between node ids."""

    bags: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    num_graph_vertices: int

    @property
    def width(self) -> int:
        return max(b.bit_count() for b in self.bags) - 1

    @property
    def num_bags(self) -> int:
        return len(self.bags)


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of validate_tree_decomposition.

    condition is 1 (vertex missing from every bag), 2 (edge in no bag) or
    3 (nodes holding a vertex not connected), with a witness naming the
    offending vertex or edge; both are None when the decomposition is valid.
    """

    valid: bool
    condition: int | None = None
    witness: object = None

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class SolverLimits:
    """Budgets and hints for exact_treewidth."""

    method: str = "auto"  # auto | dp | bb
    max_states: int = DEFAULT_MAX_STATES
    time_budget: float | None = None  # seconds; None means engine default
    lower_bound_hint: int = 0  # e.g. a bramble order minus one


@dataclass(frozen=True)
class WidthResult:
    """Solver outcome. treewidth always equals width(decomposition); it is
    the exact treewidth precisely when proof_status == "exact"."""

    treewidth: int
    decomposition: TreeDecomposition
    method: str  # subset_dp | branch_and_bound
    proof_status: str  # exact | bounds_only
    lower: int
    upper: int
    states: int
    elapsed: float


def _check_tree(td: TreeDecomposition) -> None:
    k = td.num_bags
    if k == 0:
        raise NotATreeError("decomposition has no nodes")
    if len(td.edges) != k - 1:
        raise NotATreeError(f"{k} nodes need {k - 1} tree edges, got {len(td.edges)}")
    nbr = [[] for _ in range(k)]
    seen_edges = set()
    for a, b in td.edges:
        if not (0 <= a < k and 0 <= b < k) or a == b:
            raise NotATreeError(f"bad tree edge ({a}, {b})")
        key = (min(a, b), max(a, b))
        if key in seen_edges:
            raise NotATreeError(f"repeated tree edge ({a}, {b})")
        seen_edges.add(key)
        nbr[a].append(b)
        nbr[b].append(a)
    # connected + k-1 edges + no repeats => tree
    stack, seen = [0], {0}
    while stack:
        x = stack.pop()
        for y in nbr[x]:
            if y not in seen:
                seen.add(y)
                stack.append(y)
    if len(seen) != k:
        raise NotATreeError("tree edges do not connect all nodes")


def validate_tree_decomposition(g: Graph, td: TreeDecomposition) -> ValidationReport:
    """Check the three decomposition conditions, reporting the first failure.

    Raises NotATreeError when the node/edge structure is not a tree; the
    three conditions are only judged on structurally sound input.
    """
    _check_tree(td)
    if td.num_graph_vertices != g.n:
        raise DecompositionError(
            f"decomposition is for {td.num_graph_vertices} vertices, graph has {g.n}"
        )
    covered = 0
    for b in td.bags:
        if b >> g.n:
            raise DecompositionError("bag contains a vertex outside the graph")
        covered |= b
    if covered != g.full_mask:
        missing = (~covered & g.full_mask & -(~covered & g.full_mask)).bit_length() - 1
        return ValidationReport(False, 1, missing)
    for u, v in g.edges:
        need = (1 << u) | (1 << v)
        if not any(b & need == need for b in td.bags):
            return ValidationReport(False, 2, (u, v))
    k = td.num_bags
    nbr = [[] for _ in range(k)]
    for a, b in td.edges:
        nbr[a].append(b)
        nbr[b].append(a)
    for v in range(g.n):
        holding = [i for i in range(k) if td.bags[i] >> v & 1]
        start = holding[0]
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in nbr[x]:
                if y not in seen and td.bags[y] >> v & 1:
                    seen.add(y)
                    stack.append(y)
        if len(seen) != len(holding):
            return ValidationReport(False, 3, v)
    return ValidationReport(True)


def decomposition_from_elimination_order(g: Graph, order: Sequence[int]) -> TreeDecomposition:
    """Bags {v} + remaining fill-neighbors of v, chained by first-eliminated
    neighbor. Works for connected graphs; width equals the order's maximum
    back-degree."""
    if sorted(order) != list(range(g.n)):
        raise DecompositionError("elimination order must be a permutation of 0..n-1")
    n = g.n
    position = [0] * n
    for i, v in enumerate(order):
        position[v] = i
    adj = list(g.adj)
    remaining = g.full_mask
    bags: list[int] = []
    parents: list[int | None] = []
    for v in order:
        remaining &= ~(1 << v)
        nv = adj[v] & remaining
        bags.append(nv | (1 << v))
        if nv:
            first = min(iter_bits(nv), key=lambda u: position[u])
            parents.append(position[first])
            for u in iter_bits(nv):
                adj[u] |= nv & ~(1 << u)
        else:
            parents.append(None)
    edges = []
    for i, p in enumerate(parents):
        if p is not None:
            edges.append((i, p))
        elif i != n - 1:
            # disconnected remainder: hang trivial component roots in sequence
            edges.append((i, i + 1))
    return TreeDecomposition(tuple(bags), tuple(edges), n)


# --- lower/upper bound heuristics ------------------------------------------


def degeneracy(g: Graph) -> int:
    """Max over subgraphs of the minimum degree; a treewidth lower bound."""
    adj = list(g.adj)
    remaining = g.full_mask
    best = 0
    for _ in range(g.n):
        v = min(
            iter_bits(remaining),
            key=lambda u: ((adj[u] & remaining).bit_count(), u),
        )
        best = max(best, (adj[v] & remaining).bit_count())
        remaining &= ~(1 << v)
    return best


def min_fill_order(g: Graph) -> tuple[list[int], int]:
    """Greedy elimination picking the vertex adding fewest fill edges.

    Returns (order, width). Deterministic: ties break on lower vertex id.
    """
    adj = list(g.adj)
    remaining = g.full_mask
    order: list[int] = []
    width = 0
    for _ in range(g.n):
        best_v = -1
        best_fill = -1
        for v in iter_bits(remaining):
            nv = adj[v] & remaining & ~(1 << v)
            fill = 0
            for u in iter_bits(nv):
                fill += (nv & ~adj[u] & ~(1 << u)).bit_count()
            if best_fill < 0 or fill < best_fill:
                best_fill = fill
                best_v = v
        v = best_v
        nv = adj[v] & remaining & ~(1 << v)
        width = max(width, nv.bit_count())
        for u in iter_bits(nv):
            adj[u] |= nv & ~(1 << u)
        remaining &= ~(1 << v)
        order.append(v)
    return order, width


def _first_move_candidates(g: Graph) -> list[int]:
    # Orbit representatives from family metadata only. A torus is vertex
    # transitive; prisms and grids are fixed by row rotation/reflection and
    # column reflection, so one representative per column class suffices
    # (grids also per row class).
    fam = g.family
    if fam is None or fam.kind not in GRID_KINDS:
        return list(range(g.n))
    m, n = fam.m, fam.n
    if fam.kind == "toroidal_grid":
        return [0]
    if fam.kind == "stacked_prism":
        return [j for j in range((n + 1) // 2)]
    rows = range((m + 1) // 2)
    cols = range((n + 1) // 2)
    return [i * n + j for i in rows for j in cols]


class _Budget:
    __slots__ = ("max_states", "deadline", "states", "exhausted")

    def __init__(self, max_states: int, time_budget: float | None):
        self.max_states = max_states
        self.deadline = None if time_budget is None else time.monotonic() + time_budget
        self.states = 0
        self.exhausted = False

    def tick(self) -> bool:
        """Count one expanded state; True while within budget."""
        self.states += 1
        if self.states > self.max_states:
            self.exhausted = True
        elif self.deadline is not None and not self.states & 0xFF:
            if time.monotonic() > self.deadline:
                self.exhausted = True
        return not self.exhausted


def _fill_neighborhoods(adj: Sequence[int], s_mask: int, outside: int) -> list[int]:
    """Q(S, v) for every v outside S, as masks indexed by vertex id.

    Components of the induced subgraph on S are computed once; Q(S, v) is
    adj[v] plus the adjacency unions of the components v touches, minus S.
    """
    comps: list[tuple[int, int]] = []
    rem = s_mask
    while rem:
        low = rem & -rem
        comp = low
        reach_all = 0
        frontier = low
        while frontier:
            reach = 0
            for u in iter_bits(frontier):
                reach |= adj[u]
            reach_all |= reach
            frontier = reach & s_mask & ~comp
            comp |= frontier
        comps.append((comp, reach_all))
        rem &= ~comp
    out: list[int] = [0] * len(adj)
    for v in iter_bits(outside):
        q = adj[v]
        for comp, reach in comps:
            if comp & adj[v]:
                q |= reach
        out[v] = q & ~s_mask & ~(1 << v)
    return out


def _decide_width(
    g: Graph, k: int, budget: _Budget, roots: list[int] | None = None
) -> tuple[bool | None, list[int] | None]:
    """Is there an elimination order with every back-degree <= k?

    Returns (verdict, order). verdict None means the budget ran out before
    the question was settled.
    """
    n = g.n
    full = g.full_mask
    adj = g.adj
    failed: set[int] = set()
    path: list[int] = []

    def dfs(s_mask: int, depth: int) -> bool | None:
        if n - depth <= k + 1:
            return True
        if s_mask in failed:
            return False
        if not budget.tick():
            return None
        outside = full & ~s_mask
        q = _fill_neighborhoods(adj, s_mask, outside)
        cand: list[tuple[int, int]] = []
        for v in iter_bits(outside):
            d = q[v].bit_count()
            if d <= k:
                cand.append((d, v))
        # simplicial vertices are safe forced moves; one with fill degree
        # above k certifies failure outright (it sits in a k+2 clique)
        forced = -1
        for v in iter_bits(outside):
            qv = q[v]
            simplicial = True
            for u in iter_bits(qv):
                if qv & ~(1 << u) & ~q[u]:
                    simplicial = False
                    break
            if simplicial:
                if qv.bit_count() > k:
                    failed.add(s_mask)
                    return False
                if forced < 0:
                    forced = v
        if forced >= 0:
            res = dfs(s_mask | (1 << forced), depth + 1)
            if res:
                path.append(forced)
            elif res is False:
                failed.add(s_mask)
            return res
        cand.sort()
        for _, v in cand:
            res = dfs(s_mask | (1 << v), depth + 1)
            if res:
                path.append(v)
                return True
            if res is None:
                return None
        failed.add(s_mask)
        return False

    if roots is None:
        roots = list(range(n))
    if n <= k + 1:
        return True, sorted(range(n))
    for r in roots:
        # root moves restricted to orbit representatives; fill degree at the
        # empty prefix is the plain degree
        if g.degree(r) > k:
            continue
        res = dfs(1 << r, 1)
        if res:
            path.append(r)
            prefix = list(reversed(path))
            rest = sorted(set(range(n)) - set(prefix))
            return True, prefix + rest
        if res is None:
            return None, None
    return False, None


def exact_treewidth(g: Graph, limits: SolverLimits | None = None) -> WidthResult:
    """Exact treewidth with a witness decomposition, or bounds on budget.

    Graphs with at most 22 vertices run the exhaustive subset engine by
    default; larger graphs run branch and bound under a wall-clock budget
    (60 s unless overridden) and may return proof_status "bounds_only".
    """
    if not g.is_connected():
        raise ValueError("treewidth solver expects a connected graph")
    limits = limits or SolverLimits()
    method = limits.method
    if method == "auto":
        method = "dp" if g.n <= DP_VERTEX_LIMIT else "bb"
    if method not in ("dp", "bb"):
        raise ValueError(f"method must be auto, dp or bb, got {method!r}")
    time_budget = limits.time_budget
    if time_budget is None and method == "bb":
        time_budget = DEFAULT_BB_TIME
    t0 = time.monotonic()
    budget = _Budget(limits.max_states, time_budget)
    method_name = "subset_dp" if method == "dp" else "branch_and_bound"

    mf_order, mf_width = min_fill_order(g)
    lower = max(degeneracy(g), limits.lower_bound_hint, 1 if g.num_edges else 0)
    upper = mf_width
    best_order = mf_order
    roots = _first_move_candidates(g)

    k = lower
    while k < upper:
        verdict, order = _decide_width(g, k, budget, roots)
        if verdict is None:
            break
        if verdict:
            upper = k
            best_order = order
            break
        lower = k + 1
        k += 1

    td = decomposition_from_elimination_order(g, best_order)
    status = "exact" if lower == upper else "bounds_only"
    return WidthResult(
        treewidth=upper,
        decomposition=td,
        method=method_name,
        proof_status=status,
        lower=lower,
        upper=upper,
        states=budget.states,
        elapsed=time.monotonic() - t0,
    )


# --- covering bag -----------------------------------------------------------


@dataclass(frozen=True)
class CoveringBag:
    """A bag meeting every element of a bramble, found by edge orientation.

    via_separator is set when some tree-edge intersection already covered
    the bramble; the reported node is then the smaller endpoint bag.
    """

    node: int
    bag: int
    via_separator: bool


def covering_bag(td: TreeDecomposition, bramble) -> CoveringBag:
    """Walk the decomposition toward the bramble and return a covering bag.

    Every element of the bramble must intersect the returned bag. A failure
    to find one would contradict the defining property of brambles against
    tree decompositions, so it raises instead of returning.
    """
    elements = bramble.elements
    if not elements:
        raise ValueError("bramble has no elements")
    report = validate_tree_decomposition(bramble.graph, td)
    if not report.valid:
        raise DecompositionError(
            f"covering bag needs a valid decomposition (condition {report.condition} fails)"
        )
    k = td.num_bags
    if k == 1:
        if any(not (e & td.bags[0]) for e in elements):
            raise RuntimeError("internal: single bag fails to cover the bramble")
        return CoveringBag(0, td.bags[0], False)

    nbr = [[] for _ in range(k)]
    for a, b in td.edges:
        nbr[a].append(b)
        nbr[b].append(a)

    def side_nodes(root: int, banned: int) -> list[int]:
        seen = {root}
        stack = [root]
        while stack:
            x = stack.pop()
            for y in nbr[x]:
                if y != banned and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return sorted(seen)

    arrow: dict[tuple[int, int], int] = {}
    for a, b in td.edges:
        x = td.bags[a] & td.bags[b]
        unhit = [e for e in elements if not e & x]
        if not unhit:
            small, other = (a, b) if (
                td.bags[a].bit_count(),
                a,
            ) <= (td.bags[b].bit_count(), b) else (b, a)
            return CoveringBag(small, td.bags[small], True)
        ua = 0
        for t in side_nodes(a, b):
            ua |= td.bags[t]
        ub = 0
        for t in side_nodes(b, a):
            ub |= td.bags[t]
        target = None
        for e in unhit:
            if e & ua & ~x == e:
                t = a
            elif e & ub & ~x == e:
                t = b
            else:
                raise RuntimeError("internal: bramble element straddles a separator it avoids")
            if target is None:
                target = t
            elif target != t:
                raise RuntimeError("internal: unhit elements disagree on orientation side")
        arrow[(a, b)] = target
        arrow[(b, a)] = target

    node = 0
    while True:
        out = [y for y in nbr[node] if arrow[(node, y)] == y]
        if not out:
            break
        node = out[0]
    bag = td.bags[node]
    if any(not (e & bag) for e in elements):
        raise RuntimeError("internal: oriented walk ended at a non-covering bag")
    return CoveringBag(node, bag, False)


# --- family bounds report ---------------------------------------------------


@dataclass(frozen=True)
class BoundsReport:
    """Predicted and computed treewidth information for a family graph."""

    kind: str
    m: int
    n: int
    predicted_low: int
    predicted_high: int
    note: str
    bramble_label: str | None
    bramble_order: int | None
    minor_lower: int | None
    exact: int | None
    lower: int
    upper: int

    @property
    def predicted_exact(self) -> bool:
        return self.predicted_low == self.predicted_high


def treewidth_bounds_report(
    g: Graph,
    limits: SolverLimits | None = None,
    compute_bramble_order: bool = True,
) -> BoundsReport:
    """Cross-check the family width formulas against computed certificates.

    Exceptional parameter lines (prism m = 2n, torus |m - n| <= 1) get a
    two-value predicted interval and an explanatory note. A computed exact
    value outside the predicted range raises RuntimeError: that would mean
    either a solver bug or a false formula, and must not pass silently.
    """
    from . import brambles

    fam = g.family
    if fam is None or fam.kind not in GRID_KINDS:
        raise InvalidFamilyError("bounds report needs a grid-like family graph")
    m, n = fam.m, fam.n
    note = ""
    bramble_label: str | None = None
    bramble_gen = None
    minor_lower: int | None = None

    if fam.kind == "grid":
        plow = phigh = min(m, n)
        if min(m, n) >= 2:
            bramble_label, bramble_gen = "grid_b", brambles.gen_grid_bramble
    elif fam.kind == "stacked_prism":
        if m != 2 * n:
            plow = phigh = min(m, 2 * n)
            if 2 * n < m:
                bramble_label, bramble_gen = "prism_b1", brambles.gen_prism_b1
            else:
                bramble_label, bramble_gen = "prism_b2", brambles.gen_prism_b2
        else:
            plow, phigh = 2 * n - 1, 2 * n
            note = "open: prism with m = 2n is only known to lie in this interval"
            minor_lower = 2 * n - 1  # row collapse to the (2n-1, n) prism
    else:
        lo = min(m, n)
        if abs(m - n) >= 2:
            plow = phigh = 2 * lo
            if m >= n + 2:
                bramble_label, bramble_gen = "torus_cde", brambles.gen_torus_cde
        elif m == n:
            plow, phigh = 2 * n - 2, 2 * n - 1
            note = "open: square torus is only known to lie in this interval"
        else:
            plow, phigh = 2 * lo - 1, 2 * lo
            note = "open: near-square torus is only known to lie in this interval"
            if m == n + 1:
                bramble_label, bramble_gen = "torus_fg", brambles.gen_torus_fg

    bramble_order: int | None = None
    if bramble_gen is not None and compute_bramble_order:
        b = bramble_gen(g)
        bramble_order = brambles.min_hitting_set(b).order

    result = exact_treewidth(g, limits)
    exact = result.treewidth if result.proof_status == "exact" else None

    lower = max(plow if exact is None else exact, result.lower)
    if bramble_order is not None:
        # strict families give order <= tw, the fg family only order - 1
        gain = bramble_order if bramble_label != "torus_fg" else bramble_order - 1
        lower = max(lower, gain)
    if minor_lower is not None:
        lower = max(lower, minor_lower)
    upper = exact if exact is not None else min(phigh, result.upper)

    if exact is not None and not plow <= exact <= phigh:
        raise RuntimeError(
            f"computed treewidth {exact} contradicts predicted range "
            f"[{plow}, {phigh}] for {fam.kind}({m},{n})"
        )
    if lower > upper:
        raise RuntimeError(
            f"certificates contradict each other on {fam.kind}({m},{n}): "
            f"lower {lower} exceeds upper {upper}"
        )
    return BoundsReport(
        kind=fam.kind,
        m=m,
        n=n,
        predicted_low=plow,
        predicted_high=phigh,
        note=note,
        bramble_label=bramble_label,
        bramble_order=bramble_order,
        minor_lower=minor_lower,
        exact=exact,
        lower=lower,
        upper=upper,
    )


# --- .td file format --------------------------------------------------------
#
# "s td <num_bags> <max_bag_size> <num_vertices>", then "b <id> <v...>" per
# bag (ids and vertices 1-indexed), then one "i j" line per tree edge.


def write_td(td: TreeDecomposition) -> str:
    maxbag = max(b.bit_count() for b in td.bags)
    lines = [f"s td {td.num_bags} {maxbag} {td.num_graph_vertices}"]
    for i, b in enumerate(td.bags):
        content = " ".join(str(v + 1) for v in iter_bits(b))
        lines.append(f"b {i + 1} {content}" if content else f"b {i + 1}")
    for a, b in sorted(tuple(sorted(e)) for e in td.edges):
        lines.append(f"{a + 1} {b + 1}")
    return "\n".join(lines) + "\n"


def read_td(text: str) -> TreeDecomposition:
    num_bags = -1
    num_vertices = -1
    declared_width = -1
    bags: dict[int, int] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        parts = line.split()
        if parts[0] == "s":
            if num_bags != -1:
                raise TdFormatError(f"line {lineno}: repeated solution line")
            if len(parts) != 5 or parts[1] != "td":
                raise TdFormatError(f"line {lineno}: expected 's td <bags> <size> <n>'")
            num_bags, declared_width, num_vertices = (
                int(parts[2]),
                int(parts[3]),
                int(parts[4]),
            )
        elif parts[0] == "b":
            if num_bags == -1:
                raise TdFormatError(f"line {lineno}: bag before solution line")
            bag_id = int(parts[1]) - 1
            if not 0 <= bag_id < num_bags:
                raise TdFormatError(f"line {lineno}: bag id out of range")
            if bag_id in bags:
                raise TdFormatError(f"line {lineno}: repeated bag {bag_id + 1}")
            verts = [int(p) - 1 for p in parts[2:]]
            if any(not 0 <= v < num_vertices for v in verts):
                raise TdFormatError(f"line {lineno}: bag vertex out of range")
            bags[bag_id] = mask_of(verts)
        else:
            if len(parts) != 2:
                raise TdFormatError(f"line {lineno}: expected tree edge 'i j'")
            a, b = int(parts[0]) - 1, int(parts[1]) - 1
            if not (0 <= a < num_bags and 0 <= b < num_bags):
                raise TdFormatError(f"line {lineno}: tree edge out of range")
            edges.append((a, b))
    if num_bags == -1:
        raise TdFormatError("missing solution line")
    if len(bags) != num_bags:
        raise TdFormatError(f"declared {num_bags} bags, found {len(bags)}")
    bag_tuple = tuple(bags[i] for i in range(num_bags))
    if max(b.bit_count() for b in bag_tuple) != declared_width:
        raise TdFormatError("declared max bag size does not match bags")
    return TreeDecomposition(bag_tuple, tuple(edges), num_vertices)


def write_td_file(td: TreeDecomposition, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(write_td(td))


def read_td_file(path) -> TreeDecomposition:
    with open(path, "r", encoding="ascii") as fh:
        return read_td(fh.read())
