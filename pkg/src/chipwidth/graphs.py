"""Graph core: bitset vertex sets, grid-like families, minors, and .gr I/O.

Vertices are integers 0..n-1. Vertex sets are Python int bitmasks (bit v set
means vertex v is in the set). Graphs are simple, undirected, and immutable
after construction; family constructors always produce connected graphs.

Grid-like families use a fixed labeling: the vertex in row i, column j gets
id i*n + j, where m is the number of rows and n the number of columns. In a
stacked prism (cycle x path) and a toroidal grid (cycle x cycle) a column
induces an m-cycle; rows induce paths (prism) or n-cycles (torus).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence


class GraphError(Exception):
    """Base error for graph construction and file handling."""


class InvalidFamilyError(GraphError):
    """Family parameters out of range, or operation needs family metadata."""


class MissingEdgeError(GraphError):
    """A minor step referenced an edge that is not in the graph."""


class FormatError(GraphError):
    """Malformed .gr input."""


ELEMENTARY_KINDS = ("path", "cycle")
GRID_KINDS = ("grid", "stacked_prism", "toroidal_grid")
FAMILY_KINDS = ELEMENTARY_KINDS + GRID_KINDS + ("product", "other")


def bit(v: int) -> int:
    return 1 << v


def mask_of(vertices: Iterable[int]) -> int:
    m = 0
    for v in vertices:
        m |= 1 << v
    return m


def iter_bits(mask: int) -> Iterator[int]:
    """Yield set bit positions in ascending order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_list(mask: int) -> list[int]:
    return list(iter_bits(mask))


@dataclass(frozen=True)
class FamilyMeta:
    """Which named family a graph was built as, with its grid dimensions.

    kind is one of path, cycle, grid, stacked_prism, toroidal_grid, product,
    other. For grid-like kinds m counts rows and n counts columns; elementary
    kinds store their length as m with n = 1; product stores the two factor
    orders.
    """

    kind: str
    m: int
    n: int

    def __post_init__(self) -> None:
        if self.kind not in FAMILY_KINDS:
            raise InvalidFamilyError(f"unknown family kind {self.kind!r}")


class Graph:
    """Immutable simple undirected graph with bitmask adjacency.

    lossy_contraction is set when the graph was produced by an edge
    contraction that collapsed parallel edges; chip-firing operations refuse
    such graphs because multiplicities were discarded.
    """

    __slots__ = ("n", "edges", "adj", "family", "lossy_contraction")

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]],
        family: FamilyMeta | None = None,
        lossy_contraction: bool = False,
    ) -> None:
        if n < 1:
            raise GraphError("graph needs at least one vertex")
        seen: set[tuple[int, int]] = set()
        adj = [0] * n
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"loop at vertex {u} not allowed")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                continue
            seen.add((u, v))
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(sorted(seen))
        self.adj: tuple[int, ...] = tuple(adj)
        self.family = family
        self.lossy_contraction = lossy_contraction

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset(self.edges)

    def degree(self, v: int) -> int:
        return self.adj[v].bit_count()

    def neighbors(self, v: int) -> list[int]:
        return bits_list(self.adj[v])

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.adj[u] >> v & 1)

    def neighborhood(self, mask: int) -> int:
        """Union of adjacencies over a vertex set (may overlap the set)."""
        out = 0
        for v in iter_bits(mask):
            out |= self.adj[v]
        return out

    def is_connected(self) -> bool:
        return mask_connected(self.adj, self.full_mask)

    def relabeled(self, perm: Sequence[int]) -> "Graph":
        """New graph with vertex v renamed perm[v]. Family metadata drops."""
        if sorted(perm) != list(range(self.n)):
            raise GraphError("relabeling must be a permutation of 0..n-1")
        edges = [(perm[u], perm[v]) for u, v in self.edges]
        return Graph(self.n, edges, None, self.lossy_contraction)

    def __repr__(self) -> str:
        fam = f", family={self.family.kind}({self.family.m},{self.family.n})" if self.family else ""
        return f"Graph(n={self.n}, edges={self.num_edges}{fam})"


def mask_connected(adj: Sequence[int], mask: int) -> bool:
    """Is the subgraph induced by mask connected? Empty mask is rejected."""
    if mask == 0:
        raise ValueError("empty vertex set has no connectivity verdict")
    seen = mask & -mask
    frontier = seen
    while frontier:
        reach = 0
        for v in iter_bits(frontier):
            reach |= adj[v]
        frontier = reach & mask & ~seen
        seen |= frontier
    return seen == mask


def make_elementary(kind: str, k: int) -> Graph:
    """Path on k >= 1 vertices or cycle on k >= 3 vertices."""
    if kind == "path":
        if k < 1:
            raise InvalidFamilyError("path needs k >= 1")
        edges = [(i, i + 1) for i in range(k - 1)]
    elif kind == "cycle":
        if k < 3:
            raise InvalidFamilyError("cycle needs k >= 3")
        edges = [(i, (i + 1) % k) for i in range(k)]
    else:
        raise InvalidFamilyError(f"elementary kind must be path or cycle, got {kind!r}")
    return Graph(k, edges, FamilyMeta(kind, k, 1))


def cartesian_product(g: Graph, h: Graph) -> Graph:
    """Cartesian product; vertex (a, b) of g x h gets id a*|V(h)| + b."""
    nh = h.n
    edges: list[tuple[int, int]] = []
    for a in range(g.n):
        base = a * nh
        for b, c in h.edges:
            edges.append((base + b, base + c))
    for a, c in g.edges:
        for b in range(nh):
            edges.append((a * nh + b, c * nh + b))
    fam = FamilyMeta("product", g.n, h.n)
    return Graph(g.n * nh, edges, fam, g.lossy_contraction or h.lossy_contraction)


def make_family(kind: str, m: int, n: int) -> Graph:
    """Grid (path x path), stacked prism (cycle x path), or torus (cycle x cycle).

    Rows are copies of the second factor: vertex (i, j) -> i*n + j with
    0 <= i < m, 0 <= j < n.
    """
    if kind == "grid":
        if m < 1 or n < 1:
            raise InvalidFamilyError("grid needs m, n >= 1")
        g = cartesian_product(make_elementary("path", m), make_elementary("path", n))
    elif kind == "stacked_prism":
        if m < 3 or n < 1:
            raise InvalidFamilyError("stacked prism needs m >= 3 and n >= 1")
        g = cartesian_product(make_elementary("cycle", m), make_elementary("path", n))
    elif kind == "toroidal_grid":
        if m < 3 or n < 3:
            raise InvalidFamilyError("toroidal grid needs m, n >= 3")
        g = cartesian_product(make_elementary("cycle", m), make_elementary("cycle", n))
    else:
        raise InvalidFamilyError(f"family kind must be one of {GRID_KINDS}, got {kind!r}")
    return Graph(g.n, g.edges, FamilyMeta(kind, m, n))


def line_vertices(g: Graph, which: str, index: int) -> int:
    """Bitmask of one row or column of a grid-like family graph."""
    fam = g.family
    if fam is None or fam.kind not in GRID_KINDS:
        raise InvalidFamilyError("row/column access needs grid-like family metadata")
    m, n = fam.m, fam.n
    if which == "row":
        if not 0 <= index < m:
            raise InvalidFamilyError(f"row index {index} out of range for m={m}")
        return mask_of(index * n + j for j in range(n))
    if which == "column":
        if not 0 <= index < n:
            raise InvalidFamilyError(f"column index {index} out of range for n={n}")
        return mask_of(i * n + index for i in range(m))
    raise InvalidFamilyError(f"which must be 'row' or 'column', got {which!r}")


def minor_step(g: Graph, op: str, edge: tuple[int, int]) -> Graph:
    """One minor operation: delete_edge or contract_edge.

    Contraction keeps the smaller endpoint's id, shifts ids above the removed
    endpoint down by one, and simplifies the result; if parallel edges were
    collapsed the result is marked lossy_contraction (chip-firing then
    refuses it). Family metadata does not survive a minor step.
    """
    u, v = edge
    if u > v:
        u, v = v, u
    if not (0 <= u < g.n and 0 <= v < g.n) or u == v or not g.has_edge(u, v):
        raise MissingEdgeError(f"edge ({edge[0]}, {edge[1]}) not in graph")
    if op == "delete_edge":
        edges = [e for e in g.edges if e != (u, v)]
        return Graph(g.n, edges, None, g.lossy_contraction)
    if op != "contract_edge":
        raise GraphError(f"op must be delete_edge or contract_edge, got {op!r}")
    new_edges: set[tuple[int, int]] = set()
    collapsed = False
    for a, b in g.edges:
        if (a, b) == (u, v):
            continue
        a2 = u if a == v else (a if a < v else a - 1)
        b2 = u if b == v else (b if b < v else b - 1)
        if a2 > b2:
            a2, b2 = b2, a2
        if (a2, b2) in new_edges:
            collapsed = True
        else:
            new_edges.add((a2, b2))
    return Graph(g.n - 1, new_edges, None, g.lossy_contraction or collapsed)


def row_collapse_minor(g: Graph, row: int) -> Graph:
    """Collapse one row of a stacked prism into the next row.

    Deletes the row's n-1 path edges, then contracts the n vertical edges
    from the row to its cyclic successor. The result is isomorphic to the
    stacked prism with one row fewer, which this operation verifies before
    returning. Needs m >= 4 so the contraction stays simplification-free.
    """
    fam = g.family
    if fam is None or fam.kind != "stacked_prism":
        raise InvalidFamilyError("row collapse is defined on stacked prisms")
    m, n = fam.m, fam.n
    if m < 4:
        raise InvalidFamilyError("row collapse needs m >= 4")
    if not 0 <= row < m:
        raise InvalidFamilyError(f"row index {row} out of range for m={m}")
    pos = {(i, j): i * n + j for i in range(m) for j in range(n)}
    cur: Graph = g
    for j in range(n - 1):
        cur = minor_step(cur, "delete_edge", (pos[(row, j)], pos[(row, j + 1)]))
    succ = (row + 1) % m
    for j in range(n):
        a, b = pos[(row, j)], pos[(succ, j)]
        cur = minor_step(cur, "contract_edge", (a, b))
        kept, gone = min(a, b), max(a, b)
        for key, vid in pos.items():
            if vid == gone:
                pos[key] = kept
            elif vid > gone:
                pos[key] = vid - 1
    if cur.lossy_contraction:
        raise GraphError("internal: row collapse collapsed parallel edges")
    target = make_family("stacked_prism", m - 1, n)
    if not are_isomorphic(cur, target):
        raise GraphError("internal: row collapse result is not the smaller prism")
    return cur


def are_isomorphic(g: Graph, h: Graph, return_mapping: bool = False):
    """Backtracking isomorphism test with degree pruning.

    Suited to the small graphs handled here (a few dozen vertices). The
    mapping, when requested, sends g-vertex v to mapping[v] in h.
    """
    if g.n != h.n or g.num_edges != h.num_edges:
        return (False, None) if return_mapping else False
    gdeg = [g.degree(v) for v in range(g.n)]
    hdeg = [h.degree(v) for v in range(h.n)]
    if sorted(gdeg) != sorted(hdeg):
        return (False, None) if return_mapping else False

    order = _search_order(g, gdeg)
    n = g.n
    mapping = [-1] * n
    used = 0
    mapped_h_mask = 0
    mapped_g_mask = 0

    def extend(i: int) -> bool:
        nonlocal used, mapped_h_mask, mapped_g_mask
        if i == n:
            return True
        v = order[i]
        want = 0
        for u in iter_bits(g.adj[v] & mapped_g_mask):
            want |= 1 << mapping[u]
        dv = gdeg[v]
        for w in range(n):
            if used >> w & 1 or hdeg[w] != dv:
                continue
            if h.adj[w] & mapped_h_mask != want:
                continue
            mapping[v] = w
            used |= 1 << w
            mapped_h_mask |= 1 << w
            mapped_g_mask |= 1 << v
            if extend(i + 1):
                return True
            mapping[v] = -1
            used ^= 1 << w
            mapped_h_mask ^= 1 << w
            mapped_g_mask ^= 1 << v
        return False

    ok = extend(0)
    if return_mapping:
        return ok, (list(mapping) if ok else None)
    return ok


def _search_order(g: Graph, deg: list[int]) -> list[int]:
    # Rarest degree first, then grow so every vertex sees a mapped neighbor
    # when the graph is connected; falls back to fresh seeds per component.
    from collections import Counter

    freq = Counter(deg)
    start = min(range(g.n), key=lambda v: (freq[deg[v]], -deg[v], v))
    order = [start]
    placed = 1 << start
    while len(order) < g.n:
        cand = [v for v in range(g.n) if not placed >> v & 1 and g.adj[v] & placed]
        if not cand:
            cand = [v for v in range(g.n) if not placed >> v & 1]
            nxt = min(cand, key=lambda v: (freq[deg[v]], -deg[v], v))
        else:
            nxt = max(cand, key=lambda v: ((g.adj[v] & placed).bit_count(), deg[v], -v))
        order.append(nxt)
        placed |= 1 << nxt
    return order


# --- .gr file format (treewidth-track exchange format) ---------------------
#
# Header "p tw <num_vertices> <num_edges>", one "u v" line per edge,
# 1-indexed, "c" lines are comments. The writer leads with a family comment
# when metadata is present so generated files round-trip losslessly.

_FAMILY_COMMENT = "c family"


def write_gr(g: Graph) -> str:
    lines = []
    if g.family is not None:
        f = g.family
        lines.append(f"{_FAMILY_COMMENT} {f.kind} {f.m} {f.n}")
    lines.append(f"p tw {g.n} {g.num_edges}")
    for u, v in g.edges:
        lines.append(f"{u + 1} {v + 1}")
    return "\n".join(lines) + "\n"


def read_gr(text: str) -> Graph:
    n = -1
    declared_edges = -1
    family: FamilyMeta | None = None
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("c"):
            parts = line.split()
            if len(parts) == 5 and parts[1] == "family" and parts[2] in FAMILY_KINDS:
                try:
                    family = FamilyMeta(parts[2], int(parts[3]), int(parts[4]))
                except ValueError:
                    pass
            continue
        parts = line.split()
        if parts[0] == "p":
            if n != -1:
                raise FormatError(f"line {lineno}: repeated problem line")
            if len(parts) != 4 or parts[1] != "tw":
                raise FormatError(f"line {lineno}: expected 'p tw <n> <m>'")
            n, declared_edges = int(parts[2]), int(parts[3])
            if n < 1:
                raise FormatError("graph must have at least one vertex")
        else:
            if n == -1:
                raise FormatError(f"line {lineno}: edge before problem line")
            if len(parts) != 2:
                raise FormatError(f"line {lineno}: expected 'u v'")
            u, v = int(parts[0]) - 1, int(parts[1]) - 1
            if not (0 <= u < n and 0 <= v < n):
                raise FormatError(f"line {lineno}: vertex out of range")
            if u == v:
                raise FormatError(f"line {lineno}: loop not allowed")
            edges.append((u, v))
    if n == -1:
        raise FormatError("missing problem line")
    if len(set(tuple(sorted(e)) for e in edges)) != len(edges):
        raise FormatError("parallel edge in input")
    if len(edges) != declared_edges:
        raise FormatError(f"declared {declared_edges} edges, found {len(edges)}")
    if family is not None and _family_shape_mismatch(family, n):
        family = None
    g = Graph(n, edges, family)
    if not g.is_connected():
        raise FormatError("graph is not connected")
    return g


def _family_shape_mismatch(fam: FamilyMeta, n: int) -> bool:
    if fam.kind in GRID_KINDS or fam.kind == "product":
        return fam.m * fam.n != n
    if fam.kind in ELEMENTARY_KINDS:
        return fam.m != n
    return False


def write_gr_file(g: Graph, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(write_gr(g))


def read_gr_file(path) -> Graph:
    with open(path, "r", encoding="ascii") as fh:
        return read_gr(fh.read())
