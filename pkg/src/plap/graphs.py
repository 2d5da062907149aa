"""Finite simple graphs with degree-one boundaries.

Vertices are the integers ``0..n-1``. The boundary of a graph is its set of
pendant (degree-one) vertices, the interior is everything else. The module
provides constructors for the named families (paths, cycles, tadpoles),
exact canonical forms by permutation minimisation of the adjacency
bit-string, enumeration of connected graphs up to isomorphism by vertex
count or edge count, and the edge-list / JSON interchange formats.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import SpecOutOfRange, TooLarge

# Exhaustive permutation canonicalisation is capped here.
MAX_CANONICAL_VERTICES = 10
# Enumeration bounds (class counts explode past these at desk scale).
MAX_ENUM_VERTICES = 9
MAX_ENUM_EDGES = 9


@dataclass(frozen=True)
class Graph:
    """Immutable simple undirected graph.

    ``adj[u]`` is the strictly increasing tuple of neighbours of ``u``.
    Instances are validated on construction: no loops, no duplicate
    neighbours, symmetric adjacency, indices in range.
    """

    n: int
    adj: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be non-negative")
        if len(self.adj) != self.n:
            raise ValueError("adjacency length does not match vertex count")
        for u, row in enumerate(self.adj):
            prev = -1
            for v in row:
                if not 0 <= v < self.n:
                    raise ValueError(f"neighbour {v} of {u} out of range")
                if v == u:
                    raise ValueError(f"self-loop at {u}")
                if v <= prev:
                    raise ValueError(f"adjacency row {u} not strictly increasing")
                prev = v
                if u not in self.adj[v]:
                    raise ValueError(f"edge {u}-{v} not symmetric")

    @classmethod
    def from_edges(cls, n: int, edges) -> "Graph":
        rows = [set() for _ in range(n)]
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise ValueError(f"self-loop at {u}")
            rows[u].add(v)
            rows[v].add(u)
        return cls(n, tuple(tuple(sorted(r)) for r in rows))

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(row) for row in self.adj)

    @cached_property
    def num_edges(self) -> int:
        return sum(self.degrees) // 2

    def edges(self) -> tuple[tuple[int, int], ...]:
        return tuple((u, v) for u in range(self.n) for v in self.adj[u] if u < v)

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        seen = [False] * self.n
        stack = [0]
        seen[0] = True
        count = 1
        while stack:
            u = stack.pop()
            for v in self.adj[u]:
                if not seen[v]:
                    seen[v] = True
                    count += 1
                    stack.append(v)
        return count == self.n


@dataclass(frozen=True)
class BoundaryPartition:
    """Degree-one vertices and their complement."""

    boundary: frozenset[int]
    interior: frozenset[int]


def boundary_partition(g: Graph) -> BoundaryPartition:
    """Split the vertices of ``g`` into pendant (boundary) and interior sets."""
    boundary = frozenset(v for v in range(g.n) if g.degrees[v] == 1)
    interior = frozenset(range(g.n)) - boundary
    return BoundaryPartition(boundary=boundary, interior=interior)


# ---------------------------------------------------------------------------
# Named families
# ---------------------------------------------------------------------------

def make_path(n: int) -> Graph:
    """Path on ``n >= 2`` vertices, edges ``{k, k+1}``."""
    if n < 2:
        raise SpecOutOfRange(f"path needs n >= 2, got {n}")
    return Graph.from_edges(n, [(k, k + 1) for k in range(n - 1)])


def make_cycle(n: int) -> Graph:
    """Cycle on ``n >= 3`` vertices."""
    if n < 3:
        raise SpecOutOfRange(f"cycle needs n >= 3, got {n}")
    return Graph.from_edges(n, [(k, k + 1) for k in range(n - 1)] + [(0, n - 1)])


def make_tadpole(n: int, i: int) -> Graph:
    """Tadpole on ``n`` vertices: an ``i``-cycle head plus a pendant tail.

    Vertices ``0..i-1`` form the head cycle, ``i-1..n-1`` the tail path;
    vertex ``i-1`` is the neck (degree three) and ``n-1`` the pendant end.
    Requires ``3 <= i < n``.
    """
    if not 3 <= i < n:
        raise SpecOutOfRange(f"tadpole needs 3 <= i < n, got i={i}, n={n}")
    edges = [(k, k + 1) for k in range(n - 1)] + [(0, i - 1)]
    return Graph.from_edges(n, edges)


# ---------------------------------------------------------------------------
# Canonical forms
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _perm_table(k: int) -> np.ndarray:
    if k == 0:
        return np.zeros((1, 0), dtype=np.int8)
    return np.array(list(itertools.permutations(range(k))), dtype=np.int8)


@lru_cache(maxsize=None)
def _triu_pairs(n: int):
    return np.triu_indices(n, 1)


def _adjacency_matrix(g: Graph) -> np.ndarray:
    a = np.zeros((g.n, g.n), dtype=bool)
    for u, row in enumerate(g.adj):
        for v in row:
            a[u, v] = True
    return a


def _pack_key(n: int, value: int, nbits: int) -> bytes:
    nbytes = (nbits + 7) // 8
    return bytes([n]) + (value << (8 * nbytes - nbits)).to_bytes(nbytes, "big")


@lru_cache(maxsize=None)
def canonical_key(g: Graph) -> bytes:
    """Isomorphism-invariant key: the minimal adjacency bit-string.

    The upper-triangle bits of the permuted adjacency matrix, read row by
    row, are minimised over all vertex permutations; two graphs share a key
    exactly when they are isomorphic. Only permutations that can attain the
    minimum are scanned: the minimal first row forces a minimum-degree
    vertex into position 0 with its neighbours in the trailing positions.
    Capped at 10 vertices.
    """
    n = g.n
    if n > MAX_CANONICAL_VERTICES:
        raise TooLarge(f"canonical form capped at {MAX_CANONICAL_VERTICES} vertices, got {n}")
    if n <= 1:
        return bytes([n])
    degs = g.degrees
    dmin = min(degs)
    a = _adjacency_matrix(g)
    iu, ju = _triu_pairs(n)
    nbits = n * (n - 1) // 2
    rest_perms = _perm_table(n - 1)
    best = None
    for v0 in range(n):
        if degs[v0] != dmin:
            continue
        rest = np.array([u for u in range(n) if u != v0], dtype=np.int8)
        if dmin > 0:
            is_nbr = np.isin(rest, np.array(g.adj[v0], dtype=np.int8))
            sel = rest_perms[is_nbr[rest_perms[:, n - 1 - dmin:]].all(axis=1)]
        else:
            sel = rest_perms
        perms = np.empty((sel.shape[0], n), dtype=np.int8)
        perms[:, 0] = v0
        perms[:, 1:] = rest[sel]
        bits = a[perms[:, iu], perms[:, ju]]
        packed = np.packbits(bits, axis=1, bitorder="big")
        padded = np.zeros((packed.shape[0], 8), dtype=np.uint8)
        padded[:, : packed.shape[1]] = packed
        m = int(padded.view(">u8").min())
        if best is None or m < best:
            best = m
    return bytes([n]) + best.to_bytes(8, "big")[: (nbits + 7) // 8]


def identity_key(g: Graph) -> bytes:
    """Labelled (permutation-sensitive) encoding of the adjacency bits.

    Same byte layout as ``canonical_key`` but without minimisation, so it
    works for any vertex count. Used where a deterministic per-graph token
    is needed beyond the canonicalisation cap.
    """
    n = g.n
    if n <= 1:
        return bytes([n])
    a = _adjacency_matrix(g)
    iu, ju = _triu_pairs(n)
    nbits = n * (n - 1) // 2
    value = 0
    for bit in a[iu, ju]:
        value = (value << 1) | int(bit)
    return _pack_key(n, value, nbits)


def graph_key(g: Graph) -> bytes:
    """Canonical key when within the cap, labelled encoding otherwise."""
    if g.n <= MAX_CANONICAL_VERTICES:
        return canonical_key(g)
    return identity_key(g)


def is_isomorphic(g1: Graph, g2: Graph) -> bool:
    return canonical_key(g1) == canonical_key(g2)


# ---------------------------------------------------------------------------
# Enumeration of connected graphs up to isomorphism
# ---------------------------------------------------------------------------
#
# Connected classes on k vertices are grown from classes on k-1 vertices by
# attaching a new vertex to every nonempty subset of the old ones (every
# connected graph has a non-cut vertex, so each class is reached), then
# deduplicated by canonical key. An edge budget prunes the growth when
# enumerating by edge count: a graph on k vertices can carry at most
# budget - (target - k) edges since each later vertex adds at least one.


def _extend(parent: Graph, mask: int) -> Graph:
    k = parent.n + 1
    new_nbrs = []
    rows = []
    for u in range(parent.n):
        if mask >> u & 1:
            rows.append(parent.adj[u] + (k - 1,))
            new_nbrs.append(u)
        else:
            rows.append(parent.adj[u])
    rows.append(tuple(new_nbrs))
    return Graph(k, tuple(rows))


@lru_cache(maxsize=None)
def _connected_classes_cached(k: int, budget: int) -> tuple[Graph, ...]:
    if k < 1 or budget < k - 1:
        return ()
    if k == 1:
        return (Graph(1, ((),)),)
    found: dict[bytes, Graph] = {}
    for parent in _connected_classes(k - 1, budget - 1):
        room = budget - parent.num_edges
        for mask in range(1, 1 << (k - 1)):
            if mask.bit_count() > room:
                continue
            child = _extend(parent, mask)
            key = canonical_key(child)
            if key not in found:
                found[key] = child
    return tuple(found[key] for key in sorted(found))


def _connected_classes(k: int, budget: int) -> tuple[Graph, ...]:
    """Connected isomorphism-class representatives on ``k`` vertices with at
    most ``budget`` edges, sorted by canonical key."""
    return _connected_classes_cached(k, min(budget, k * (k - 1) // 2))


def _has_pendant(g: Graph) -> bool:
    return any(d == 1 for d in g.degrees)


def enumerate_connected_by_vertices(n: int, require_boundary: bool = False):
    """Yield one representative per isomorphism class of connected graphs
    on ``n`` vertices, sorted by canonical key.

    With ``require_boundary`` only graphs owning at least one pendant
    vertex are produced. ``1 <= n <= 9``.
    """
    if n < 1:
        raise SpecOutOfRange(f"need n >= 1, got {n}")
    if n > MAX_ENUM_VERTICES:
        raise TooLarge(f"vertex enumeration capped at {MAX_ENUM_VERTICES}, got {n}")
    for g in _connected_classes(n, n * (n - 1) // 2):
        if require_boundary and not _has_pendant(g):
            continue
        yield g


@lru_cache(maxsize=None)
def _edge_classes(m: int) -> tuple[Graph, ...]:
    pairs = []
    v_min = 1
    while v_min * (v_min - 1) // 2 < m:
        v_min += 1
    for v in range(v_min, m + 2):
        for g in _connected_classes(v, m):
            if g.num_edges == m:
                pairs.append((canonical_key(g), g))
    pairs.sort(key=lambda kv: kv[0])
    return tuple(g for _, g in pairs)


def enumerate_connected_by_edges(m: int, require_boundary: bool = False):
    """Yield one representative per isomorphism class of connected graphs
    with exactly ``m`` edges, over all feasible vertex counts, sorted by
    canonical key. ``0 <= m <= 9``."""
    if m < 0:
        raise SpecOutOfRange(f"need m >= 0, got {m}")
    if m > MAX_ENUM_EDGES:
        raise TooLarge(f"edge enumeration capped at {MAX_ENUM_EDGES}, got {m}")
    for g in _edge_classes(m):
        if require_boundary and not _has_pendant(g):
            continue
        yield g


# ---------------------------------------------------------------------------
# Interchange formats
# ---------------------------------------------------------------------------

def format_edge_list(g: Graph) -> str:
    """Edge-list text: an ``n=<k>`` header then one ``u v`` pair per line."""
    lines = [f"n={g.n}"]
    lines.extend(f"{u} {v}" for u, v in g.edges())
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> Graph:
    """Parse the edge-list format.

    Blank lines and ``#`` comments are ignored; the vertex count is
    ``1 + max index`` unless an ``n=<k>`` header overrides it.
    """
    n_header = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        compact = line.replace(" ", "")
        if compact.startswith("n="):
            try:
                n_header = int(compact[2:])
            except ValueError:
                raise ValueError(f"line {lineno}: bad header {line!r}") from None
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"line {lineno}: expected 'u v', got {line!r}")
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: non-integer endpoint in {line!r}") from None
        edges.append((u, v))
    if n_header is None:
        if not edges:
            raise ValueError("empty edge list without an n=<k> header")
        n_header = 1 + max(max(u, v) for u, v in edges)
    if n_header < 0:
        raise ValueError(f"bad vertex count {n_header}")
    return Graph.from_edges(n_header, edges)


def graph_to_json_dict(g: Graph) -> dict:
    return {"n": g.n, "edges": [[u, v] for u, v in g.edges()]}


def graph_from_json_dict(d: dict) -> Graph:
    try:
        n = int(d["n"])
        edges = [(int(u), int(v)) for u, v in d["edges"]]
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"bad graph JSON: {exc}") from None
    return Graph.from_edges(n, edges)
