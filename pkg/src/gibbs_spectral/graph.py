"""Finite undirected graphs, self-avoiding walk enumeration, connective constants.

Vertices are dense 0-based integers and the total vertex ordering used by all
tie-breaking rules (split-vertex pins, cycle-closing pins) is plain index
order. Graphs are immutable after construction and safe to share between
threads.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .errors import GraphFormatError, ResourceLimitError

DEFAULT_WALK_CAP = 10_000_000


class SawWalk(tuple):
    """A self-avoiding walk stored as its ordered vertex sequence.

    Subclasses tuple so walks are hashable, sortable and directly usable as
    matrix labels. The walk length is the number of edges, one less than the
    number of vertices.
    """

    __slots__ = ()

    def __new__(cls, vertices):
        walk = super().__new__(cls, vertices)
        if len(walk) == 0:
            raise ValueError("a walk needs at least one vertex")
        if len(set(walk)) != len(walk):
            raise ValueError(f"walk repeats a vertex: {tuple(walk)}")
        return walk

    @property
    def length(self) -> int:
        return len(self) - 1

    @property
    def start(self) -> int:
        return self[0]

    @property
    def end(self) -> int:
        return self[-1]

    def reverse(self) -> "SawWalk":
        return SawWalk(self[::-1])

    def is_walk_in(self, g: "Graph") -> bool:
        return all(v in g.adjacency_sets[u] for u, v in zip(self, self[1:]))

    def __repr__(self):
        return f"SawWalk{tuple(self)!r}"


@dataclass(frozen=True)
class Graph:
    """Undirected simple graph with sorted neighbor lists.

    Disconnected graphs are rejected when ``require_connected`` is set, which
    is the default for user-facing loaders. Surgery operations (vertex
    splitting) construct intermediate graphs that are legitimately
    disconnected and pass ``require_connected=False``.
    """

    n: int
    adjacency: tuple
    edges: tuple
    relabeling: tuple = ()

    # Derived, not part of equality/hash.
    adjacency_sets: tuple = field(default=(), compare=False, repr=False)

    @classmethod
    def from_edges(cls, n, edges, require_connected=True, relabeling=()):
        if n <= 0:
            raise GraphFormatError("graph needs at least one vertex")
        seen = set()
        adj = [[] for _ in range(n)]
        canon = []
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphFormatError(f"edge ({u},{v}) out of range for n={n}")
            if u == v:
                raise GraphFormatError(f"self-loop at vertex {u}")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphFormatError(f"parallel edge ({u},{v})")
            seen.add(key)
            canon.append(key)
            adj[u].append(v)
            adj[v].append(u)
        g = cls(
            n=n,
            adjacency=tuple(tuple(sorted(ns)) for ns in adj),
            edges=tuple(sorted(canon)),
            relabeling=tuple(relabeling),
            adjacency_sets=tuple(frozenset(ns) for ns in adj),
        )
        if require_connected and not g.is_connected():
            raise GraphFormatError("graph is not connected")
        return g

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def max_degree(self) -> int:
        return max((len(ns) for ns in self.adjacency), default=0)

    def degree(self, v) -> int:
        return len(self.adjacency[v])

    def vertices(self):
        return range(self.n)

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        return len(self.bfs_distances(0)) == self.n

    def bfs_distances(self, src) -> dict:
        """Distances from src to every reachable vertex."""
        dist = {src: 0}
        queue = deque([src])
        while queue:
            u = queue.popleft()
            for v in self.adjacency[u]:
                if v not in dist:
                    dist[v] = dist[u] + 1
                    queue.append(v)
        return dist

    def distance(self, u, v) -> int:
        """Shortest-path distance, a large sentinel when unreachable."""
        d = self.bfs_distances(u).get(v)
        return self.n + 1 if d is None else d


def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("a cycle needs at least 3 vertices")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    """Star with center 0 and the given number of leaves."""
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def load_edge_list(path, require_connected=True) -> Graph:
    """Parse the edge-list format: header "n m", then m lines "u v".

    Lines starting with '#' are comments. Vertex ids with gaps (or ids at or
    above the declared n) are re-indexed to dense 0-based integers and the
    relabeling is recorded on the returned graph as (old, new) pairs.
    """
    header = None
    raw_edges = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            parts = stripped.split()
            if header is None:
                if len(parts) != 2:
                    raise GraphFormatError(f"{path}:{lineno}: expected header 'n m'")
                try:
                    header = (int(parts[0]), int(parts[1]))
                except ValueError:
                    raise GraphFormatError(f"{path}:{lineno}: non-integer header") from None
                continue
            if len(parts) != 2:
                raise GraphFormatError(f"{path}:{lineno}: expected 'u v'")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise GraphFormatError(f"{path}:{lineno}: non-integer endpoint") from None
            if u < 0 or v < 0:
                raise GraphFormatError(f"{path}:{lineno}: negative vertex id")
            raw_edges.append((u, v))
    if header is None:
        raise GraphFormatError(f"{path}: empty file")
    n, m = header
    if len(raw_edges) != m:
        raise GraphFormatError(f"{path}: header declares {m} edges, found {len(raw_edges)}")

    used = sorted({u for e in raw_edges for u in e})
    if used and (used[-1] >= n or used != list(range(n))):
        remap = {old: new for new, old in enumerate(used)}
        edges = [(remap[u], remap[v]) for u, v in raw_edges]
        relabeling = tuple((old, new) for old, new in remap.items())
        return Graph.from_edges(len(used), edges, require_connected, relabeling)
    return Graph.from_edges(n, raw_edges, require_connected)


def enumerate_saws(g: Graph, start, k, cap=DEFAULT_WALK_CAP):
    """All self-avoiding walks of length k from start, in lexicographic order."""
    if k < 0:
        raise ValueError("walk length must be nonnegative")
    if not (0 <= start < g.n):
        raise ValueError(f"vertex {start} not in graph")
    out = []
    walk = [start]
    in_walk = bytearray(g.n)
    in_walk[start] = 1
    adjacency = g.adjacency

    def extend(v, depth):
        if depth == k:
            out.append(SawWalk(walk))
            if len(out) > cap:
                raise ResourceLimitError(f"more than {cap} self-avoiding walks")
            return
        for y in adjacency[v]:
            if not in_walk[y]:
                walk.append(y)
                in_walk[y] = 1
                extend(y, depth + 1)
                walk.pop()
                in_walk[y] = 0

    extend(start, 0)
    return out


def count_saws(g: Graph, start, k, cap=DEFAULT_WALK_CAP) -> int:
    """Number of self-avoiding walks of length k from start (no materialization)."""
    if k < 0:
        raise ValueError("walk length must be nonnegative")
    in_walk = bytearray(g.n)
    in_walk[start] = 1
    adjacency = g.adjacency
    total = 0

    def walk_from(v, depth):
        nonlocal total
        if depth == k:
            total += 1
            if total > cap:
                raise ResourceLimitError(f"more than {cap} self-avoiding walks")
            return
        for y in adjacency[v]:
            if not in_walk[y]:
                in_walk[y] = 1
                walk_from(y, depth + 1)
                in_walk[y] = 0

    walk_from(start, 0)
    return total


def all_saws(g: Graph, k, cap=DEFAULT_WALK_CAP):
    """Every self-avoiding walk of length k (both orientations), sorted."""
    walks = []
    for v in g.vertices():
        walks.extend(enumerate_saws(g, v, k, cap=cap))
        if len(walks) > cap:
            raise ResourceLimitError(f"more than {cap} self-avoiding walks")
    return sorted(walks)


def saw_count_sup(g: Graph, k, cap=DEFAULT_WALK_CAP) -> int:
    """max over vertices of the number of length-k self-avoiding walks."""
    if k < 1:
        raise ValueError("k must be at least 1")
    return max(count_saws(g, v, k, cap=cap) for v in g.vertices())


def connective_constant_k(g: Graph, k, cap=DEFAULT_WALK_CAP) -> float:
    """Radius-k connective constant: (sup over v of #SAWs of length k)^(1/k)."""
    ck = saw_count_sup(g, k, cap=cap)
    if ck == 0:
        raise ValueError(f"graph admits no self-avoiding walks of length {k}")
    return ck ** (1.0 / k)


def count_walks(g: Graph, u, w, length) -> int:
    """Number of (not necessarily self-avoiding) walks of given length from u to w.

    Equals the (u, w) entry of the length-th power of the adjacency matrix.
    """
    if length < 0:
        raise ValueError("walk length must be nonnegative")
    counts = [0] * g.n
    counts[u] = 1
    for _ in range(length):
        nxt = [0] * g.n
        for v, c in enumerate(counts):
            if c:
                for y in g.adjacency[v]:
                    nxt[y] += c
        counts = nxt
    return counts[w]
