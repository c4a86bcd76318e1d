"""Walk extensions of graphs and Gibbs distributions, and walk-level influence.

The extension along a self-avoiding walk P detaches, for every walk vertex
except the last, all neighbors other than the walk predecessor and successor:
each removed edge (q, z) is replaced by a fresh degree-one split vertex
attached to z. Split vertices are named canonically by their (origin,
attached) pair so that surgeries commute up to label identity.

Extending a pinned Gibbs distribution keeps the parameters, keeps the
original pins, and pins every split vertex by the vertex ordering: the split
created when q shed neighbor z, with successor x after q on the walk, takes
spin +1 when x > z and -1 when x < z.

The extended influence matrix is indexed by length-k self-avoiding walks
avoiding the pinned set; the (P, Q) entry is the influence of start(P) on
start(Q) under the {P, Q}-extension, and zero when the walk starts are at
graph distance below 2k (incompatible pairs). Everything here is evaluated by
exact enumeration; this module is a verification harness, not a scalable
algorithm, and its caps are sized accordingly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gibbs import Enumerator, GibbsSpec, Pinning, influence_matrix_exact
from .graph import Graph, SawWalk, enumerate_saws
from .spectral import LabeledMatrix


@dataclass(frozen=True)
class SplitVertex:
    """Provenance of one split vertex inside an extended graph."""

    index: int      # vertex id in the extended graph
    origin: int     # walk vertex that shed the edge
    attached: int   # the neighbor the split vertex remains attached to
    successor: int  # the vertex after `origin` on the generating walk


@dataclass(frozen=True)
class ExtendedGraph:
    """A graph produced by walk surgery, with enough provenance to replay it."""

    base: Graph
    graph: Graph
    splits: tuple
    removed_edges: tuple
    walks: tuple

    def split_label(self, index):
        for s in self.splits:
            if s.index == index:
                return (s.origin, s.attached)
        raise KeyError(index)

    def canonical_edges(self) -> frozenset:
        """Edge set with split vertices named by (origin, attached) pairs.

        Lets two extension orders be compared for structural equality without
        caring about integer ids of the split vertices.
        """
        names = {}
        for v in range(self.base.n):
            names[v] = ("v", v)
        for s in self.splits:
            names[s.index] = ("s", s.origin, s.attached)
        return frozenset(frozenset((names[u], names[v])) for u, v in self.graph.edges)

    def replay(self) -> "ExtendedGraph":
        """Re-apply the recorded walks to the base graph."""
        ext = extend_graph(self.base, self.walks[0])
        for walk in self.walks[1:]:
            ext = _extend(ext, walk)
        return ext


def _check_walk(g: Graph, walk) -> SawWalk:
    walk = walk if isinstance(walk, SawWalk) else SawWalk(walk)
    if walk.length < 1:
        raise ValueError("extension walks need length at least 1")
    if not walk.is_walk_in(g):
        raise ValueError(f"{walk!r} is not a walk of the graph")
    return walk


def _extend(ext: ExtendedGraph, walk: SawWalk) -> ExtendedGraph:
    """Apply the surgery along one more walk to an already-extended graph."""
    g = ext.graph
    for a, b in zip(walk, walk[1:]):
        if b not in g.adjacency_sets[a]:
            raise ValueError(f"{tuple(walk)!r} is not a walk of the extended graph")
    adjacency = [set(ns) for ns in g.adjacency]
    split_ids = {s.index for s in ext.splits}
    new_splits = list(ext.splits)
    removed = list(ext.removed_edges)
    next_id = g.n

    for i in range(walk.length):
        q = walk[i]
        successor = walk[i + 1]
        keep = {successor}
        if i > 0:
            keep.add(walk[i - 1])
        shed = sorted(z for z in adjacency[q] if z not in keep and z not in split_ids)
        for z in shed:
            adjacency[q].discard(z)
            adjacency[z].discard(q)
            removed.append((q, z))
            adjacency.append({z})
            adjacency[z].add(next_id)
            new_splits.append(SplitVertex(index=next_id, origin=q, attached=z,
                                          successor=successor))
            split_ids.add(next_id)
            next_id += 1

    edges = []
    for u in range(next_id):
        for v in adjacency[u]:
            if u < v:
                edges.append((u, v))
    new_graph = Graph.from_edges(next_id, edges, require_connected=False)
    return ExtendedGraph(
        base=ext.base,
        graph=new_graph,
        splits=tuple(new_splits),
        removed_edges=tuple(removed),
        walks=ext.walks + (tuple(walk),),
    )


def extend_graph(g: Graph, walk) -> ExtendedGraph:
    """The extension of g along one self-avoiding walk."""
    walk = _check_walk(g, walk)
    empty = ExtendedGraph(base=g, graph=g, splits=(), removed_edges=(), walks=())
    return _extend(empty, walk)


def compatible(g: Graph, p, q) -> bool:
    """Walk pair compatibility: starts at graph distance at least twice the length."""
    p, q = SawWalk(p), SawWalk(q)
    if p.length != q.length:
        raise ValueError("walks must have equal length")
    return g.distance(p.start, q.start) >= 2 * p.length


def extend_graph_pq(g: Graph, p, q) -> ExtendedGraph:
    """Extension along two compatible walks; verifies order independence."""
    p = _check_walk(g, p)
    q = _check_walk(g, q)
    if not compatible(g, p, q):
        raise ValueError("walks are not compatible (starts closer than 2k)")
    pq = _extend(extend_graph(g, p), q)
    qp = _extend(extend_graph(g, q), p)
    if pq.canonical_edges() != qp.canonical_edges():
        raise AssertionError("extension order changed the resulting graph")
    return pq


@dataclass(frozen=True)
class ExtendedGibbs:
    """A Gibbs distribution carried onto an extended graph, pins included."""

    spec: GibbsSpec
    ext: ExtendedGraph
    pin: Pinning


def _split_pins(ext: ExtendedGraph) -> dict:
    pins = {}
    for s in ext.splits:
        pins[s.index] = 1 if s.successor > s.attached else -1
    return pins


def extended_gibbs(spec: GibbsSpec, g: Graph, pin: Pinning | None, walk) -> ExtendedGibbs:
    """Extension of a pinned Gibbs distribution along one walk."""
    pin = pin or Pinning.empty()
    walk = _check_walk(g, walk)
    if any(v in pin for v in walk):
        raise ValueError("extension walk intersects the pinned set")
    ext = extend_graph(g, walk)
    pins = dict(pin.items())
    pins.update(_split_pins(ext))
    return ExtendedGibbs(spec=spec, ext=ext, pin=Pinning(pins))


def extended_gibbs_pq(spec: GibbsSpec, g: Graph, pin: Pinning | None, p, q) -> ExtendedGibbs:
    """Extension of a pinned Gibbs distribution along two compatible walks."""
    pin = pin or Pinning.empty()
    for walk in (p, q):
        if any(v in pin for v in walk):
            raise ValueError("extension walk intersects the pinned set")
    ext = extend_graph_pq(g, p, q)
    pins = dict(pin.items())
    pins.update(_split_pins(ext))
    return ExtendedGibbs(spec=spec, ext=ext, pin=Pinning(pins))


def walks_avoiding(g: Graph, pin: Pinning | None, k):
    """All length-k self-avoiding walks that avoid the pinned set, sorted."""
    pin = pin or Pinning.empty()
    walks = []
    for v in g.vertices():
        if v in pin:
            continue
        for w in enumerate_saws(g, v, k):
            if not any(u in pin for u in w):
                walks.append(w)
    return sorted(walks)


def _influence_entry(spec: GibbsSpec, graph: Graph, pins: Pinning, w, u) -> float:
    """Influence of w on u by exact enumeration, zero on degenerate vertices."""
    e = Enumerator(spec, graph, pins)
    if e.z == 0.0:
        # The pinning itself is outside the support; the conditional
        # distribution does not exist, so there is nothing to propagate.
        return 0.0
    plus_mass = e.plus_mass()
    pos = {v: i for i, v in enumerate(e.free)}
    total = e.z
    for v in (w, u):
        if plus_mass[pos[v]] == 0.0 or plus_mass[pos[v]] == total:
            return 0.0
    p_plus, p_minus, _, _ = e.conditioned_plus_rows(w)
    return float(p_plus[pos[u]] - p_minus[pos[u]])


def extended_influence_matrix(spec: GibbsSpec, g: Graph, pin: Pinning | None,
                              k) -> LabeledMatrix:
    """Walk-indexed influence matrix via per-entry exact enumeration."""
    pin = pin or Pinning.empty()
    walks = walks_avoiding(g, pin, k)
    n_walks = len(walks)
    data = np.zeros((n_walks, n_walks))
    dist_cache = {}
    for i, p in enumerate(walks):
        if p.start not in dist_cache:
            dist_cache[p.start] = g.bfs_distances(p.start)
        for j, q in enumerate(walks):
            d = dist_cache[p.start].get(q.start, g.n + 1)
            if d < 2 * k:
                continue
            zeta = extended_gibbs_pq(spec, g, pin, p, q)
            data[i, j] = _influence_entry(spec, zeta.ext.graph, zeta.pin,
                                          p.start, q.start)
    return LabeledMatrix(walks, walks, data)


def structural_matrices(spec: GibbsSpec, g: Graph, pin: Pinning | None, k):
    """The start-vertex, end-vertex and short-range influence matrices.

    Returns (D_k, C_k, I_short): D_k maps vertices to the walks starting at
    them, C_k maps walks to their final vertices, and I_short is the exact
    influence matrix restricted to vertex pairs at distance below 2k.
    """
    pin = pin or Pinning.empty()
    walks = walks_avoiding(g, pin, k)
    free = [v for v in g.vertices() if v not in pin]
    d_data = np.zeros((len(free), len(walks)), dtype=np.int64)
    c_data = np.zeros((len(walks), len(free)), dtype=np.int64)
    free_pos = {v: i for i, v in enumerate(free)}
    for j, walk in enumerate(walks):
        d_data[free_pos[walk.start], j] = 1
        c_data[j, free_pos[walk.end]] = 1
    influence = influence_matrix_exact(spec, g, pin)
    short = influence.data.copy()
    for a, u in enumerate(free):
        dist = g.bfs_distances(u)
        for b, v in enumerate(free):
            if dist.get(v, g.n + 1) >= 2 * k:
                short[a, b] = 0.0
    return (
        LabeledMatrix(free, walks, d_data),
        LabeledMatrix(walks, free, c_data),
        LabeledMatrix(free, free, short),
    )


def _saw_counts_to(g: Graph, w, target) -> dict:
    """Number of self-avoiding walks from w ending at target, by length."""
    counts = {}
    in_walk = bytearray(g.n)
    in_walk[w] = 1
    adjacency = g.adjacency

    def walk_from(v, depth):
        if v == target:
            counts[depth] = counts.get(depth, 0) + 1
        for y in adjacency[v]:
            if not in_walk[y]:
                in_walk[y] = 1
                walk_from(y, depth + 1)
                in_walk[y] = 0

    walk_from(w, 0)
    return counts


def domination_matrix_j(spec: GibbsSpec, g: Graph, pin: Pinning | None,
                        k, delta: float) -> LabeledMatrix:
    """Geometric walk-count envelope that dominates the extended influence.

    The (P, Q) entry sums delta^l times the number of self-avoiding walks of
    length l >= 2k from start(P) to start(Q) inside the {P, Q}-extended graph
    (those walks are exactly the copies of start(Q) in the walk tree of the
    extension that are not cycle closers). Incompatible pairs are zero. The
    sum is finite because walk lengths are bounded by the extended graph.
    """
    pin = pin or Pinning.empty()
    walks = walks_avoiding(g, pin, k)
    n_walks = len(walks)
    data = np.zeros((n_walks, n_walks))
    for i, p in enumerate(walks):
        dist = g.bfs_distances(p.start)
        for j, q in enumerate(walks):
            if dist.get(q.start, g.n + 1) < 2 * k:
                continue
            ext = extend_graph_pq(g, p, q)
            counts = _saw_counts_to(ext.graph, p.start, q.start)
            data[i, j] = sum(delta ** l * c for l, c in counts.items() if l >= 2 * k)
    return LabeledMatrix(walks, walks, data)
