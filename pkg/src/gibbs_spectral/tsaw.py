"""The tree of self-avoiding walks and influence matrices via path sums.

For a start vertex w, the tree contains every walk from w that is either
self-avoiding or a self-avoiding walk plus one final vertex that closes a
cycle of length at least three. Cycle-closing leaves get a spin determined by
the vertex ordering: with the closing walk v_0..v_r and v_r = v_j, the leaf
is pinned to -1 when v_{j+1} > v_{r-1} and to +1 otherwise. Copies of pinned
vertices inherit their pinned spin.

Marginal ratios R = P[+1]/P[-1] propagate bottom-up through the recursion
R_parent = lambda * prod (beta R_i + 1)/(R_i + gamma) in log space, edges get
weights h(log R) where h is the derivative of the log-ratio recursion, and
the influence of w on u is the sum over root-to-copy-of-u paths of the
product of edge weights. Infinite log-ratios (from pins or hard constraints)
are IEEE infinities with the limit rules spelled out in the transfer
functions rather than left to floating-point accident.

The tree structure depends only on the graph and the start vertex; pins and
parameters enter only in the value passes. Structures are cached so many
parameter/pinning combinations reuse one construction.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

from .errors import ResourceLimitError
from .gibbs import GibbsSpec, Pinning
from .graph import Graph
from .spectral import LabeledMatrix

DEFAULT_NODE_CAP = 1_000_000


def recursion_f(spec: GibbsSpec, xs) -> float:
    """Ratio recursion: lambda * prod (beta x_i + 1) / (x_i + gamma).

    Arguments are marginal ratios in [0, +inf]; an infinite child contributes
    its limit factor (beta when beta > 0, zero when beta = 0).
    """
    result = spec.lam
    for x in xs:
        if math.isnan(x) or x < 0:
            raise ValueError(f"ratio arguments must be in [0, +inf], got {x}")
        if math.isinf(x):
            factor = spec.beta
        else:
            factor = (spec.beta * x + 1.0) / (x + spec.gamma)
        result *= factor
    return result


def recursion_h(spec: GibbsSpec, x: float) -> float:
    """Derivative of the log-ratio recursion in one child's log-ratio.

    h(x) = -(1 - beta*gamma) e^x / ((beta e^x + 1)(e^x + gamma)), computed in
    the overflow-free form -(1 - beta*gamma)/(beta e^x + gamma e^-x + 1 +
    beta*gamma). Limits: h(-inf) = 0; h(+inf) = 0 for beta > 0 and -1 for
    beta = 0 (the hard-constraint direction keeps full slope).
    """
    bg = spec.beta * spec.gamma
    if math.isinf(x):
        if x < 0:
            return 0.0
        return -1.0 if spec.beta == 0 else 0.0
    t_plus = spec.beta * math.exp(x) if spec.beta > 0 else 0.0
    t_minus = spec.gamma * math.exp(-x)
    return -(1.0 - bg) / (t_plus + t_minus + 1.0 + bg)


def _h_vec(spec: GibbsSpec, x: np.ndarray) -> np.ndarray:
    """Vectorized recursion_h with identical limit handling."""
    bg = spec.beta * spec.gamma
    out = np.zeros_like(x)
    finite = np.isfinite(x)
    xf = x[finite]
    t_plus = spec.beta * np.exp(xf) if spec.beta > 0 else 0.0
    t_minus = spec.gamma * np.exp(-xf)
    out[finite] = -(1.0 - bg) / (t_plus + t_minus + 1.0 + bg)
    if spec.beta == 0:
        out[np.isposinf(x)] = -1.0
    return out


def _log_factor_vec(spec: GibbsSpec, x: np.ndarray) -> np.ndarray:
    """log((beta e^x + 1)/(e^x + gamma)) with explicit limits at +-inf.

    Values lie between log(beta) and -log(gamma) (in whichever order), with
    log(0) = -inf when beta = 0.
    """
    log_gamma = math.log(spec.gamma)
    out = np.empty_like(x)
    neg = np.isneginf(x)
    pos = np.isposinf(x)
    finite = ~(neg | pos)
    out[neg] = -log_gamma
    out[pos] = math.log(spec.beta) if spec.beta > 0 else -np.inf
    xf = x[finite]
    if spec.beta > 0:
        top = np.logaddexp(math.log(spec.beta) + xf, 0.0)
    else:
        top = 0.0
    out[finite] = top - np.logaddexp(xf, log_gamma)
    return out


class _TreeStructure:
    """Flat arrays describing one tree, independent of pins and parameters.

    Nodes are in breadth-first order: levels are contiguous, and the children
    of each node form one contiguous block inside the next level.
    """

    __slots__ = (
        "graph", "root", "parents", "origins", "depths", "closer_pins",
        "child_start", "child_end", "level_slices", "n_nodes",
    )

    def __init__(self, graph, root, parents, origins, depths, closer_pins):
        self.graph = graph
        self.root = root
        self.parents = parents
        self.origins = origins
        self.depths = depths
        self.closer_pins = closer_pins
        self.n_nodes = len(parents)
        max_depth = int(depths.max()) if self.n_nodes else 0
        self.level_slices = []
        start = 0
        for d in range(max_depth + 1):
            end = int(np.searchsorted(depths, d, side="right"))
            self.level_slices.append((start, end))
            start = end
        self.child_start = np.searchsorted(parents, np.arange(self.n_nodes), side="left")
        self.child_end = np.searchsorted(parents, np.arange(self.n_nodes), side="right")


def _build_structure(g: Graph, w, cap_nodes) -> _TreeStructure:
    """Depth-first construction, then a stable reorder to breadth-first."""
    parents = [-1]
    origins = [w]
    depths = [0]
    closer_pins = [0]
    adjacency = g.adjacency
    position = [-1] * g.n  # index of each vertex inside the current walk
    position[w] = 0
    walk = [w]

    def grow(node_id):
        v = walk[-1]
        r = len(walk)  # a new vertex would sit at walk index r
        for y in adjacency[v]:
            j = position[y]
            if j != -1 and j == r - 2:
                continue  # immediate backtrack is not a new walk
            if len(parents) >= cap_nodes:
                raise ResourceLimitError(f"tree exceeds {cap_nodes} nodes")
            if j == -1:
                parents.append(node_id)
                origins.append(y)
                depths.append(r)
                closer_pins.append(0)
                child = len(parents) - 1
                walk.append(y)
                position[y] = r
                grow(child)
                walk.pop()
                position[y] = -1
            elif j <= r - 3:
                # Closes a cycle of length >= 3: pinned leaf, spin by ordering.
                pin = -1 if walk[j + 1] > walk[r - 1] else 1
                parents.append(node_id)
                origins.append(y)
                depths.append(r)
                closer_pins.append(pin)

    grow(0)
    parents = np.asarray(parents, dtype=np.int64)
    origins = np.asarray(origins, dtype=np.int64)
    depths = np.asarray(depths, dtype=np.int64)
    closer_pins = np.asarray(closer_pins, dtype=np.int8)
    order = np.argsort(depths, kind="stable")
    rank = np.empty_like(order)
    rank[order] = np.arange(len(order))
    new_parents = np.where(parents[order] >= 0, rank[parents[order]], -1)
    return _TreeStructure(
        g, w, new_parents, origins[order], depths[order], closer_pins[order]
    )


@lru_cache(maxsize=2048)
def _cached_structure(g: Graph, w: int, cap_nodes: int) -> _TreeStructure:
    return _build_structure(g, w, cap_nodes)


class TsawTree:
    """A built tree with pins materialized for one pinning of the host graph."""

    def __init__(self, structure: _TreeStructure, pin: Pinning):
        self._s = structure
        self.pin = pin
        pins = structure.closer_pins.copy()
        for v, s in pin.items():
            # Host pins win on nodes that are both cycle closers and copies of
            # pinned vertices; the choice is unobservable because every path
            # into such a node already crosses a pinned copy.
            pins[structure.origins == v] = s
        self.node_pins = pins
        self.weights = None

    @property
    def graph(self) -> Graph:
        return self._s.graph

    @property
    def root_vertex(self) -> int:
        return int(self._s.root)

    @property
    def n_nodes(self) -> int:
        return self._s.n_nodes

    @property
    def origins(self) -> np.ndarray:
        return self._s.origins

    @property
    def parents(self) -> np.ndarray:
        return self._s.parents

    @property
    def depths(self) -> np.ndarray:
        return self._s.depths

    def walk(self, i):
        """The generating walk of node i as a vertex tuple, root first."""
        seq = []
        while i >= 0:
            seq.append(int(self._s.origins[i]))
            i = int(self._s.parents[i])
        return tuple(reversed(seq))

    def children(self, i):
        return range(int(self._s.child_start[i]), int(self._s.child_end[i]))

    def is_leaf(self, i) -> bool:
        return self._s.child_start[i] == self._s.child_end[i]

    def node_pin(self, i) -> int:
        return int(self.node_pins[i])


class RatioTable:
    """Per-node log marginal ratio of the node's subtree, plus its parameters."""

    def __init__(self, values: np.ndarray, spec: GibbsSpec):
        self.values = values
        self.spec = spec

    def value(self, i) -> float:
        return float(self.values[i])

    def root_log_ratio(self) -> float:
        return float(self.values[0])

    def root_marginal(self) -> float:
        """P[root = +1] recovered from the root ratio, R/(1+R)."""
        lr = self.root_log_ratio()
        if math.isinf(lr):
            return 1.0 if lr > 0 else 0.0
        r = math.exp(lr)
        return r / (1.0 + r)


def build_tsaw(g: Graph, w, pin: Pinning | None = None,
               cap_nodes: int = DEFAULT_NODE_CAP) -> TsawTree:
    """Tree of self-avoiding walks from w, with the given pins materialized."""
    pin = pin or Pinning.empty()
    if w in pin:
        raise ValueError(f"start vertex {w} is pinned")
    return TsawTree(_cached_structure(g, int(w), int(cap_nodes)), pin)


def compute_ratios(tree: TsawTree, spec: GibbsSpec) -> RatioTable:
    """Bottom-up log-ratio pass.

    Pinned nodes take +inf (pin +1) or -inf (pin -1) regardless of their
    subtree. Unpinned leaves take log lambda; interior nodes take log lambda
    plus the sum of the children's log factors. Levels are contiguous, so
    each level is one vectorized segment reduction.
    """
    s = tree._s
    vals = np.empty(s.n_nodes)
    log_lam = math.log(spec.lam)
    pins = tree.node_pins
    for d in range(len(s.level_slices) - 1, -1, -1):
        lo, hi = s.level_slices[d]
        if lo == hi:
            continue
        cs = s.child_start[lo:hi]
        ce = s.child_end[lo:hi]
        if d + 1 < len(s.level_slices):
            below_lo, below_hi = s.level_slices[d + 1]
        else:
            below_lo, below_hi = hi, hi
        if below_hi > below_lo:
            factors = _log_factor_vec(spec, vals[below_lo:below_hi])
            # Prefix sums break on -inf factors (hard constraints), so sum
            # the finite parts and propagate -inf through a separate count.
            neg = np.isneginf(factors)
            csum = np.concatenate(([0.0], np.cumsum(np.where(neg, 0.0, factors))))
            ncount = np.concatenate(([0], np.cumsum(neg)))
            seg = csum[ce - below_lo] - csum[cs - below_lo]
            seg[ncount[ce - below_lo] - ncount[cs - below_lo] > 0] = -np.inf
            vals[lo:hi] = log_lam + seg
        else:
            vals[lo:hi] = log_lam
        level_pins = pins[lo:hi]
        idx = np.arange(lo, hi)
        vals[idx[level_pins == 1]] = np.inf
        vals[idx[level_pins == -1]] = -np.inf
    return RatioTable(vals, spec)


def edge_weights(tree: TsawTree, table: RatioTable) -> TsawTree:
    """Attach the influence weight of the edge into each node.

    The weight is zero when the node or its parent is pinned, otherwise
    h(log ratio of the node's subtree). The root entry is unused and kept at
    zero. Returns the tree with its ``weights`` array set.
    """
    s = tree._s
    alpha = _h_vec(table.spec, table.values)
    pinned = tree.node_pins != 0
    parent_pinned = np.zeros(s.n_nodes, dtype=bool)
    if s.n_nodes > 1:
        parent_pinned[1:] = pinned[s.parents[1:]]
    alpha[pinned | parent_pinned] = 0.0
    alpha[0] = 0.0
    tree.weights = alpha
    return tree


def _influence_row(tree: TsawTree, spec: GibbsSpec):
    """One pass: returns (per-vertex path-sum row, root log ratio)."""
    table = compute_ratios(tree, spec)
    edge_weights(tree, table)
    s = tree._s
    prod = np.empty(s.n_nodes)
    prod[0] = 1.0
    for d in range(1, len(s.level_slices)):
        lo, hi = s.level_slices[d]
        if lo == hi:
            continue
        prod[lo:hi] = prod[s.parents[lo:hi]] * tree.weights[lo:hi]
    row = np.zeros(tree.graph.n)
    np.add.at(row, s.origins, prod)
    return row, table.root_log_ratio()


def influence_matrix_tsaw(spec: GibbsSpec, g: Graph, pin: Pinning | None = None,
                          cap_nodes: int = DEFAULT_NODE_CAP) -> LabeledMatrix:
    """Influence matrix assembled from per-start-vertex path sums.

    Row w sums, over the paths from the root of the tree at w to the copies
    of each vertex u, the product of edge weights; the root itself is the
    single copy of w reached by the empty path, so diagonals of nondegenerate
    vertices come out as exactly one. Rows and columns of vertices whose
    marginal is 0 or 1 under the pinning are zeroed, mirroring the exact
    definition (the root ratio of the tree detects degeneracy exactly).
    """
    pin = pin or Pinning.empty()
    free = [v for v in g.vertices() if v not in pin]
    rows = np.zeros((len(free), g.n))
    degenerate = np.zeros(len(free), dtype=bool)
    for i, w in enumerate(free):
        tree = build_tsaw(g, w, pin, cap_nodes=cap_nodes)
        row, root_log_ratio = _influence_row(tree, spec)
        rows[i] = row
        degenerate[i] = math.isinf(root_log_ratio)
    data = rows[:, free]
    data[degenerate, :] = 0.0
    data[:, degenerate] = 0.0
    return LabeledMatrix(free, free, data)


def to_dot(tree: TsawTree, table: RatioTable | None = None) -> str:
    """GraphViz rendering of a tree, with pins and weights when available."""
    lines = ["digraph tsaw {", "  node [shape=circle];"]
    for i in range(tree.n_nodes):
        origin = int(tree.origins[i])
        pin = tree.node_pin(i)
        label = f"{origin}"
        if pin:
            label += f" pin{pin:+d}"
        if table is not None:
            label += f"\\nlogR={table.value(i):.3g}"
        lines.append(f'  n{i} [label="{label}"];')
    for i in range(1, tree.n_nodes):
        attr = ""
        if tree.weights is not None:
            attr = f' [label="{tree.weights[i]:.3g}"]'
        lines.append(f"  n{int(tree.parents[i])} -> n{i}{attr};")
    lines.append("}")
    return "\n".join(lines)
