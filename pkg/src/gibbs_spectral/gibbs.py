"""Two-spin Gibbs distributions and the exact enumeration engine.

A configuration assigns +1/-1 to every vertex and has weight

    lambda^(# of +1) * beta^(# of edges with both ends +1) * gamma^(# both -1)

with 0 <= beta <= gamma, gamma > 0, lambda > 0. beta = 0, gamma = 1 is the
hard-core model (support = independent sets, lambda the fugacity); beta =
gamma is the Ising model. 0^0 counts as 1, so hard-core is a plain parameter
setting rather than a special code path.

The enumeration engine tabulates all configurations of the free vertices with
vectorized edge counting; the table easily covers the desk-scale instances
this package targets and is the oracle every reduction is tested against.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DegenerateConditioningError, ResourceLimitError
from .graph import Graph
from .spectral import LabeledMatrix

DEFAULT_FREE_CAP = 22


@dataclass(frozen=True)
class GibbsSpec:
    """Parameters (beta, gamma, lambda) of a two-spin Gibbs distribution."""

    beta: float
    gamma: float
    lam: float

    def __post_init__(self):
        if not (0 <= self.beta <= self.gamma):
            raise ValueError(f"need 0 <= beta <= gamma, got beta={self.beta} gamma={self.gamma}")
        if self.gamma <= 0:
            raise ValueError("gamma must be positive")
        if self.lam <= 0:
            raise ValueError("lambda must be positive")

    @classmethod
    def hardcore(cls, lam):
        return cls(beta=0.0, gamma=1.0, lam=lam)

    @classmethod
    def ising(cls, beta, lam=1.0):
        return cls(beta=beta, gamma=beta, lam=lam)

    @property
    def kind(self) -> str:
        if self.beta == 0 and self.gamma == 1:
            return "hard_core"
        if self.beta == self.gamma:
            return "ising"
        return "general"


class Pinning:
    """A partial spin assignment: vertex -> +1/-1 on a subset of vertices."""

    __slots__ = ("_assignment",)

    def __init__(self, assignment=None):
        assignment = dict(assignment or {})
        for v, s in assignment.items():
            if s not in (1, -1):
                raise ValueError(f"pin at {v} must be +1 or -1, got {s}")
        self._assignment = assignment

    @classmethod
    def empty(cls):
        return cls({})

    @classmethod
    def from_file(cls, path):
        """Parse lines of the form "v +1" or "v -1"; '#' starts a comment."""
        assignment = {}
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, line in enumerate(fh, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                parts = stripped.split()
                if len(parts) != 2:
                    raise ValueError(f"{path}:{lineno}: expected 'v spin'")
                v = int(parts[0])
                spin = int(parts[1])
                if spin not in (1, -1):
                    raise ValueError(f"{path}:{lineno}: spin must be +1 or -1")
                assignment[v] = spin
        return cls(assignment)

    def vertices(self):
        return self._assignment.keys()

    def spin(self, v):
        return self._assignment[v]

    def items(self):
        return self._assignment.items()

    def __len__(self):
        return len(self._assignment)

    def __contains__(self, v):
        return v in self._assignment

    def __eq__(self, other):
        return isinstance(other, Pinning) and self._assignment == other._assignment

    def __repr__(self):
        return f"Pinning({self._assignment!r})"


@dataclass
class ExactSummary:
    """Partition function, per-free-vertex +1 marginals, optional b bound."""

    z: float
    marginals: dict
    b_bound: float | None = None


def weight(spec: GibbsSpec, g: Graph, sigma) -> float:
    """Weight of a full configuration (sequence of +1/-1 per vertex)."""
    if len(sigma) != g.n:
        raise ValueError("configuration must assign a spin to every vertex")
    plus = sum(1 for s in sigma if s == 1)
    pp = sum(1 for u, v in g.edges if sigma[u] == 1 and sigma[v] == 1)
    mm = sum(1 for u, v in g.edges if sigma[u] == -1 and sigma[v] == -1)
    # 0^0 == 1 keeps hard-core inside the same formula.
    return (spec.lam ** plus) * (spec.beta ** pp) * (spec.gamma ** mm)


@lru_cache(maxsize=8)
def _bits_table(nf: int) -> np.ndarray:
    """(2^nf, nf) table of 0/1 spins; column j toggles with period 2^j."""
    if nf == 0:
        return np.zeros((1, 0), dtype=np.int8)
    codes = np.arange(1 << nf, dtype=np.int64)
    return ((codes[:, None] >> np.arange(nf)) & 1).astype(np.int8)


class Enumerator:
    """Vectorized enumeration of all configurations of the free vertices.

    Weights include the contribution of pinned vertices, so sums are absolute
    (exact_partition under a pinning is the total weight of the agreeing
    configurations, not a conditional quantity).
    """

    def __init__(self, spec: GibbsSpec, g: Graph, pin: Pinning | None = None,
                 cap_free: int = DEFAULT_FREE_CAP):
        pin = pin or Pinning.empty()
        for v in pin.vertices():
            if not (0 <= v < g.n):
                raise ValueError(f"pinned vertex {v} not in graph")
        self.spec = spec
        self.g = g
        self.pin = pin
        self.free = [v for v in g.vertices() if v not in pin]
        if len(self.free) > cap_free:
            raise ResourceLimitError(
                f"{len(self.free)} free vertices exceed the enumeration cap {cap_free}"
            )
        self._free_pos = {v: i for i, v in enumerate(self.free)}
        self.bits = _bits_table(len(self.free))
        self._weights = None

    def _exponents(self):
        bits = self.bits
        k = bits.shape[0]
        plus = bits.sum(axis=1, dtype=np.int64)
        pp = np.zeros(k, dtype=np.int64)
        mm = np.zeros(k, dtype=np.int64)
        pinned_plus = 0
        for v, s in self.pin.items():
            if s == 1:
                pinned_plus += 1
        plus = plus + pinned_plus
        pos = self._free_pos
        pin = self.pin
        for u, v in self.g.edges:
            u_pinned, v_pinned = u in pin, v in pin
            if u_pinned and v_pinned:
                su, sv = pin.spin(u), pin.spin(v)
                if su == 1 and sv == 1:
                    pp += 1
                elif su == -1 and sv == -1:
                    mm += 1
            elif u_pinned or v_pinned:
                pinned, free = (u, v) if u_pinned else (v, u)
                col = bits[:, pos[free]].astype(np.int64)
                if pin.spin(pinned) == 1:
                    pp += col
                else:
                    mm += 1 - col
            else:
                cu = bits[:, pos[u]].astype(np.int64)
                cv = bits[:, pos[v]].astype(np.int64)
                pp += cu * cv
                mm += (1 - cu) * (1 - cv)
        return plus, pp, mm

    @property
    def weights(self) -> np.ndarray:
        if self._weights is None:
            plus, pp, mm = self._exponents()
            spec = self.spec
            w = np.power(spec.lam, plus)
            # numpy gives 0.0**0 == 1.0, matching the 0^0 = 1 convention.
            w = w * np.power(spec.beta, pp)
            w = w * np.power(spec.gamma, mm)
            self._weights = w
        return self._weights

    @property
    def z(self) -> float:
        return float(self.weights.sum())

    def plus_mass(self) -> np.ndarray:
        """For each free vertex, total weight of configurations where it is +1."""
        return self.weights @ self.bits

    def marginals(self) -> np.ndarray:
        z = self.z
        if z == 0.0:
            raise DegenerateConditioningError("pinning has empty support")
        return self.plus_mass() / z

    def conditioned_plus_rows(self, v):
        """Marginal vectors conditioned on v being +1 and on v being -1.

        Returns (p_plus, p_minus, z_plus, z_minus) where p_plus[u] is the
        probability that u is +1 given v = +1 (NaN rows when the conditioning
        event has zero mass).
        """
        col = self.bits[:, self._free_pos[v]].astype(bool)
        w = self.weights
        w_plus = np.where(col, w, 0.0)
        w_minus = np.where(col, 0.0, w)
        z_plus = float(w_plus.sum())
        z_minus = float(w_minus.sum())
        p_plus = (w_plus @ self.bits) / z_plus if z_plus > 0 else np.full(len(self.free), np.nan)
        p_minus = (w_minus @ self.bits) / z_minus if z_minus > 0 else np.full(len(self.free), np.nan)
        return p_plus, p_minus, z_plus, z_minus


def exact_partition(spec: GibbsSpec, g: Graph, pin: Pinning | None = None,
                    cap_free: int = DEFAULT_FREE_CAP) -> float:
    """Total weight of all configurations consistent with the pinning.

    Returns 0.0 when the pinning has empty support.
    """
    return Enumerator(spec, g, pin, cap_free).z


def exact_marginal(spec: GibbsSpec, g: Graph, pin: Pinning | None, v,
                   cap_free: int = DEFAULT_FREE_CAP) -> float:
    """P[sigma(v) = +1 | pinning]."""
    pin = pin or Pinning.empty()
    if v in pin:
        raise ValueError(f"vertex {v} is pinned")
    e = Enumerator(spec, g, pin, cap_free)
    return float(e.marginals()[e._free_pos[v]])


def exact_summary(spec: GibbsSpec, g: Graph, pin: Pinning | None = None,
                  with_b_bound: bool = False, cap_free: int = DEFAULT_FREE_CAP) -> ExactSummary:
    e = Enumerator(spec, g, pin, cap_free)
    z = e.z
    marg = {}
    if z > 0:
        values = e.marginals()
        marg = {v: float(values[i]) for i, v in enumerate(e.free)}
    b = b_marginal_bound(spec, g) if with_b_bound else None
    return ExactSummary(z=z, marginals=marg, b_bound=b)


def influence_matrix_exact(spec: GibbsSpec, g: Graph, pin: Pinning | None = None,
                           cap_free: int = DEFAULT_FREE_CAP) -> LabeledMatrix:
    """Pairwise influence matrix by direct enumeration.

    Entry (w, u) is the change of u's +1 marginal as w flips from +1 to -1,
    conditioned on the pinning. Rows and columns of vertices whose marginal
    under the pinning alone is 0 or 1 are set to zero: conditioning on such a
    vertex is ill-posed, so those influences are defined away.
    """
    e = Enumerator(spec, g, pin, cap_free)
    free = e.free
    nf = len(free)
    if e.z == 0.0:
        raise DegenerateConditioningError("pinning has empty support")
    plus_mass = e.plus_mass()
    total = e.z
    # Exact degeneracy detection: a zero restricted sum is combinatorially
    # exact for hard constraints, soft constraints never produce one.
    degenerate = (plus_mass == 0.0) | (plus_mass == total)

    data = np.zeros((nf, nf))
    for i, w in enumerate(free):
        if degenerate[i]:
            continue
        p_plus, p_minus, _, _ = e.conditioned_plus_rows(w)
        data[i, :] = p_plus - p_minus
    if degenerate.any():
        data[:, degenerate] = 0.0
    return LabeledMatrix(free, free, data)


def b_marginal_bound(spec: GibbsSpec, g: Graph, max_pinned=None,
                     pin_samples: int = 1000, seed: int = 0,
                     exhaustive_limit: int = 10) -> float:
    """Largest b with every supported conditional marginal at least b.

    Scans pinnings of vertex subsets (sizes up to max_pinned; all sizes by
    default) and all free vertices; only spins inside the support count.
    Exhaustive for graphs up to `exhaustive_limit` vertices, beyond that
    `pin_samples` random pinnings are drawn (each vertex independently
    unpinned/+1/-1), so the result is an upper estimate of b there.
    """
    base = Enumerator(spec, g, None, cap_free=max(g.n, DEFAULT_FREE_CAP))
    bits = base.bits.astype(bool)
    weights = base.weights
    budget = g.n if max_pinned is None else max_pinned

    def scan(pin_items) -> float:
        mask = np.ones(len(weights), dtype=bool)
        pinned = set()
        for v, s in pin_items:
            pinned.add(v)
            col = bits[:, v]
            mask &= col if s == 1 else ~col
        w = np.where(mask, weights, 0.0)
        z = w.sum()
        if z == 0.0:
            return 1.0
        local = 1.0
        p = (w @ bits) / z
        for v in g.vertices():
            if v in pinned:
                continue
            if p[v] > 0:
                local = min(local, p[v])
            if p[v] < 1:
                local = min(local, 1.0 - p[v])
        return local

    best = 1.0
    if g.n <= exhaustive_limit:
        for states in itertools.product((0, 1, -1), repeat=g.n):
            items = [(v, s) for v, s in enumerate(states) if s != 0]
            if len(items) > budget or len(items) == g.n:
                continue
            best = min(best, scan(items))
    else:
        rng = np.random.default_rng(seed)
        best = min(best, scan([]))
        for _ in range(pin_samples):
            states = rng.integers(0, 3, size=g.n)
            items = [(v, (1 if s == 1 else -1)) for v, s in enumerate(states) if s != 0]
            if len(items) > budget or len(items) == g.n:
                continue
            best = min(best, scan(items))
    return float(best)
