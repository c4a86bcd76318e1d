"""Dense labeled matrices and the walk-level spectral machinery.

Covers the adjacency matrix and its spectral radius, the order-k
non-backtracking matrix on length-k self-avoiding walks, the walk-reversal
involution, and the singular values of non-backtracking powers. Everything is
dense and exact (integer matrices for walk counting), sized for graphs where
the walk sets fit comfortably in memory.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, ResourceLimitError
from .graph import Graph, all_saws, connective_constant_k

DEFAULT_LABEL_CAP = 20_000
DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000


class LabeledMatrix:
    """Dense matrix with row and column label lists (vertices or walks)."""

    __slots__ = ("row_labels", "col_labels", "data", "_row_index", "_col_index")

    def __init__(self, row_labels, col_labels, data):
        self.row_labels = tuple(row_labels)
        self.col_labels = tuple(col_labels)
        self.data = np.asarray(data)
        if len(set(self.row_labels)) != len(self.row_labels):
            raise ValueError("duplicate row labels")
        if len(set(self.col_labels)) != len(self.col_labels):
            raise ValueError("duplicate column labels")
        if self.data.shape != (len(self.row_labels), len(self.col_labels)):
            raise ValueError(
                f"data shape {self.data.shape} does not match labels "
                f"({len(self.row_labels)}, {len(self.col_labels)})"
            )
        self._row_index = None
        self._col_index = None

    @property
    def shape(self):
        return self.data.shape

    def row_index(self, label):
        if self._row_index is None:
            self._row_index = {lab: i for i, lab in enumerate(self.row_labels)}
        return self._row_index[label]

    def col_index(self, label):
        if self._col_index is None:
            self._col_index = {lab: i for i, lab in enumerate(self.col_labels)}
        return self._col_index[label]

    def get(self, row_label, col_label):
        return self.data[self.row_index(row_label), self.col_index(col_label)]

    def __matmul__(self, other):
        if not isinstance(other, LabeledMatrix):
            return NotImplemented
        if self.col_labels != other.row_labels:
            raise ValueError("inner labels do not match")
        return LabeledMatrix(self.row_labels, other.col_labels, self.data @ other.data)

    def abs(self):
        return LabeledMatrix(self.row_labels, self.col_labels, np.abs(self.data))

    def transpose(self):
        return LabeledMatrix(self.col_labels, self.row_labels, self.data.T)

    def __repr__(self):
        return f"LabeledMatrix(shape={self.shape})"


def adjacency_matrix(g: Graph) -> LabeledMatrix:
    """0/1 adjacency matrix labeled by vertex index."""
    a = np.zeros((g.n, g.n), dtype=np.int64)
    for u, v in g.edges:
        a[u, v] = 1
        a[v, u] = 1
    return LabeledMatrix(range(g.n), range(g.n), a)


class _PowerStall(Exception):
    """Power iteration hit its budget before certifying the tolerance."""


def _power_top(a, shift, tol, max_iter):
    """Largest eigenvalue of symmetric a, via power iteration on a + shift*I.

    The shift (any upper bound on the spectral radius) makes the top
    eigenvalue of the shifted matrix strictly dominant in magnitude, which
    plain power iteration needs; bipartite-like matrices have a +/- eigenvalue
    pair of equal magnitude and do not converge unshifted. Deterministic
    all-ones start, Rayleigh-quotient estimate, residual-certified stopping
    (for symmetric matrices some eigenvalue lies within the residual norm of
    the quotient). Raises _PowerStall when the budget runs out, which happens
    when the top spectral gap is tiny; callers then switch to a dense solve.
    Returns (eigenvalue of a, unit eigenvector).
    """
    n = a.shape[0]
    x = np.full(n, 1.0 / np.sqrt(n))
    scale = shift if shift > 0 else 1.0
    # Residual floor: rounding noise of the matvec itself.
    floor = 64 * np.finfo(float).eps * scale * np.sqrt(n)
    threshold = max(tol, floor)
    for _ in range(max_iter):
        y = a @ x + shift * x
        theta = float(x @ y)
        residual = float(np.linalg.norm(y - theta * x))
        if residual <= threshold:
            return theta - shift, x
        norm_y = float(np.linalg.norm(y))
        if norm_y == 0.0:
            # x is in the kernel of the shifted matrix; eigenvalue 0 found.
            return -shift, x
        x = y / norm_y
    raise _PowerStall


def spectral_radius_sym(m, tol=DEFAULT_TOL, max_iter=DEFAULT_MAX_ITER, want_vector=False):
    """Largest absolute eigenvalue of a symmetric matrix, within tol.

    Accepts a LabeledMatrix or a plain square array. Runs two shifted power
    iterations (for the top and bottom of the spectrum) from the all-ones
    vector. A near-degenerate top gap makes power iteration uneconomical (its
    step count exceeds the n^3/n^2 break-even against a dense solve), so on a
    stalled budget the computation switches to a full symmetric eigensolve.
    With ``want_vector`` also returns the eigenvector of the largest (signed)
    eigenvalue; for a nonnegative irreducible matrix this is the Perron
    vector and is returned with positive orientation.
    """
    a = m.data if isinstance(m, LabeledMatrix) else m
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    asym = float(np.max(np.abs(a - a.T))) if a.size else 0.0
    if asym > max(tol, 1e-12) * max(1.0, float(np.max(np.abs(a))) if a.size else 1.0):
        raise ValueError(f"matrix is not symmetric (max asymmetry {asym:.3g})")
    a = (a + a.T) / 2.0
    if a.shape[0] == 0:
        raise ValueError("empty matrix")
    shift = float(np.max(np.sum(np.abs(a), axis=1)))
    if shift == 0.0:
        rho = 0.0
        vec = np.zeros(a.shape[0])
        vec[0] = 1.0
        return (rho, vec) if want_vector else rho
    budget = min(max_iter, max(256, 4 * a.shape[0]))
    try:
        lam_max, vec_max = _power_top(a, shift, tol, budget)
        lam_min_neg, _ = _power_top(-a, shift, tol, budget)
        rho = max(lam_max, lam_min_neg)  # lam_min_neg == -(smallest eigenvalue)
    except _PowerStall:
        try:
            values, vectors = np.linalg.eigh(a)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(f"dense eigensolver failed: {exc}") from exc
        rho = float(np.max(np.abs(values)))
        vec_max = vectors[:, int(np.argmax(values))]
    if want_vector:
        if vec_max.sum() < 0:
            vec_max = -vec_max
        return rho, vec_max
    return rho


def knb_matrix(g: Graph, k, cap_labels=DEFAULT_LABEL_CAP) -> LabeledMatrix:
    """Order-k non-backtracking matrix on length-k self-avoiding walks.

    Indexed by all length-k self-avoiding walks in both orientations. The
    (P, Q) entry is 1 exactly when Q is P shifted forward by one vertex and
    the combined (k+2)-vertex walk repeats no vertex.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    walks = all_saws(g, k)
    if not walks:
        raise ValueError(f"graph admits no self-avoiding walks of length {k}")
    if len(walks) > cap_labels:
        raise ResourceLimitError(f"{len(walks)} walk labels exceed cap {cap_labels}")
    index = {w: i for i, w in enumerate(walks)}
    h = np.zeros((len(walks), len(walks)), dtype=np.int64)
    for i, p in enumerate(walks):
        body = tuple(p[1:])
        for y in g.adjacency[p[-1]]:
            if y in p:
                continue
            h[i, index[body + (y,)]] = 1
    return LabeledMatrix(walks, walks, h)


def involution_r(walks) -> LabeledMatrix:
    """Permutation matrix sending each walk label to its reversal."""
    walks = tuple(walks)
    index = {w: i for i, w in enumerate(walks)}
    r = np.zeros((len(walks), len(walks)), dtype=np.int64)
    for i, w in enumerate(walks):
        j = index.get(tuple(reversed(w)))
        if j is None:
            raise ValueError(f"label set not closed under reversal: {w}")
        r[i, j] = 1
    return LabeledMatrix(walks, walks, r)


def matrix_power_int(a: np.ndarray, exponent: int) -> np.ndarray:
    """Exact integer matrix power by repeated multiplication."""
    if exponent < 0:
        raise ValueError("exponent must be nonnegative")
    result = np.eye(a.shape[0], dtype=np.int64)
    base = a.astype(np.int64)
    for _ in range(exponent):
        result = result @ base
    return result


def sigma_kl(g: Graph, k, l, cap_labels=DEFAULT_LABEL_CAP, tol=DEFAULT_TOL) -> float:
    """Largest singular value of the l-th power of the k-non-backtracking matrix.

    Computed as the spectral radius of H^l R, which is symmetric because
    reversing a k-non-backtracking walk is again one (PT-invariance).
    """
    if l < 1:
        raise ValueError("l must be at least 1")
    h = knb_matrix(g, k, cap_labels=cap_labels)
    r = involution_r(h.row_labels)
    hl = matrix_power_int(h.data, l)
    return spectral_radius_sym(hl @ r.data, tol=tol)


def hk_power_root_norm(g: Graph, k, n_power, cap_labels=DEFAULT_LABEL_CAP) -> float:
    """The 1/N-th root of the 2-norm of the N-th non-backtracking power."""
    if n_power < 1:
        raise ValueError("N must be at least 1")
    return sigma_kl(g, k, n_power, cap_labels=cap_labels) ** (1.0 / n_power)


@dataclass
class SpectralReport:
    """Spectral quantities of one graph at a fixed walk order k.

    Serialized field names are part of the file contract: rho_adjacency,
    connective_k, hk_norms (array of [l, value] pairs), hk_root_norms.
    """

    rho_adjacency: float
    connective_k: float
    hk_norms: list
    hk_root_norms: list

    def to_json_dict(self):
        return {
            "rho_adjacency": self.rho_adjacency,
            "connective_k": self.connective_k,
            "hk_norms": [[int(l), float(v)] for l, v in self.hk_norms],
            "hk_root_norms": [[int(l), float(v)] for l, v in self.hk_root_norms],
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_json_dict(), **kwargs)


def spectral_report(g: Graph, k, n_max, cap_labels=DEFAULT_LABEL_CAP, tol=DEFAULT_TOL,
                    cap_walks=None):
    """Assemble rho(A), the radius-k connective constant and H-power norms.

    Powers are accumulated incrementally so the k-non-backtracking matrix is
    built once.
    """
    from .graph import DEFAULT_WALK_CAP

    cap_walks = DEFAULT_WALK_CAP if cap_walks is None else cap_walks
    rho = spectral_radius_sym(adjacency_matrix(g), tol=tol)
    dk = connective_constant_k(g, k, cap=cap_walks)
    h = knb_matrix(g, k, cap_labels=cap_labels)
    r = involution_r(h.row_labels).data
    norms = []
    roots = []
    power = np.eye(h.shape[0], dtype=np.int64)
    for l in range(1, n_max + 1):
        power = power @ h.data
        sigma = spectral_radius_sym(power @ r, tol=tol)
        norms.append((l, sigma))
        roots.append((l, sigma ** (1.0 / l)))
    return SpectralReport(
        rho_adjacency=rho, connective_k=dk, hk_norms=norms, hk_root_norms=roots
    )
