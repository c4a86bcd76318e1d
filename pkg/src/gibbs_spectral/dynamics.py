"""Glauber dynamics: simulation, exact chain analysis, mixing and Z estimation.

The single-site heat-bath chain picks a uniformly random free vertex and
resamples its spin from the conditional distribution given its neighbors.
Chains run on a compiled kernel when available and on a pure-Python kernel
otherwise; both consume the same counter-based random stream, so results are
bit-identical across backends and reproducible from (seed, configuration).

``exact_transition_matrix`` builds the full transition matrix over the
support on tiny instances, the ground truth for detailed-balance and
stationarity checks. ``estimate_tv_curve`` measures empirical total-variation
distance to the exact distribution. ``estimate_partition_function`` is the
telescoping-marginal estimator: with sigma* the all-minus configuration,

    Z = weight(sigma*) / prod_i P[sigma(v_i) = -1 | v_1..v_{i-1} all -1]

and each conditional marginal is estimated by Glauber sampling; a median over
independent groups guards against unlucky runs.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError, ResourceLimitError
from .gibbs import Enumerator, GibbsSpec, Pinning, weight
from .graph import Graph
from .rng import Rng, derive_seed
from .spectral import LabeledMatrix

try:
    from . import _chain_ext as _kernel
    BACKEND = "compiled"
except ImportError:  # pragma: no cover - depends on the build
    from . import _chain_py as _kernel
    BACKEND = "python"

DEFAULT_STATE_CAP = 1 << 16
FULL_MODE_SUPPORT_LIMIT = 4096


def backend_name() -> str:
    return BACKEND


def _n_workers() -> int:
    raw = os.environ.get("GIBBS_SPECTRAL_THREADS", "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _flat_adjacency(g: Graph):
    offs = np.zeros(g.n + 1, dtype=np.int32)
    for v in g.vertices():
        offs[v + 1] = offs[v] + g.degree(v)
    neigh = np.empty(offs[-1], dtype=np.int32)
    for v in g.vertices():
        neigh[offs[v]:offs[v + 1]] = g.adjacency[v]
    return neigh, offs


@dataclass
class ChainState:
    """Chain snapshot: configuration, step count and random-stream position."""

    sigma: np.ndarray
    step: int
    seed: int
    rng_pos: int = 0

    @classmethod
    def start(cls, g: Graph, seed: int, sigma=None):
        if sigma is None:
            sigma = np.full(g.n, -1, dtype=np.int8)
        else:
            sigma = np.asarray(sigma, dtype=np.int8)
        return cls(sigma=sigma, step=0, seed=seed)


def conditional_plus_probability(spec: GibbsSpec, g: Graph, sigma, v) -> float:
    """P[sigma(v) = +1 | the other spins], the heat-bath update weight."""
    t_plus = spec.lam
    t_minus = 1.0
    for y in g.adjacency[v]:
        if sigma[y] == 1:
            t_plus *= spec.beta
        else:
            t_minus *= spec.gamma
    return t_plus / (t_plus + t_minus)


def glauber_step(spec: GibbsSpec, g: Graph, state: ChainState, rng: Rng) -> ChainState:
    """One heat-bath update; consumes exactly two uniform draws."""
    sigma = state.sigma.copy()
    v = int(rng.next_double() * g.n)
    p = conditional_plus_probability(spec, g, sigma, v)
    sigma[v] = 1 if rng.next_double() < p else -1
    return ChainState(sigma=sigma, step=state.step + 1, seed=state.seed, rng_pos=rng.pos)


def run_chain(spec: GibbsSpec, g: Graph, steps: int, seed: int,
              sigma=None, pin: Pinning | None = None) -> np.ndarray:
    """Run one chain on the kernel and return the final configuration.

    Pinned vertices are held fixed and never selected for update.
    """
    pin = pin or Pinning.empty()
    neigh, offs = _flat_adjacency(g)
    spins = np.full(g.n, -1, dtype=np.int8) if sigma is None else np.asarray(sigma, np.int8).copy()
    for v, s in pin.items():
        spins[v] = s
    free = np.array([v for v in g.vertices() if v not in pin], dtype=np.int32)
    if len(free) == 0:
        return spins
    _kernel.run_steps(neigh, offs, spins, free, spec.lam, spec.beta, spec.gamma,
                      steps, seed, 0)
    return spins


def _support(spec: GibbsSpec, g: Graph, cap_states: int):
    """Masks and probabilities of the support, by enumeration."""
    e = Enumerator(spec, g, None)
    weights = e.weights
    live = np.flatnonzero(weights > 0)
    if len(live) > cap_states:
        raise ResourceLimitError(f"support size {len(live)} exceeds cap {cap_states}")
    bits = e.bits[live].astype(np.uint64)
    masks = np.zeros(len(live), dtype=np.uint64)
    for j in range(g.n):
        masks |= bits[:, j] << np.uint64(j)
    probs = weights[live] / weights.sum()
    return masks, probs


def exact_transition_matrix(spec: GibbsSpec, g: Graph,
                            cap_states: int = DEFAULT_STATE_CAP) -> LabeledMatrix:
    """Row-stochastic heat-bath transition matrix over the support."""
    masks, probs = _support(spec, g, cap_states)
    index = {int(m): i for i, m in enumerate(masks)}
    n = g.n
    size = len(masks)
    data = np.zeros((size, size))
    sigma = np.empty(n, dtype=np.int8)
    for i, mask in enumerate(masks):
        mask = int(mask)
        for v in range(n):
            sigma[v] = 1 if (mask >> v) & 1 else -1
        for v in range(n):
            p = conditional_plus_probability(spec, g, sigma, v)
            if p > 0.0:
                data[i, index[mask | (1 << v)]] += p / n
            if p < 1.0:
                data[i, index[mask & ~(1 << v)]] += (1.0 - p) / n
    labels = [tuple(1 if (int(m) >> v) & 1 else -1 for v in range(n)) for m in masks]
    return LabeledMatrix(labels, labels, data)


def stationary_distribution(p: LabeledMatrix) -> np.ndarray:
    """Left eigenvector of the transition matrix for eigenvalue one."""
    values, vectors = np.linalg.eig(p.data.T)
    idx = int(np.argmin(np.abs(values - 1.0)))
    v = np.real(vectors[:, idx])
    v = np.abs(v)
    return v / v.sum()


@dataclass
class MixingEstimate:
    """Empirical total-variation trajectory of the chain."""

    tv_curve: list
    threshold_step: int | None
    chains: int
    seed: int
    mode: str


def estimate_tv_curve(spec: GibbsSpec, g: Graph, start=None, chains: int = 0,
                      horizon: int = 0, seed: int = 0, mode: str = "auto",
                      cap_states: int = DEFAULT_STATE_CAP) -> MixingEstimate:
    """Distance to stationarity of the empirical law of X_t, per step.

    Full-state mode compares the empirical distribution over configurations
    with the exact one and requires at least ten chains per support state;
    marginal mode tracks the worst per-vertex marginal deviation, a lower
    bound on the true total-variation distance.
    """
    if g.n > 62:
        raise ResourceLimitError("bitmask recording supports at most 62 vertices")
    if horizon <= 0:
        horizon = int(math.ceil(4 * g.n * math.log(max(g.n, 2))))
    masks, probs = _support(spec, g, cap_states)
    if chains <= 0:
        chains = max(64, 10 * len(masks)) if len(masks) <= FULL_MODE_SUPPORT_LIMIT else 512
    if mode == "auto":
        mode = "full" if (len(masks) <= FULL_MODE_SUPPORT_LIMIT
                          and chains >= 10 * len(masks)) else "marginal"
    if mode == "full" and chains < 10 * len(masks):
        raise ValueError("full-state mode needs at least 10 chains per support state")

    spins0 = np.full(g.n, -1, dtype=np.int8) if start is None else np.asarray(start, np.int8)
    start_mask = 0
    for v in range(g.n):
        if spins0[v] == 1:
            start_mask |= 1 << v
    support_index = {int(m): i for i, m in enumerate(masks)}
    if start_mask not in support_index:
        raise ValueError("start configuration is outside the support")

    neigh, offs = _flat_adjacency(g)
    free = np.arange(g.n, dtype=np.int32)
    recorded = _kernel.record_masks(neigh, offs, spins0, free, spec.lam, spec.beta,
                                    spec.gamma, horizon, chains, seed)

    curve = []
    if mode == "full":
        prob_of = {int(m): float(p) for m, p in zip(masks, probs)}
        for t in range(horizon + 1):
            column = recorded[:, t]
            values, counts = np.unique(column, return_counts=True)
            seen = 0.0
            tv = 0.0
            for m, c in zip(values, counts):
                mu = prob_of[int(m)]
                tv += abs(c / chains - mu)
                seen += mu
            tv = 0.5 * (tv + (1.0 - seen))
            curve.append((t, float(tv)))
    else:
        exact_marg = np.zeros(g.n)
        for m, p in zip(masks, probs):
            for v in range(g.n):
                if (int(m) >> v) & 1:
                    exact_marg[v] += p
        for t in range(horizon + 1):
            column = recorded[:, t]
            emp = np.array([np.mean((column >> np.uint64(v)) & np.uint64(1))
                            for v in range(g.n)])
            curve.append((t, float(np.max(np.abs(emp - exact_marg)))))

    threshold = next((t for t, tv in curve if tv <= 0.25), None)
    return MixingEstimate(tv_curve=curve, threshold_step=threshold,
                          chains=chains, seed=seed, mode=mode)


@dataclass
class ZEstimate:
    """Partition-function estimate with its reproducibility envelope."""

    z_hat: float
    epsilon: float
    confidence: float
    seed: int
    groups: int
    group_estimates: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    def to_json_dict(self):
        return {
            "z_hat": float(self.z_hat),
            "epsilon": float(self.epsilon),
            "confidence": float(self.confidence),
            "seed": int(self.seed),
            "groups": int(self.groups),
            "group_estimates": [float(z) for z in self.group_estimates],
            "warnings": list(self.warnings),
        }


MARGINAL_FLOOR = 1e-3
_PILOT_SAMPLES = 512
_VAR_BUDGET = 16.0


def _estimate_minus_probability(spec, g, neigh, offs, pinned_upto, v, samples,
                                thin, burn, stream_seed) -> float:
    """P[sigma(v) = -1 | v_0..v_{i-1} = -1] by one Glauber run."""
    spins = np.full(g.n, -1, dtype=np.int8)
    free = np.arange(pinned_upto, g.n, dtype=np.int32)
    hits = _kernel.count_plus(neigh, offs, spins, free, spec.lam, spec.beta,
                              spec.gamma, v, burn, samples, thin, stream_seed)
    return (samples - hits) / samples


def estimate_partition_function(spec: GibbsSpec, g: Graph, epsilon: float = 0.05,
                                confidence: float = 0.9, seed: int = 0) -> ZEstimate:
    """Telescoping-marginal Z estimator with a median over independent groups.

    Sample sizes follow a pilot pass: marginal i gets about
    16 * n * (1-p_i)/p_i / epsilon^2 samples, splitting the variance budget so
    each group's product has relative standard deviation near epsilon/4.
    A marginal estimate below 1e-3 triggers a warning and one re-run with ten
    times the samples.
    """
    if not (0 < epsilon < 1) or not (0 < confidence < 1):
        raise ValueError("need epsilon and confidence in (0, 1)")
    n = g.n
    neigh, offs = _flat_adjacency(g)
    groups = 2 * max(1, math.ceil(math.log10(1.0 / (1.0 - confidence)))) + 1
    burn = int(math.ceil(8 * n * math.log(max(n, 2))))
    thin = 2 * n
    warnings = []

    base_weight = weight(spec, g, [-1] * n)

    # Pilot pass: cheap marginal estimates to apportion the sample budget.
    pilot = []
    for i in range(n):
        p = _estimate_minus_probability(spec, g, neigh, offs, i, i, _PILOT_SAMPLES,
                                        thin, burn, derive_seed(seed, i))
        pilot.append(max(p, MARGINAL_FLOOR))
    budget = [
        max(256, int(math.ceil(_VAR_BUDGET * n * (1.0 - p) / p / (epsilon * epsilon))))
        for p in pilot
    ]

    tasks = [(grp, i) for grp in range(groups) for i in range(n)]

    def run_task(task):
        grp, i = task
        stream = derive_seed(seed, (1 + grp) * n + i)
        p = _estimate_minus_probability(spec, g, neigh, offs, i, i, budget[i],
                                        thin, burn, stream)
        if p < MARGINAL_FLOOR:
            retry = derive_seed(seed, (1 + groups + grp) * n + i)
            p = _estimate_minus_probability(spec, g, neigh, offs, i, i,
                                            10 * budget[i], thin, burn, retry)
            return grp, i, p, True
        return grp, i, p, False

    workers = _n_workers()
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_task, tasks))
    else:
        results = [run_task(t) for t in tasks]

    estimates = {}
    for grp, i, p, retried in results:
        if retried:
            warnings.append(f"marginal {i} in group {grp} was unstable; re-ran with 10x samples")
        if p <= 0.0:
            raise ConvergenceError(
                f"conditional marginal at vertex {i} estimated as zero; "
                "the chain looks frozen for these parameters"
            )
        estimates[(grp, i)] = p

    group_estimates = []
    for grp in range(groups):
        z = base_weight
        for i in range(n):
            z /= estimates[(grp, i)]
        group_estimates.append(z)
    z_hat = float(np.median(group_estimates))
    return ZEstimate(z_hat=z_hat, epsilon=epsilon, confidence=confidence, seed=seed,
                     groups=groups, group_estimates=group_estimates, warnings=warnings)
