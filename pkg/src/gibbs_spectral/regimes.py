"""Threshold calculators and contraction / potential-function certificates.

Closed forms implemented here:

* lambda_c(k) = k^k / (k-1)^(k+1), the hard-core uniqueness threshold of the
  infinite k-ary tree, and its inverse Delta_c (by bisection).
* The Ising uniqueness interval U(z, delta) = [(z-1+delta)/(z+1-delta),
  (z+1-delta)/(z-1+delta)].
* The exact supremum of |h| (the log-ratio recursion slope) over all
  log-ratios: |1 - sqrt(beta*gamma)| / (1 + sqrt(beta*gamma)), which for the
  Ising model reduces to |1-beta|/(1+beta).
* The hard-core potential with derivative chi(y) = sqrt(e^y/(1+e^y)), its
  companion psi(y) = sqrt(1/(y(1+y)))/2, and the certified parameters
  (s, 1/Delta_c, lambda/(1+lambda)).

The sampled verifier draws random arities, log-ratios and direction vectors
and checks the amortized contraction inequality of the potential; it reports
worst margins rather than booleans so near-threshold behavior is auditable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConvergenceError
from .gibbs import GibbsSpec

DELTA_C_HI = 1e6
DELTA_C_ITERS = 200
HC_LOG_RATIO_RANGE = 40.0


def lambda_c(k: float) -> float:
    """Hard-core uniqueness threshold k^k / (k-1)^(k+1) for real k > 1."""
    if k <= 1:
        raise ValueError("lambda_c needs k > 1")
    return math.exp(k * math.log(k) - (k + 1) * math.log(k - 1))


def delta_c(lam: float) -> float:
    """Inverse of lambda_c: the unique z > 1 with lambda_c(z) = lam.

    Bisection over (1, 1e6]; lambda_c is strictly decreasing, so the bracket
    only needs its endpoints checked.
    """
    if lam <= 0:
        raise ValueError("lambda must be positive")
    lo, hi = 1.0 + 1e-12, DELTA_C_HI
    if lambda_c(hi) > lam:
        raise ConvergenceError(f"Delta_c({lam}) exceeds the search bound {DELTA_C_HI}")
    for _ in range(DELTA_C_ITERS):
        mid = 0.5 * (lo + hi)
        if lambda_c(mid) > lam:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def ising_uniqueness_interval(z: float, delta: float):
    """The interval of inverse temperatures with tree uniqueness margin delta."""
    if z <= 1:
        raise ValueError("need z > 1")
    if not (0 < delta < 1):
        raise ValueError("need delta in (0, 1)")
    lo = (z - 1 + delta) / (z + 1 - delta)
    return (lo, 1.0 / lo)


def h_sup(spec: GibbsSpec) -> float:
    """sup over all log-ratios of |h|, in closed form.

    |h(x)| = (1 - beta*gamma)/(beta e^x + gamma e^-x + 1 + beta*gamma) up to
    sign; for beta > 0 the denominator is minimized at e^x = sqrt(gamma/beta)
    giving (1 + sqrt(beta*gamma))^2, for beta = 0 the infimum 1 is reached at
    x -> +inf. Both cases collapse to |1 - r|/(1 + r) with r = sqrt(beta*gamma).
    """
    r = math.sqrt(spec.beta * spec.gamma)
    return abs(1.0 - r) / (1.0 + r)


def h_sup_on_ratio_range(spec: GibbsSpec, max_degree: int) -> float:
    """sup of |h| restricted to log-ratios attainable in trees of the given degree.

    The attainable log-ratio set is the union over arities d < max_degree of
    the interval with endpoints log(lambda beta^d) and log(lambda / gamma^d)
    (plus the pinned limits, where h vanishes or the pin zeroes the weight).
    For hard constraints this is much smaller than the global supremum: the
    hard-core ratio never exceeds lambda, so the restricted bound is
    lambda/(1+lambda).
    """
    if max_degree < 2:
        raise ValueError("need max_degree >= 2")
    log_lam = math.log(spec.lam)
    if spec.beta == 0:
        # |h| = e^x/(e^x + gamma) is increasing; the largest attainable
        # log-ratio over arities d < max_degree is log(lambda / gamma^d).
        hi = max(log_lam - d * math.log(spec.gamma) for d in range(max_degree))
        return abs(recursion_h_value(spec, hi))
    best = 0.0
    for d in range(max_degree):
        lo = log_lam + d * math.log(spec.beta)
        hi = log_lam - d * math.log(spec.gamma)
        lo, hi = min(lo, hi), max(lo, hi)
        crit = 0.5 * math.log(spec.gamma / spec.beta)
        candidates = [lo, hi] + ([crit] if lo <= crit <= hi else [])
        best = max(best, max(abs(recursion_h_value(spec, x)) for x in candidates))
    return best


def recursion_h_value(spec: GibbsSpec, x: float) -> float:
    """The (signed) recursion slope h at one log-ratio; local copy to avoid
    an import cycle with the tree module."""
    bg = spec.beta * spec.gamma
    if math.isinf(x):
        if x < 0:
            return 0.0
        return -1.0 if spec.beta == 0 else 0.0
    t_plus = spec.beta * math.exp(x) if spec.beta > 0 else 0.0
    t_minus = spec.gamma * math.exp(-x)
    return -(1.0 - bg) / (t_plus + t_minus + 1.0 + bg)


@dataclass
class RegimeVerdict:
    """Outcome of a regime check, with margins rather than a bare boolean."""

    in_regime: bool
    threshold: object
    margin: float
    bound_rhs: float | None = None
    detail: dict = field(default_factory=dict)

    def to_json_dict(self):
        threshold = self.threshold
        if isinstance(threshold, tuple):
            threshold = list(threshold)
        return {
            "in_regime": bool(self.in_regime),
            "threshold": threshold,
            "margin": float(self.margin),
            "bound_rhs": None if self.bound_rhs is None else float(self.bound_rhs),
            "detail": self.detail,
        }

    def to_json(self, **kwargs):
        return json.dumps(self.to_json_dict(), **kwargs)


def check_delta_contraction(spec: GibbsSpec, max_degree: int, delta: float) -> RegimeVerdict:
    """Does the log-ratio recursion contract with rate delta at every arity?

    The gradient of the arity-d recursion has components h(x_i), so the check
    reduces to the single-variable supremum; the closed form is exact and a
    grid refinement is exposed through ``h_sup_grid`` for cross-checking.
    """
    if max_degree < 2:
        raise ValueError("need max_degree >= 2")
    sup = h_sup(spec)
    margin = delta - sup
    return RegimeVerdict(
        in_regime=(sup <= delta),
        threshold=delta,
        margin=margin,
        bound_rhs=None,
        detail={"h_sup": sup, "kind": spec.kind},
    )


def h_sup_grid(spec: GibbsSpec, lo=-40.0, hi=40.0, points=10_000) -> float:
    """Grid cross-check of h_sup (plus both infinite endpoints)."""
    xs = np.linspace(lo, hi, points)
    bg = spec.beta * spec.gamma
    t_plus = spec.beta * np.exp(xs) if spec.beta > 0 else 0.0
    t_minus = spec.gamma * np.exp(-xs)
    values = np.abs(-(1.0 - bg) / (t_plus + t_minus + 1.0 + bg))
    ends = [abs(recursion_h_value(spec, -math.inf)), abs(recursion_h_value(spec, math.inf))]
    return float(max(values.max(), *ends))


@dataclass(frozen=True)
class PotentialParams:
    """Certified (s, delta, c) parameters of an amortized potential."""

    s: float
    delta: float
    c: float

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be at least 1")
        if self.delta <= 0 or self.c <= 0:
            raise ValueError("delta and c must be positive")


def hc_potential_chi(y: float) -> float:
    """Derivative of the hard-core potential: sqrt(e^y / (1 + e^y))."""
    if y > 0:
        return math.sqrt(1.0 / (1.0 + math.exp(-y)))
    e = math.exp(y)
    return math.sqrt(e / (1.0 + e))


def hc_potential_psi(y: float) -> float:
    """Companion weight on the ratio scale: sqrt(1 / (y (1 + y))) / 2."""
    if y <= 0:
        raise ValueError("psi is defined for y > 0")
    return 0.5 * math.sqrt(1.0 / (y * (1.0 + y)))


def hc_potential_params(lam: float) -> PotentialParams:
    """Certified potential parameters for the hard-core model at fugacity lam.

    1/s = 1 - ((Dc - 1)/2) log(1 + 1/(Dc - 1)) with Dc = delta_c(lam); the
    contraction rate is 1/Dc and the boundedness constant lam/(1+lam).
    """
    dc = delta_c(lam)
    inv_s = 1.0 - ((dc - 1.0) / 2.0) * math.log1p(1.0 / (dc - 1.0))
    return PotentialParams(s=1.0 / inv_s, delta=1.0 / dc, c=lam / (1.0 + lam))


@dataclass
class PotentialCheck:
    """Worst margins seen by the sampled contraction verifier."""

    max_violation: float
    boundedness_max: float
    boundedness_limit: float
    samples: int
    d_max: int
    seed: int

    @property
    def ok(self) -> bool:
        return self.max_violation <= 0 and self.boundedness_max <= self.boundedness_limit


def verify_potential_contraction(spec: GibbsSpec, params: PotentialParams,
                                 d_max: int = 6, samples: int = 10_000,
                                 seed: int = 0) -> PotentialCheck:
    """Sampled check of the amortized contraction inequality (hard-core only).

    Draws (d, y, m) with d uniform in 1..d_max, y uniform over the attainable
    log-ratio box (lower end truncated at log(lambda) - 40 since the true
    range is open below) and m with unit-exponential coordinates, then checks

        chi(H_d(y)) * sum_j |h(y_j)|/chi(y_j) * m_j <= delta^(1/s) * ||m||_s.

    Reports the largest left-minus-right difference over all samples and the
    largest sampled boundedness product chi(y2)|h(y1)|/chi(y1).
    """
    if spec.kind != "hard_core":
        raise ValueError("the potential certificate applies to the hard-core model")
    if samples < 1 or d_max < 1:
        raise ValueError("need samples >= 1 and d_max >= 1")
    rng = np.random.default_rng(seed)
    log_lam = math.log(spec.lam)
    y_lo, y_hi = log_lam - HC_LOG_RATIO_RANGE, log_lam
    rate = params.delta ** (1.0 / params.s)

    ds = rng.integers(1, d_max + 1, size=samples)
    max_violation = -math.inf
    sampled_y_max = -math.inf
    for d in range(1, d_max + 1):
        count = int((ds == d).sum())
        if count == 0:
            continue
        y = rng.uniform(y_lo, y_hi, size=(count, d))
        m = rng.exponential(1.0, size=(count, d))
        # Hard-core identities: |h(y)| = sigmoid(y), chi(y) = sqrt(sigmoid(y)),
        # so |h|/chi = chi and H_d(y) = log(lam) - sum log(1 + e^y).
        chi_y = np.sqrt(1.0 / (1.0 + np.exp(-y)))
        h_d = log_lam - np.logaddexp(0.0, y).sum(axis=1)
        chi_hd = np.sqrt(1.0 / (1.0 + np.exp(-h_d)))
        lhs = chi_hd * (chi_y * m).sum(axis=1)
        rhs = rate * np.power(np.power(m, params.s).sum(axis=1), 1.0 / params.s)
        max_violation = max(max_violation, float((lhs - rhs).max()))
        sampled_y_max = max(sampled_y_max, float(y.max()))

    # chi(y2)|h(y1)|/chi(y1) = sqrt(sigmoid(y1) sigmoid(y2)) is maximized at
    # the largest sampled log-ratios.
    sig = 1.0 / (1.0 + math.exp(-sampled_y_max))
    return PotentialCheck(
        max_violation=max_violation,
        boundedness_max=sig,
        boundedness_limit=params.c,
        samples=samples,
        d_max=d_max,
        seed=seed,
    )


def si_bound_rhs(kind: str, *, epsilon: float | None = None, s: float | None = None,
                 zeta: float | None = None, max_degree: float | None = None,
                 rho: float | None = None) -> float:
    """Closed-form spectral-independence bounds.

    kind="contraction": 1/epsilon (contraction rate (1-epsilon)/rho).
    kind="potential": 1 + zeta (1-(1-epsilon)^s)^-1 (max_degree/rho)^(1-1/s).
    """
    if kind == "contraction":
        if epsilon is None or not (0 < epsilon < 1):
            raise ValueError("need epsilon in (0, 1)")
        return 1.0 / epsilon
    if kind == "potential":
        if epsilon is None or not (0 < epsilon < 1):
            raise ValueError("need epsilon in (0, 1)")
        if s is None or s < 1:
            raise ValueError("need s >= 1")
        if zeta is None or zeta <= 0:
            raise ValueError("need zeta > 0")
        if max_degree is None or max_degree <= 1 or rho is None or rho <= 1:
            raise ValueError("need max_degree > 1 and rho > 1")
        return 1.0 + zeta / (1.0 - (1.0 - epsilon) ** s) * (max_degree / rho) ** (1.0 - 1.0 / s)
    raise ValueError(f"unknown bound kind {kind!r}")
