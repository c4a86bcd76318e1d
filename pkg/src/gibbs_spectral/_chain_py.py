"""Pure-Python Glauber kernel, the fallback when the compiled one is absent.

The compiled kernel in ``_chain_ext`` implements the same update and the same
SplitMix64 draw sequence, so the two backends produce bit-identical output
for equal inputs. Every step consumes exactly two uniform doubles: one to
pick a free vertex, one to resample its spin from the conditional

    P[+1 | neighbors] = lam * beta^p / (lam * beta^p + gamma^m)

with p and m the numbers of +1 and -1 neighbors. Powers are accumulated by
repeated multiplication in neighbor order so both backends round identically.
"""

from __future__ import annotations

import numpy as np

from .rng import GOLDEN, MASK64, mix64

_INV_2_53 = 1.0 / (1 << 53)


def _p_plus(neigh, offs, spins, v, lam, beta, gamma):
    t_plus = lam
    t_minus = 1.0
    for idx in range(offs[v], offs[v + 1]):
        if spins[neigh[idx]] == 1:
            t_plus *= beta
        else:
            t_minus *= gamma
    return t_plus / (t_plus + t_minus)


def run_steps(neigh, offs, spins, free, lam, beta, gamma, steps, seed, pos):
    """Advance the chain in place; returns the RNG position after the run."""
    seed &= MASK64
    n_free = len(free)
    for _ in range(steps):
        pos += 1
        r1 = (mix64((seed + pos * GOLDEN) & MASK64) >> 11) * _INV_2_53
        v = free[int(r1 * n_free)]
        p = _p_plus(neigh, offs, spins, v, lam, beta, gamma)
        pos += 1
        r2 = (mix64((seed + pos * GOLDEN) & MASK64) >> 11) * _INV_2_53
        spins[v] = 1 if r2 < p else -1
    return pos


def record_masks(neigh, offs, spins0, free, lam, beta, gamma, horizon, chains, seed):
    """Run independent chains and record the +1 bitmask after every step.

    Chain c uses the derived seed mix64(seed ^ mix64((c+1)*GOLDEN)). Returns a
    (chains, horizon+1) uint64 array; column t holds the mask of X_t.
    """
    n = len(spins0)
    out = np.zeros((chains, horizon + 1), dtype=np.uint64)
    for c in range(chains):
        child = mix64((seed ^ mix64(((c + 1) * GOLDEN) & MASK64)) & MASK64)
        spins = np.array(spins0, dtype=np.int8)
        mask = 0
        for v in range(n):
            if spins[v] == 1:
                mask |= 1 << v
        out[c, 0] = mask
        pos = 0
        for t in range(1, horizon + 1):
            pos += 1
            r1 = (mix64((child + pos * GOLDEN) & MASK64) >> 11) * _INV_2_53
            v = free[int(r1 * len(free))]
            p = _p_plus(neigh, offs, spins, v, lam, beta, gamma)
            pos += 1
            r2 = (mix64((child + pos * GOLDEN) & MASK64) >> 11) * _INV_2_53
            if r2 < p:
                spins[v] = 1
                mask |= 1 << v
            else:
                spins[v] = -1
                mask &= ~(1 << v)
            out[c, t] = mask
    return out


def count_plus(neigh, offs, spins, free, lam, beta, gamma, v, burn, samples, thin, seed):
    """Burn in, then count how often v is +1 across thinned samples.

    Mutates `spins` (the chain state) and returns the +1 count.
    """
    pos = run_steps(neigh, offs, spins, free, lam, beta, gamma, burn, seed, 0)
    hits = 0
    for _ in range(samples):
        pos = run_steps(neigh, offs, spins, free, lam, beta, gamma, thin, seed, pos)
        if spins[v] == 1:
            hits += 1
    return hits
