# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled Glauber kernel: same update rule and SplitMix64 stream as
``_chain_py``, bit-for-bit. See that module for the contract."""

import numpy as np

from libc.stdint cimport int8_t, int32_t, int64_t, uint64_t

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15UL
cdef uint64_t MIX_A = 0xBF58476D1CE4E5B9UL
cdef uint64_t MIX_B = 0x94D049BB133111EBUL
cdef double INV_2_53 = 1.0 / 9007199254740992.0


cdef inline uint64_t mix64(uint64_t x) nogil:
    x ^= x >> 30
    x = x * MIX_A
    x ^= x >> 27
    x = x * MIX_B
    x ^= x >> 31
    return x


cdef inline double next_double(uint64_t seed, uint64_t pos) nogil:
    return <double>(mix64(seed + pos * GOLDEN) >> 11) * INV_2_53


cdef inline double p_plus(const int32_t[:] neigh, const int32_t[:] offs,
                          const int8_t[:] spins, int v,
                          double lam, double beta, double gamma) nogil:
    cdef double t_plus = lam
    cdef double t_minus = 1.0
    cdef int idx
    for idx in range(offs[v], offs[v + 1]):
        if spins[neigh[idx]] == 1:
            t_plus *= beta
        else:
            t_minus *= gamma
    return t_plus / (t_plus + t_minus)


cdef uint64_t _run(const int32_t[:] neigh, const int32_t[:] offs, int8_t[:] spins,
                   const int32_t[:] free, double lam, double beta, double gamma,
                   int64_t steps, uint64_t seed, uint64_t pos) nogil:
    cdef int64_t t
    cdef int v
    cdef double r1, r2, p
    cdef int n_free = free.shape[0]
    for t in range(steps):
        pos += 1
        r1 = next_double(seed, pos)
        v = free[<int>(r1 * n_free)]
        p = p_plus(neigh, offs, spins, v, lam, beta, gamma)
        pos += 1
        r2 = next_double(seed, pos)
        spins[v] = 1 if r2 < p else -1
    return pos


def run_steps(neigh, offs, spins, free, double lam, double beta, double gamma,
              steps, seed, pos):
    """Advance the chain in place; returns the RNG position after the run."""
    cdef const int32_t[:] neigh_v = neigh
    cdef const int32_t[:] offs_v = offs
    cdef int8_t[:] spins_v = spins
    cdef const int32_t[:] free_v = free
    cdef int64_t steps_c = steps
    cdef uint64_t seed_c = seed
    cdef uint64_t pos_c = pos
    with nogil:
        pos_c = _run(neigh_v, offs_v, spins_v, free_v, lam, beta, gamma,
                     steps_c, seed_c, pos_c)
    return pos_c


def record_masks(neigh, offs, spins0, free, double lam, double beta, double gamma,
                 horizon, chains, seed):
    """Independent chains with derived seeds; +1 bitmask after every step."""
    cdef const int32_t[:] neigh_v = neigh
    cdef const int32_t[:] offs_v = offs
    cdef const int32_t[:] free_v = free
    cdef int n = len(spins0)
    cdef int horizon_c = horizon
    cdef int chains_c = chains
    cdef uint64_t seed_c = seed
    out = np.zeros((chains, horizon + 1), dtype=np.uint64)
    cdef uint64_t[:, :] out_v = out
    spins_arr = np.empty(n, dtype=np.int8)
    cdef int8_t[:] spins_v = spins_arr
    base = np.asarray(spins0, dtype=np.int8)
    cdef int8_t[:] base_v = base
    cdef uint64_t child, pos, mask
    cdef int c, v, t
    cdef double r1, r2, p
    cdef int n_free = free_v.shape[0]
    with nogil:
        for c in range(chains_c):
            child = mix64(seed_c ^ mix64((<uint64_t>(c + 1)) * GOLDEN))
            mask = 0
            for v in range(n):
                spins_v[v] = base_v[v]
                if spins_v[v] == 1:
                    mask |= (<uint64_t>1) << v
            out_v[c, 0] = mask
            pos = 0
            for t in range(1, horizon_c + 1):
                pos += 1
                r1 = next_double(child, pos)
                v = free_v[<int>(r1 * n_free)]
                p = p_plus(neigh_v, offs_v, spins_v, v, lam, beta, gamma)
                pos += 1
                r2 = next_double(child, pos)
                if r2 < p:
                    spins_v[v] = 1
                    mask |= (<uint64_t>1) << v
                else:
                    spins_v[v] = -1
                    mask &= ~((<uint64_t>1) << v)
                out_v[c, t] = mask
    return out


def count_plus(neigh, offs, spins, free, double lam, double beta, double gamma,
               v, burn, samples, thin, seed):
    """Burn in, then count how often v is +1 across thinned samples."""
    cdef const int32_t[:] neigh_v = neigh
    cdef const int32_t[:] offs_v = offs
    cdef int8_t[:] spins_v = spins
    cdef const int32_t[:] free_v = free
    cdef int v_c = v
    cdef int64_t burn_c = burn
    cdef int64_t samples_c = samples
    cdef int64_t thin_c = thin
    cdef uint64_t seed_c = seed
    cdef uint64_t pos
    cdef int64_t hits = 0, s
    with nogil:
        pos = _run(neigh_v, offs_v, spins_v, free_v, lam, beta, gamma,
                   burn_c, seed_c, 0)
        for s in range(samples_c):
            pos = _run(neigh_v, offs_v, spins_v, free_v, lam, beta, gamma,
                       thin_c, seed_c, pos)
            if spins_v[v_c] == 1:
                hits += 1
    return hits
