from __future__ import annotations

import numpy as np
from numba import njit


@njit(cache=True)
def symdiff_ratio_terms(sides, g):
    out = np.empty(sides.shape[0])
    for i in range(sides.shape[0]):
        L = float(sides[i])
        keep = 1.0
        for j in range(g.shape[0]):
            r = 1.0 - abs(g[j]) / L
            keep *= r if r > 0.0 else 0.0
        out[i] = 2.0 * (1.0 - keep)
    return out


@njit(cache=True)
def flux_brackets(sides, g):
    out = np.empty(sides.shape[0], dtype=np.int64)
    s = g[0]
    for i in range(sides.shape[0]):
        L = sides[i]
        # F = [1, L], gF = [1+s, L+s]
        lo = 1 if 1 > 1 + s else 1 + s
        hi = L if L < L + s else L + s
        overlap = hi - lo + 1 if hi >= lo else 0
        moved = (L + s) - (1 + s) + 1
        out[i] = (L - overlap) - (moved - overlap)
    return out


@njit(cache=True)
def _inside(coords, i, shift, g, L):
    for j in range(coords.shape[1]):
        x = coords[i, j] + (g[j] if shift else 0)
        if x < 1 or x > L:
            return False
    return True


@njit(cache=True)
def cocycle_exponents(sample, block, coords, sides, gen, power, mask, g, n_samples, n_gens):
    exps = np.zeros((n_samples, n_gens), dtype=np.int64)
    entered = np.zeros(n_samples, dtype=np.int64)
    for i in range(sample.shape[0]):
        b = block[i]
        L = sides[b]
        d = int(_inside(coords, i, True, g, L)) - int(_inside(coords, i, False, g, L))
        if d == 0:
            continue
        if gen[b] >= 0:
            exps[sample[i], gen[b]] += power[b] * d
        if d > 0 and mask[b]:
            entered[sample[i]] += 1
    return exps, entered


@njit(cache=True)
def log_rn_density(counts, mu_minus_nu, log_lam):
    out = np.empty(counts.shape[0])
    for s in range(counts.shape[0]):
        acc = 0.0
        for n in range(counts.shape[1]):
            acc += mu_minus_nu[n] - counts[s, n] * log_lam[n]
        out[s] = acc
    return out
