"""Reference implementations; the numba module mirrors these signatures."""

from __future__ import annotations

import numpy as np


def symdiff_ratio_terms(sides: np.ndarray, g: np.ndarray) -> np.ndarray:
    """#(gF_n ^ F_n)/#F_n for boxes of the given sides, as float64."""
    L = sides.astype(np.float64)[:, None]
    a = np.abs(g).astype(np.float64)[None, :]
    keep = np.prod(np.clip(1.0 - a / L, 0.0, None), axis=1)
    return 2.0 * (1.0 - keep)


def flux_brackets(sides: np.ndarray, g: np.ndarray) -> np.ndarray:
    """#(F_n \\ gF_n) - #(gF_n \\ F_n) per block, exact for rank 1 (int64)."""
    L = sides.astype(np.int64)
    s = int(g[0])
    # F = [1, L], gF = [1+s, L+s]
    overlap = np.clip(np.minimum(L, L + s) - np.maximum(1, 1 + s) + 1, 0, None)
    moved = (L + s) - (1 + s) + 1
    return (L - overlap) - (moved - overlap)


def cocycle_exponents(sample, block, coords, sides, gen, power, mask, g, n_samples, n_gens):
    """Per-sample exponent vectors of the cocycle and entries into masked towers.

    A point at cell h of block n contributes power_n * ([h+g in F_n] - [h in F_n])
    to generator gen_n.
    """
    L = sides[block][:, None]
    before = np.all((coords >= 1) & (coords <= L), axis=1)
    moved = coords + g[None, :]
    after = np.all((moved >= 1) & (moved <= L), axis=1)
    delta = after.astype(np.int64) - before.astype(np.int64)
    exps = np.zeros((n_samples, n_gens), dtype=np.int64)
    live = (delta != 0) & (gen[block] >= 0)
    np.add.at(exps, (sample[live], gen[block][live]), power[block][live] * delta[live])
    entered = np.zeros(n_samples, dtype=np.int64)
    hit = (delta > 0) & mask[block]
    np.add.at(entered, sample[hit], 1)
    return exps, entered


def log_rn_density(counts: np.ndarray, mu_minus_nu: np.ndarray, log_lam: np.ndarray) -> np.ndarray:
    """Row sums of (mu_n - nu_n) - k_n log(lambda_n): the log block-density product."""
    return (mu_minus_nu[None, :] - counts * log_lam[None, :]).sum(axis=1)
