"""Poisson point configurations at cell resolution.

Block n contributes
* tower points: Poisson(mu_n(A_n)) many, uniform over the #F_n tower cells;
* shell points: Poisson(nu(A_n') * #shell) many, uniform over cells outside F_n
  within sup-distance R of it (the only outside cells a shift by |g| <= R can
  move into the tower).
Counts in distinct cells of a Poisson process are independent, so this is the
exact law of the per-cell counts.  Blocks beyond N are summarised by the
number of their points that sit within distance R of a tower boundary.
"""

from __future__ import annotations

import csv
import math
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache

import numpy as np

from ..systems import CellIndex, SystemSpec
from .rng import CHUNK, TRUNCATION_KEY, check_seed, chunks, stream

TRUNCATION_EXACT_BLOCKS = 10**5


class ShellRadiusError(ValueError):
    """A group element moves further than the modeled shell radius."""


@lru_cache(maxsize=16)
def _arrays(spec_json: str, stop: int) -> dict:
    return SystemSpec.from_json(spec_json).arrays(stop)


def block_arrays(spec: SystemSpec, N: int) -> dict:
    if N < 1:
        raise ValueError("N must be >= 1")
    if spec.finite and N > spec.n_blocks:
        raise ValueError(f"spec has only {spec.n_blocks} blocks")
    return _arrays(spec.to_json(), N)


def _shell_ratio(L: np.ndarray, R: int, d: int) -> tuple[np.ndarray, np.ndarray]:
    """(#inner boundary cells, #outer shell cells) divided by #F_n, as floats."""
    x = 2.0 * R / L.astype(np.float64)
    inner = 1.0 - np.clip(1.0 - x, 0.0, None) ** d
    outer = (1.0 + x) ** d - 1.0
    return inner, outer


def truncation_budget(spec: SystemSpec, N: int, R: int) -> dict:
    """Poisson mean M of omitted-block points within distance R of a tower boundary.

    A sample is flagged invalid when any such point exists; the flag rate is
    1 - e^{-M} <= M.
    """
    if R == 0:
        return {"mean": 0.0, "exact_part": 0.0, "tail_bound": 0.0, "flag_probability": 0.0}
    d = spec.rank
    if spec.finite:
        stop = spec.n_blocks
    else:
        stop = max(N, TRUNCATION_EXACT_BLOCKS)
    if stop <= N:
        exact, tail = 0.0, 0.0
    else:
        a = spec.arrays(stop, start=N + 1)
        inner, outer = _shell_ratio(a["side"], R, d)
        exact = math.fsum((a["nu"] * (a["lam"] * inner + outer)).tolist())
        tail = 0.0
        if not spec.finite:
            # nu_n and mu_n have nonincreasing envelopes; L_n >= n(n+1)
            B = float(np.max(a["nu"] * (1.0 + a["lam"])))
            full = spec.arrays(N + 1)
            B = max(B, float(np.max(full["nu"] * (1.0 + full["lam"]))))
            tail = B * 4.0 * d * R * (1.0 + 2.0 * R / (stop + 1)) ** (d - 1) / (stop + 1)
    M = exact + tail
    return {"mean": M, "exact_part": exact, "tail_bound": tail, "flag_probability": -math.expm1(-M)}


@dataclass(frozen=True, eq=False)
class PointConfiguration:
    """A batch of configurations; points are listed with their sample index.

    ``block`` is 1-based.  Several points may share a cell; ``cell_counts``
    aggregates them.
    """

    spec_json: str
    N: int
    radius: int
    seed: int
    n_samples: int
    sample: np.ndarray
    block: np.ndarray
    coords: np.ndarray
    tower_counts: np.ndarray
    truncation_hits: np.ndarray
    zero_blocks: tuple[int, ...] = ()
    offset: tuple[int, ...] | None = None
    budget: dict = field(default_factory=dict)

    @property
    def rank(self) -> int:
        return self.coords.shape[1]

    @property
    def truncation_valid(self) -> np.ndarray:
        return self.truncation_hits == 0

    def cell_counts(self, s: int) -> dict[CellIndex, int]:
        sides = block_arrays(SystemSpec.from_json(self.spec_json), self.N)["side"]
        sel = np.flatnonzero(self.sample == s)
        out: Counter = Counter()
        for i in sel:
            b = int(self.block[i])
            lvl = tuple(int(c) for c in self.coords[i])
            tower = all(1 <= c <= sides[b - 1] for c in lvl)
            out[CellIndex(b, lvl, tower)] += 1
        return dict(out)

    def write_csv(self, path) -> None:
        """Rows (sample_id, block, level, count), aggregated per cell, sorted."""
        keys = Counter(zip(self.sample.tolist(), self.block.tolist(), map(tuple, self.coords.tolist())))
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["sample_id", "block", "level", "count"])
            for (s, b, lvl), c in sorted(keys.items()):
                w.writerow([s, b, " ".join(map(str, lvl)), c])


def _slab_points(rng, n, L, R, d):
    """n uniform cells outside [1,L]^d within sup-distance R of it."""
    Lf, W = float(L), float(L + 2 * R)
    # slab i: coords < i inside [1,L], coord i outside, coords > i anywhere in [1-R, L+R]
    w = np.array([Lf ** i * 2 * R * W ** (d - 1 - i) for i in range(d)])
    slab = rng.choice(d, size=n, p=w / w.sum()) if d > 1 else np.zeros(n, dtype=np.int64)
    out = np.empty((n, d), dtype=np.int64)
    u = rng.integers(0, 2 * R, size=n)
    outside = np.where(u < R, 1 - R + u, L + 1 + (u - R))
    inside = rng.integers(1, L + 1, size=(n, d))
    anywhere = rng.integers(1 - R, L + R + 1, size=(n, d))
    cols = np.arange(d)[None, :]
    s = slab[:, None]
    out[:] = np.where(cols < s, inside, anywhere)
    out[np.arange(n), slab] = outside
    return out


def _sample_chunk(spec_json, N, R, seed, chunk, start, size, zero, towers_only, M):
    spec = SystemSpec.from_json(spec_json)
    a = block_arrays(spec, N)
    d = spec.rank
    counts = np.zeros((size, N), dtype=np.int64)
    pts_s, pts_b, pts_c = [], [], []
    mu = a["lam"] * a["nu"]
    inner, outer = _shell_ratio(a["side"], R, d)
    for b in range(N):
        rng = stream(seed, chunk, b)
        L = int(a["side"][b])
        K = rng.poisson(mu[b], size=size)
        if towers_only:
            counts[:, b] = 0 if (b + 1) in zero else K
            continue
        tot = int(K.sum())
        tc = rng.integers(1, L + 1, size=(tot, d))
        if (b + 1) in zero:
            K = np.zeros_like(K)
        else:
            pts_s.append(np.repeat(np.arange(start, start + size), K))
            pts_b.append(np.full(tot, b + 1, dtype=np.int64))
            pts_c.append(tc)
        counts[:, b] = K
        if R > 0:
            S = rng.poisson(a["nu"][b] * outer[b], size=size)
            n_sh = int(S.sum())
            pts_s.append(np.repeat(np.arange(start, start + size), S))
            pts_b.append(np.full(n_sh, b + 1, dtype=np.int64))
            pts_c.append(_slab_points(rng, n_sh, L, R, d))
    hits = stream(seed, chunk, TRUNCATION_KEY).poisson(M, size=size) if M > 0 else np.zeros(size, dtype=np.int64)
    if pts_s:
        s, bl, co = np.concatenate(pts_s), np.concatenate(pts_b), np.concatenate(pts_c)
    else:
        s, bl, co = (np.zeros(0, np.int64),) * 2 + (np.zeros((0, d), np.int64),)
    return s, bl, co, counts, hits


def _run(spec, N, R, seed, samples, zero, towers_only, workers):
    seed = check_seed(seed)
    if R < 0:
        raise ValueError("shell radius must be >= 0")
    block_arrays(spec, N)
    M = truncation_budget(spec, N, R)["mean"] if not towers_only else 0.0
    js = spec.to_json()
    jobs = [(js, N, R, seed, c, st, sz, frozenset(zero), towers_only, M) for c, st, sz in chunks(samples)]
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            parts = list(ex.map(_sample_chunk, *zip(*jobs)))
    else:
        parts = [_sample_chunk(*j) for j in jobs]
    return parts, M


def sample_configuration(spec: SystemSpec, N: int, R: int, seed: int, samples: int = 1,
                         workers: int = 1, zero_blocks=()) -> PointConfiguration:
    """Draw ``samples`` independent configurations of blocks 1..N with shell radius R."""
    zero = tuple(sorted(set(int(z) for z in zero_blocks)))
    if any(z < 1 or z > N for z in zero):
        raise ValueError("zero_blocks must lie in 1..N")
    parts, M = _run(spec, N, R, seed, samples, zero, False, workers)
    budget = truncation_budget(spec, N, R)
    return PointConfiguration(
        spec_json=spec.to_json(), N=N, radius=R, seed=seed, n_samples=samples,
        sample=np.concatenate([p[0] for p in parts]),
        block=np.concatenate([p[1] for p in parts]),
        coords=np.concatenate([p[2] for p in parts]),
        tower_counts=np.concatenate([p[3] for p in parts]),
        truncation_hits=np.concatenate([p[4] for p in parts]),
        zero_blocks=zero, budget=budget,
    )


def sample_conditioned(spec: SystemSpec, N: int, R: int, seed: int, zero_blocks, samples: int = 1,
                       workers: int = 1) -> PointConfiguration:
    """Condition on [A_k]_0 for k in zero_blocks by emptying those towers.

    Uses the same streams as ``sample_configuration``, so all other cells agree
    with the unconditioned draw sample by sample.
    """
    return sample_configuration(spec, N, R, seed, samples, workers, zero_blocks)


def sample_tower_counts(spec: SystemSpec, N: int, seed: int, samples: int, workers: int = 1,
                        zero_blocks=()) -> np.ndarray:
    """Only omega(A_n) for n <= N, shape (samples, N); equal to the counts of ``sample_configuration``."""
    parts, _ = _run(spec, N, 0, seed, samples, tuple(zero_blocks), True, workers)
    return np.concatenate([p[3] for p in parts])


def iter_tower_counts(spec: SystemSpec, N: int, seed: int, samples: int):
    """Chunk-wise version of ``sample_tower_counts`` for large sample counts."""
    js = spec.to_json()
    block_arrays(spec, N)
    for c, st, sz in chunks(samples):
        yield _sample_chunk(js, N, 0, check_seed(seed), c, st, sz, frozenset(), True, 0.0)[3]


def shift(config: PointConfiguration, h) -> PointConfiguration:
    """h . omega: every point moves from cell x to cell x + h; the valid radius shrinks by |h|."""
    h = np.asarray(h, dtype=np.int64).reshape(-1)
    disp = int(np.max(np.abs(h))) if h.size else 0
    if disp > config.radius:
        raise ShellRadiusError(f"shift {h.tolist()} exceeds shell radius {config.radius}")
    spec = SystemSpec.from_json(config.spec_json)
    sides = block_arrays(spec, config.N)["side"]
    coords = config.coords + h[None, :]
    L = sides[config.block - 1][:, None]
    inside = np.all((coords >= 1) & (coords <= L), axis=1)
    counts = np.zeros_like(config.tower_counts)
    np.add.at(counts, (config.sample[inside], config.block[inside] - 1), 1)
    prev = config.offset or (0,) * config.rank
    return replace(config, coords=coords, tower_counts=counts, radius=config.radius - disp,
                   offset=tuple(int(a + b) for a, b in zip(prev, h)))
