"""Monte Carlo estimators: unit expectation of the density, Skellam statistics, ratio-set lattices."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from functools import reduce

import numpy as np

from .. import kernels
from ..groups import Element
from ..systems import Kind, SystemSpec, rationally_dependent
from .cocycle import rn_cocycle
from .configuration import (
    PointConfiguration, block_arrays, iter_tower_counts, sample_configuration, sample_tower_counts,
)
from .skellam import SkellamSpec, skellam_pmf

MIN_NONZERO = 10


def _fsum(x) -> float:
    return math.fsum(np.asarray(x, dtype=np.float64).tolist())


@dataclass(frozen=True)
class Estimate:
    mean: float
    se: float
    samples: int
    target: float = 1.0
    extra: dict = field(default_factory=dict)

    @property
    def z(self) -> float:
        if self.se == 0.0:
            return 0.0 if self.mean == self.target else math.inf
        return (self.mean - self.target) / self.se

    @property
    def within_4se(self) -> bool:
        return abs(self.z) <= 4.0

    @property
    def ci(self) -> tuple[float, float]:
        return self.mean - 4.0 * self.se, self.mean + 4.0 * self.se

    def to_record(self) -> dict:
        d = asdict(self)
        d.update(z=self.z, within_4se=self.within_4se, ci=list(self.ci))
        return d


def mean_and_se(values: np.ndarray, target: float = 1.0, **extra) -> Estimate:
    v = np.asarray(values, dtype=np.float64)
    n = v.size
    m = _fsum(v) / n
    var = _fsum((v - m) ** 2) / (n - 1) if n > 1 else 0.0
    return Estimate(m, math.sqrt(var / n), n, target, extra)


def log_density_values(spec: SystemSpec, counts: np.ndarray) -> np.ndarray:
    """log prod_{n<=N} e^{mu_n - nu_n} lambda_n^{-omega(A_n)} per row of tower counts."""
    N = counts.shape[1]
    a = block_arrays(spec, N)
    mu = a["lam"] * a["nu"]
    return kernels.log_rn_density(np.ascontiguousarray(counts), mu - a["nu"], np.log(a["lam"]))


def estimate_rn_expectation(spec: SystemSpec, N: int, samples: int, seed: int,
                            checkpoints=None) -> Estimate | dict[int, Estimate]:
    """Mean of prod_{n<=N} d nu_n*/d mu_n* under mu*; the exact expectation is 1.

    With ``checkpoints`` (block counts <= N) one draw serves several truncations;
    the result is then a dict keyed by checkpoint.
    """
    if samples < 10**3:
        raise ValueError("need at least 1000 samples")
    cps = [N] if checkpoints is None else sorted(set(int(c) for c in checkpoints))
    if any(c < 1 or c > N for c in cps):
        raise ValueError("checkpoints must lie in 1..N")
    a = block_arrays(spec, N)
    mmn = a["lam"] * a["nu"] - a["nu"]
    ll = np.log(a["lam"])
    vals = {c: [] for c in cps}
    for counts in iter_tower_counts(spec, N, seed, samples):
        for c in cps:
            vals[c].append(np.exp(kernels.log_rn_density(np.ascontiguousarray(counts[:, :c]), mmn[:c], ll[:c])))
    out = {c: mean_and_se(np.concatenate(v), 1.0, N=c, seed=seed) for c, v in vals.items()}
    return out[N] if checkpoints is None else out


# ---------------------------------------------------------------------------
# Skellam statistics


def theta_statistic(window: SkellamSpec, omega) -> np.ndarray:
    """theta_n = sum_{k=n+1}^{m_n} (omega(A_{2k-1}) - omega(A_{2k})), one integer per sample."""
    counts = omega.tower_counts if isinstance(omega, PointConfiguration) else np.asarray(omega)
    need = max(window.minus_blocks)
    if counts.shape[1] < need:
        raise ValueError(f"configuration covers {counts.shape[1]} blocks; window needs {need}")
    plus = counts[:, [b - 1 for b in window.plus_blocks]].sum(axis=1)
    minus = counts[:, [b - 1 for b in window.minus_blocks]].sum(axis=1)
    return plus - minus


def sample_theta(spec: SystemSpec, window: SkellamSpec, samples: int, seed: int) -> np.ndarray:
    return theta_statistic(window, sample_tower_counts(spec, max(window.minus_blocks), seed, samples))


def tv_distance(values: np.ndarray, mu1: float, mu2: float) -> dict:
    """Total variation between the empirical law of ``values`` and Skellam(mu1, mu2).

    Probability the model puts outside the evaluated range is added in full.
    """
    v = np.asarray(values, dtype=np.int64)
    lo, hi = int(v.min()) - 5, int(v.max()) + 5
    ks = np.arange(lo, hi + 1)
    emp = np.bincount(v - lo, minlength=ks.size) / v.size
    pmf = np.array([skellam_pmf(int(k), mu1, mu2) for k in ks])
    outside = max(0.0, 1.0 - _fsum(pmf))
    tv = 0.5 * (_fsum(np.abs(emp - pmf)) + outside)
    return {"tv": tv, "support": [lo, hi], "outside_mass": outside, "mu1": mu1, "mu2": mu2,
            "samples": int(v.size), "empirical": emp.tolist(), "pmf": pmf.tolist()}


# ---------------------------------------------------------------------------
# ratio set


@dataclass
class LatticeFinding:
    status: str  # LATTICE, DENSE, MULTI or UNDETERMINED
    generators: list
    n_values: int
    n_nonzero: int
    n_invalid: int
    n_excluded: int = 0
    gcd: int | None = None
    lattice: str = ""
    lam_hat: float | None = None
    divisor: int | None = None
    divisibility_ok: bool | None = None
    exponent_counts: dict = field(default_factory=dict)
    reason: str = ""

    def to_record(self) -> dict:
        return asdict(self)


def _resolve_elements(spec: SystemSpec, elements) -> list[Element]:
    out = []
    for e in elements:
        if isinstance(e, (int, np.integer)):
            out.append(spec.group.enumerate(int(e)))
        else:
            out.append(tuple(int(c) for c in e))
    return out


def collect_exponents(spec: SystemSpec, omega: PointConfiguration, elements, conditioned: bool):
    """Stack exponent rows over elements, dropping invalid samples (and, if conditioned,
    pairs whose image leaves the conditioning set)."""
    rows, invalid, excluded = [], 0, 0
    gens = None
    for g in elements:
        cs = rn_cocycle(spec, g, omega)
        gens = cs.generators
        keep = cs.truncation_valid.copy()
        invalid += int((~keep).sum())
        if conditioned:
            stay = cs.entered_masked == 0
            excluded += int((keep & ~stay).sum())
            keep &= stay
        rows.append(cs.exponents[keep])
    return np.concatenate(rows) if rows else np.zeros((0, 0), np.int64), gens, invalid, excluded


def ratio_set_estimate(spec: SystemSpec, elements, samples: int, seed: int, N: int = 50,
                       R: int | None = None, zero_blocks=None, workers: int = 1) -> LatticeFinding:
    """Exact lattice of observed cocycle exponents.

    One generator: the subgroup gcd * Z, reported as lambda^gcd.  Two
    rationally independent generators with rank-2 exponents: DENSE.  With
    ``zero_blocks = {1..n}``, also checks that every exponent is divisible by
    the power of block n+1.
    """
    els = _resolve_elements(spec, elements)
    radius = max(max(abs(c) for c in e) for e in els) if R is None else R
    zb = tuple(sorted(zero_blocks or ()))
    omega = sample_configuration(spec, N, radius, seed, samples, workers, zb)
    ex, gens, invalid, excluded = collect_exponents(spec, omega, els, bool(zb))
    nz_rows = ex[np.any(ex != 0, axis=1)]
    used = np.flatnonzero(np.any(nz_rows != 0, axis=0)) if nz_rows.size else np.array([], int)
    f = LatticeFinding("UNDETERMINED", [float(gens[i]) for i in used][:8], int(ex.shape[0]),
                       int(nz_rows.shape[0]), invalid, excluded)
    if zb:
        n = max(zb)
        if set(zb) != set(range(1, n + 1)):
            raise ValueError("conditioning must cover blocks 1..n")
        if n + 1 <= N:
            f.divisor = int(abs(block_arrays(spec, N)["power"][n]))
    if f.n_nonzero < MIN_NONZERO:
        f.reason = f"only {f.n_nonzero} nonzero cocycle values"
        return f
    if used.size == 1:
        col = nz_rows[:, used[0]]
        g = int(reduce(math.gcd, np.abs(col).tolist()))
        v = float(gens[used[0]])
        base = min(v, 1.0 / v)
        vals, cnt = np.unique(ex[:, used[0]], return_counts=True)
        f.exponent_counts = {str(int(a)): int(b) for a, b in zip(vals, cnt)}
        f.status, f.gcd, f.lam_hat = "LATTICE", g, base ** g
        f.lattice = f"{g} * log({base:g}) Z"
        if f.divisor:
            f.divisibility_ok = bool(np.all(ex[:, used[0]] % f.divisor == 0))
        f.reason = "single generator; exact integer exponents"
        return f
    if used.size == 2 and spec.kind is Kind.III_1:
        a, b = (math.log(float(gens[i])) for i in used)
        rank = int(np.linalg.matrix_rank(nz_rows[:, used].astype(np.float64)))
        if rank == 2 and rationally_dependent(a, b) is None:
            f.status, f.lattice = "DENSE", "Z log l1 + Z log l2 (dense in R)"
            f.reason = "two rationally independent generators with rank-2 exponents"
            return f
        f.reason = f"exponent rank {rank} or dependent generators"
        return f
    f.status, f.reason = "MULTI", f"{used.size} generators observed"
    return f
