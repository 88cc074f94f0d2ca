"""Block data (towers, densities, measures) of the four Poisson-suspension constructions.

Block ``n`` is a copy ``X_n`` of ``Z^d x Y_n`` carrying a Rokhlin tower
``A_n = F_n x A_n'``.  The density ``f = dmu/dnu`` equals ``lambda_n`` on
``A_n`` and 1 elsewhere, so a block is described by ``(lambda_n, nu(A_n))``.

Every ``lambda_n`` is stored as ``generator ** power`` with an integer power,
which keeps Radon-Nikodym exponents exact downstream.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Iterator, Sequence

import numpy as np

from .groups import GroupModel


class Kind(str, enum.Enum):
    II_INF = "ii-inf"
    III_0 = "iii-0"
    III_LAMBDA = "iii-lambda"
    III_1 = "iii-1"
    CUSTOM = "custom"


class SpecError(ValueError):
    pass


# ---------------------------------------------------------------------------
# c(lambda)

def c_of_lambda(lam):
    """c(l) = l^3 - l + l^-2 - 1, evaluated in the factored form.

    ``(1-l)^2 (1+l)(1+l+l^2) / l^2`` avoids cancellation near l = 1 and uses
    only IEEE-exact arithmetic, so scalar and array evaluation agree bitwise.
    Accepts floats or arrays.
    """
    arr = np.asarray(lam, dtype=np.float64)
    if np.any(arr <= 0) or np.any(~np.isfinite(arr)):
        raise SpecError("c(lambda) needs lambda > 0")
    d = 1.0 - arr
    out = d * d * (1.0 + arr) * (1.0 + arr + arr * arr) / (arr * arr)
    return float(out) if np.ndim(out) == 0 else out


def c_expanded(lam: float) -> float:
    """The expanded polynomial form; kept as an independent check of ``c_of_lambda``."""
    if lam <= 0:
        raise SpecError("c(lambda) needs lambda > 0")
    return lam ** 3 - lam + lam ** -2 - 1.0


def _solve_c_inverse_array(target: np.ndarray) -> np.ndarray:
    t = np.asarray(target, dtype=np.float64)
    # c(x) >= x^-2 - 2 on (0,1), so c(1/sqrt(t+3)) > t
    lo = 1.0 / np.sqrt(t + 3.0)
    hi = np.ones_like(t)
    for _ in range(1100):
        mid = 0.5 * (lo + hi)
        d = 1.0 - mid
        cm = d * d * (1.0 + mid) * (1.0 + mid + mid * mid) / (mid * mid)
        above = cm > t
        new_lo = np.where(above, mid, lo)
        new_hi = np.where(above, hi, mid)
        if np.array_equal(new_lo, lo) and np.array_equal(new_hi, hi):
            break
        lo, hi = new_lo, new_hi
    clo = np.abs(_c_raw(lo) - t)
    chi = np.abs(_c_raw(hi) - t)
    return np.where(clo <= chi, lo, hi)


def _c_raw(x):
    d = 1.0 - x
    return d * d * (1.0 + x) * (1.0 + x + x * x) / (x * x)


def solve_c_inverse(target):
    """The unique lambda in (0,1) with c(lambda) = target (c decreases there).

    Bisection down to adjacent floats; accepts a scalar or an array.
    """
    t = np.asarray(target, dtype=np.float64)
    if np.any(t <= 0) or np.any(~np.isfinite(t)):
        raise SpecError("target must be positive and finite")
    out = _solve_c_inverse_array(np.atleast_1d(t))
    return float(out[0]) if np.ndim(t) == 0 else out.reshape(t.shape)


# ---------------------------------------------------------------------------
# l-schedules for the III_0 family

@dataclass(frozen=True)
class LSchedule:
    """Nondecreasing levels ``l_n`` given by segment starts.

    ``doubling``: levels 1, 2, 4, 8, ...; each segment [N_j, N_{j+1}) satisfies
    sum 1/(n 4^{l_j}) >= 1 via N_{j+1} = ceil(N_j e^{4^{l_j}}).
    ``explicit``: user levels/starts; the last level runs forever.
    """

    type: str = "doubling"
    levels: tuple[int, ...] = ()
    starts: tuple[int, ...] = ()

    def __post_init__(self):
        if self.type == "doubling":
            return
        if self.type != "explicit":
            raise SpecError(f"unknown schedule type {self.type!r}")
        if not self.levels or len(self.levels) != len(self.starts):
            raise SpecError("explicit schedule needs matching levels and starts")
        if self.starts[0] != 1 or any(b <= a for a, b in zip(self.starts, self.starts[1:])):
            raise SpecError("schedule starts must begin at 1 and increase strictly")
        if any(l < 1 for l in self.levels):
            raise SpecError("schedule levels must be positive integers")
        if any(b < a for a, b in zip(self.levels, self.levels[1:])):
            raise SpecError("schedule levels must be nondecreasing")
        if any(b % a for a, b in zip(self.levels, self.levels[1:])):
            raise SpecError("schedule levels must form a divisibility chain")

    @property
    def unbounded(self) -> bool:
        return self.type == "doubling"

    def segments(self, upto: int) -> list[tuple[int, int, int | None]]:
        """Segments (level, start, stop) meeting [1, upto]; stop is exclusive, None = never."""
        out = []
        if self.type == "explicit":
            for i, (l, s) in enumerate(zip(self.levels, self.starts)):
                if s > upto:
                    break
                stop = self.starts[i + 1] if i + 1 < len(self.starts) else None
                out.append((l, s, stop))
            return out
        l, start = 1, 1
        while start <= upto:
            stop = _doubling_next_start(start, l)
            out.append((l, start, stop))
            if stop is None:
                break
            start, l = stop, 2 * l
        return out

    def level(self, n: int) -> int:
        for l, s, stop in self.segments(n):
            if stop is None or n < stop:
                return l
        raise AssertionError("unreachable")

    def levels_array(self, count: int) -> np.ndarray:
        out = np.empty(count, dtype=np.int64)
        for l, s, stop in self.segments(count):
            hi = count if stop is None else min(stop - 1, count)
            out[s - 1:hi] = l
        return out

    def to_dict(self) -> dict:
        if self.type == "doubling":
            return {"type": "doubling"}
        return {"type": "explicit", "levels": list(self.levels), "starts": list(self.starts)}

    @classmethod
    def from_dict(cls, d: dict | None) -> "LSchedule":
        if not d or d.get("type", "doubling") == "doubling":
            return cls()
        return cls("explicit", tuple(int(x) for x in d["levels"]), tuple(int(x) for x in d["starts"]))


def _doubling_next_start(start: int, level: int) -> int | None:
    log_next = math.log(start) + 4.0 ** level
    if log_next > 700:  # beyond any addressable block index
        return None
    return math.ceil(start * math.exp(4.0 ** level) * (1 + 1e-12))


# ---------------------------------------------------------------------------
# blocks and specs

@dataclass(frozen=True)
class BlockParams:
    index: int
    lam: float
    nu_tower: float
    side: int
    rank: int
    generator: int  # index into SystemSpec.generators, -1 when lambda == 1
    power: int

    @property
    def shape_index(self) -> int:
        return self.index

    @property
    def cardinality(self) -> int:
        return self.side ** self.rank

    @property
    def nu_base(self) -> float:
        return self.nu_tower / self.cardinality

    @property
    def mu_tower(self) -> float:
        return self.lam * self.nu_tower


@dataclass(frozen=True)
class CellIndex:
    """Cell ``level`` of block ``block``; ``is_tower`` may be given and is then checked."""

    block: int
    level: tuple[int, ...]
    is_tower: bool | None = None


@dataclass(frozen=True)
class SystemSpec:
    kind: Kind
    n_blocks: int
    params: dict = field(default_factory=dict)
    rank: int = 1
    schedule: LSchedule | None = None

    def __post_init__(self):
        if self.n_blocks < 1:
            raise SpecError("n_blocks must be >= 1")

    # -- structure ---------------------------------------------------------
    @cached_property
    def group(self) -> GroupModel:
        return GroupModel(self.rank)

    @property
    def finite(self) -> bool:
        """Custom specs have exactly n_blocks blocks; the four named families are infinite."""
        return self.kind is Kind.CUSTOM

    @property
    def period(self) -> int:
        return {Kind.III_LAMBDA: 2, Kind.III_1: 4}.get(self.kind, 1)

    @cached_property
    def generators(self) -> tuple[float, ...]:
        k = self.kind
        if k is Kind.III_0:
            return (2.0,)
        if k is Kind.III_LAMBDA:
            return (float(self.params["lambda"]),)
        if k is Kind.III_1:
            return (float(self.params["lambda1"]), float(self.params["lambda2"]))
        if k is Kind.II_INF:
            return tuple(float(x) for x in self.arrays(self.n_blocks)["lam"])
        return tuple(float(x) for x in self.params["lambdas"])

    def block(self, n: int) -> BlockParams:
        if n < 1 or (self.finite and n > self.n_blocks):
            raise SpecError(f"block {n} does not exist")
        a = self.arrays(n, start=n)
        return BlockParams(
            index=n,
            lam=float(a["lam"][0]),
            nu_tower=float(a["nu"][0]),
            side=int(a["side"][0]),
            rank=self.rank,
            generator=int(a["gen"][0]),
            power=int(a["power"][0]),
        )

    def blocks(self) -> Iterator[BlockParams]:
        for n in range(1, self.n_blocks + 1):
            yield self.block(n)

    def arrays(self, stop: int, start: int = 1) -> dict[str, np.ndarray]:
        """Block data for n = start..stop as arrays (lam, nu, side, gen, power, n)."""
        if self.finite:
            stop = min(stop, self.n_blocks)
        n = np.arange(start, stop + 1, dtype=np.int64)
        nf = n.astype(np.float64)
        sides = self.group.sides(stop)[start - 1:]
        k = self.kind
        gen = np.zeros(n.size, dtype=np.int64)
        if k is Kind.II_INF:
            lam = solve_c_inverse(np.log(nf + 1.0))
            nu = 1.0 / (2.0 * nf * np.log(nf + 1.0))
            gen = n - 1
            power = np.ones(n.size, dtype=np.int64)
        elif k is Kind.III_0:
            power = self.schedule.levels_array(stop)[start - 1:]
            lam = np.ldexp(1.0, power)
            nu = 1.0 / (2.0 * nf * c_of_lambda(lam))
        elif k is Kind.III_LAMBDA:
            lam0 = float(self.params["lambda"])
            j = (nf + 1.0) // 2.0  # pair index
            odd = n % 2 == 1
            base = 1.0 / (j * np.log(j + 1.0))
            lam = np.where(odd, lam0, 1.0 / lam0)
            nu = np.where(odd, base, lam0 * base)
            power = np.where(odd, 1, -1).astype(np.int64)
        elif k is Kind.III_1:
            l1, l2 = float(self.params["lambda1"]), float(self.params["lambda2"])
            j = (nf + 3.0) // 4.0
            phase = (n - 1) % 4  # 0: l1, 1: 1/l1, 2: l2, 3: 1/l2
            base = 1.0 / (j * np.log(j + 1.0))
            pick = np.array([l1, 1.0 / l1, l2, 1.0 / l2])[phase]
            scale = np.array([1.0, l1, 1.0, l2])[phase]
            lam, nu = pick, scale * base
            gen = np.where(phase < 2, 0, 1).astype(np.int64)
            power = np.where(phase % 2 == 0, 1, -1).astype(np.int64)
        else:
            lam = np.asarray(self.params["lambdas"], dtype=np.float64)[start - 1:stop]
            nu = np.asarray(self.params["nus"], dtype=np.float64)[start - 1:stop]
            gen = n - 1
            power = np.where(lam == 1.0, 0, 1).astype(np.int64)
            gen = np.where(power == 0, -1, gen)
        return {"n": n, "lam": np.asarray(lam, dtype=np.float64), "nu": np.asarray(nu, dtype=np.float64),
                "side": sides, "gen": gen, "power": power}

    # -- density -----------------------------------------------------------
    def density_at(self, cell: CellIndex) -> float:
        b = self.block(cell.block)
        if len(cell.level) != self.rank:
            raise SpecError("cell level has wrong rank")
        tower = all(1 <= c <= b.side for c in cell.level)
        if cell.is_tower is not None and cell.is_tower != tower:
            raise SpecError(f"cell {cell} is_tower flag disagrees with F_{cell.block}")
        return b.lam if tower else 1.0

    def nu_mass(self, cell: CellIndex) -> float:
        return self.block(cell.block).nu_base

    def mu_mass(self, cell: CellIndex) -> float:
        return self.density_at(cell) * self.nu_mass(cell)

    # -- serialization -----------------------------------------------------
    def to_dict(self) -> dict[str, Any]:
        d = {"kind": self.kind.value, "n_blocks": self.n_blocks, "rank": self.rank,
             "params": dict(self.params)}
        if self.schedule is not None:
            d["schedule"] = self.schedule.to_dict()
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.to_json().encode()).hexdigest()

    @classmethod
    def from_dict(cls, d: dict) -> "SystemSpec":
        kind = Kind(d["kind"])
        n, rank, p = int(d["n_blocks"]), int(d.get("rank", 1)), d.get("params", {})
        if kind is Kind.II_INF:
            return build_type_ii_inf(n, rank=rank)
        if kind is Kind.III_0:
            return build_type_iii0(n, LSchedule.from_dict(d.get("schedule")), rank=rank)
        if kind is Kind.III_LAMBDA:
            return build_type_iii_lambda(p["lambda"], n, rank=rank)
        if kind is Kind.III_1:
            return build_type_iii1(p["lambda1"], p["lambda2"], n, rank=rank)
        return build_custom(p["lambdas"], p["nus"], rank=rank)

    @classmethod
    def from_json(cls, text: str) -> "SystemSpec":
        return cls.from_dict(json.loads(text))


# ---------------------------------------------------------------------------
# builders

def build_type_ii_inf(n_blocks: int, rank: int = 1) -> SystemSpec:
    """c(lambda_n) = log(n+1), nu(A_n) = 1/(2 n log(n+1))."""
    return SystemSpec(Kind.II_INF, n_blocks, {}, rank)


def build_type_iii0(n_blocks: int, schedule: LSchedule | None = None, rank: int = 1) -> SystemSpec:
    """lambda_n = 2^{l_n}, nu(A_n) = 1/(2 n c(lambda_n))."""
    return SystemSpec(Kind.III_0, n_blocks, {}, rank, schedule or LSchedule())


def _check_unit_interval(name: str, x: float) -> float:
    x = float(x)
    if not 0.0 < x < 1.0:
        raise SpecError(f"{name} must lie in (0, 1), got {x}")
    return x


def build_type_iii_lambda(lam: float, n_blocks: int, rank: int = 1) -> SystemSpec:
    """Paired blocks: lambda on odd blocks, 1/lambda on even ones."""
    lam = _check_unit_interval("lambda", lam)
    return SystemSpec(Kind.III_LAMBDA, n_blocks, {"lambda": lam}, rank)


def rationally_dependent(a: float, b: float, max_denominator: int = 10**6,
                         floor: float = 1e-12) -> tuple[int, int] | None:
    """Look for p/q (a continued-fraction convergent, q <= max_denominator) with q*a ~ p*b.

    Returns the relation (p, q) or None.  The residual |q x - p| (x = a/b) is
    compared with ``floor`` plus the rounding budget of x itself.
    """
    x = a / b
    sign = -1 if x < 0 else 1
    y = abs(x)
    h0, h1, k0, k1 = 0, 1, 1, 0
    rest = y
    for _ in range(64):
        ai = math.floor(rest)
        h0, h1 = h1, ai * h1 + h0
        k0, k1 = k1, ai * k1 + k0
        if k1 > max_denominator:
            break
        tol = floor + 8 * np.finfo(float).eps * k1 * y
        if abs(k1 * y - h1) <= tol:
            return sign * h1, k1
        frac = rest - ai
        if frac <= 0:
            break
        rest = 1.0 / frac
    return None


def build_type_iii1(lam1: float, lam2: float, n_blocks: int, rank: int = 1) -> SystemSpec:
    """Two interleaved III_lambda constructions with rationally independent logs."""
    lam1 = _check_unit_interval("lambda1", lam1)
    lam2 = _check_unit_interval("lambda2", lam2)
    rel = rationally_dependent(math.log(lam1), math.log(lam2))
    if rel is not None:
        raise SpecError(
            f"log lambda1 / log lambda2 ~ {rel[0]}/{rel[1]}: the logs must be rationally independent")
    return SystemSpec(Kind.III_1, n_blocks, {"lambda1": lam1, "lambda2": lam2}, rank)


def build_custom(lambdas: Sequence[float], nus: Sequence[float], rank: int = 1) -> SystemSpec:
    """Finitely many explicit blocks; used for degenerate and comparison specs."""
    lambdas = [float(x) for x in lambdas]
    nus = [float(x) for x in nus]
    if len(lambdas) != len(nus) or not lambdas:
        raise SpecError("custom spec needs equally many lambdas and nus")
    if any(x <= 0 for x in lambdas) or any(x < 0 for x in nus):
        raise SpecError("custom spec needs lambda > 0 and nu >= 0")
    return SystemSpec(Kind.CUSTOM, len(lambdas), {"lambdas": lambdas, "nus": nus}, rank)
