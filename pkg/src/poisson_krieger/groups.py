"""Integer lattices Z^d as acting groups: enumeration, Folner boxes, flux counts.

Elements are plain tuples of ints.  The enumeration skips the identity, which
is available separately as ``GroupModel.identity``.

Folner boxes are ``F_n = {1..L_n}^d``.  For d = 1 the side is ``L_n = n(n+1)``;
for d > 1 it is ``max(2*d*n*r_n, n(n+1))`` where ``r_n`` is the sup-norm of the
n-th enumerated element.  Both rules satisfy

    max_{k<=n} #(g_k F_n ^ F_n) / #F_n <= 1/n

for every n, and both give ``L_n >= n(n+1)``, which the series tail bounds rely on.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

import numpy as np

Element = tuple[int, ...]


@lru_cache(maxsize=64)
def _shell(rank: int, radius: int) -> tuple[Element, ...]:
    # lexicographic order of all points with sup-norm exactly `radius`
    rng = range(-radius, radius + 1)
    return tuple(p for p in itertools.product(rng, repeat=rank) if max(map(abs, p)) == radius)


def _shell_size(rank: int, radius: int) -> int:
    return (2 * radius + 1) ** rank - (2 * radius - 1) ** rank


@dataclass(frozen=True)
class FolnerBox:
    index: int
    side: int
    rank: int = 1

    @property
    def cardinality(self) -> int:
        return self.side ** self.rank

    def contains(self, h: Element) -> bool:
        return all(1 <= c <= self.side for c in h)

    def points(self) -> Iterator[Element]:
        return itertools.product(range(1, self.side + 1), repeat=self.rank)


@dataclass(frozen=True)
class FolnerReport:
    passed: bool
    horizon: int
    worst_ratio: Fraction
    witness: tuple[int, int]  # (k, n)
    violations: tuple[tuple[int, int], ...] = field(default=())

    @property
    def tightness(self) -> Fraction:
        # ratio * n; the inequality holds iff this is <= 1
        return self.worst_ratio * self.witness[1]


@dataclass(frozen=True)
class GroupModel:
    rank: int = 1

    def __post_init__(self):
        if self.rank < 1:
            raise ValueError(f"rank must be positive, got {self.rank}")

    @property
    def identity(self) -> Element:
        return (0,) * self.rank

    def enumerate(self, k: int) -> Element:
        """Return the k-th nonidentity element (k >= 1).

        Rank 1 alternates signs by magnitude: +1, -1, +2, -2, ...
        Higher ranks walk sup-norm shells, lexicographic inside a shell.
        """
        if k < 1:
            raise ValueError(f"enumeration index must be >= 1, got {k}")
        if self.rank == 1:
            m = (k + 1) // 2
            return (m,) if k % 2 else (-m,)
        r, seen = 1, 0
        while seen + _shell_size(self.rank, r) < k:
            seen += _shell_size(self.rank, r)
            r += 1
        return _shell(self.rank, r)[k - seen - 1]

    def enumerate_many(self, count: int) -> np.ndarray:
        """Elements 1..count as an int64 array of shape (count, rank)."""
        if self.rank == 1:
            k = np.arange(1, count + 1, dtype=np.int64)
            m = (k + 1) // 2
            return np.where(k % 2 == 1, m, -m).reshape(-1, 1)
        return np.array([self.enumerate(k) for k in range(1, count + 1)], dtype=np.int64)

    def index_of(self, g: Element) -> int:
        """Inverse of ``enumerate``; the identity has no index."""
        g = tuple(int(c) for c in g)
        if len(g) != self.rank:
            raise ValueError("element has wrong rank")
        r = max(map(abs, g))
        if r == 0:
            raise ValueError("the identity is not enumerated")
        if self.rank == 1:
            return 2 * g[0] - 1 if g[0] > 0 else -2 * g[0]
        before = (2 * r - 1) ** self.rank - 1
        return before + _shell(self.rank, r).index(g) + 1

    @staticmethod
    def compose(g: Element, h: Element) -> Element:
        return tuple(a + b for a, b in zip(g, h))

    @staticmethod
    def inverse(g: Element) -> Element:
        return tuple(-a for a in g)

    @staticmethod
    def displacement(g: Element) -> int:
        return max((abs(c) for c in g), default=0)

    def side(self, n: int) -> int:
        if n < 1:
            raise ValueError(f"Folner index must be >= 1, got {n}")
        base = n * (n + 1)
        if self.rank == 1:
            return base
        return max(2 * self.rank * n * self.displacement(self.enumerate(n)), base)

    def sides(self, count: int) -> np.ndarray:
        """Sides L_1..L_count as int64."""
        n = np.arange(1, count + 1, dtype=np.int64)
        base = n * (n + 1)
        if self.rank == 1:
            return base
        # r_n: sup-norm of the n-th element, from shell sizes
        r = np.empty(count, dtype=np.int64)
        radius, upto = 1, (3 ** self.rank) - 1
        for i in range(count):
            while i + 1 > upto:
                radius += 1
                upto = (2 * radius + 1) ** self.rank - 1
            r[i] = radius
        return np.maximum(2 * self.rank * n * r, base)

    def folner_set(self, n: int) -> FolnerBox:
        return FolnerBox(index=n, side=self.side(n), rank=self.rank)

    def cardinality(self, n: int) -> int:
        return self.side(n) ** self.rank

    def out_count(self, g: Element, n: int) -> int:
        """#(F_n \\ gF_n): box points whose g-image leaves the box."""
        L = self.side(n)
        inner = 1
        for c in g:
            inner *= max(L - abs(c), 0)
        return L ** self.rank - inner

    def in_count(self, g: Element, n: int) -> int:
        """#(gF_n \\ F_n): translated points outside the box."""
        return self.out_count(self.inverse(g), n)

    def symdiff_count(self, g: Element, n: int) -> int:
        return self.out_count(g, n) + self.in_count(g, n)

    def validate_folner(self, horizon: int) -> FolnerReport:
        """Check the Folner inequality for every n <= horizon, exactly."""
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        elems = self.enumerate_many(horizon)
        worst_key = None
        worst = (Fraction(0), (0, 0))
        bad = []
        running = 0
        for n in range(1, horizon + 1):
            L = self.side(n)
            card = L ** self.rank
            if self.rank == 1:
                # symdiff is monotone in |shift|; +m (index 2m-1) is the first element of magnitude m
                running = max(running, abs(int(elems[n - 1, 0])))
                k = 2 * running - 1
                sd = 2 * min(running, L)
            else:
                best_sd, k = -1, 0
                for j in range(n):
                    s = self.symdiff_count(tuple(int(c) for c in elems[j]), n)
                    if s > best_sd:
                        best_sd, k = s, j + 1
                sd = best_sd
            ratio = Fraction(sd, card)
            key = ratio * n
            if key > 1:
                bad.append((k, n))
            if worst_key is None or key >= worst_key:
                worst_key, worst = key, (ratio, (k, n))
        return FolnerReport(
            passed=not bad,
            horizon=horizon,
            worst_ratio=worst[0],
            witness=worst[1],
            violations=tuple(bad),
        )
