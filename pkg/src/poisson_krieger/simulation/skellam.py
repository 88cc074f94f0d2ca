"""Skellam probabilities by direct series and the alpha_n windows of the III_lambda family."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from scipy import stats

from ..systems import Kind, SystemSpec

PMF_TOL = 1e-15


class WindowError(ValueError):
    """The window (or its blocks) does not fit inside the available horizon."""


def skellam_pmf(k: int, mu1: float, mu2: float, tol: float = PMF_TOL) -> float:
    """P(X1 - X2 = k) for independent X1 ~ Poisson(mu1), X2 ~ Poisson(mu2).

    Sums e^{-(a+b)} sum_j a^{j+k} b^j / ((j+k)! j!) with the factorial
    recurrence, stopping once the geometric remainder bound is below ``tol``.
    """
    if mu1 < 0 or mu2 < 0:
        raise ValueError("Poisson means must be nonnegative")
    k = int(k)
    a, b = (mu1, mu2) if k >= 0 else (mu2, mu1)
    k = abs(k)
    if a == 0.0:
        return math.exp(-b) if k == 0 else 0.0
    log_scale = -(a + b)
    term = math.exp(k * math.log(a) - math.lgamma(k + 1) + log_scale)
    if b == 0.0:
        return term
    total, j = 0.0, 0
    ab = a * b
    while True:
        total += term
        j += 1
        ratio = ab / ((j + k) * j)
        term *= ratio
        nxt = ab / ((j + k + 1) * (j + 1))
        if nxt < 0.5 and term / (1.0 - nxt) < tol:
            total += term
            return total
        if term == 0.0:
            return total


def skellam_support_bound(mu1: float, mu2: float, eps: float = 1e-12) -> tuple[int, float]:
    """K with P(|X1 - X2| > K) <= P(X1 > K) + P(X2 > K) = returned epsilon <= eps."""
    K = 0
    while True:
        tail = float(stats.poisson.sf(K, mu1) + stats.poisson.sf(K, mu2))
        if tail <= eps:
            return K, tail
        K += 1


@dataclass(frozen=True)
class SkellamSpec:
    n: int
    m_n: int
    alpha: float
    lam: float
    plus_blocks: tuple[int, ...]
    minus_blocks: tuple[int, ...]
    generator: int = 0

    @property
    def mu_minus(self) -> float:
        """Poisson mean of the subtracted counts: each minus block carries mu = nu = mu_plus / lambda."""
        return self.alpha / self.lam

    def to_record(self) -> dict:
        return {"n": self.n, "m_n": self.m_n, "alpha": self.alpha, "lambda": self.lam,
                "generator": self.generator, "plus_blocks": list(self.plus_blocks),
                "minus_blocks": list(self.minus_blocks)}


def _pair_layout(spec: SystemSpec, generator: int) -> tuple[int, int, float]:
    # (period, offset of the lambda-block inside a group, lambda)
    if spec.kind is Kind.III_LAMBDA:
        if generator != 0:
            raise ValueError("III_lambda has a single generator")
        return 2, 1, float(spec.params["lambda"])
    if spec.kind is Kind.III_1:
        if generator not in (0, 1):
            raise ValueError("III_1 has generators 0 and 1")
        return 4, 1 + 2 * generator, float(spec.params[f"lambda{generator + 1}"])
    raise ValueError(f"no Skellam window for kind {spec.kind.value}")


def skellam_window(spec: SystemSpec, n: int, horizon: int | None = None, generator: int = 0) -> SkellamSpec:
    """Smallest m_n > n with alpha_n = sum_{k=n}^{m_n-1} mu(A of the k-th lambda-block) in (0.5, 1).

    For III_lambda the lambda-block of pair k+1 is block 2k+1, with
    mu = lambda/((k+1) log(k+2)).  The statistic then uses pairs n+1..m_n.
    """
    if n < 1:
        raise ValueError("window start must be >= 1")
    P, off, lam = _pair_layout(spec, generator)
    limit = spec.n_blocks if horizon is None else horizon
    # group k+1 holds the lambda-block P*k + off; cumsum adds left to right,
    # so alpha equals the scalar running sum bit for bit
    alpha, k, size = 0.0, n, 1024
    while True:
        kmax = (limit - off) // P  # last k whose block fits
        if k > kmax:
            raise WindowError(f"window from n={n} needs block {P * k + off} > horizon {limit}")
        ks = np.arange(k, min(k + size, kmax + 1), dtype=np.float64)
        run = np.cumsum(np.concatenate([[alpha], lam / ((ks + 1.0) * np.log(ks + 2.0))]))[1:]
        hit = np.flatnonzero(run > 0.5)
        if hit.size:
            alpha, k = float(run[hit[0]]), k + int(hit[0]) + 1
            break
        alpha, k, size = float(run[-1]), k + ks.size, size * 2
    if alpha >= 1.0:
        raise WindowError(f"window from n={n} overshoots: alpha={alpha}")
    m = k
    plus = tuple(P * (j - 1) + off for j in range(n + 1, m + 1))
    minus = tuple(b + 1 for b in plus)
    if minus[-1] > limit:
        raise WindowError(f"window from n={n} needs block {minus[-1]} > horizon {limit}")
    return SkellamSpec(n, m, alpha, lam, plus, minus, generator)


@dataclass(frozen=True)
class Delta1Report:
    alpha: float
    lam: float
    pmf0: float
    pmf1: float
    lower_bound: float
    law_pmf0: float
    law_pmf1: float
    law_lower_bound: float

    @property
    def chain_holds(self) -> bool:
        """pmf(1) > alpha e^{-alpha(1+lambda)} > 1/16 and pmf(0) > pmf(1), on Skellam(alpha, lambda*alpha)."""
        return self.pmf1 > self.lower_bound > 1.0 / 16.0 and self.pmf0 > self.pmf1

    @property
    def law_chain_holds(self) -> bool:
        """The same comparisons for the law of theta under the construction, Skellam(alpha, alpha/lambda)."""
        return self.law_pmf1 > self.law_lower_bound and self.law_pmf0 > self.law_pmf1

    @property
    def passed(self) -> bool:
        return self.chain_holds and self.law_chain_holds

    def to_record(self) -> dict:
        d = dict(self.__dict__)
        d.update(chain_holds=self.chain_holds, law_chain_holds=self.law_chain_holds, passed=self.passed)
        return d


def delta1_mass_check(alpha: float, lam: float) -> Delta1Report:
    if not 0.5 < alpha < 1.0:
        raise ValueError("alpha must lie in (0.5, 1)")
    return Delta1Report(
        alpha=alpha, lam=lam,
        pmf0=skellam_pmf(0, alpha, lam * alpha),
        pmf1=skellam_pmf(1, alpha, lam * alpha),
        lower_bound=alpha * math.exp(-alpha * (1.0 + lam)),
        law_pmf0=skellam_pmf(0, alpha, alpha / lam),
        law_pmf1=skellam_pmf(1, alpha, alpha / lam),
        law_lower_bound=alpha * math.exp(-alpha * (1.0 + 1.0 / lam)),
    )
