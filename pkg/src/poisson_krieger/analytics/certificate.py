"""Conservativeness via Markov + Borel-Cantelli: sum b_k = inf and sum b_k^2 e^{I_k} < inf.

I_k is the quadratic integral for the k-th group element.  For k <= K the
certificate uses the computed upper value of I_k; for k > K it uses a
majorant I_k <= alpha L(k) + beta valid for every k > K:

* c(lambda_n) nu_n = 1/(2n) (II_inf, III_0): r_n <= 2 below k and r_n <= 1/n
  from k on give I_k <= H_{k-1}/2 + 1/(4(k-1)), i.e. alpha = 1/2, L = ln.
* paired families: I_k <= sum_{n<k} c_n nu_n + sum_{n>=k} c_n nu_n/(2n), and the
  first sum is at most 2c sum_{j<=k} 1/(j log(j+1)) <= 2c (C0 + lnln k), so
  alpha = 2c (or 2(c1+c2)), L = lnln.
* finite custom lists: I_k <= sum_n c_n nu_n, alpha = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import special

from ..systems import Kind, SystemSpec, c_of_lambda
from .series import (
    DEFAULT_HORIZON, LNLN2, block_data, envelope, fsum, quadratic_profile,
)
from .verdicts import HorizonTooSmall, SeriesVerdict, converges, diverges, _num

EULER_GAMMA = 0.5772156649015329
# sum_{j>=1} 1/(j log(j+1)) up to J is <= C0 + lnln J for J >= 2
C0 = 1.0 / math.log(2.0) + 1.0 / (2.0 * math.log(3.0)) - LNLN2

DEFAULT_K = 10**4


def default_b_rule(spec: SystemSpec) -> str:
    return "klogk" if spec.kind in (Kind.II_INF, Kind.III_0) else "k"


def b_sequence(rule: str, K: int) -> np.ndarray:
    k = np.arange(1, K + 1, dtype=np.float64)
    if rule == "k":
        return 1.0 / k
    if rule == "klogk":
        b = np.empty(K)
        b[0] = 1.0  # 1/(k log k) is undefined at k = 1
        b[1:] = 1.0 / (k[1:] * np.log(k[1:]))
        return b
    raise ValueError(f"unknown b rule {rule!r}")


@dataclass(frozen=True)
class Majorant:
    alpha: float
    scale: str  # "ln", "lnln" or "const"
    beta: float

    def __call__(self, k: float) -> float:
        if self.scale == "ln":
            return self.alpha * math.log(k) + self.beta
        if self.scale == "lnln":
            return self.alpha * math.log(math.log(k)) + self.beta
        return self.beta


def majorant(spec: SystemSpec, K: int) -> Majorant:
    """I_k <= alpha L(k) + beta for all k > K (K >= 2)."""
    kind = spec.kind
    if kind in (Kind.II_INF, Kind.III_0):
        return Majorant(0.5, "ln", EULER_GAMMA / 2.0 + 1.0 / (2.0 * K))
    if kind is Kind.III_LAMBDA:
        cs = [c_of_lambda(float(spec.params["lambda"]))]
    elif kind is Kind.III_1:
        cs = [c_of_lambda(float(spec.params["lambda1"])), c_of_lambda(float(spec.params["lambda2"]))]
    else:
        a = block_data(spec, spec.n_blocks)
        return Majorant(0.0, "const", fsum(c_of_lambda(a["lam"]) * a["nu"]))
    alpha = 2.0 * sum(cs)
    w_max = max(cs) / math.log(2.0)
    return Majorant(alpha, "lnln", alpha * C0 + w_max / (2.0 * K))


def _log_tail_bound(rule: str, maj: Majorant, K: int) -> float:
    """log of an upper bound on sum_{k>K} b_k^2 e^{alpha L(k) + beta}; +inf if not summable."""
    lnK = math.log(K)
    if maj.scale == "const":
        # sum_{k>K} 1/k^2 <= 1/K ; sum 1/(k log k)^2 <= 1/(K log^2 K)
        base = -lnK if rule == "k" else -lnK - 2.0 * math.log(lnK)
        return maj.beta + base
    if maj.scale == "ln":
        if rule != "klogk" or maj.alpha >= 1.0:
            p = 2.0 - maj.alpha
            if rule == "k" and p > 1.0:
                return maj.beta - math.log(p - 1.0) + (1.0 - p) * lnK
            return math.inf
        # f(x) = x^(alpha-2)/ln^2 x is decreasing: sum <= int_K^inf <= K^(alpha-1)/((1-alpha) ln^2 K)
        return maj.beta + (maj.alpha - 1.0) * lnK - math.log(1.0 - maj.alpha) - 2.0 * math.log(lnK)
    # lnln scale: f(x) = (ln x)^a / x^2 (rule k) or (ln x)^(a-2) / x^2 (rule klogk)
    a = maj.alpha if rule == "k" else maj.alpha - 2.0
    # int_K^inf (ln x)^a x^-2 dx = Gamma(a+1, ln K); f is unimodal, add its sup on [K, inf)
    if a > -1.0:
        log_int = special.gammaln(a + 1.0) + math.log(max(special.gammaincc(a + 1.0, lnK), 1e-300))
    else:
        log_int = -lnK  # (ln x)^a <= 1 for x >= e
    x_star = max(lnK, a / 2.0)  # argmax in log-coordinates
    log_sup = a * math.log(x_star) - 2.0 * x_star if a > 0 else -2.0 * lnK
    return maj.beta + float(np.logaddexp(log_int, log_sup))


@dataclass(frozen=True)
class Certificate:
    passed: bool
    b_rule: str
    K: int
    horizon: int
    divergence: SeriesVerdict
    summability: SeriesVerdict | None
    majorant: Majorant
    witness: int | None = None
    reason: str = ""
    profile: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        return {
            "passed": self.passed,
            "b_rule": self.b_rule,
            "K": self.K,
            "horizon": self.horizon,
            "divergence": self.divergence.to_record(),
            "summability": None if self.summability is None else self.summability.to_record(),
            "majorant": {"alpha": self.majorant.alpha, "scale": self.majorant.scale,
                         "beta": _num(self.majorant.beta)},
            "witness": self.witness,
            "reason": self.reason,
        }


def _b_divergence(rule: str, K: int) -> SeriesVerdict:
    b = b_sequence(rule, K)
    if rule == "k":
        return diverges("b_k", K, fsum(b), math.log(K + 1.0), "sum 1/k >= ln(K+1)")
    return diverges("b_k", K, fsum(b), 1.0 + math.log(math.log(K + 1.0)) - LNLN2,
                    "b_1 = 1; sum_(k=2..K) 1/(k ln k) >= lnln(K+1) - lnln 2")


def conservativeness_certificate(spec: SystemSpec, horizon: int = DEFAULT_HORIZON,
                                 b_rule: str | None = None, K: int = DEFAULT_K) -> Certificate:
    rule = b_rule or default_b_rule(spec)
    a = block_data(spec, horizon)
    H = int(a["n"].size)
    if not spec.finite:
        if H < 2:
            raise HorizonTooSmall("the certificate needs horizon >= 2")
        K = min(K, H)
    K = max(K, 2)
    ks = np.arange(1, K + 1)
    partial = quadratic_profile(spec, ks, horizon)
    tail = 0.0 if spec.finite else envelope(spec, "quadratic", H)[0] / H
    upper = partial + tail
    b = b_sequence(rule, K)
    maj = majorant(spec, K)
    div = _b_divergence(rule, K)
    with np.errstate(over="ignore"):
        terms = b * b * np.exp(upper)
    bad = np.flatnonzero(~np.isfinite(terms))
    if bad.size:
        k = int(ks[bad[0]])
        return Certificate(False, rule, K, H, div, None, maj, witness=k,
                           reason=f"b_k^2 e^(I_k) overflows at k={k} (I_k <= {upper[bad[0]]:.6g})")
    log_tail = _log_tail_bound(rule, maj, K)
    if not math.isfinite(log_tail) or log_tail > 700:
        return Certificate(False, rule, K, H, div, None, maj, witness=K + 1,
                           reason=f"majorant {maj} not certified summable beyond K={K}")
    ssum = converges("b_k^2 e^(I_k)", K, fsum(terms), math.exp(log_tail),
                     f"k <= {K}: I_k upper values; k > {K}: I_k <= {maj.alpha:.6g} {maj.scale}(k) + "
                     f"{maj.beta:.6g}")
    return Certificate(True, rule, K, H, div, ssum, maj,
                       profile={"I_upper_last": float(upper[-1])})


# ---------------------------------------------------------------------------
# growth profiles


def growth_slope(spec: SystemSpec):
    """(coefficient, scale) of the leading growth claimed for I_k."""
    if spec.kind in (Kind.II_INF, Kind.III_0):
        return 1.0, "ln"
    if spec.kind is Kind.III_LAMBDA:
        return 2.0 * c_of_lambda(float(spec.params["lambda"])), "lnln"
    if spec.kind is Kind.III_1:
        return 2.0 * (c_of_lambda(float(spec.params["lambda1"])) + c_of_lambda(float(spec.params["lambda2"]))), "lnln"
    raise ValueError("no growth claim for custom specs")


def upper_expression(spec: SystemSpec, ks, horizon: int = DEFAULT_HORIZON) -> np.ndarray:
    """U_k = 2 sum_{n<=k} c_n nu_n + sum_{n>k} c_n nu_n / n, the majorant used for the growth claim."""
    a = block_data(spec, horizon)
    w = c_of_lambda(a["lam"]) * a["nu"]
    head = np.concatenate([[0.0], np.cumsum(2.0 * w)])
    tail = np.concatenate([np.cumsum((w / a["n"])[::-1])[::-1], [0.0]])
    ks = np.asarray(ks, dtype=np.int64)
    return head[ks] + tail[ks]


def growth_fit(values, ks, coef: float, scale: str) -> dict:
    """Fit d as mean(values - coef L(k)); report max |residual|."""
    ks = np.asarray(ks, dtype=np.float64)
    L = np.log(ks) if scale == "ln" else np.log(np.log(ks))
    shifted = np.asarray(values, dtype=np.float64) - coef * L
    d = float(shifted.mean())
    res = shifted - d
    # least-squares slope for the record
    A = np.vstack([L, np.ones_like(L)]).T
    slope = float(np.linalg.lstsq(A, np.asarray(values, dtype=np.float64), rcond=None)[0][0])
    return {"ks": ks.astype(int).tolist(), "values": list(map(float, values)), "coef": coef,
            "scale": scale, "d": d, "residuals": res.tolist(), "max_abs_residual": float(np.abs(res).max()),
            "fitted_slope": slope}
