"""Krieger-type decision from series verdicts and the lattice of exponents.

Order: Kakutani convergence gives II_1; otherwise a convergent Hellinger sum
with divergent restricted mass gives II_inf; otherwise the values lambda_n are
inspected as integer powers of at most two generators.  Anything not settled
inside the horizon is UNDETERMINED.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from ..simulation.skellam import WindowError, delta1_mass_check, skellam_window
from ..systems import Kind, SystemSpec, rationally_dependent
from .certificate import DEFAULT_K, conservativeness_certificate
from .series import DEFAULT_HORIZON, block_data, hellinger_sum, kakutani_series, restricted_product_mass
from .verdicts import HorizonTooSmall, Verdict


class KriegerType(str, enum.Enum):
    II_1 = "II_1"
    II_INF = "II_INF"
    III_0 = "III_0"
    III_LAMBDA = "III_LAMBDA"
    III_1 = "III_1"
    UNDETERMINED = "UNDETERMINED"


DECLARED = {
    Kind.II_INF: KriegerType.II_INF,
    Kind.III_0: KriegerType.III_0,
    Kind.III_LAMBDA: KriegerType.III_LAMBDA,
    Kind.III_1: KriegerType.III_1,
}


@dataclass(frozen=True)
class TypeVerdict:
    krieger_type: KriegerType
    lam: float | None = None
    evidence: list = field(default_factory=list)
    reason: str = ""

    @property
    def label(self) -> str:
        if self.krieger_type is KriegerType.III_LAMBDA:
            return f"III_LAMBDA({self.lam:g})"
        return self.krieger_type.value

    def to_record(self) -> dict:
        return {"krieger_type": self.krieger_type.value, "label": self.label, "lambda": self.lam,
                "reason": self.reason, "evidence": list(self.evidence)}


def lattice_finding(spec: SystemSpec, horizon: int) -> dict:
    """Inspect lambda_n = generator^power over blocks <= horizon and name the candidate type."""
    a = block_data(spec, horizon)
    H = int(a["n"].size)
    used = a["power"] != 0
    gens = sorted(set(int(x) for x in a["gen"][used]))
    rec = {"kind": "lattice", "horizon": H, "generators": [spec.generators[g] for g in gens] if len(gens) <= 4 else
           f"{len(gens)} distinct"}
    if len(gens) == 1:
        pw = a["power"][used]
        distinct = [int(p) for p in dict.fromkeys(pw.tolist())]
        rec["powers"] = distinct[:16]
        if set(distinct) == {1, -1} and spec.kind is Kind.III_LAMBDA:
            return _iii_lambda(spec, H, rec)
        if min(distinct) > 0:
            return _iii_0(spec, a, distinct, rec)
    if len(gens) == 2 and spec.kind is Kind.III_1:
        return _iii_1(spec, H, rec)
    rec.update(candidate=None, reason="values do not form a recognised lattice pattern")
    return rec


def _windows_ok(spec, H, generator) -> tuple[bool, dict]:
    try:
        w = skellam_window(spec, 1, horizon=H, generator=generator)
    except WindowError as e:
        return False, {"window": None, "reason": str(e)}
    rep = delta1_mass_check(w.alpha, w.lam)
    return rep.passed, {"window": w.to_record(), "delta1": rep.to_record()}


def _iii_lambda(spec, H, rec):
    ok, info = _windows_ok(spec, H, 0)
    lam = float(spec.params["lambda"])
    rec.update(info, lattice=f"(log {lam:g}) Z")
    rec.update(candidate="III_LAMBDA" if ok else None,
               reason="single generator, exponents +-1, Skellam window and Delta_1 bound verified" if ok
               else "Skellam window not available inside the horizon")
    rec["lambda"] = lam
    return rec


def _iii_1(spec, H, rec):
    l1, l2 = float(spec.params["lambda1"]), float(spec.params["lambda2"])
    dep = rationally_dependent(math.log(l1), math.log(l2))
    oks = [_windows_ok(spec, H, g) for g in (0, 1)]
    rec["windows"] = [o[1] for o in oks]
    rec["rational_relation"] = dep
    ok = dep is None and all(o[0] for o in oks)
    rec.update(candidate="III_1" if ok else None,
               reason="two rationally independent generators, both windows verified" if ok
               else "independence or windows not established inside the horizon")
    return rec


def _iii_0(spec, a, distinct, rec):
    chain = all(b % p == 0 and b >= p for p, b in zip(distinct, distinct[1:]))
    lam_ok = bool(np.all(a["lam"] >= 1.0))
    mu_ok = bool(np.all(a["lam"] * a["nu"] <= 1.0))
    unbounded = spec.kind is Kind.III_0 and spec.schedule.unbounded
    transitions = len(distinct) - 1
    rec.update(divisibility_chain=chain, lambda_ge_1=lam_ok, mu_le_1=mu_ok,
               unbounded_schedule=unbounded, level_transitions=transitions)
    ok = chain and lam_ok and mu_ok and unbounded and transitions >= 1
    if ok:
        reason = "divisibility chain with unbounded levels: intersection of 2^(l_n Z) is {1}"
    elif not unbounded:
        reason = "levels do not grow without bound; the shrinking intersection is not established"
    elif transitions < 1:
        reason = "no level transition inside the horizon"
    else:
        reason = "divisibility or density bounds fail"
    rec.update(candidate="III_0" if ok else None, reason=reason)
    return rec


def classify(spec: SystemSpec, horizon: int = DEFAULT_HORIZON, certify: bool = True) -> TypeVerdict:
    ev: list = []
    try:
        if certify:
            cert = conservativeness_certificate(spec, horizon, K=min(DEFAULT_K, max(horizon, 2)))
            ev.append({"kind": "conservativeness", **cert.to_record()})
            if not cert.passed:
                return TypeVerdict(KriegerType.UNDETERMINED, evidence=ev,
                                   reason="conservativeness not certified: " + cert.reason)
        kak = kakutani_series(spec, horizon)
        ev.append(kak.to_record())
        if kak.verdict is Verdict.CONVERGES:
            return TypeVerdict(KriegerType.II_1, evidence=ev, reason="Kakutani series converges: mu* ~ nu*")
        hel = hellinger_sum(spec, horizon)
        mass = restricted_product_mass(spec, horizon)
        ev += [hel.to_record(), mass.to_record()]
        if hel.verdict is Verdict.CONVERGES and mass.verdict is Verdict.DIVERGES:
            return TypeVerdict(KriegerType.II_INF, evidence=ev,
                               reason="Hellinger sum converges and the restricted product is infinite")
        lat = lattice_finding(spec, horizon)
        ev.append(lat)
    except HorizonTooSmall as e:
        return TypeVerdict(KriegerType.UNDETERMINED, evidence=ev, reason=f"horizon too small: {e}")
    cand = lat.get("candidate")
    if cand is None:
        return TypeVerdict(KriegerType.UNDETERMINED, evidence=ev, reason=lat["reason"])
    return TypeVerdict(KriegerType(cand), lam=lat.get("lambda"), evidence=ev, reason=lat["reason"])
