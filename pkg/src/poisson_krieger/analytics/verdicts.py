from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field


class Verdict(str, enum.Enum):
    CONVERGES = "CONVERGES"
    DIVERGES = "DIVERGES"


class HorizonTooSmall(ValueError):
    """The horizon is too short for the available tail bound; no verdict is guessed."""


def _num(x: float):
    # JSON has no infinities
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass(frozen=True)
class SeriesVerdict:
    """Partial sum over blocks 1..horizon with a certified tail interval.

    For DIVERGES, ``minorant`` is an analytic lower bound on the partial sum at
    this horizon, taken from a minorant that is unbounded in the horizon.
    """

    series_id: str
    horizon: int
    partial_sum: float
    tail_lower: float
    tail_upper: float
    verdict: Verdict
    certificate: str
    minorant: float | None = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.verdict is Verdict.CONVERGES and not math.isfinite(self.tail_upper):
            raise ValueError("a convergent verdict needs a finite tail bound")
        if self.verdict is Verdict.DIVERGES and self.tail_lower != math.inf:
            raise ValueError("a divergent verdict has an infinite tail")

    @property
    def lower(self) -> float:
        return self.partial_sum + self.tail_lower

    @property
    def upper(self) -> float:
        return self.partial_sum + self.tail_upper

    def to_record(self) -> dict:
        rec = {
            "series_id": self.series_id,
            "horizon": self.horizon,
            "partial_sum": self.partial_sum,
            "tail_lower": _num(self.tail_lower),
            "tail_upper": _num(self.tail_upper),
            "verdict": self.verdict.value,
            "certificate": self.certificate,
        }
        if self.minorant is not None:
            rec["minorant"] = self.minorant
        if self.extra:
            rec["extra"] = {k: _num(v) for k, v in self.extra.items()}
        return rec


def converges(series_id, horizon, partial, tail_hi, cert, tail_lo=0.0, **extra) -> SeriesVerdict:
    return SeriesVerdict(series_id, horizon, partial, tail_lo, tail_hi, Verdict.CONVERGES, cert, extra=extra)


def diverges(series_id, horizon, partial, minorant, cert, **extra) -> SeriesVerdict:
    return SeriesVerdict(series_id, horizon, partial, math.inf, math.inf, Verdict.DIVERGES, cert,
                         minorant=minorant, extra=extra)
