"""RunConfig and canonical JSON handling for reports."""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import numpy as np


@dataclass
class RunConfig:
    spec: dict = field(default_factory=dict)
    horizon: int = 10**6
    K: int = 10**4
    chi_elements: int = 100
    samples: int = 10**5
    blocks: int = 50
    shell: int | None = None
    seed: int = 0
    elements: list = field(default_factory=lambda: list(range(1, 11)))
    condition_blocks: int = 3
    dump_samples: int = 200
    workers: int = 1
    out: str = "run"
    emit: list = field(default_factory=lambda: ["json", "csv", "svg"])

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "RunConfig":
        names = {f.name for f in fields(cls)}
        unknown = set(d) - names
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        return cls(**d)

    @classmethod
    def load(cls, path) -> "RunConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def radius(self, spec) -> int:
        if self.shell is not None:
            return int(self.shell)
        els = [spec.group.enumerate(int(k)) for k in self.elements]
        return max(max(abs(c) for c in e) for e in els)


def _clean(x):
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        x = float(x)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def canonical(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=1, ensure_ascii=True)


def content_hash(report: dict) -> str:
    """sha256 of the canonical report without its ``metadata`` section."""
    body = {k: v for k, v in report.items() if k != "metadata"}
    return hashlib.sha256(canonical(body).encode()).hexdigest()


def write_report(path, report: dict) -> str:
    h = content_hash(report)
    report = dict(report)
    report.setdefault("metadata", {})["content_hash"] = h
    Path(path).write_text(canonical(report) + "\n")
    return h
