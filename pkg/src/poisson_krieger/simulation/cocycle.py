"""Radon-Nikodym densities and the suspension cocycle as integer exponent vectors."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .. import kernels
from ..systems import Kind, SystemSpec
from .configuration import PointConfiguration, ShellRadiusError, block_arrays


def rn_block_density(spec: SystemSpec, n: int, k: int) -> float:
    """d nu_n*/d mu_n* at a configuration with k points in A_n: e^{mu-nu} lambda^{-k}."""
    if k < 0:
        raise ValueError("tower count must be >= 0")
    b = spec.block(n)
    return math.exp(b.mu_tower - b.nu_tower - k * math.log(b.lam))


def generator_table(spec: SystemSpec, N: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(generator values, per-block generator index, per-block power) for blocks <= N."""
    a = block_arrays(spec, N)
    if spec.kind in (Kind.II_INF, Kind.CUSTOM):
        values = a["lam"].copy()
    else:
        values = np.asarray(spec.generators, dtype=np.float64)
    return values, a["gen"], a["power"]


@dataclass(frozen=True, eq=False)
class CocycleSample:
    """Exponents of d mu* o g / d mu* per sample: value = prod generators^exponents."""

    element: tuple[int, ...]
    generators: np.ndarray
    exponents: np.ndarray  # (samples, generators), int64
    truncation_valid: np.ndarray
    entered_masked: np.ndarray  # points moved into an emptied tower

    @property
    def log_value(self) -> np.ndarray:
        return self.exponents @ np.log(self.generators)

    def write_csv(self, path, append: bool = False) -> None:
        mode = "a" if append else "w"
        with open(path, mode, newline="") as fh:
            w = csv.writer(fh)
            if not append:
                w.writerow(["sample_id", "element", "exponents", "log_value", "truncation_valid"])
            el = " ".join(map(str, self.element))
            for s, (row, lv, ok) in enumerate(zip(self.exponents.tolist(), self.log_value.tolist(),
                                                  self.truncation_valid.tolist())):
                w.writerow([s, el, " ".join(map(str, row)), repr(lv), int(ok)])


def rn_cocycle(spec: SystemSpec, g, omega: PointConfiguration) -> CocycleSample:
    """Per block: points entering A_n under g minus points leaving it, times the block's power."""
    g = np.asarray(g, dtype=np.int64).reshape(-1)
    if g.size != omega.rank:
        raise ValueError("element rank does not match the configuration")
    disp = int(np.max(np.abs(g))) if g.size else 0
    if disp > omega.radius:
        raise ShellRadiusError(f"|g| = {disp} exceeds shell radius {omega.radius}")
    values, gen, power = generator_table(spec, omega.N)
    sides = block_arrays(spec, omega.N)["side"]
    mask = np.zeros(omega.N, dtype=np.bool_)
    for z in omega.zero_blocks:
        mask[z - 1] = True
    exps, entered = kernels.cocycle_exponents(
        omega.sample, omega.block - 1, omega.coords, sides, gen, power, mask, g,
        omega.n_samples, values.size)
    return CocycleSample(tuple(int(c) for c in g), values, exps, omega.truncation_valid.copy(), entered)
