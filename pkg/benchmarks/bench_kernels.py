"""Time the numba kernels against the numpy reference on realistic inputs.

    python3 benchmarks/bench_kernels.py [--samples 100000] [--repeat 5]

Inputs come from the package itself (a III_lambda(0.5) configuration), so the
shapes match what the estimators feed the kernels.  Results are checked for
equality before timing.
"""

from __future__ import annotations

import argparse
import json
import time

import numpy as np

from poisson_krieger import build_type_iii_lambda
from poisson_krieger.kernels import _numba, _numpy
from poisson_krieger.simulation import sample_configuration
from poisson_krieger.simulation.cocycle import generator_table
from poisson_krieger.simulation.configuration import block_arrays, iter_tower_counts


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(samples: int):
    spec = build_type_iii_lambda(0.5, 64)
    N, R = 50, 5
    om = sample_configuration(spec, N, R, seed=1, samples=samples)
    values, gen, power = generator_table(spec, N)
    mask = np.zeros(N, dtype=np.bool_)
    g = np.array([3], dtype=np.int64)
    a = block_arrays(spec, N)
    counts = np.ascontiguousarray(next(iter_tower_counts(spec, N, 1, samples)))
    sides_big = np.arange(1, 10**6 + 1, dtype=np.int64) * 2
    return {
        "cocycle_exponents": (om.sample, om.block - 1, om.coords, a["side"], gen, power, mask, g,
                              om.n_samples, values.size),
        "log_rn_density": (counts, a["lam"] * a["nu"] - a["nu"], np.log(a["lam"])),
        "symdiff_ratio_terms": (sides_big, g),
        "flux_brackets": (sides_big, g),
    }


def main(argv=None) -> None:
    p = argparse.ArgumentParser()
    p.add_argument("--samples", type=int, default=100_000)
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)
    rows = []
    for name, inputs in cases(args.samples).items():
        f_np, f_nb = getattr(_numpy, name), getattr(_numba, name)
        t0 = time.perf_counter()
        r_nb = f_nb(*inputs)  # includes JIT compile or cache load
        first = time.perf_counter() - t0
        r_np = f_np(*inputs)
        pairs = zip(r_np, r_nb) if isinstance(r_np, tuple) else [(r_np, r_nb)]
        # row sums may differ in the last bits (summation order)
        same = all(np.allclose(x, y, rtol=0, atol=1e-12 * max(1.0, float(np.abs(x).max(initial=0))))
                   for x, y in pairs)
        t_np = best_of(lambda: f_np(*inputs), args.repeat)
        t_nb = best_of(lambda: f_nb(*inputs), args.repeat)
        rows.append({"kernel": name, "numpy_s": t_np, "numba_s": t_nb, "speedup": t_np / t_nb,
                     "numba_first_call_s": first, "results_match": bool(same)})
    w = max(len(r["kernel"]) for r in rows)
    print(f"{'kernel':<{w}}  {'numpy [s]':>10}  {'numba [s]':>10}  {'speedup':>8}  {'first call':>10}  match")
    for r in rows:
        print(f"{r['kernel']:<{w}}  {r['numpy_s']:>10.4f}  {r['numba_s']:>10.4f}  {r['speedup']:>8.1f}"
              f"  {r['numba_first_call_s']:>10.3f}  {r['results_match']}")
    print(json.dumps({"samples": args.samples, "rows": rows}))


if __name__ == "__main__":
    main()
