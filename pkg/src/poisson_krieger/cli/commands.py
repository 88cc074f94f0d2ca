"""construct / verify / simulate: each returns (exit code, report dict)."""

from __future__ import annotations

import math
import platform
import time
from pathlib import Path

import numpy as np

from .. import __version__, kernels
from ..analytics import (
    DECLARED, HorizonTooSmall, KriegerType, chi, classify, companion_series,
    conservativeness_certificate, growth_fit, growth_slope, hellinger_sum, kakutani_series,
    l1_displacement_series, quadratic_integral, quadratic_profile, restricted_product_mass,
    upper_expression,
)
from ..systems import Kind, SystemSpec
from ..simulation import (
    WindowError, delta1_mass_check, estimate_rn_expectation, ratio_set_estimate, rn_cocycle,
    sample_configuration, sample_theta, skellam_window, tv_distance,
)
from ..simulation.estimators import collect_exponents
from .runconfig import RunConfig, write_report

EXIT_OK, EXIT_ERROR, EXIT_UNDETERMINED = 0, 1, 2
SKELLAM_SAMPLES = 10**6  # the 5e-3 TV threshold is calibrated at this size
SKELLAM_TV = 5e-3


def _metadata(started: float) -> dict:
    return {"started_unix": started, "wall_seconds": time.time() - started,
            "python": platform.python_version(), "package_version": __version__,
            "kernel_backend": kernels.BACKEND}


def block_table(spec: SystemSpec, rows: int = 8) -> str:
    lines = [f"{'n':>4}  {'lambda_n':>22}  {'nu(A_n)':>22}  {'#F_n':>10}"]
    for n in range(1, min(rows, spec.n_blocks) + 1):
        b = spec.block(n)
        lines.append(f"{n:>4}  {b.lam:>22.16g}  {b.nu_tower:>22.16g}  {b.cardinality:>10d}")
    return "\n".join(lines)


def cmd_construct(spec: SystemSpec, out: Path) -> tuple[int, str]:
    out.mkdir(parents=True, exist_ok=True)
    path = out / "spec.json"
    path.write_text(spec.to_json() + "\n")
    return EXIT_OK, f"wrote {path} (sha256 {spec.digest()[:16]})\n{block_table(spec)}"


# ---------------------------------------------------------------------------
# verify


def verify_report(spec: SystemSpec, cfg: RunConfig) -> tuple[int, dict]:
    started = time.time()
    H = cfg.horizon
    rep: dict = {"command": "verify", "spec": spec.to_dict(), "spec_digest": spec.digest(),
                 "config": {"horizon": H, "K": cfg.K, "elements": cfg.elements,
                            "chi_elements": cfg.chi_elements}}
    fol = spec.group.validate_folner(min(H, 10**4))
    rep["folner"] = {"op": "validate_folner", "horizon": fol.horizon, "passed": fol.passed,
                     "worst_ratio": str(fol.worst_ratio), "witness": list(fol.witness)}
    series = []
    try:
        for k in cfg.elements:
            for fn in (l1_displacement_series, companion_series, quadratic_integral):
                rec = fn(spec, int(k), H).to_record()
                rec["op"] = fn.__name__
                series.append(rec)
        rep["series"] = series
        chi_h = min(H, 10**4) if not spec.finite else spec.n_blocks
        rep["chi"] = {"op": "chi", "horizon": chi_h,
                      "values": {str(k): chi(spec, k, chi_h, check=False) for k in range(1, cfg.chi_elements + 1)}}
        cert = conservativeness_certificate(spec, H, K=cfg.K)
        rep["certificate"] = {"op": "conservativeness_certificate", **cert.to_record()}
        if spec.kind is not Kind.CUSTOM:
            coef, scale = growth_slope(spec)
            ks = [k for k in (10**2, 10**3, 10**4) if k <= H]
            if len(ks) >= 2:
                rep["growth"] = {
                    "op": "quadratic_profile",
                    "exact": growth_fit(quadratic_profile(spec, ks, H), ks, coef, scale),
                    "upper_expression": growth_fit(upper_expression(spec, ks, H), ks, coef, scale),
                }
        for fn in (hellinger_sum, kakutani_series, restricted_product_mass):
            rec = fn(spec, H).to_record()
            rec["op"] = fn.__name__
            rep[fn.__name__] = rec
    except HorizonTooSmall as e:
        rep["horizon_error"] = str(e)
    tv = classify(spec, H)
    rep["classification"] = {"op": "classify", **tv.to_record()}
    declared = DECLARED.get(spec.kind)
    rep["declared"] = None if declared is None else declared.value
    if tv.krieger_type is KriegerType.UNDETERMINED:
        status, code = "undetermined", EXIT_UNDETERMINED
    elif declared is None or tv.krieger_type is declared:
        status, code = "verified", EXIT_OK
    else:
        status, code = "mismatch", EXIT_ERROR
    rep["status"] = status
    rep["metadata"] = _metadata(started)
    return code, rep


# ---------------------------------------------------------------------------
# simulate


def _log_rn_histogram(spec, omega, elements, gens_limit=2):
    ex, gens, invalid, _ = collect_exponents(spec, omega, elements, conditioned=False)
    logs = ex @ np.log(gens)
    vals, cnt = np.unique(np.round(logs, 12), return_counts=True)
    rec = {"op": "rn_cocycle", "values": vals.tolist(), "counts": cnt.tolist(), "invalid": invalid}
    if gens.size <= gens_limit:
        rec["generators"] = gens.tolist()
        rec["lattice_spacing"] = [abs(math.log(float(g))) for g in gens]
    return rec


def simulate_report(spec: SystemSpec, cfg: RunConfig, out: Path | None = None) -> tuple[int, dict]:
    started = time.time()
    N = cfg.blocks if not spec.finite else min(cfg.blocks, spec.n_blocks)
    R = cfg.radius(spec)
    rep: dict = {"command": "simulate", "spec": spec.to_dict(), "spec_digest": spec.digest(),
                 "config": {"samples": cfg.samples, "blocks": N, "shell": R, "seed": cfg.seed,
                            "elements": cfg.elements, "workers_independent": True}}
    ok = True
    samples = max(cfg.samples, 10**3)
    rn = estimate_rn_expectation(spec, N, samples, cfg.seed, checkpoints=sorted({1, N}))
    rep["rn_expectation"] = {str(k): {"op": "estimate_rn_expectation", **v.to_record()} for k, v in rn.items()}
    ok &= all(v.within_4se for v in rn.values())

    omega = sample_configuration(spec, N, R, cfg.seed, cfg.samples, cfg.workers)
    flagged = float(1.0 - omega.truncation_valid.mean())
    rep["truncation"] = {"op": "truncation_budget", **omega.budget, "observed_flag_fraction": flagged,
                         "blocks": N, "radius": R}
    rep["log_rn_histogram"] = _log_rn_histogram(spec, omega, [spec.group.enumerate(int(k)) for k in cfg.elements])

    finding = ratio_set_estimate(spec, cfg.elements, cfg.samples, cfg.seed, N, R, workers=cfg.workers)
    rep["ratio_set"] = {"op": "ratio_set_estimate", **finding.to_record()}
    code = EXIT_OK
    if finding.status == "UNDETERMINED":
        code = EXIT_UNDETERMINED
    if spec.kind is Kind.III_LAMBDA:
        ok &= finding.status == "LATTICE" and finding.gcd == 1
    if spec.kind is Kind.III_1:
        ok &= finding.status == "DENSE"
    if spec.kind is Kind.III_0 and cfg.condition_blocks + 1 <= N:
        zb = tuple(range(1, cfg.condition_blocks + 1))
        cond = ratio_set_estimate(spec, cfg.elements, cfg.samples, cfg.seed, N, R, zero_blocks=zb,
                                  workers=cfg.workers)
        rep["conditioned_ratio_set"] = {"op": "ratio_set_estimate", "zero_blocks": list(zb), **cond.to_record()}
        ok &= cond.divisibility_ok is not False

    if spec.kind is Kind.III_LAMBDA:
        try:
            w = skellam_window(spec, 1)
            theta = sample_theta(spec, w, max(samples, SKELLAM_SAMPLES), cfg.seed)
            law = tv_distance(theta, w.alpha, w.mu_minus)
            literal = tv_distance(theta, w.alpha, w.lam * w.alpha)
            d1 = delta1_mass_check(w.alpha, w.lam)
            rep["skellam"] = {
                "op": "skellam_window/theta_statistic", "window": w.to_record(),
                "theta_mean": float(theta.mean()), "theta_var": float(theta.var(ddof=1)),
                "law": law, "literal_parameters": {k: literal[k] for k in ("tv", "mu1", "mu2")},
                "delta1": d1.to_record(),
            }
            rep["skellam"]["tv_threshold"] = SKELLAM_TV
            ok &= law["tv"] < SKELLAM_TV and d1.passed
        except WindowError as e:
            rep["skellam"] = {"error": str(e)}
            code = EXIT_UNDETERMINED

    if out is not None and "csv" in cfg.emit and cfg.dump_samples > 0:
        head = sample_configuration(spec, N, R, cfg.seed, min(cfg.dump_samples, cfg.samples))
        head.write_csv(out / "samples.csv")
        for i, k in enumerate(cfg.elements):
            rn_cocycle(spec, spec.group.enumerate(int(k)), head).write_csv(out / "cocycles.csv", append=i > 0)
    rep["checks_passed"] = bool(ok)
    rep["metadata"] = _metadata(started)
    if not ok and code == EXIT_OK:
        code = EXIT_ERROR
    return code, rep


def write(out: Path, name: str, rep: dict) -> str:
    out.mkdir(parents=True, exist_ok=True)
    return write_report(out / name, rep)
