"""Render SVG figures and a markdown summary from the JSON outputs of a run.

Nothing is recomputed here: every plotted or printed number is read from
verify.json / simulate.json.
"""

from __future__ import annotations

import json
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

plt.rcParams["svg.hashsalt"] = "poisson-krieger"
plt.rcParams["svg.fonttype"] = "path"


class MissingInputs(FileNotFoundError):
    pass


def _save(fig, path: Path) -> None:
    fig.savefig(path, format="svg", metadata={"Date": None, "Creator": None})
    plt.close(fig)


def theta_figure(sk: dict, path: Path) -> None:
    law = sk["law"]
    lo, hi = law["support"]
    ks = list(range(lo, hi + 1))
    fig, ax = plt.subplots(figsize=(6, 3.6))
    ax.bar(ks, law["empirical"], width=0.8, alpha=0.5, label="empirical theta")
    ax.plot(ks, law["pmf"], "o-", color="black", ms=3, label=f"Skellam({law['mu1']:.4g}, {law['mu2']:.4g})")
    ax.set_xlabel("theta")
    ax.set_ylabel("probability")
    ax.set_title(f"TV distance {law['tv']:.2e} over {law['samples']} samples")
    ax.legend(fontsize=8)
    _save(fig, path)


def log_rn_figure(h: dict, path: Path) -> None:
    fig, ax = plt.subplots(figsize=(6, 3.6))
    ax.bar(h["values"], h["counts"], width=0.05, color="tab:blue")
    ax.set_yscale("log")
    for s in h.get("lattice_spacing", [])[:1]:
        lo, hi = min(h["values"]), max(h["values"])
        m0, m1 = int(lo // s) - 1, int(hi // s) + 1
        for m in range(m0, m1 + 1):
            ax.axvline(m * s, color="gray", lw=0.4, ls=":")
    ax.set_xlabel("log RN value")
    ax.set_ylabel("count")
    _save(fig, path)


def _fmt(x) -> str:
    return f"{x:.6g}" if isinstance(x, float) else str(x)


def summary(verify: dict | None, sim: dict | None) -> str:
    lines = ["# Run summary", ""]
    for rep in (verify, sim):
        if rep:
            lines.append(f"- spec `{json.dumps(rep['spec'], sort_keys=True)}` (digest `{rep['spec_digest'][:16]}`)")
            break
    if verify:
        c = verify["classification"]
        lines += ["", "## Verification", "",
                  f"- classify: **{c['label']}** (declared {verify['declared']}, status {verify['status']})",
                  f"- reason: {c['reason']}"]
        if "certificate" in verify:
            cert = verify["certificate"]
            lines.append(f"- conservativeness_certificate: passed={cert['passed']} b_rule={cert['b_rule']} "
                         f"K={cert['K']} witness={cert['witness']}")
        for key in ("hellinger_sum", "kakutani_series", "restricted_product_mass"):
            if key in verify:
                r = verify[key]
                lines.append(f"- {key}: {r['verdict']} partial={_fmt(r['partial_sum'])} "
                             f"tail<={_fmt(r['tail_upper'])} ({r['certificate']})")
        if "growth" in verify:
            g = verify["growth"]
            for part in ("exact", "upper_expression"):
                lines.append(f"- growth ({part}): d={_fmt(g[part]['d'])} "
                             f"max|residual|={_fmt(g[part]['max_abs_residual'])} "
                             f"fitted slope={_fmt(g[part]['fitted_slope'])} vs {_fmt(g[part]['coef'])}")
    if sim:
        t = sim["truncation"]
        lines += ["", "## Simulation", "",
                  f"- truncation error budget: mean omitted-block hits {_fmt(t['mean'])}, "
                  f"flag probability {_fmt(t['flag_probability'])}, observed {_fmt(t['observed_flag_fraction'])}"]
        for n, e in sim["rn_expectation"].items():
            lines.append(f"- RN expectation (N={n}): {_fmt(e['mean'])} +- {_fmt(e['se'])} (z={_fmt(e['z'])})")
        r = sim["ratio_set"]
        lines.append(f"- ratio set: {r['status']} {r['lattice']} lam_hat={r['lam_hat']} "
                     f"({r['n_nonzero']} nonzero of {r['n_values']})")
        if "conditioned_ratio_set" in sim:
            c = sim["conditioned_ratio_set"]
            lines.append(f"- conditioned on zero blocks {c['zero_blocks']}: divisor {c['divisor']}, "
                         f"divisibility_ok={c['divisibility_ok']}")
        if "skellam" in sim and "law" in sim["skellam"]:
            s = sim["skellam"]
            lines.append(f"- Skellam window n={s['window']['n']} m_n={s['window']['m_n']} "
                         f"alpha={_fmt(s['window']['alpha'])}: TV={_fmt(s['law']['tv'])}; "
                         f"TV against Skellam(alpha, lambda alpha)={_fmt(s['literal_parameters']['tv'])}")
            lines.append(f"- Delta_1 chain holds: {s['delta1']['chain_holds']}; "
                         f"pmf(1)={_fmt(s['delta1']['pmf1'])} > {_fmt(s['delta1']['lower_bound'])} > 1/16")
        lines.append(f"- all simulation checks passed: {sim['checks_passed']}")
    return "\n".join(lines) + "\n"


def cmd_report(run_dir: Path) -> list[Path]:
    vpath, spath = run_dir / "verify.json", run_dir / "simulate.json"
    verify = json.loads(vpath.read_text()) if vpath.exists() else None
    sim = json.loads(spath.read_text()) if spath.exists() else None
    if verify is None and sim is None:
        raise MissingInputs(f"{run_dir} has neither verify.json nor simulate.json")
    written = []
    if sim is not None:
        if "skellam" in sim and "law" in sim["skellam"]:
            theta_figure(sim["skellam"], run_dir / "theta.svg")
            written.append(run_dir / "theta.svg")
        log_rn_figure(sim["log_rn_histogram"], run_dir / "log_rn.svg")
        written.append(run_dir / "log_rn.svg")
    (run_dir / "summary.md").write_text(summary(verify, sim))
    written.append(run_dir / "summary.md")
    return written
