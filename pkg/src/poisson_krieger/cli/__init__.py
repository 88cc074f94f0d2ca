"""Command line: construct | verify | simulate | report | run.

Exit codes: 0 verified as declared, 1 error or failed check, 2 UNDETERMINED.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from ..systems import (
    LSchedule, SpecError, SystemSpec, build_custom, build_type_ii_inf, build_type_iii0,
    build_type_iii1, build_type_iii_lambda,
)
from .commands import (
    EXIT_ERROR, EXIT_OK, EXIT_UNDETERMINED, cmd_construct, simulate_report, verify_report, write,
)
from .report import MissingInputs, cmd_report
from .runconfig import RunConfig


def _int_list(s: str) -> list[int]:
    return [int(x) for x in s.split(",") if x.strip()]


def _float_list(s: str) -> list[float]:
    return [float(x) for x in s.split(",") if x.strip()]


def spec_from_args(a) -> SystemSpec:
    rank, n = a.rank, a.blocks
    if a.kind == "ii-inf":
        return build_type_ii_inf(n, rank)
    if a.kind == "iii-0":
        sch = LSchedule("explicit", tuple(_int_list(a.levels)), tuple(_int_list(a.starts))) if a.levels else None
        return build_type_iii0(n, sch, rank)
    if a.kind == "iii-lambda":
        if a.lam is None:
            raise SpecError("--lambda is required for iii-lambda")
        return build_type_iii_lambda(a.lam, n, rank)
    if a.kind == "iii-1":
        if a.lambda1 is None or a.lambda2 is None:
            raise SpecError("--lambda1 and --lambda2 are required for iii-1")
        return build_type_iii1(a.lambda1, a.lambda2, n, rank)
    if a.kind == "custom":
        return build_custom(_float_list(a.lambdas or ""), _float_list(a.nus or ""), rank)
    raise SpecError(f"unknown kind {a.kind!r}")


def _config(a) -> RunConfig:
    cfg = RunConfig.load(a.config) if getattr(a, "config", None) else RunConfig()
    for flag, name in (("horizon", "horizon"), ("samples", "samples"), ("shell", "shell"), ("seed", "seed"),
                       ("sim_blocks", "blocks"), ("workers", "workers"), ("out", "out"),
                       ("dump_samples", "dump_samples"), ("K", "K")):
        v = getattr(a, flag, None)
        if v is not None:
            setattr(cfg, name, v)
    if getattr(a, "elements", None):
        cfg.elements = _int_list(a.elements)
    if getattr(a, "no_svg", False):
        cfg.emit = [e for e in cfg.emit if e != "svg"]
    return cfg


def _load_spec(path: str) -> SystemSpec:
    return SystemSpec.from_json(Path(path).read_text())


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="poisson-krieger", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="cmd", required=True)

    def common(sp, sim=False):
        sp.add_argument("--config", help="RunConfig JSON; flags override its fields")
        sp.add_argument("--out", help="output directory")
        sp.add_argument("--horizon", type=int, help="series horizon (blocks)")
        sp.add_argument("--K", type=int, help="exact-I_k range of the conservativeness certificate")
        if sim:
            sp.add_argument("--seed", type=int, help="64-bit unsigned seed")
            sp.add_argument("--samples", type=int)
            sp.add_argument("--shell", type=int, help="shell radius R (default: max displacement)")
            sp.add_argument("--elements", help="enumeration indices, e.g. 1,2,3")
            sp.add_argument("--sim-blocks", dest="sim_blocks", type=int, help="simulated blocks N")
            sp.add_argument("--workers", type=int)
            sp.add_argument("--dump-samples", dest="dump_samples", type=int)
            sp.add_argument("--no-svg", dest="no_svg", action="store_true")

    def spec_args(sp):
        sp.add_argument("--kind", required=True, choices=["ii-inf", "iii-0", "iii-lambda", "iii-1", "custom"])
        sp.add_argument("--lambda", dest="lam", type=float)
        sp.add_argument("--lambda1", type=float)
        sp.add_argument("--lambda2", type=float)
        sp.add_argument("--blocks", type=int, default=64, help="number of blocks to construct")
        sp.add_argument("--rank", type=int, default=1)
        sp.add_argument("--levels", help="explicit III_0 levels, e.g. 1,2,4")
        sp.add_argument("--starts", help="explicit III_0 segment starts, e.g. 1,3,5")
        sp.add_argument("--lambdas", help="custom: comma separated lambda_n")
        sp.add_argument("--nus", help="custom: comma separated nu(A_n)")

    c = sub.add_parser("construct", help="write a canonical spec JSON")
    spec_args(c)
    c.add_argument("--out", default=".")
    v = sub.add_parser("verify", help="analytic verification and classification")
    v.add_argument("spec")
    common(v)
    s = sub.add_parser("simulate", help="Monte Carlo checks")
    s.add_argument("spec")
    common(s, sim=True)
    r = sub.add_parser("report", help="render SVG and markdown from a run directory")
    r.add_argument("run_dir")
    f = sub.add_parser("run", help="construct, verify, simulate and report in one directory")
    spec_args(f)
    common(f, sim=True)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "construct":
            code, msg = cmd_construct(spec_from_args(args), Path(args.out))
            print(msg)
            return code
        if args.cmd == "report":
            for pth in cmd_report(Path(args.run_dir)):
                print(f"wrote {pth}")
            return EXIT_OK
        cfg = _config(args)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        if args.cmd == "run":
            spec = spec_from_args(args)
            cmd_construct(spec, out)
        else:
            spec = _load_spec(args.spec)
        cfg.spec = spec.to_dict()
        (out / "run_config.json").write_text(json.dumps(cfg.to_dict(), sort_keys=True, indent=1) + "\n")
        codes = []
        if args.cmd in ("verify", "run"):
            code, rep = verify_report(spec, cfg)
            h = write(out, "verify.json", rep)
            print(f"verify: {rep['classification']['label']} ({rep['status']}) hash {h[:16]}")
            codes.append(code)
        if args.cmd in ("simulate", "run"):
            code, rep = simulate_report(spec, cfg, out)
            h = write(out, "simulate.json", rep)
            print(f"simulate: checks_passed={rep['checks_passed']} hash {h[:16]}")
            codes.append(code)
        if args.cmd == "run" and "svg" in cfg.emit:
            cmd_report(out)
        if EXIT_ERROR in codes:
            return EXIT_ERROR
        return EXIT_UNDETERMINED if EXIT_UNDETERMINED in codes else EXIT_OK
    except (SpecError, MissingInputs, FileNotFoundError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
