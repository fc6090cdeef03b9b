"""Command-line front end.  Each subcommand parses, calls one core routine, prints JSON.

Exit codes: 0 pass, 1 verification failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from . import clifford, conformal, curvature, geodiff, jsonio, octonion, verify
from .numkit import DEFAULT_POLICY, TolerancePolicy, random_symmetric

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    seed: int
    policy: TolerancePolicy
    output: str | None


def _config(args) -> RunConfig:
    policy = DEFAULT_POLICY
    if getattr(args, "cluster_tol", None) is not None:
        policy = policy.with_cluster_tol(args.cluster_tol)
    return RunConfig(getattr(args, "seed", 0) or 0, policy, getattr(args, "output", None))


def _floats(text: str | None):
    if text is None:
        return None
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise UsageError(f"expected comma-separated numbers, got {text!r}") from exc


def _load(path, parser, what):
    data = jsonio.read(path)
    try:
        return parser(data)
    except (ValueError, TypeError) as exc:
        raise jsonio.SchemaError(f"{what}: {exc}") from exc


def _emit(obj, cfg: RunConfig, ok: bool = True) -> int:
    jsonio.write(obj, cfg.output)
    return EXIT_OK if ok else EXIT_FAIL


# -- handlers --------------------------------------------------------------


def cmd_radon(args) -> int:
    if args.n < 1:
        raise UsageError("n must be positive")
    print(clifford.radon_bound(args.n))
    return EXIT_OK


def cmd_cliff_gen(args) -> int:
    cfg = _config(args)
    sys_ = clifford.generate(args.n, args.nu, args.lambda0, _floats(args.eta), args.seed)
    return _emit(sys_, cfg)


def cmd_cliff_extend8(args) -> int:
    cfg = _config(args)
    sys_ = _load(args.input, clifford.CliffordSystem.from_dict, "Clifford system")
    ext = clifford.extend_to_seven(sys_, args.xi, np.random.default_rng(cfg.seed), cfg.policy)
    return _emit(ext, cfg)


def cmd_cliff_validate(args) -> int:
    cfg = _config(args)
    sys_ = _load(args.input, clifford.CliffordSystem.from_dict, "Clifford system")
    report = clifford.validate(sys_, cfg.policy)
    return _emit(report, cfg, report["pass"])


def _system_for(args, cfg) -> clifford.CliffordSystem:
    if args.input:
        return _load(args.input, clifford.CliffordSystem.from_dict, "Clifford system")
    if args.n is None or args.nu is None:
        raise UsageError("give -i SYSTEM.json or both --n and --nu")
    return clifford.generate(args.n, args.nu, args.lambda0, _floats(args.eta), args.seed)


def cmd_tensor_make(args) -> int:
    cfg = _config(args)
    kind = args.kind
    if kind == "constcurv":
        if args.n is None:
            raise UsageError("--n is required")
        R = curvature.constant_curvature(args.n, args.lambda0)
    elif kind == "model":
        if args.n is None or args.nu is None:
            raise UsageError("--n and --nu are required")
        R = curvature.model_tensor(args.nu, args.eps, args.n)
    elif kind == "clifford":
        R = curvature.from_clifford(_system_for(args, cfg))
    else:
        sys_ = _system_for(args, cfg)
        if args.rho:
            rho = _load(args.rho, lambda d: np.asarray(d, dtype=float).reshape(sys_.n, sys_.n), "rho")
        else:
            rho = random_symmetric(np.random.default_rng(cfg.seed), sys_.n)
        R = curvature.from_confcs(rho, sys_)
    return _emit(R, cfg)


def _tensor(args) -> curvature.CurvTensor:
    return _load(args.input, curvature.CurvTensor.from_dict, "curvature tensor")


def cmd_tensor_osserman(args) -> int:
    cfg = _config(args)
    R = _tensor(args)
    rep = curvature.osserman_check(R, args.samples, cfg.policy, cfg.seed)
    return _emit(rep, cfg, rep.is_osserman)


def cmd_tensor_weyl(args) -> int:
    cfg = _config(args)
    return _emit(curvature.weyl(_tensor(args)), cfg)


def cmd_oct_check(args) -> int:
    cfg = _config(args)
    rep = verify.octonion_suite(cfg.seed, args.trials)
    return _emit(rep, cfg, rep["pass"])


def cmd_oct_table(args) -> int:
    cfg = _config(args)
    return _emit({"basis": "e0=1, e_(2^k+m)=(0, e_m)", "table": octonion.signed_table()}, cfg)


CONFORMAL_TOLS = {
    "weyl_vs_model": verify.WEYL_TOL,
    "norm_constant_rel_error": verify.NORM_REL_TOL,
    "theta_identity": verify.THETA_TOL,
    "cov_deriv_antisymmetry": 1e-12,
    "gradient_consistency": 1e-12,
    "trace_k_identity": 1e-10,
    "ricci_k_pattern": 1e-10,
}


def cmd_conformal_verify(args) -> int:
    cfg = _config(args)
    try:
        curvature.model_system(args.nu, args.eps, args.n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    res = verify.conformal_block(args.nu, args.n, args.eps, cfg.seed)
    ok = all(res[k] < tol for k, tol in CONFORMAL_TOLS.items())
    res["pass"] = ok
    return _emit(res, cfg, ok)


def _chart(args) -> geodiff.MetricChart:
    name = args.chart
    if name.endswith(".json") or name == "-":
        return _load(name, geodiff.chart_from_spec, "chart")
    spec = {"name": name, "dim": args.dim}
    if name in ("cp", "ch"):
        spec["params"] = {"m": args.dim // 2}
    try:
        return geodiff.chart_from_spec(spec)
    except geodiff.ChartError as exc:
        raise UsageError(str(exc)) from exc


def cmd_chart_scan(args) -> int:
    cfg = _config(args)
    chart = _chart(args)
    rng = np.random.default_rng(cfg.seed)
    points = chart.sample_points(args.points, rng)
    homogeneous = chart.name in ("euclidean", "sphere", "cp", "ch")
    rep = geodiff.osserman_scan(chart, points, args.directions, geodiff.FDConfig(args.step),
                                cfg.policy, seed=cfg.seed, homogeneous=homogeneous)
    return _emit(rep, cfg)


def cmd_verify_all(args) -> int:
    cfg = _config(args)
    only = set(args.only.split(",")) if args.only else None
    if only and not only <= set(verify.SUITES):
        raise UsageError(f"unknown suite(s): {sorted(only - set(verify.SUITES))}")
    rep = verify.run_all(cfg.seed, cfg.policy, only)
    return _emit(rep, cfg, rep["pass"])


# -- parser ----------------------------------------------------------------


def _common(p, seed=True, output=True):
    if seed:
        p.add_argument("--seed", type=int, default=0)
    if output:
        p.add_argument("-o", "--output", default=None, help="output file (default stdout)")


def _system_args(p):
    p.add_argument("-i", "--input", default=None, help="Clifford system JSON")
    p.add_argument("--n", type=int)
    p.add_argument("--nu", type=int)
    p.add_argument("--lambda0", type=float, default=1.0)
    p.add_argument("--eta", help="comma-separated, one per generator")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="osserman-lab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("radon", help="Radon-Hurwitz bound of n")
    p.add_argument("n", type=int)
    p.set_defaults(func=cmd_radon)

    cliff = sub.add_parser("cliff").add_subparsers(dest="sub", required=True)
    p = cliff.add_parser("gen", help="generate a Clifford system")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--nu", type=int, required=True)
    p.add_argument("--lambda0", type=float, default=1.0)
    p.add_argument("--eta")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_cliff_gen)
    p = cliff.add_parser("extend8", help="complete a system on R^8 to seven generators")
    p.add_argument("-i", "--input", default="-")
    p.add_argument("--xi", type=float, required=True)
    _common(p)
    p.set_defaults(func=cmd_cliff_extend8)
    p = cliff.add_parser("validate")
    p.add_argument("-i", "--input", default="-")
    _common(p, seed=False)
    p.set_defaults(func=cmd_cliff_validate)

    tensor = sub.add_parser("tensor").add_subparsers(dest="sub", required=True)
    p = tensor.add_parser("make", help="build a curvature tensor")
    p.add_argument("--kind", choices=["clifford", "confcs", "model", "constcurv"], required=True)
    _system_args(p)
    p.add_argument("--eps", type=int, choices=[1, -1], default=1)
    p.add_argument("--rho", help="JSON file with an n x n symmetric matrix (confcs)")
    _common(p)
    p.set_defaults(func=cmd_tensor_make)
    p = tensor.add_parser("osserman", help="check the Osserman property")
    p.add_argument("-i", "--input", default="-")
    p.add_argument("--samples", type=int, default=200)
    p.add_argument("--cluster-tol", type=float, default=None)
    _common(p)
    p.set_defaults(func=cmd_tensor_osserman)
    p = tensor.add_parser("weyl", help="Weyl part of a tensor")
    p.add_argument("-i", "--input", default="-")
    _common(p, seed=False)
    p.set_defaults(func=cmd_tensor_weyl)

    octo = sub.add_parser("oct").add_subparsers(dest="sub", required=True)
    p = octo.add_parser("check", help="octonion identity suite")
    p.add_argument("--trials", type=int, default=verify.OCT_TRIALS)
    _common(p)
    p.set_defaults(func=cmd_oct_check)
    p = octo.add_parser("table", help="signed multiplication table")
    _common(p, seed=False)
    p.set_defaults(func=cmd_oct_table)

    conf = sub.add_parser("conformal").add_subparsers(dest="sub", required=True)
    p = conf.add_parser("verify", help="conformal identities for one model")
    p.add_argument("--nu", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--eps", type=int, choices=[1, -1], default=1)
    _common(p)
    p.set_defaults(func=cmd_conformal_verify)

    chart = sub.add_parser("chart").add_subparsers(dest="sub", required=True)
    p = chart.add_parser("scan", help="pointwise Osserman scan of a metric chart")
    p.add_argument("--chart", required=True, help="euclidean|sphere|cp|ch or a chart JSON file")
    p.add_argument("--dim", type=int, default=4)
    p.add_argument("--points", type=int, default=5)
    p.add_argument("--directions", type=int, default=20)
    p.add_argument("--step", type=float, default=1e-3)
    _common(p)
    p.set_defaults(func=cmd_chart_scan)

    ver = sub.add_parser("verify").add_subparsers(dest="sub", required=True)
    p = ver.add_parser("all", help="run every acceptance suite")
    p.add_argument("--only", help="comma-separated suite names")
    _common(p)
    p.set_defaults(func=cmd_verify_all)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, OSError, ValueError, clifford.ExtensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
