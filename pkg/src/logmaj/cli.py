"""Command-line interface: ``logmaj <subcommand> [flags]``.

Matrix arguments are JSON matrix files (see :mod:`logmaj.io`); a file may
hold a list of matrices.  Reports go to stdout as JSON unless ``--format
csv`` is given for a tabular command, or to ``--out``.  Exit status is 0 on
success, 1 when a suite has failures or a command raises, 2 on usage
errors.
"""

from __future__ import annotations

import argparse
import csv
import io as _io
import json
import sys
from pathlib import Path

import numpy as np

from . import divergence as dv
from .expansion import (
    closed_form_coefficients,
    equality_case_check,
    lie_trotter_kato,
    taylor_recursion,
)
from .golden_thompson import (
    block_equality_triple,
    build_quadrature,
    gt_check,
    gt_log_majorization,
)
from .io import dumps, jsonable, read_matrices, write_matrices
from .linalg import expmh
from .majorization import (
    araki_pair,
    check_log_majorization,
    check_majorization,
    check_weak_majorization,
    extended_araki_norm_check,
    extended_araki,
    extended_araki_singular_values,
)
from .means import (
    geometric_mean_two,
    karcher_mean,
    log_euclidean_mean,
    power_mean,
)
from .suites import DEFAULT_SEED, DEFAULT_TOLS, SUITES, RunConfig, run_all, run_suite, write_suite


class UsageError(Exception):
    pass


def _matrices(paths) -> list:
    mats = []
    for p in paths:
        mats.extend(read_matrices(p))
    return mats


def _exactly(paths, n: int, what: str) -> list:
    mats = _matrices(paths)
    if len(mats) != n:
        raise UsageError(f"{what} needs {n} matrices, got {len(mats)}")
    return mats


def _vector(arg: str) -> np.ndarray:
    if arg.endswith(".json"):
        return np.asarray(json.loads(Path(arg).read_text()), dtype=float)
    return np.asarray([float(x) for x in arg.split(",") if x.strip()], dtype=float)


def _grid(arg: str) -> list:
    """``start:stop:num`` (inclusive, evenly spaced) or a comma list."""
    if ":" in arg:
        a, b, n = arg.split(":")
        return [float(x) for x in np.linspace(float(a), float(b), int(n))]
    return [float(x) for x in arg.split(",") if x.strip()]


def _weights(arg, n: int):
    if arg is None:
        return None
    text = Path(arg).read_text() if Path(arg).is_file() else arg
    w = json.loads(text)
    if len(w) != n:
        raise UsageError(f"expected {n} weights, got {len(w)}")
    return w


def _parse_tols(items) -> dict:
    out = {}
    for item in items or []:
        key, sep, val = item.partition("=")
        if not sep:
            raise UsageError(f"--tol expects KEY=VAL, got {item!r}")
        if key not in DEFAULT_TOLS:
            raise UsageError(f"unknown tolerance key {key!r}; known: {', '.join(DEFAULT_TOLS)}")
        try:
            v = float(val)
        except ValueError:
            raise UsageError(f"tolerance {key} is not a number: {val!r}") from None
        if not v > 0:
            raise UsageError(f"tolerance {key} must be positive")
        out[key] = v
    return out


def _tol(args, key: str) -> float:
    return args.tols.get(key, DEFAULT_TOLS[key])


def _emit(args, payload) -> None:
    text = dumps(payload, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_csv(args, header, rows) -> None:
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([jsonable(x) for x in row])
    if args.out:
        Path(args.out).write_text(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _spectral(res) -> dict:
    return {"lhs": res.lhs, "rhs": res.rhs, "report": res.report}


# -- subcommands -----------------------------------------------------------------

def cmd_majorize(args) -> int:
    if args.matrices:
        A, B = _exactly(args.a + args.b, 2, "majorize --matrices")
        from .linalg import eigvalsh, singular_values
        f = singular_values if args.values == "sv" else eigvalsh
        a, b = f(A), f(B)
    else:
        a, b = _vector(args.a[0]), _vector(args.b[0])
    tol = _tol(args, "log_tol")
    if args.kind == "log":
        rep = check_log_majorization(a, b, tol, _tol(args, "det_tol"))
    elif args.kind == "weak":
        rep = check_weak_majorization(a, b, tol)
    else:
        rep = check_majorization(a, b, tol)
    _emit(args, {"a": a, "b": b, "report": rep})
    return 0


def cmd_araki(args) -> int:
    A, B = _exactly(args.files, 2, "araki")
    res = araki_pair(A, B, args.p, _tol(args, "log_tol"), _tol(args, "det_tol"))
    _emit(args, {"p": args.p, **_spectral(res)})
    return 0


def cmd_araki_ext(args) -> int:
    A1, A2, B1, B2 = _exactly(args.files, 4, "araki-ext")
    tol = _tol(args, "log_tol")
    eig = extended_araki(A1, A2, B1, B2, args.theta, args.convention, tol, _tol(args, "det_tol"))
    sv = extended_araki_singular_values(A1, A2, B1, B2, args.theta, args.convention, tol)
    out = {"theta": args.theta, "convention": args.convention,
           "eigenvalues": _spectral(eig), "singular_values": _spectral(sv)}
    if args.r is not None:
        nc = extended_araki_norm_check(A1, A2, B1, B2, args.theta, args.r, args.norm,
                                       args.convention, _tol(args, "norm_tol"))
        out["norm_inequality"] = {"r": args.r, "norm": args.norm, "lhs": nc.lhs, "rhs": nc.rhs,
                                  "holds": nc.holds}
    _emit(args, out)
    return 0


def cmd_mean(args) -> int:
    As = _matrices(args.files)
    w = _weights(args.weights, len(As))
    record = {"kind": args.kind}
    if args.kind == "karcher":
        res = karcher_mean(As, w, tol=_tol(args, "karcher_tol"))
        M = res.mean
        record.update(residual=res.residual, iterations=res.iterations,
                      step_halvings=res.step_halvings, floor_limited=res.floor_limited)
    elif args.kind == "le":
        M = log_euclidean_mean(As, w)
    elif args.kind == "power":
        if args.t is None:
            raise UsageError("mean --kind power needs --t")
        M = power_mean(As, w, args.t)
        record["t"] = args.t
    else:
        if len(As) != 2 or args.alpha is None:
            raise UsageError("mean --kind geo2 needs two matrices and --alpha")
        M = geometric_mean_two(As[0], As[1], args.alpha)
        record["alpha"] = args.alpha
    if args.out:
        write_matrices(args.out, [M])
        record["mean_file"] = str(args.out)
    else:
        record["mean"] = {"dim": M.shape[0], "re": M.real, "im": M.imag}
    sys.stdout.write(dumps(record, indent=2) + "\n")
    return 0


def cmd_divergence(args) -> int:
    rho, sigma = _exactly(args.files, 2, "divergence")
    st = args.support_tol
    if args.scan is None:
        if args.alpha is None:
            raise UsageError("divergence needs --alpha (or --scan)")
        val = dv.d_alpha_z(rho, sigma, args.alpha, args.z, st)
        q = dv.q_alpha_z(rho, sigma, args.alpha, args.z, st) if args.alpha != 1 else None
        _emit(args, {"alpha": args.alpha, "z": args.z, "D": val, "Q": q})
        return 0
    mono = _tol(args, "mono_tol")
    if args.scan == "alpha":
        grid = _grid(args.grid or "0:3:41")
        res = dv.alpha_monotonicity_scan(rho, sigma, args.z, grid, mono, st)
    elif args.scan == "z":
        if args.alpha is None:
            raise UsageError("--scan z needs --alpha")
        grid = _grid(args.grid or "0.25,0.5,1,2,4")
        res = dv.z_monotonicity_scan(rho, sigma, args.alpha, grid, mono, st)
    else:
        grid = _grid(args.grid or "0:3:41")
        res = dv.line_scan(rho, sigma, args.kappa, args.z0, grid, mono, st)
    if args.format == "csv":
        _emit_csv(args, ["alpha", "z", "value", "finite"],
                  [(a, z, v if f else "+inf", f) for a, z, v, f in res.rows])
        verdict = {k: v for k, v in res.to_dict().items() if k != "rows"}
        sys.stderr.write(dumps(verdict) + "\n")
    else:
        _emit(args, res)
    return 0


EXAMPLE_H = [[1.0, 0.0], [0.0, 0.0]]
EXAMPLE_K = [[0.0, 1.0], [1.0, 0.0]]


def cmd_gt(args) -> int:
    extra = {}
    if args.example41:
        H, K = (np.array(EXAMPLE_H), np.array(EXAMPLE_K)) if not args.files else _exactly(
            args.files, 2, "gt --example41")
        tri = block_equality_triple(H, K)
        Hs = [tri.H1, tri.H2, tri.H3]
        extra["commutators"] = tri.commutators
    else:
        Hs = _matrices(args.files)
        if not Hs:
            raise UsageError("gt needs Hermitian matrix files or --example41")
    if args.theta:
        rep = gt_log_majorization([expmh(H) for H in Hs], args.theta, build_quadrature(args.theta, args.eps))
        _emit(args, {"theta": args.theta, "eps": args.eps, "report": rep, **extra})
        return 0
    quad = build_quadrature(0.0, args.eps)
    rep = gt_check(Hs, args.r, quad)
    if args.format == "csv":
        _emit_csv(args, ["t", "weight", "integrand"], zip(quad.nodes, quad.weights, rep.integrand))
        sys.stderr.write(dumps({**rep.to_dict(), **extra}) + "\n")
    else:
        _emit(args, {**rep.to_dict(), "quadrature": {"T": quad.T, "tail_bound": quad.tail_bound,
                                                     "mass": quad.mass}, **extra})
    return 0


def cmd_taylor(args) -> int:
    Hs = _matrices(args.files)
    w = _weights(args.weights, len(Hs))
    st = taylor_recursion(Hs, w, args.order)
    out = {"order": args.order, "X": st.X[1:], "Y": st.Y[1:], "trace_defects": st.trace_defects()}
    if args.order >= 4:
        X, Y = closed_form_coefficients(Hs, w)
        out["closed_form_deviation"] = max(float(np.max(np.abs(st.X[k + 1] - X[k]))) for k in range(4))
    _emit(args, out)
    return 0


def cmd_eqcase(args) -> int:
    As = _matrices(args.files)
    w = _weights(args.weights, len(As))
    rep = equality_case_check(As, w, args.norm, args.t, _tol(args, "eq_tol"),
                              tol=_tol(args, "karcher_tol"))
    _emit(args, rep)
    return 0


def cmd_ltk(args) -> int:
    A, B = _exactly(args.files, 2, "ltk")
    ts = _grid(args.t_grid) if args.t_grid else [2.0**-k for k in range(1, 9)]
    res = lie_trotter_kato(A, B, ts)
    if args.format == "csv":
        _emit_csv(args, ["t", "error"], res.rows)
    else:
        _emit(args, {**res.to_dict(), "target": res.target, "limit_estimate": res.limit_estimate})
    return 0


def cmd_run(args) -> int:
    if args.suite != "all" and args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}, all")
    cfg = RunConfig.from_env(seed=args.seed).with_tols(**args.tols)
    out_dir = Path(args.out or "logmaj-reports")
    if args.suite == "all":
        results = run_all(cfg, out_dir)
    else:
        results = [run_suite(args.suite, cfg)]
        write_suite(results[0], out_dir)
    for r in results:
        sys.stdout.write(dumps(r.summary) + "\n")
    return 0 if all(r.ok for r in results) else 1


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=DEFAULT_SEED)
    common.add_argument("--tol", action="append", metavar="KEY=VAL", default=[],
                        help="override a tolerance (repeatable)")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    p = argparse.ArgumentParser(prog="logmaj", description="Log-majorization and matrix-mean checks.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("majorize", parents=[common], help="compare two vectors or spectra")
    s.add_argument("a", nargs=1, help="comma list, JSON array file, or matrix file with --matrices")
    s.add_argument("b", nargs=1)
    s.add_argument("--kind", choices=("log", "weak", "additive"), default="log")
    s.add_argument("--matrices", action="store_true", help="arguments are matrix files")
    s.add_argument("--values", choices=("eig", "sv"), default="eig")
    s.set_defaults(func=cmd_majorize)

    s = sub.add_parser("araki", parents=[common], help="A^{p/2}B^pA^{p/2} against (A^{1/2}BA^{1/2})^p")
    s.add_argument("files", nargs="+")
    s.add_argument("--p", type=float, default=0.5)
    s.set_defaults(func=cmd_araki)

    s = sub.add_parser("araki-ext", parents=[common], help="two commuting pairs A1,A2 / B1,B2")
    s.add_argument("files", nargs="+")
    s.add_argument("--theta", type=float, default=0.5)
    s.add_argument("--convention", choices=("identity", "support"), default="identity")
    s.add_argument("--r", type=float, help="also check the norm inequality with this exponent")
    s.add_argument("--norm", default="trace")
    s.set_defaults(func=cmd_araki_ext)

    s = sub.add_parser("mean", parents=[common], help="matrix means")
    s.add_argument("files", nargs="+")
    s.add_argument("--kind", choices=("karcher", "le", "power", "geo2"), default="karcher")
    s.add_argument("--weights", help="JSON array or file holding one")
    s.add_argument("--t", type=float)
    s.add_argument("--alpha", type=float)
    s.set_defaults(func=cmd_mean)

    s = sub.add_parser("divergence", parents=[common], help="alpha-z Renyi divergences and scans")
    s.add_argument("files", nargs="+", help="rho and sigma")
    s.add_argument("--alpha", type=float)
    s.add_argument("--z", type=float, default=1.0)
    s.add_argument("--scan", choices=("alpha", "z", "line"))
    s.add_argument("--kappa", type=float, default=1.0)
    s.add_argument("--z0", type=float, default=0.0)
    s.add_argument("--grid", help="start:stop:num or comma list")
    s.add_argument("--support-tol", type=float, default=dv.SUPPORT_TOL)
    s.set_defaults(func=cmd_divergence)

    s = sub.add_parser("gt", parents=[common], help="multivariate Golden-Thompson")
    s.add_argument("files", nargs="*", help="Hermitian matrices H_1..H_n")
    s.add_argument("--r", type=float, default=1.0)
    s.add_argument("--theta", type=float, default=0.0,
                   help="theta in (0,1] selects the log-majorization form")
    s.add_argument("--eps", type=float, default=1e-8, help="quadrature tail mass")
    s.add_argument("--example41", action="store_true",
                   help="use the block triple (H+H, -H+-K, K+K) built from H, K")
    s.set_defaults(func=cmd_gt)

    s = sub.add_parser("taylor", parents=[common], help="Taylor coefficients of t -> G(e^{tH_j})")
    s.add_argument("files", nargs="+")
    s.add_argument("--weights")
    s.add_argument("--order", type=int, default=4)
    s.set_defaults(func=cmd_taylor)

    s = sub.add_parser("eqcase", parents=[common], help="equality conditions for Karcher vs Log-Euclidean")
    s.add_argument("files", nargs="+")
    s.add_argument("--weights")
    s.add_argument("--norm", default="trace")
    s.add_argument("--t", type=float, default=1.0)
    s.set_defaults(func=cmd_eqcase)

    s = sub.add_parser("ltk", parents=[common], help="Lie-Trotter-Kato errors for PSD A, B")
    s.add_argument("files", nargs="+")
    s.add_argument("--t-grid", help="start:stop:num or comma list")
    s.set_defaults(func=cmd_ltk)

    s = sub.add_parser("run", parents=[common], help="run a property suite")
    s.add_argument("suite", help=f"one of {', '.join(SUITES)}, all")
    s.set_defaults(func=cmd_run)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.tols = _parse_tols(args.tol)
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"logmaj: error: {exc}\n")
        return 2
    except Exception as exc:
        sys.stderr.write(f"logmaj: {type(exc).__name__}: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
