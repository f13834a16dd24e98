"""Command line entry point ``symten``.

Subcommands: ``verify``, ``ck``, ``decompose``, ``kinetic``, ``coeffs``.
Reports are JSON documents ``{config, checks, summary, result}``.

Exit codes: 0 all checks pass, 2 a check failed, 3 usage or configuration
error, 4 input/output error.
"""

from __future__ import annotations

import argparse
import inspect
import json
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import _threads
from .suites import RUNTIME_LIMITS, SUITES, Check, run_suite

EXIT_OK = 0
EXIT_CHECK_FAILED = 2
EXIT_USAGE = 3
EXIT_IO = 4


class UsageError(Exception):
    """Bad flags, config keys or values."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------------
# config files


def read_config(path) -> dict[str, str]:
    """Flat ``key = value`` lines; ``#`` starts a comment."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc.strerror or exc}") from exc
    out = {}
    for k, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{k}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        if not key:
            raise UsageError(f"{path}:{k}: empty key")
        out[key.replace("-", "_")] = val
    return out


def _apply_config(sub: argparse.ArgumentParser, cfg: dict[str, str]):
    actions = {a.dest: a for a in sub._actions if a.dest not in ("help", "config", "command")}
    defaults = {}
    for key, raw in cfg.items():
        act = actions.get(key)
        if act is None:
            raise UsageError(f"unknown config key {key!r}")
        if isinstance(act, argparse._StoreTrueAction):
            if raw.lower() not in ("true", "false", "1", "0", "yes", "no"):
                raise UsageError(f"config key {key!r} expects a boolean")
            val = raw.lower() in ("true", "1", "yes")
        else:
            try:
                val = act.type(raw) if act.type is not None else raw
            except (TypeError, ValueError):
                raise UsageError(f"config key {key!r}: bad value {raw!r}") from None
            if act.choices is not None and val not in act.choices:
                raise UsageError(f"config key {key!r}: {val!r} not in {sorted(act.choices)}")
        defaults[key] = val
    sub.set_defaults(**defaults)


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="output path (default: stdout)")
    p.add_argument("--no-timestamp", action="store_true", help="omit wall-clock fields for byte-stable reports")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    parser = _Parser(prog="symten", description="Symmetric tensor field checks and solvers.")
    subs = parser.add_subparsers(dest="command", parser_class=_Parser)
    sp = {}

    p = sp["verify"] = subs.add_parser("verify", help="run invariant suites")
    _common(p)
    p.add_argument("--suite", default="all", choices=sorted(SUITES) + ["all"])
    p.add_argument("--m-max", type=int, help="largest rank for suites that take one")
    p.add_argument("--tol", type=float, help="tolerance override for suites that take one")

    p = sp["ck"] = subs.add_parser("ck", help="exact flat conformal Killing kernel")
    _common(p)
    p.add_argument("--n", type=int, required=False, default=3)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--degree", type=int, help="polynomial degree cap (default 2m+2)")
    p.add_argument("--constraint", default="none", choices=["none", "hyperplane", "line", "jet"])
    p.add_argument("--order", type=int, help="jet order for --constraint jet")

    p = sp["decompose"] = subs.add_parser("decompose", help="decompose a field on the unit square")
    _common(p)
    p.add_argument("--m", type=int, help="rank (1 or 2; default 2 or the rank in --input)")
    p.add_argument("--mesh", type=int, help="grid size N (default 33 or the grid in --input)")
    p.add_argument("--input", help=".tf file with the field (default: manufactured field)")
    p.add_argument("--out-field", help="write the trace- and divergence-free part as .tf")
    p.add_argument("--tol", type=float, default=1e-8)

    p = sp["kinetic"] = subs.add_parser("kinetic", help="transport relations versus sampled H U")
    _common(p)
    p.add_argument("--M", type=int, default=2, dest="M")
    p.add_argument("--metric", default="euclidean")
    p.add_argument("--degree", type=int, default=2)
    p.add_argument("--lattice", type=int, default=4)
    p.add_argument("--tol", type=float, default=1e-6)

    p = sp["coeffs"] = subs.add_parser("coeffs", help="exact coefficient table as CSV")
    _common(p)
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--table", default="a", choices=["a", "b"])
    p.add_argument("--provenance", default="closed-form", choices=["closed-form", "recurrence"])
    return parser, sp


def parse_args(argv: list[str]) -> argparse.Namespace:
    parser, subs = build_parser()
    args = parser.parse_args(argv)
    if args.command is None:
        raise UsageError("a subcommand is required: " + ", ".join(subs))
    if args.config:
        _apply_config(subs[args.command], read_config(args.config))
        args = parser.parse_args(argv)
    return args


# --------------------------------------------------------------------------
# reports


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.floating, float)):
        return float(x) if np.isfinite(x) else str(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, np.bool_):
        return bool(x)
    return x


def _config_dict(args) -> dict:
    skip = {"out", "config", "no_timestamp"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def make_report(args, checks: list[dict], result: dict | None = None, started: float | None = None) -> dict:
    failed = sum(1 for c in checks if not c["pass"])
    report = {
        "config": _config_dict(args),
        "checks": checks,
        "summary": {"total": len(checks), "passed": len(checks) - failed, "failed": failed, "pass": failed == 0},
    }
    if result is not None:
        report["result"] = result
    if not args.no_timestamp:
        report["generated_at"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
        if started is not None:
            report["elapsed_seconds"] = round(time.perf_counter() - started, 3)
    return _jsonable(report)


def _emit(text: str, path: str | None):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
    else:
        Path(path).write_text(text)


def _check_dict(c: Check, suite: str | None = None) -> dict:
    d = c.as_dict()
    if suite is not None:
        d["suite"] = suite
    return d


def _status(report: dict) -> int:
    return EXIT_OK if report["summary"]["pass"] else EXIT_CHECK_FAILED


# --------------------------------------------------------------------------
# subcommands


def _suite_params(fn, args) -> dict:
    accepted = inspect.signature(fn).parameters
    params = {}
    if "seed" in accepted:
        params["seed"] = args.seed
    if args.m_max is not None:
        for key in ("m_max", "M_max"):
            if key in accepted:
                params[key] = args.m_max
    if args.tol is not None and "tol" in accepted:
        params["tol"] = args.tol
    return params


def cmd_verify(args) -> int:
    started = time.perf_counter()
    if args.m_max is not None and args.m_max < 0:
        raise UsageError("--m-max must be >= 0")
    names = sorted(SUITES) if args.suite == "all" else [args.suite]
    checks, timing = [], {}
    for name in names:
        res = run_suite(name, **_suite_params(SUITES[name], args))
        checks += [_check_dict(c, name) for c in res.checks]
        timing[name] = {"seconds": round(res.seconds, 3), "limit": RUNTIME_LIMITS[name]}
    result = {"suites": names}
    if not args.no_timestamp:
        result["timing"] = timing
    report = make_report(args, checks, result, started)
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return _status(report)


def cmd_ck(args) -> int:
    from .ckt import ck_dimension_bound, constrained_ck_kernel, poly_ck_kernel

    started = time.perf_counter()
    if args.n < 1 or args.m < 0:
        raise UsageError("need n >= 1 and m >= 0")
    degree = 2 * args.m + 2 if args.degree is None else args.degree
    if degree < 0:
        raise UsageError("--degree must be >= 0")
    try:
        if args.constraint == "none":
            K = poly_ck_kernel(args.n, args.m, degree)
        else:
            K = constrained_ck_kernel(args.n, args.m, degree, args.constraint, args.order)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    result = {"dimension": K.dimension, "unknowns": K.unknowns, "equations": K.equations,
              "degree": degree, "constraint": args.constraint}
    checks = []
    if args.n >= 3:
        bound = ck_dimension_bound(args.n, args.m)
        result["bound"] = bound
        if args.constraint == "none" and degree >= 2 * args.m:
            checks.append(Check("flat_kernel_attains_bound", "dimension bound is attained on flat space",
                                float(abs(K.dimension - bound)), 0.0).as_dict())
        else:
            checks.append(Check("kernel_within_bound", "dimension bound for conformal Killing tensors",
                                float(max(K.dimension - bound, 0)), 0.0).as_dict())
    report = make_report(args, checks, result, started)
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return _status(report)


def cmd_decompose(args) -> int:
    from .decomp import GridField, SolveError, decompose_field, manufactured_field
    from .tfio import TFData, read_tf, write_tf

    started = time.perf_counter()
    if args.input:
        data = read_tf(args.input)
        if data.n != 2 or len(data.grid) != 2 or data.grid[0] != data.grid[1]:
            raise UsageError("decompose needs a two-dimensional field on an N x N grid")
        m = data.m if args.m is None else args.m
        if m != data.m:
            raise UsageError(f"--m {m} does not match the rank {data.m} in {args.input}")
        if args.mesh is not None and args.mesh != data.grid[0]:
            raise UsageError(f"--mesh {args.mesh} does not match the grid {data.grid[0]} in {args.input}")
        if m not in (1, 2) or data.grid[0] < 3:
            raise UsageError("decompose supports m in {1, 2} and N >= 3")
        f = GridField.from_slots(data.values, m)
        truth = None
    else:
        m = 2 if args.m is None else args.m
        N = 33 if args.mesh is None else args.mesh
        if m not in (1, 2) or N < 3:
            raise UsageError("decompose supports m in {1, 2} and N >= 3")
        f, *truth = manufactured_field(N, m)
    try:
        res = decompose_field(f, tol=args.tol, raise_on_failure=False)
    except SolveError as exc:  # pragma: no cover - raise_on_failure is off
        raise UsageError(str(exc)) from None
    h = f.h
    checks = [
        Check("solver_converged", "conjugate gradients on the Dirichlet problem",
              0.0 if res.stats.converged else 1.0, 0.0).as_dict(),
        Check("reconstruction", "f = d v + i lambda + f~", res.reconstruct_error, res.tol_reconstruct).as_dict(),
        Check("trace_constraint", "trace-free component", res.trace_residual, res.tol_constraint).as_dict(),
        Check("divergence_constraint", "divergence-free component", res.divergence_residual,
              res.tol_constraint).as_dict(),
    ]
    result = res.as_dict()
    if not args.no_timestamp:
        result["solve_seconds"] = round(res.stats.seconds, 3)
    result["h"] = h
    if truth:
        from .decomp import l2_norm

        v0, lam0, ft0 = truth
        result["errors"] = {
            "v": l2_norm(res.v.values - v0.values, h),
            "lam": l2_norm(res.lam.values - lam0.values, h) if lam0 is not None else 0.0,
            "f_tilde": l2_norm(res.f_tilde.values - ft0.values, h),
        }
    if args.out_field:
        write_tf(args.out_field, TFData(2, m, res.f_tilde.slots()))
    report = make_report(args, checks, result, started)
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return _status(report)


def cmd_kinetic(args) -> int:
    from .geom import named_chart
    from .kinetic import consistency_residual, random_stack

    started = time.perf_counter()
    if args.M < 0 or args.degree < 0 or args.lattice < 2:
        raise UsageError("need M >= 0, degree >= 0 and lattice >= 2")
    try:
        chart = named_chart(args.metric, 2)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    rng = np.random.default_rng(args.seed)
    U = random_stack(chart, args.M, args.degree, rng)
    X = chart.lattice(args.lattice)
    r = consistency_residual(U, X)
    checks = [Check("transport_relations_vs_sampling", "Fourier form of the kinetic equation", r, args.tol).as_dict()]
    result = {"residual": r, "nodes": int(X.shape[0]), "metric": args.metric, "M": args.M}
    report = make_report(args, checks, result, started)
    _emit(json.dumps(report, indent=2, sort_keys=True) + "\n", args.out)
    return _status(report)


def cmd_coeffs(args) -> int:
    from .boundary_coeffs import coeff_table

    if args.n < 2 or args.m < 0:
        raise UsageError("need n >= 2 and m >= 0")
    table = coeff_table(args.table, args.n, args.m, args.provenance)
    _emit(table.to_csv(), args.out)
    return EXIT_OK


COMMANDS = {"verify": cmd_verify, "ck": cmd_ck, "decompose": cmd_decompose,
            "kinetic": cmd_kinetic, "coeffs": cmd_coeffs}


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        _threads.requested()
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"symten: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        if _threads.ENV in str(exc):
            print(f"symten: {exc}", file=sys.stderr)
            return EXIT_USAGE
        from .tfio import TFFormatError

        if isinstance(exc, TFFormatError):
            print(f"symten: bad input file: {exc}", file=sys.stderr)
            return EXIT_IO
        raise
    except OSError as exc:
        print(f"symten: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
