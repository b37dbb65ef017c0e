"""Command line interface: ``mtsolve {check,solve,enumerate,rate}``.

Exit codes: 0 success (nonsingular M-tensor / converged), 2 Z-tensor that is
not a nonsingular M-tensor, 3 not a Z-tensor, 4 iterates unbounded,
5 precondition failed, 6 iteration budget exhausted, 64 usage or input error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import __version__, kernels
from .io import FormatError, dumps, read_tensor, read_vec
from .oracle import OracleLimitError, enumerate_solutions
from .solver import (
    NotMTensorError,
    PreconditionError,
    SolverOptions,
    maximal_solve,
    minimal_solve,
    positive_solve,
    rate_from_report,
)
from .spectral import NONSINGULAR_M, NOT_Z, Z_NOT_M, classify
from .splitting import PlanError, build_plan, default_kind

EXIT_OK = 0
EXIT_Z_NOT_M = 2
EXIT_NOT_Z = 3
EXIT_DIVERGING = 4
EXIT_PRECONDITION = 5
EXIT_MAX_ITER = 6
EXIT_USAGE = 64

_STATUS_EXIT = {
    "converged": EXIT_OK,
    "diverging-unbounded": EXIT_DIVERGING,
    "precondition-failed": EXIT_PRECONDITION,
    "max-iter": EXIT_MAX_ITER,
}
_CLASS_EXIT = {NONSINGULAR_M: EXIT_OK, Z_NOT_M: EXIT_Z_NOT_M, NOT_Z: EXIT_NOT_Z}

log = logging.getLogger("mtsolve")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _one_based(indices):
    return [int(i) + 1 for i in indices]


def _reduction_json(info):
    return {
        "k0": info.k0,
        "I": _one_based(info.I),
        "I0": _one_based(info.I0),
        "reduced": info.reduced,
    }


def _rate_json(rate, keep):
    return {
        "phi_prime": rate.phi_prime,
        "rho": rate.rho,
        "conditions": rate.conditions,
        "measured_factor": rate.measured_factor,
        "kept": _one_based(keep),
    }


def _emit(args, payload, text_lines):
    if getattr(args, "json", False):
        print(dumps(payload))
    else:
        for line in text_lines:
            print(line)


def cmd_check(args):
    A = read_tensor(args.tensor)
    cert = classify(A, tol=args.tol)
    payload = {
        "classification": cert.classification,
        "s": cert.s,
        "rho_B": cert.rho_B,
        "witness": None if cert.witness is None else cert.witness,
        "note": cert.note,
    }
    lines = [cert.classification, f"s = {cert.s!r}", f"rho(B) = {cert.rho_B!r}"]
    if cert.witness is not None:
        lines.append("witness x = " + " ".join(repr(float(v)) for v in cert.witness))
    if cert.note:
        lines.append(f"note: {cert.note}")
    _emit(args, payload, lines)
    return _CLASS_EXIT[cert.classification]


def _options(args):
    x0 = args.x0 if args.x0 in ("zero", "auto") else read_vec(args.x0)
    if args.mode in ("min", "pos") and not isinstance(x0, str):
        raise UsageError(f"--mode {args.mode} always starts from zero; --x0 {args.x0} is not allowed")
    if args.mode == "max" and isinstance(x0, str) and x0 == "zero":
        raise UsageError("--mode max needs an upper start; use --x0 auto or a vector file")
    return SolverOptions(tol=args.tol, max_iter=args.max_iter, x0=x0)


def _failure(args, message, mode, splitting):
    payload = {"command": args.command, "mode": mode, "splitting": splitting,
               "status": "precondition-failed", "message": message}
    _emit(args, payload, ["status: precondition-failed", f"message: {message}"])
    return EXIT_PRECONDITION


def _solve(args, A, b):
    opts = _options(args)
    kind = default_kind(A.order) if args.splitting == "auto" else args.splitting
    plan = build_plan(A, kind)
    if args.mode == "min":
        rep = minimal_solve(A, b, plan, opts)
    elif args.mode == "max":
        rep = maximal_solve(A, b, plan, opts)
    else:
        rep = positive_solve(A, b, plan, opts)
    return plan, kind, rep


def cmd_solve(args):
    A = read_tensor(args.tensor)
    b = read_vec(args.b)
    if b.size != A.dim:
        raise UsageError(f"b has length {b.size}, tensor dimension is {A.dim}")
    try:
        plan, kind, rep = _solve(args, A, b)
    except (PreconditionError, PlanError) as exc:
        return _failure(args, str(exc), args.mode, args.splitting)
    if args.trace:
        for k, res, norm in rep.trace:
            print(f"{k} {res!r} {norm!r}", file=sys.stderr)
    payload = {
        "command": "solve",
        "mode": args.mode,
        "splitting": kind,
        "status": rep.status,
        "x": rep.x,
        "residual_inf": rep.residual_inf,
        "iterations": rep.iterations,
        "monotone": rep.monotone,
        "reduction": _reduction_json(rep.reduction),
        "message": rep.message,
        "backend": kernels.BACKEND,
    }
    lines = [
        f"status: {rep.status}",
        "x: " + " ".join(repr(float(v)) for v in rep.x),
        f"residual_inf: {rep.residual_inf!r}",
        f"iterations: {rep.iterations}",
        f"reduction: k0={rep.reduction.k0} I={_one_based(rep.reduction.I)}",
    ]
    if rep.message:
        lines.append(f"message: {rep.message}")
    if args.rate and rep.converged:
        try:
            rate, keep = rate_from_report(A, b, plan, rep)
            payload["rate"] = _rate_json(rate, keep)
            lines.append(f"rho(phi'): {rate.rho!r}  conditions: {rate.conditions}")
        except PreconditionError as exc:
            payload["rate"] = {"error": str(exc)}
    _emit(args, payload, lines)
    return _STATUS_EXIT[rep.status]


def cmd_enumerate(args):
    A = read_tensor(args.tensor)
    b = read_vec(args.b)
    if b.size != A.dim:
        raise UsageError(f"b has length {b.size}, tensor dimension is {A.dim}")
    try:
        sols = enumerate_solutions(A, b, n_limit=args.limit)
    except ValueError as exc:
        if isinstance(exc, OracleLimitError):
            raise UsageError(str(exc)) from exc
        return _failure(args, str(exc), None, None)
    ext = None
    if sols.extremal is not None:
        ext = {"min": sols.extremal[0], "max": sols.extremal[1]}
    payload = {
        "count": len(sols.solutions),
        "solutions": [s for s in sols.solutions],
        "degenerate_patterns": [_one_based(p) for p in sols.degenerate_patterns],
        "extremal": ext,
    }
    print(dumps(payload))
    return EXIT_OK


def cmd_rate(args):
    A = read_tensor(args.tensor)
    b = read_vec(args.b)
    if b.size != A.dim:
        raise UsageError(f"b has length {b.size}, tensor dimension is {A.dim}")
    args.x0 = "auto" if args.mode == "max" else "zero"
    try:
        plan, kind, rep = _solve(args, A, b)
        if not rep.converged:
            print(dumps({"status": rep.status, "message": rep.message}))
            return _STATUS_EXIT[rep.status]
        rate, keep = rate_from_report(A, b, plan, rep)
    except (PreconditionError, PlanError) as exc:
        return _failure(args, str(exc), args.mode, args.splitting)
    payload = {"mode": args.mode, "splitting": kind, "iterations": rep.iterations}
    payload.update(_rate_json(rate, keep))
    print(dumps(payload))
    return EXIT_OK


def build_parser():
    p = _Parser(prog="mtsolve", description="Extremal nonnegative solutions of M-tensor equations.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    c = sub.add_parser("check", help="classify a tensor (Z / nonsingular M)")
    c.add_argument("tensor")
    c.add_argument("--tol", type=float, default=1e-10)
    c.add_argument("--json", action="store_true")
    c.set_defaults(func=cmd_check)

    def solver_args(sp, modes):
        sp.add_argument("tensor")
        sp.add_argument("b")
        sp.add_argument("--mode", choices=modes, default=modes[0])
        sp.add_argument("--splitting", choices=["auto", "jacobi", "lower", "upper", "full"], default="auto")
        sp.add_argument("--tol", type=float, default=1e-12)
        sp.add_argument("--max-iter", type=int, default=100_000)

    s = sub.add_parser("solve", help="compute the minimal, maximal or positive solution")
    solver_args(s, ["min", "max", "pos"])
    s.add_argument("--x0", default="auto", help="zero, auto, or a vec file (max mode)")
    s.add_argument("--json", action="store_true")
    s.add_argument("--trace", action="store_true", help="one line per iteration on stderr: k residual norm")
    s.add_argument("--rate", action="store_true", help="append the convergence-rate report")
    s.set_defaults(func=cmd_solve)

    e = sub.add_parser("enumerate", help="enumerate nonnegative solutions (small n)")
    e.add_argument("tensor")
    e.add_argument("b")
    e.add_argument("--limit", type=int, default=12)
    e.set_defaults(func=cmd_enumerate)

    r = sub.add_parser("rate", help="convergence-rate report at the computed solution")
    solver_args(r, ["max", "min"])
    r.set_defaults(func=cmd_rate)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (FormatError, UsageError, OSError) as exc:
        print(f"mtsolve: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NotMTensorError as exc:
        print(f"mtsolve: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
