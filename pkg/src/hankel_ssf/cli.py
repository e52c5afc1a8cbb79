"""``hankel-ssf`` command line front end.

Every file written carries a ``meta`` block (JSON) or ``#`` comment header
(CSV) recording the command, the effective settings and the defaults.
Failures are reported as one JSON object on standard error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .direct import StepFunction, cauchy_residual, kernel_classification, ssf, trace_formulas
from .errors import HankelSSFError
from .fileio import csv_text, dumps, load, write_atomic, write_json
from .hankel import norm_bounds_check, spectral_measure
from .inverse import IntervalSystem, inverse, roundtrip
from .measures import default_seed, reconstruct_from_rho, ssf_to_rho
from .oracle import comparison_table
from .sequences import RealSequence, positivity_report

DEFAULTS = {"n": 512, "slices": 64, "nmax": 16, "tol": 1e-8, "grid": 1000}
HALF_WIDTH = 0.5
SPOT_CHECKS = 5

FORMAT_NOTES = """\
file formats:
  sequence JSON   {"values": [a0, a1, ...], "tail": "zero" | {"moment": {"atoms": [[t, w], ...]}}}
  SSF JSON        {"breakpoints": [x0, ..., xm], "values": [v0, ..., v_{m-1}]}
                  (an interval system {"pairs": [[mu, lambda], ...]} is accepted as --xi too)
csv columns:
  direct --csv          lambda,xi
  inverse convergence   slices,n,alpha_n
  oracle-hilbert        lambda,xi_oracle,xi_truncation_avg,cdf_oracle,cdf_truncation
"""


def _meta(command: str, **settings) -> dict:
    return {"tool": "hankel-ssf", "version": __version__, "command": command,
            "settings": settings, "defaults": dict(DEFAULTS)}


def _comments(meta: dict) -> list[str]:
    return [f"{meta['tool']} {meta['version']} {meta['command']}",
            "settings " + json.dumps(meta["settings"], sort_keys=True),
            "defaults " + json.dumps(meta["defaults"], sort_keys=True)]


def _load_xi(path) -> StepFunction:
    def build(data):
        if "pairs" in data:
            return IntervalSystem.from_json(data).to_step_function()
        return StepFunction.from_json(data)
    return load(path, build)


def _emit(obj, out) -> None:
    if out:
        write_json(out, obj)
    else:
        sys.stdout.write(dumps(obj) + "\n")


# -- subcommands ------------------------------------------------------------


def cmd_direct(args) -> int:
    alpha = load(args.alpha, RealSequence.from_json)
    xi = ssf(alpha, args.n, args.tol)
    tr = trace_formulas(xi, alpha)
    meta = _meta("direct", alpha=str(args.alpha), n=args.n, tol=args.tol, grid=args.grid)
    doc = {"meta": meta, **xi.to_json(),
           "report": {"trace": tr.to_json(), "kernel": kernel_classification(xi).value,
                      "xi_integral": xi.integral()}}
    _emit(doc, args.out)
    if args.csv:
        lam, val = xi.grid(args.grid)
        write_atomic(args.csv, csv_text(["lambda", "xi"], zip(lam, val), _comments(meta)))
    return 0


def cmd_inverse(args) -> int:
    xi = _load_xi(args.xi)
    res = inverse(xi, args.slices, args.nmax)
    meta = _meta("inverse", xi=str(args.xi), slices=args.slices, nmax=args.nmax,
                 slice_schedule=list(res.slice_counts))
    doc = {"meta": meta, **res.alpha.to_json(),
           "convergence": {"slice_counts": list(res.slice_counts),
                           "max_successive_delta": [float(d.max()) for d in res.deltas]}}
    _emit(doc, args.out)
    csv_path = args.csv or (Path(args.out).with_suffix(".convergence.csv") if args.out else None)
    if csv_path:
        write_atomic(csv_path, csv_text(["slices", "n", "alpha_n"], res.to_rows(), _comments(meta)))
    return 0


def cmd_roundtrip(args) -> int:
    alpha = load(args.alpha, RealSequence.from_json)
    rep = roundtrip(alpha, args.n, args.slices, args.nmax)
    _emit({"meta": _meta("roundtrip", alpha=str(args.alpha), n=args.n, slices=args.slices,
                         nmax=args.nmax), "report": rep.to_json()}, args.out)
    return 0


def cmd_measure(args) -> int:
    xi = _load_xi(args.xi)
    seed = default_seed() if args.seed is None else args.seed
    rho = ssf_to_rho(xi)
    log: list = []
    alpha = reconstruct_from_rho(rho, args.steps, seed=seed, log=log, tol=args.tol)
    steps = [{"step": r.step, "n_atoms": r.n_atoms, "recurrence_residual": r.recurrence_residual,
              "mass_at_zero": r.mass_at_zero, "alpha_n": float(alpha.values[r.step])} for r in log]
    _emit({"meta": _meta("measure", xi=str(args.xi), steps=args.steps, tol=args.tol, seed=seed),
           "rho": rho.to_json(), "alpha": alpha.values.tolist(), "steps": steps}, args.out)
    return 0


def cmd_oracle(args) -> int:
    rows = comparison_table(args.n, args.grid, args.half_width)
    meta = _meta("oracle-hilbert", n=args.n, grid=args.grid, half_width=args.half_width)
    header = ["lambda", "xi_oracle", "xi_truncation_avg", "cdf_oracle", "cdf_truncation"]
    text = csv_text(header, rows, _comments(meta))
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_verify(args) -> int:
    alpha = load(args.alpha, RealSequence.from_json)
    seed = default_seed() if args.seed is None else args.seed
    nb = norm_bounds_check(alpha, args.n)
    pos = positivity_report(alpha, args.n, tol=args.tol)
    checks = {"norm_bounds": nb.to_json(), "positivity": pos.to_json()}
    ok = nb.passed and pos.passed
    if pos.hankel_ok and pos.shifted_ok:
        xi = ssf(alpha, args.n, args.tol)
        rho = spectral_measure(alpha, args.n)
        rng = np.random.default_rng(seed)
        scale = max(1.0, xi.support_end)
        zs = scale * (rng.uniform(-2, 2, SPOT_CHECKS) + 1j * rng.uniform(0.5, 2, SPOT_CHECKS))
        res = [cauchy_residual(xi, rho, z) for z in zs]
        spot_ok = max(res) <= args.tol
        checks["cauchy_residual"] = {"points": [[z.real, z.imag] for z in zs], "residuals": res,
                                     "tol": args.tol, "passed": spot_ok}
        ok = ok and spot_ok
    checks["passed"] = ok
    _emit({"meta": _meta("verify", alpha=str(args.alpha), n=args.n, tol=args.tol, seed=seed),
           **checks}, args.out)
    return 0 if ok else 1


# -- parser -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="hankel-ssf",
        description="Spectral shift function of doubly-positive Hankel operators.",
        epilog=FORMAT_NOTES + "\nexit codes: 0 ok, 1 verify failed, 2 parse error, "
                              "3 model error, 4 numeric error",
        formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    d = DEFAULTS

    s = sub.add_parser("direct", help="SSF of a sequence, with trace and kernel report")
    s.add_argument("--alpha", required=True, help="sequence JSON")
    s.add_argument("--n", type=int, default=d["n"], help="truncation size (default %(default)s)")
    s.add_argument("--tol", type=float, default=d["tol"], help="positivity tolerance (default %(default)s)")
    s.add_argument("--out", help="SSF JSON output (default: stdout)")
    s.add_argument("--grid", type=int, default=d["grid"], help="CSV grid points (default %(default)s)")
    s.add_argument("--csv", help="write lambda,xi samples on a uniform grid")
    s.set_defaults(func=cmd_direct)

    s = sub.add_parser("inverse", help="sequence with a given SSF, via pulse-width modulation")
    s.add_argument("--xi", required=True, help="SSF JSON or interval-system JSON")
    s.add_argument("--slices", type=int, default=d["slices"], help="pulses per piece (default %(default)s)")
    s.add_argument("--nmax", type=int, default=d["nmax"], help="last index reported (default %(default)s)")
    s.add_argument("--out", help="sequence JSON output (default: stdout)")
    s.add_argument("--csv", help="convergence table slices,n,alpha_n "
                                 "(default: next to --out with suffix .convergence.csv)")
    s.set_defaults(func=cmd_inverse)

    s = sub.add_parser("roundtrip", help="direct then inverse, with entrywise deltas")
    s.add_argument("--alpha", required=True)
    s.add_argument("--n", type=int, default=d["n"])
    s.add_argument("--slices", type=int, default=d["slices"])
    s.add_argument("--nmax", type=int, default=d["nmax"])
    s.add_argument("--out")
    s.set_defaults(func=cmd_roundtrip)

    s = sub.add_parser("measure", help="spectral measure from a {0,1}-valued SSF and its shifts")
    s.add_argument("--xi", required=True)
    s.add_argument("--steps", type=int, default=8, help="recurrence steps (default %(default)s)")
    s.add_argument("--tol", type=float, default=d["tol"], help="identity residual bound")
    s.add_argument("--seed", type=int, help="validation-point seed (default: $HANKEL_SSF_SEED or fixed)")
    s.add_argument("--out")
    s.set_defaults(func=cmd_measure)

    s = sub.add_parser("oracle-hilbert", help="truncation vs closed forms for 1/(n+1)")
    s.add_argument("--n", type=int, default=d["n"])
    s.add_argument("--grid", type=int, default=d["grid"])
    s.add_argument("--half-width", type=float, default=HALF_WIDTH,
                   help="averaging window for the truncation SSF (default %(default)s)")
    s.add_argument("--out", help="CSV output (default: stdout)")
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("verify", help="norm bounds, positivity and resolvent identity checks")
    s.add_argument("--alpha", required=True)
    s.add_argument("--n", type=int, default=d["n"])
    s.add_argument("--tol", type=float, default=d["tol"])
    s.add_argument("--seed", type=int)
    s.add_argument("--out")
    s.set_defaults(func=cmd_verify)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except HankelSSFError as exc:
        sys.stderr.write(json.dumps(exc.to_dict(), default=str) + "\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
