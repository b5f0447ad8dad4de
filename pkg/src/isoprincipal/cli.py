"""Command-line front end.

Subcommands:

* ``generate``: seeded random admissible problem (JSON).
* ``verify``: full check suite, JSON report.
* ``tau``: tau along a segment of loci (CSV).

Exit code 0 means success and 1 a failed check.  Exit code 2 means the
input was refused, for example repeated loci or a point near the singular
set.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys

import numpy as np

from . import family, problem
from .errors import GiveUp, NearSingularSet, NotAdmissible, SpectraCollide
from .verify import DEFAULTS, run_suite

EXIT_OK, EXIT_FAIL, EXIT_REFUSED = 0, 1, 2
# PathHitsSingularSet is a NearSingularSet
REFUSALS = (ValueError, SpectraCollide, NotAdmissible, NearSingularSet, OSError, json.JSONDecodeError)


def _err(msg: str) -> None:
    print(f"isoprincipal: {msg}", file=sys.stderr)


def _load(path):
    p = problem.load(path)
    p.loci  # rejects repeated loci
    return p


def cmd_generate(args) -> int:
    try:
        p = problem.random_problem(args.m, args.n, args.seed)
    except (GiveUp, ValueError) as exc:
        _err(str(exc))
        return EXIT_REFUSED
    if args.output == "-":
        sys.stdout.write(problem.dumps(p))
    else:
        problem.save(p, args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        p = _load(args.input)
        rep = run_suite(p, tol=args.tol, fd_step=args.fd_step)
    except REFUSALS as exc:
        _err(f"refused: {type(exc).__name__}: {exc}")
        return EXIT_REFUSED
    text = json.dumps(rep.to_dict(), indent=1) + "\n"
    if args.report == "-":
        sys.stdout.write(text)
    else:
        with open(args.report, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        print(rep.summary())
    for c in rep.failures:
        _err(f"check failed: {c.name} residual {c.residual:.3e} > {c.tolerance:.1e}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def parse_loci(text: str) -> np.ndarray:
    """Comma-separated Python complex literals, e.g. ``0,2`` or ``1+0.5j,-1j``."""
    return np.array([complex(tok.replace(" ", "")) for tok in text.split(",")])


def cmd_tau(args) -> int:
    try:
        p = _load(args.input)
        target = parse_loci(args.target)
        if target.size != p.t.size:
            raise ValueError(f"target has {target.size} loci, problem has {p.t.size}")
        h = family.make_family(p.F, p.G)
        h.require_admissible()
        scan = family.tau_path_scan(h, p.t, target, args.steps)
    except REFUSALS as exc:
        _err(f"refused: {type(exc).__name__}: {exc}")
        return EXIT_REFUSED

    out = sys.stdout if args.output == "-" else open(args.output, "w", encoding="utf-8", newline="")
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["s", "tau_re", "tau_im", "abs_det", "cond"])
        for s, tau, det, cond in zip(scan.s, scan.predicted, scan.direct, scan.cond):
            w.writerow([repr(float(s)), repr(float(tau.real)), repr(float(tau.imag)), repr(float(abs(det))), repr(float(cond))])
        pred, direct = complex(scan.predicted[-1]), complex(scan.direct[-1])
        out.write(f"# predicted={pred!r},direct={direct!r},rel_mismatch={scan.rel_mismatch!r}\n")
    finally:
        if out is not sys.stdout:
            out.close()
    if scan.rel_mismatch > args.tol:
        _err(f"tau mismatch {scan.rel_mismatch:.3e} > {args.tol:.1e}")
        return EXIT_FAIL
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="isoprincipal", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random admissible problem")
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("-o", "--output", default="-")
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="run the full check suite")
    v.add_argument("--input", required=True)
    v.add_argument("--tol", type=float, default=DEFAULTS["tol"])
    v.add_argument("--fd-step", type=float, default=DEFAULTS["fd_step"])
    v.add_argument("--report", default="-")
    v.set_defaults(func=cmd_verify)

    t = sub.add_parser("tau", help="scan tau along a segment of loci")
    t.add_argument("--input", required=True)
    t.add_argument("--target", required=True, help="comma-separated complex loci, e.g. 0,2")
    t.add_argument("--steps", type=int, default=DEFAULTS["path_steps"])
    t.add_argument("-o", "--output", default="-")
    t.add_argument("--tol", type=float, default=DEFAULTS["tol"])
    t.set_defaults(func=cmd_tau)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
