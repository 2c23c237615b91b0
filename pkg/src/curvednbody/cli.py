"""Command-line front end.

Exit codes: 0 ok, 2 usage or malformed input, 3 empty result, 4 singular
configuration, 5 residual above tolerance.
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys

import numpy as np

from . import equilibria as eq
from .dynamics import Tolerances, conserved_drift, integrate, validate_gradient, SystemConfig, SystemState
from .errors import SingularityApproached, SingularMatrix, SingularPair, StepSizeUnderflow
from .geometry import cot_geodesic, geodesic_distance
from .io import dumps, encode_complex, load_documents, write_trajectory_csv
from .mobius import KillingKind, flow_class, iwasawa_decompose, mat

EXIT_OK, EXIT_USAGE, EXIT_EMPTY, EXIT_SINGULAR, EXIT_RESIDUAL = 0, 2, 3, 4, 5
VERIFY_TOL = 1e-8


class UsageError(Exception):
    pass


def _positive(x):
    v = float(x)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {x}")
    return v


def _kind(x):
    try:
        return KillingKind(x)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown field {x!r}; choose from {', '.join(k.value for k in KillingKind)}"
        ) from None


def _emit(obj, indent=2):
    print(dumps(obj, indent))


def cmd_solve(args):
    if args.problem == "two-body":
        branches = eq.two_body_solve(args.mass, args.radius)
    elif args.problem == "euler3":
        if args.central_mass is None:
            raise UsageError("euler3 needs --central-mass")
        branches = eq.euler3_solve(args.mass, args.central_mass, args.radius)
    else:
        branches = eq.square4_solve(args.mass, args.radius)
    _emit([b.to_dict() for b in branches])
    if not branches:
        print(f"no {args.problem} branches for these masses", file=sys.stderr)
        return EXIT_EMPTY
    return EXIT_OK


def _document(args):
    docs = load_documents(args.input)
    if not 0 <= args.index < len(docs):
        raise UsageError(f"document index {args.index} out of range ({len(docs)} documents)")
    return docs[args.index]


def cmd_simulate(args):
    doc = _document(args)
    if any(math.isinf(abs(z)) for z in doc.positions):
        raise UsageError("a body sits at the north pole; simulate its antipodal image instead")
    cfg = doc.config
    state = doc.state(args.field)
    opts = Tolerances(rel_tol=args.rtol, abs_tol=args.atol)
    traj = integrate(state, cfg, args.t_end, opts)
    if args.out:
        write_trajectory_csv(traj, cfg, args.out)
    else:
        write_trajectory_csv(traj, cfg, sys.stdout)
    dE, dJ = conserved_drift(traj, cfg)
    summary = {
        "steps": traj.meta["accepted_steps"],
        "rejected": traj.meta["rejected_steps"],
        "t_end": float(traj.t[-1]),
        "energy_drift": dE,
        "angmom_drift": dJ,
        "final_deviation": float(np.max(np.abs(traj.positions[-1] - traj.positions[0]))),
    }
    print(json.dumps(summary), file=sys.stdout if args.out else sys.stderr)
    return EXIT_OK


def _verify_one(doc, kind):
    cfg = doc.config
    if kind is KillingKind.HYPERBOLIC:
        rep = eq.residual_hyperbolic(doc.positions, cfg)
    elif kind is KillingKind.PARABOLIC:
        rep = eq.residual_parabolic(doc.positions, cfg)
    else:
        rep = eq.residual(kind, doc.positions, cfg)
    return rep


def cmd_verify(args):
    docs = load_documents(args.input)
    out, worst = [], 0.0
    for i, doc in enumerate(docs):
        kind = args.field or doc.field
        if kind is None:
            raise UsageError(f"document {i} has no field; pass --field")
        rep = _verify_one(doc, kind)
        d = rep.to_dict()
        d["ok"] = rep.max_abs <= VERIFY_TOL
        out.append(d)
        worst = max(worst, rep.max_abs)
    _emit(out if len(out) > 1 else out[0])
    return EXIT_OK if worst <= VERIFY_TOL else EXIT_RESIDUAL


def _encode_matrix(A):
    return [[encode_complex(x) for x in row] for row in np.asarray(A)]


def cmd_classify(args):
    v = args.entries
    A = mat(complex(v[0], v[1]), complex(v[2], v[3]), complex(v[4], v[5]), complex(v[6], v[7]))
    try:
        P, Rm, S = iwasawa_decompose(A)
    except SingularMatrix as exc:
        raise UsageError(str(exc)) from None
    _emit({"P": _encode_matrix(P), "R": _encode_matrix(Rm), "S": _encode_matrix(S), "class": flow_class(A)}, None)
    return EXIT_OK


def cmd_distance(args):
    z1 = complex(args.z1[0], args.z1[1])
    z2 = complex(args.z2[0], args.z2[1])
    d = {"distance": geodesic_distance(z1, z2, args.radius)}
    try:
        d["cot"] = cot_geodesic(z1, z2, args.radius)
    except SingularPair:
        d["cot"] = None
    _emit(d, None)
    return EXIT_OK


def cmd_selftest(args):
    """Randomized spot checks; seed from NBODY_SEED."""
    seed = int(os.environ.get("NBODY_SEED", "0"))
    rng = np.random.default_rng(seed)
    checks = {}
    z = rng.normal(size=(args.samples, 2)) + 1j * rng.normal(size=(args.samples, 2))
    errs = []
    for a, b in z:
        c = cot_geodesic(a, b)
        errs.append(abs(c - 1 / math.tan(geodesic_distance(a, b))) / max(1.0, abs(c)))
    checks["cot_kernel"] = max(errs) <= 1e-10
    cfg = SystemConfig([1.0, 2.0, 0.5])
    g = [validate_gradient(SystemState(rng.normal(size=3) + 1j * rng.normal(size=3), np.zeros(3)), cfg)
         for _ in range(args.samples // 10 or 1)]
    checks["gradient"] = max(g) <= 1e-6
    m = float(rng.uniform(0.1, 1.9))
    checks["two_body_residuals"] = all(b.residual_max <= 1e-10 for b in eq.two_body_solve(m))
    _emit({"seed": seed, "checks": checks})
    return EXIT_OK if all(checks.values()) else 1


def build_parser():
    p = argparse.ArgumentParser(prog="curvednbody", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solve", help="solve a special configuration")
    s.add_argument("problem", choices=["two-body", "euler3", "square4"])
    s.add_argument("--mass", type=_positive, required=True)
    s.add_argument("--central-mass", type=_positive)
    s.add_argument("--radius", type=_positive, default=1.0)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("simulate", help="integrate a problem document to CSV")
    s.add_argument("input")
    s.add_argument("--t-end", type=_positive, required=True)
    s.add_argument("--rtol", type=_positive, default=1e-10)
    s.add_argument("--atol", type=_positive, default=1e-12)
    s.add_argument("--out")
    s.add_argument("--field", type=_kind)
    s.add_argument("--index", type=int, default=0, help="document index when the input is a list")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("verify", help="residual of the invariance system")
    s.add_argument("input")
    s.add_argument("--field", type=_kind)
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("classify", help="Iwasawa factors and flow class of a 2x2 matrix")
    s.add_argument("entries", type=float, nargs=8, metavar="X",
                   help="re a, im a, re b, im b, re c, im c, re d, im d")
    s.set_defaults(func=cmd_classify)

    s = sub.add_parser("distance", help="geodesic distance between two points")
    s.add_argument("--z1", type=float, nargs=2, required=True, metavar=("RE", "IM"))
    s.add_argument("--z2", type=float, nargs=2, required=True, metavar=("RE", "IM"))
    s.add_argument("--radius", type=_positive, default=1.0)
    s.set_defaults(func=cmd_distance)

    s = sub.add_parser("selftest", help="randomized spot checks (seed: NBODY_SEED)")
    s.add_argument("--samples", type=int, default=200)
    s.set_defaults(func=cmd_selftest)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except (SingularPair, SingularityApproached) as exc:
        print(f"singular configuration: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except StepSizeUnderflow as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except (UsageError, ValueError, KeyError, TypeError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
