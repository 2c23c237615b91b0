"""Solve the special configurations and check that the flow keeps each branch a solution."""
import argparse
import math

from curvednbody.dynamics import Tolerances
from curvednbody.equilibria import euler3_solve, square4_solve, transport_branch, two_body_solve, verify_invariance


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mass", type=float, default=1.0, help="two-body mass")
    ap.add_argument("--euler", type=float, nargs=2, default=(0.1, 0.1), metavar=("m", "M"))
    ap.add_argument("--square", type=float, default=0.5)
    ap.add_argument("--horizon", type=float, default=math.pi)
    ap.add_argument("--rtol", type=float, default=1e-10)
    ap.add_argument("--transport", action="store_true", help="also push two-body branches to elliptic-a")
    args = ap.parse_args()

    brs = two_body_solve(args.mass) + euler3_solve(*args.euler) + square4_solve(args.square)
    if args.transport:
        brs += [transport_branch(b, "elliptic-a") for b in two_body_solve(args.mass)]
    opts = Tolerances(rel_tol=args.rtol)
    print(f"{'label':<28} {'res0':>8} {'res(t)':>8} {'radius':>8} {'return':>8} {'dE':>8} {'dJ':>8} {'steps':>6}")
    for b in brs:
        r = verify_invariance(b, args.horizon, opts)
        print(f"{b.family_label:<28} {b.residual_max:8.1e} {r.max_residual:8.1e} {r.max_radius_drift:8.1e} "
              f"{r.final_deviation:8.1e} {r.energy_drift:8.1e} {r.angmom_drift:8.1e} {r.steps:6d}")


if __name__ == "__main__":
    main()
