"""Both sides of the homothetic-flow system for the antisymmetric equal-mass pair (a, -a)."""
import argparse
import json

import numpy as np

from curvednbody.equilibria import hyperbolic_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mass", type=float, default=1.0)
    ap.add_argument("--radius", type=float, default=1.0)
    ap.add_argument("--points", type=int, default=200)
    ap.add_argument("--table", action="store_true", help="print every grid point")
    args = ap.parse_args()

    R = args.radius
    alphas = np.linspace(0.01 * R, 0.99 * R, args.points)
    scan = hyperbolic_scan(alphas, args.mass, R)
    if args.table:
        print(f"{'alpha':>8} {'lhs':>14} {'rhs':>14}")
        for a, l, r in zip(scan.alphas, scan.lhs, scan.rhs):
            print(f"{a:8.4f} {l:14.6e} {r:14.6e}")
    print(json.dumps(scan.to_dict(), indent=2))


if __name__ == "__main__":
    main()
