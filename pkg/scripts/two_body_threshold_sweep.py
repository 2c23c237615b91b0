"""Root counts and branch positions of the equal-mass two-body problem across the mass threshold."""
import argparse

import numpy as np

from curvednbody.equilibria import two_body_analysis, two_body_solve


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=float, default=1.0)
    ap.add_argument("--m-max", type=float, default=2.5)
    ap.add_argument("--points", type=int, default=26)
    args = ap.parse_args()

    R = args.radius
    print(f"threshold 2R^3 = {2 * R**3:g}")
    print(f"{'m':>8} {'fam1':>5} {'fam2':>5} {'branches':>9}  alphas")
    for m in np.linspace(args.m_max / args.points, args.m_max, args.points):
        a1 = two_body_analysis(m, 1, R)
        a2 = two_body_analysis(m, 2, R)
        brs = two_body_solve(m, R)
        alphas = " ".join(f"{a:.6f}" for a, _ in a1.intersections + a2.intersections)
        print(f"{m:8.4f} {len(a1.intersections):5d} {len(a2.intersections):5d} {len(brs):9d}  {alphas}")
    print("at threshold:", [(b.family_label, b.positions[0].real) for b in two_body_solve(2 * R**3, R)])


if __name__ == "__main__":
    main()
