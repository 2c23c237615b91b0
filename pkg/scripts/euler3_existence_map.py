"""Existence of the Eulerian three-body configuration over a grid of outer and central masses.

Prints the maximum of F/G over the open interval; branches exist where it is at least one.
"""
import argparse

import numpy as np

from curvednbody.equilibria import SQRT2M1, euler3_F, euler3_analysis


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--radius", type=float, default=1.0)
    ap.add_argument("--masses", type=float, nargs="+", default=[0.05, 0.1, 0.2, 0.4, 0.8, 1.0])
    args = ap.parse_args()

    R = args.radius
    print(f"max of F on (0, R): {euler3_F(SQRT2M1 * R, R):.6f}  (R^3/2 = {R**3 / 2:.6f})")
    ms = args.masses
    print("rows m, columns M; entries max F/G (* marks existence)")
    print(" " * 8 + "".join(f"{M:>10g}" for M in ms))
    for m in ms:
        row = []
        for M in ms:
            an = euler3_analysis(m, M, R)
            row.append(f"{an.ratio_max:9.4f}{'*' if an.intersections else ' '}")
        print(f"{m:8g}" + "".join(row))


if __name__ == "__main__":
    main()
