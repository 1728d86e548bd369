"""Table 1 cells at larger erasure budgets than the default N=200.

Informational only: cones at N=1000 and balls at N=5000 (close to the
converged r-convex hull), printed next to the published reference means.
"""

import argparse
import math

from conehull.experiments import RHO0, CellSpec, run_cells
from conehull.geometry import Frame

REFERENCE = {
    # n: (cone rho0 h=1/3, ball r=1/4, cone pi/5 h=1/2, ball r=1/6)
    200: (0.204, 0.191, 0.197, 0.161),
    400: (0.138, 0.180, 0.134, 0.140),
    600: (0.107, 0.174, 0.105, 0.132),
    800: (0.090, 0.172, 0.089, 0.127),
    1000: (0.080, 0.170, 0.078, 0.124),
    1200: (0.070, 0.169, 0.070, 0.122),
}


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--runs", type=int, default=20)
    ap.add_argument("--cone-N", type=int, default=1000)
    ap.add_argument("--ball-N", type=int, default=5000)
    ap.add_argument("--mc", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    for n, ref in REFERENCE.items():
        specs = [
            CellSpec("S1", "cone", n, args.cone_N, args.runs, rho=RHO0, h=1 / 3),
            CellSpec("S1", "ball", n, args.ball_N, args.runs, r=0.25),
            CellSpec("S1", "cone", n, args.cone_N, args.runs, rho=math.pi / 5, h=0.5),
            CellSpec("S1", "ball", n, args.ball_N, args.runs, r=1 / 6),
        ]
        rep = run_cells(specs, args.seed, "measure", args.mc, frame=Frame.unit())
        cols = "  ".join(f"{c.mean_error:.3f} ({c.sd_error:.3f}) ref {r:.3f}" for c, r in zip(rep.cells, ref))
        print(f"n={n:<5} {cols}", flush=True)


if __name__ == "__main__":
    main()
