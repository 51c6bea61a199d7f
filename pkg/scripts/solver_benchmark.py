"""Time the lattice solver and compare it with closed-form distances.

    python3 scripts/solver_benchmark.py --pairs 50 --cells 30
"""
import argparse
import math
import time

import numpy as np

from qhgeo.domains import punctured_plane, punctured_unit_disk, unit_disk
from qhgeo.geodesics import SolverParams, solve_geodesic
from qhgeo.metrics import H, K, closed_form_distance


def _annular(rng, n, r0, r1):
    r = rng.uniform(r0, r1, n)
    return r * np.exp(1j * rng.uniform(-math.pi, math.pi, n))


CASES = {
    "cstar-k": (punctured_plane, K, (0.1, 10.0)),
    "disk-h": (unit_disk, H, (0.0, 0.9)),
    "dstar-h": (punctured_unit_disk, H, (0.05, 0.85)),
}


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--pairs", type=int, default=50)
    ap.add_argument("--cells", type=int, default=30)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()
    params = SolverParams(cells_across=args.cells)
    for name, (make, metric, (r0, r1)) in CASES.items():
        rng = np.random.default_rng(args.seed)
        dom = make()
        errs, t0 = [], time.perf_counter()
        for _ in range(args.pairs):
            a, b = _annular(rng, 2, r0, r1)
            ref = closed_form_distance(dom, metric, a, b)
            errs.append(abs(solve_geodesic(dom, metric, a, b, params).value - ref) / ref)
        dt = (time.perf_counter() - t0) / args.pairs
        print(f"{name:8s} max rel err {max(errs):.2e}  median {np.median(errs):.2e}  {1e3 * dt:.0f} ms/solve")


if __name__ == "__main__":
    main()
