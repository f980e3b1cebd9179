"""Exact solver against scipy's HiGHS LP on random instances."""
import argparse
import sys
import time

import numpy as np
from scipy.optimize import linprog

from weakkam_ot.space_core import ProbMeasure
from weakkam_ot.transport import solve_kantorovich


def lp_value(mu, nu, c):
    m, n = c.shape
    A = np.zeros((m + n, m * n))
    for i in range(m):
        A[i, i * n:(i + 1) * n] = 1
    for j in range(n):
        A[m + j, j::n] = 1
    return linprog(c.ravel(), A_eq=A, b_eq=np.concatenate([mu, nu]), method="highs").fun


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--sizes", default="10,25,50,100")
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)
    rng = np.random.default_rng(args.seed)
    print("n,solver_s,lp_s,max_rel_err,max_gap")
    for n in (int(s) for s in args.sizes.split(",")):
        ts, tl, err, gap = 0.0, 0.0, 0.0, 0.0
        for _ in range(args.reps):
            mu, nu = rng.random(n) + 1e-3, rng.random(n) + 1e-3
            mu, nu, c = mu / mu.sum(), nu / nu.sum(), rng.random((n, n))
            t0 = time.perf_counter()
            kr = solve_kantorovich(ProbMeasure(mu), ProbMeasure(nu), c)
            t1 = time.perf_counter()
            ref = lp_value(mu, nu, c)
            t2 = time.perf_counter()
            ts, tl = ts + t1 - t0, tl + t2 - t1
            err = max(err, abs(kr.value - ref) / max(abs(ref), 1e-300))
            gap = max(gap, abs(kr.gap))
        print(f"{n},{ts / args.reps:.4f},{tl / args.reps:.4f},{err:.2e},{gap:.2e}", flush=True)
    return 0


if __name__ == "__main__":
    sys.exit(main())
