"""Independent reference computations used as test oracles."""
from itertools import permutations

import numpy as np
from scipy.optimize import linprog


def lp_transport(mu, nu, c):
    """Primal LP value with HiGHS."""
    m, n = c.shape
    A = np.zeros((m + n, m * n))
    for i in range(m):
        A[i, i * n:(i + 1) * n] = 1
    for j in range(n):
        A[m + j, j::n] = 1
    res = linprog(c.ravel(), A_eq=A, b_eq=np.concatenate([mu, nu]), bounds=(0, None),
                  method="highs")
    assert res.status == 0
    return float(res.fun)


def birkhoff_value(c):
    """Uniform-marginal optimum by enumerating permutation matrices."""
    n = c.shape[0]
    return min(sum(c[i, p[i]] for i in range(n)) for p in permutations(range(n))) / n


def random_instance(rng, m, n, sparse=0.0):
    mu = rng.random(m) * (rng.random(m) >= sparse)
    nu = rng.random(n) * (rng.random(n) >= sparse)
    mu[rng.integers(m)] += 0.5
    nu[rng.integers(n)] += 0.5
    return mu / mu.sum(), nu / nu.sum(), rng.random((m, n)) * 10
