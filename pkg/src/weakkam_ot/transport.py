"""Discrete Kantorovich problems, the (K-)/(K+) reformulation and Dirac constructions.

The exact solver integerizes the marginals (largest-remainder rounding at
resolution ``1/scale``) and the shifted cost, runs network simplex, and
reads dual potentials off the residual graph by Bellman-Ford. The duals are
then projected into ``K_c`` by ``psi <- T^- phi``, ``phi <- T^+ psi``.

Notation: ``c[x, y]`` is the cost, ``T^- phi(y) = min_x phi(x) + c(x, y)``
and the (K-) value of ``phi`` is ``int T^- phi dnu - int phi dmu``, which
never exceeds the optimal cost and reaches it exactly at solutions.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import networkx as nx
import numpy as np

from . import clax
from .action import LagrangianModel, fundamental_solution, fundamental_table, leapfrog
from .errors import DomainError, PreconditionError, SolverError, TheoremViolation
from .singular import reachable_gradients, semiconcavity_constant, sing_threshold, superdifferential
from .space_core import ProbMeasure, TorusGrid, TransportPlan, as_cost, as_potential, wrap

DUAL_TOL = 1e-9


# ------------------------------------------------------------------ integers

def integerize(weights, scale: int = 10**12) -> np.ndarray:
    """Integer masses summing to ``scale`` by largest-remainder rounding."""
    w = np.asarray(weights, dtype=float)
    raw = w * scale
    base = np.floor(raw).astype(np.int64)
    short = int(scale - base.sum())
    if short < 0 or short > w.size:
        raise SolverError("weights do not sum to one at the integer resolution")
    order = np.argsort(-(raw - base), kind="stable")
    base[order[:short]] += 1
    return base


def _cost_scale(c: np.ndarray, n_nodes: int) -> float:
    """Largest scale <= 1e12 keeping path sums of the scaled cost inside int64."""
    span = float(c.max() - c.min())
    if span == 0:
        return 1.0
    s = min(1e12, 2.0**60 / (span * max(n_nodes, 1)))
    if s * span < 1e3:
        raise SolverError(f"cost range {span:.3g} cannot be integerized with enough resolution")
    return s


def _residual_potentials(C: np.ndarray, flow: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Bellman-Ford distances on the residual graph of an optimal flow.

    Forward arcs x -> y cost ``C[x, y]``; backward arcs y -> x cost
    ``-C[x, y]`` where the flow is positive. Distances from a virtual source
    joined to every node by zero arcs satisfy ``b - a <= C`` everywhere and
    equality on the flow support.
    """
    a = np.zeros(C.shape[0], dtype=np.int64)
    b = np.zeros(C.shape[1], dtype=np.int64)
    big = np.iinfo(np.int64).max // 4
    back = np.where(flow > 0, -C, big)
    for _ in range(C.shape[0] + C.shape[1] + 1):
        nb = np.minimum(b, (a[:, None] + C).min(axis=0))
        na = np.minimum(a, (nb[None, :] + back).min(axis=1))
        if np.array_equal(na, a) and np.array_equal(nb, b):
            return a, b
        a, b = na, nb
    raise SolverError("negative cycle in the residual graph; the flow is not optimal")


@dataclass(frozen=True, eq=False)
class KantorovichResult:
    value: float
    plan: TransportPlan
    phi: np.ndarray
    psi: np.ndarray
    gap: float
    certified: bool
    feasibility: float = 0.0

    def dual_value(self, mu: ProbMeasure, nu: ProbMeasure) -> float:
        return float(self.psi @ nu.weights - self.phi @ mu.weights)

    def to_json(self) -> dict:
        return {"value": self.value, "plan": self.plan.matrix.tolist(),
                "phi": [float(v) for v in self.phi], "psi": [float(v) for v in self.psi],
                "gap": self.gap, "certified": self.certified}


def _check_problem(mu: ProbMeasure, nu: ProbMeasure, c) -> np.ndarray:
    c = as_cost(c).astype(float)
    if c.shape != (mu.size, nu.size):
        raise DomainError(f"cost shape {c.shape} does not match marginals ({mu.size}, {nu.size})")
    return c


def solve_kantorovich(mu: ProbMeasure, nu: ProbMeasure, c, scale: int = 10**12
                      ) -> KantorovichResult:
    """Exact optimal plan and a dual pair in ``K_c``."""
    c = _check_problem(mu, nu, c)
    sx, sy = mu.support, nu.support
    sub = c[np.ix_(sx, sy)]
    a, b = integerize(mu.weights[sx], scale), integerize(nu.weights[sy], scale)
    cs = _cost_scale(sub, sx.size + sy.size)
    C = np.rint((sub - sub.min()) * cs).astype(np.int64)
    G = nx.DiGraph()
    for i, m in enumerate(a):
        G.add_node(("x", i), demand=-int(m))
    for j, m in enumerate(b):
        G.add_node(("y", j), demand=int(m))
    for i in range(sx.size):
        for j in range(sy.size):
            G.add_edge(("x", i), ("y", j), weight=int(C[i, j]))
    try:
        _, fd = nx.network_simplex(G)
    except nx.NetworkXException as e:
        raise SolverError(f"network simplex failed: {e}") from e
    flow = np.zeros(C.shape, dtype=np.int64)
    for i in range(sx.size):
        for (_, j), f in fd[("x", i)].items():
            flow[i, j] = f
    pa, pb = _residual_potentials(C, flow)
    # b - a <= C rescales to psi - phi <= c; project into K_c on the full spaces
    phi_s = pa / cs
    psi = (phi_s[:, None] + c[sx, :]).min(axis=0)
    phi = clax.t_plus(psi, c)
    plan = np.zeros(c.shape)
    plan[np.ix_(sx, sy)] = flow / float(scale)
    tp = TransportPlan(plan)
    value = tp.integrate(c)
    dual = float(psi @ nu.weights - phi @ mu.weights)
    gap = value - dual
    feas = float((psi[None, :] - phi[:, None] - c).max())
    certified = (abs(gap) <= DUAL_TOL and feas <= DUAL_TOL
                 and tp.is_coupling_of(mu, nu))
    return KantorovichResult(float(value), tp, phi, psi, float(gap), bool(certified), feas)


def transport_cost(mu: ProbMeasure, nu: ProbMeasure, c) -> float:
    return solve_kantorovich(mu, nu, c).value


# ------------------------------------------------------------------- (K-)/(K+)

def k_minus_value(phi, mu: ProbMeasure, nu: ProbMeasure, c) -> float:
    """``int T^- phi dnu - int phi dmu``."""
    c = _check_problem(mu, nu, c)
    phi = as_potential(phi, mu.size).astype(float)
    return float(clax.t_minus(phi, c) @ nu.weights - phi @ mu.weights)


def k_plus_value(psi, mu: ProbMeasure, nu: ProbMeasure, c) -> float:
    """``int psi dnu - int T^+ psi dmu``."""
    c = _check_problem(mu, nu, c)
    psi = as_potential(psi, nu.size).astype(float)
    return float(psi @ nu.weights - clax.t_plus(psi, c) @ mu.weights)


@dataclass(frozen=True, eq=False)
class KCertificate:
    potential: np.ndarray
    transform_side: float
    plan_side: float
    cost_side: float
    certified: bool
    kr: KantorovichResult = field(repr=False)


def solve_K_minus(mu: ProbMeasure, nu: ProbMeasure, c, tol: float = DUAL_TOL) -> KCertificate:
    """Solve (K-) with the extracted dual and certify the three-way identity.

    ``transform_side = int T^- phi dnu``; ``plan_side = inf_pi int (phi(x) + c) dpi``
    from a separate solve with the cost ``c_phi``; ``cost_side = int phi dmu + C(mu, nu)``.
    """
    c = _check_problem(mu, nu, c)
    kr = solve_kantorovich(mu, nu, c)
    phi = kr.phi
    lhs = float(clax.t_minus(phi, c) @ nu.weights)
    mid = solve_kantorovich(mu, nu, phi[:, None] + c).value
    rhs = float(phi @ mu.weights) + kr.value
    ok = abs(lhs - mid) <= tol and abs(mid - rhs) <= tol
    if not ok:
        raise TheoremViolation(f"(K-) identity fails: {lhs!r}, {mid!r}, {rhs!r}")
    return KCertificate(phi, lhs, mid, rhs, True, kr)


def solve_K_plus(mu: ProbMeasure, nu: ProbMeasure, c, tol: float = DUAL_TOL) -> KCertificate:
    """Mirror of :func:`solve_K_minus` with ``c^psi = psi(y) - c`` and a supremum over plans."""
    c = _check_problem(mu, nu, c)
    kr = solve_kantorovich(mu, nu, c)
    psi = kr.psi
    lhs = float(clax.t_plus(psi, c) @ mu.weights)
    mid = -solve_kantorovich(mu, nu, -(psi[None, :] - c)).value
    rhs = float(psi @ nu.weights) - kr.value
    ok = abs(lhs - mid) <= tol and abs(mid - rhs) <= tol
    if not ok:
        raise TheoremViolation(f"(K+) identity fails: {lhs!r}, {mid!r}, {rhs!r}")
    return KCertificate(psi, lhs, mid, rhs, True, kr)


def k_minus_from_pair(phi, psi, mu: ProbMeasure, nu: ProbMeasure, c,
                      tol: float = DUAL_TOL) -> np.ndarray:
    """From an optimal pair of the dual problem, return ``phi`` certified for (K-)."""
    c = _check_problem(mu, nu, c)
    phi = as_potential(phi, mu.size).astype(float)
    psi = as_potential(psi, nu.size).astype(float)
    if float((psi[None, :] - phi[:, None] - c).max()) > tol:
        raise PreconditionError("pair is not admissible")
    opt = solve_kantorovich(mu, nu, c).value
    if abs(float(psi @ nu.weights - phi @ mu.weights) - opt) > tol:
        raise PreconditionError("pair does not attain the optimal cost")
    if abs(k_minus_value(phi, mu, nu, c) - opt) > tol:
        raise TheoremViolation("phi from an optimal pair does not solve (K-)")
    return phi


def pair_from_k_minus(phi, mu: ProbMeasure, nu: ProbMeasure, c,
                      tol: float = DUAL_TOL) -> tuple[np.ndarray, np.ndarray]:
    """From a (K-) solution, return ``(phi, T^- phi)`` certified optimal for the dual."""
    c = _check_problem(mu, nu, c)
    phi = as_potential(phi, mu.size).astype(float)
    opt = solve_kantorovich(mu, nu, c).value
    if abs(k_minus_value(phi, mu, nu, c) - opt) > tol:
        raise PreconditionError("phi does not solve (K-)")
    psi = clax.t_minus(phi, c)
    if float((psi[None, :] - phi[:, None] - c).max()) > tol:
        raise TheoremViolation("(phi, T^- phi) is not admissible")
    return phi, psi


def k_plus_from_pair(phi, psi, mu: ProbMeasure, nu: ProbMeasure, c,
                     tol: float = DUAL_TOL) -> np.ndarray:
    c = _check_problem(mu, nu, c)
    phi = as_potential(phi, mu.size).astype(float)
    psi = as_potential(psi, nu.size).astype(float)
    if float((psi[None, :] - phi[:, None] - c).max()) > tol:
        raise PreconditionError("pair is not admissible")
    opt = solve_kantorovich(mu, nu, c).value
    if abs(float(psi @ nu.weights - phi @ mu.weights) - opt) > tol:
        raise PreconditionError("pair does not attain the optimal cost")
    if abs(k_plus_value(psi, mu, nu, c) - opt) > tol:
        raise TheoremViolation("psi from an optimal pair does not solve (K+)")
    return psi


def pair_from_k_plus(psi, mu: ProbMeasure, nu: ProbMeasure, c,
                     tol: float = DUAL_TOL) -> tuple[np.ndarray, np.ndarray]:
    c = _check_problem(mu, nu, c)
    psi = as_potential(psi, nu.size).astype(float)
    opt = solve_kantorovich(mu, nu, c).value
    if abs(k_plus_value(psi, mu, nu, c) - opt) > tol:
        raise PreconditionError("psi does not solve (K+)")
    phi = clax.t_plus(psi, c)
    if float((psi[None, :] - phi[:, None] - c).max()) > tol:
        raise TheoremViolation("(T^+ psi, psi) is not admissible")
    return phi, psi


# ------------------------------------------------------------ support laws

@dataclass(frozen=True, eq=False)
class SlackTable:
    """``F[x, y] = phi(x) + c(x, y) - T^- phi(y)``."""

    values: np.ndarray

    def zero_set(self, tol: float) -> np.ndarray:
        return self.values <= tol


def slack_table(phi, c) -> SlackTable:
    c = as_cost(c).astype(float)
    phi = as_potential(phi, c.shape[0]).astype(float)
    return SlackTable(phi[:, None] + c - clax.t_minus(phi, c)[None, :])


@dataclass(frozen=True, eq=False)
class SupportReport:
    supported: bool
    solves_k_minus: bool
    worst_slack: float
    slack: SlackTable
    plans: list


def support_characterization(phi, mu: ProbMeasure, nu: ProbMeasure, c, plans=(),
                             tol: float | None = None) -> SupportReport:
    """Whether optimal plans are carried by the zero-slack set of ``phi``.

    The solver's optimal plan is always checked; extra optimal plans may be
    passed in ``plans``. ``solves_k_minus`` is decided independently from the
    (K-) value.
    """
    c = _check_problem(mu, nu, c)
    tol = clax.eps_arg(c) if tol is None else tol
    kr = solve_kantorovich(mu, nu, c)
    all_plans = [kr.plan] + [p if isinstance(p, TransportPlan) else TransportPlan(p) for p in plans]
    F = slack_table(phi, c)
    worst = max(float(F.values[p.matrix > 0].max()) for p in all_plans)
    solves = abs(k_minus_value(phi, mu, nu, c) - kr.value) <= DUAL_TOL
    return SupportReport(worst <= tol, bool(solves), worst, F, all_plans)


def dirac_support_condition(phi, mu: ProbMeasure, y0: int, c, tol: float | None = None) -> bool:
    """Whether every support point x of ``mu`` has ``y0`` in its c-subdifferential."""
    c = as_cost(c).astype(float)
    phi = as_potential(phi, c.shape[0]).astype(float)
    tol = clax.eps_arg(c) if tol is None else tol
    col = phi + c[:, y0]
    return bool(np.all(col[mu.support] <= col.min() + tol))


# --------------------------------------------------------- Dirac constructions

def _terminal_covectors(model: LagrangianModel, grid: TorusGrid, feet, y0: int,
                        t: float) -> np.ndarray:
    """Terminal momenta of minimizers from each foot to ``y0``."""
    return np.array([fundamental_solution(model, 0.0, t, grid.coords[int(x)],
                                          grid.coords[y0]).vs[-1] for x in feet], dtype=float)


def reachable_covectors(model: LagrangianModel, grid: TorusGrid, phi, y0: int,
                        t: float) -> np.ndarray:
    """Extreme terminal covectors of minimizers ending at ``y0``.

    The minimizers start at the grid argmin feet of ``phi + c(., y0)``; the
    covectors are their final velocities. Extremes closer
    than the singular threshold are merged into their mean.
    """
    c = fundamental_table(model, grid, 0.0, t).values
    phi = as_potential(phi, grid.size).astype(float)
    col = phi + c[:, y0]
    feet = np.flatnonzero(col <= col.min() + clax.eps_arg(c))
    p = _terminal_covectors(model, grid, feet, y0, t)
    u = clax.t_minus(phi, c)
    theta = sing_threshold(grid, semiconcavity_constant(u, grid))
    lo, hi = float(p.min()), float(p.max())
    if hi - lo <= theta:
        return np.array([0.5 * (lo + hi)])
    return np.array([lo, hi])


@dataclass(frozen=True, eq=False)
class DiracResult:
    mu: ProbMeasure
    y0: int
    covectors: np.ndarray
    weights: np.ndarray
    feet: np.ndarray
    nodes: np.ndarray
    snap: np.ndarray
    tolerance: float
    certified: bool

    def to_json(self) -> dict:
        return {"y0": self.y0, "mu": [float(v) for v in self.mu.weights],
                "covectors": self.covectors.tolist(), "weights": self.weights.tolist(),
                "feet": self.feet.tolist(), "nodes": self.nodes.tolist(),
                "snap": self.snap.tolist(), "tolerance": self.tolerance,
                "certified": self.certified}


def _local_lip(col: np.ndarray, i: int, h: float) -> float:
    n = col.size
    return max(abs(col[(i + 1) % n] - col[i]), abs(col[i] - col[(i - 1) % n])) / h


def dirac_construction(model: LagrangianModel, grid: TorusGrid, phi, y0: int, t: float,
                       covectors, weights=None) -> DiracResult:
    """Backward characteristics from ``(y0, p)`` pushed to the grid.

    ``covectors`` must lie in the reachable-gradient set of ``T^-_t phi`` at
    ``y0`` (tolerance half the singular threshold). The certificate checks
    that every snapped foot minimizes ``phi + c(., y0)`` within ``eps_arg``
    inflated by the local slope times the snap distance.
    """
    if grid.dim != 1:
        raise DomainError("Dirac constructions are implemented on 1-D grids")
    phi = as_potential(phi, grid.size).astype(float)
    cov = np.atleast_1d(np.asarray(covectors, dtype=float))
    w = np.full(cov.size, 1.0 / cov.size) if weights is None else np.asarray(weights, float)
    if w.shape != cov.shape or np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
        raise DomainError("weights must be a probability vector matching the covectors")
    c = fundamental_table(model, grid, 0.0, t).values
    u = clax.t_minus(phi, c)
    col = phi + c[:, y0]
    argmin = np.flatnonzero(col <= col.min() + clax.eps_arg(c))
    reach = np.concatenate([reachable_gradients(u, grid, y0),
                            _terminal_covectors(model, grid, argmin, y0, t)])
    theta = sing_threshold(grid, semiconcavity_constant(u, grid))
    off = np.abs(cov[:, None] - reach[None, :]).min(axis=1)
    if np.any(off[w > 0] > 0.5 * theta):
        raise PreconditionError(f"covectors {cov[off > 0.5 * theta].tolist()} are not reachable "
                                f"gradients at node {y0} (sampled {reach.tolist()})")
    x, _, _ = leapfrog(model, np.full(cov.size, grid.coords[y0]), cov, -t)
    feet = np.asarray(x) % 1.0
    nodes = grid.nearest_index(feet)
    snap = np.abs(wrap(feet - grid.coords[nodes]))
    m = np.zeros(grid.size)
    np.add.at(m, nodes, w)
    mu = ProbMeasure(m)
    tol = clax.eps_arg(c) + max(_local_lip(col, int(i), grid.spacing) * s
                                for i, s in zip(nodes, snap))
    ok = dirac_support_condition(phi, mu, y0, c, tol)
    return DiracResult(mu, int(y0), cov, w, feet, nodes, snap, float(tol), ok)


@dataclass(frozen=True, eq=False)
class CovectorMeasure:
    covectors: np.ndarray
    weights: np.ndarray
    sources: np.ndarray
    in_hull: bool
    roundtrip_ok: bool
    hull: np.ndarray


def recover_covector_measure(model: LagrangianModel, grid: TorusGrid, phi, y0: int, t: float,
                             mu: ProbMeasure) -> CovectorMeasure:
    """Terminal covectors of minimizing curves from ``supp(mu)`` to ``y0``.

    Every covector must fall in the superdifferential hull of ``T^-_t phi``
    at ``y0`` (tolerance half the singular threshold); the round trip through
    :func:`dirac_construction` must land within one cell of ``supp(mu)``.
    """
    phi = as_potential(phi, grid.size).astype(float)
    c = fundamental_table(model, grid, 0.0, t).values
    if not dirac_support_condition(phi, mu, y0, c, tol=_grid_tol(phi, c, grid)):
        raise PreconditionError("mu does not solve (K-) for the Dirac target")
    u = clax.t_minus(phi, c)
    est = superdifferential(u, grid, y0)
    tol = 0.5 * sing_threshold(grid, semiconcavity_constant(u, grid))
    src = mu.support
    cov = _terminal_covectors(model, grid, src, y0, t)
    in_hull = all(est.contains(p, tol) for p in cov)
    if not in_hull:
        raise TheoremViolation(f"terminal covectors {cov.tolist()} leave the hull {est.hull.tolist()}")
    back = dirac_construction(model, grid, phi, y0, t, cov, mu.weights[src])
    dist = grid.index_distance(back.nodes[:, None], src[None, :])
    rt = bool(np.all(dist.min(axis=1) <= 1) and np.all(dist.min(axis=0) <= 1))
    return CovectorMeasure(cov, mu.weights[src].copy(), src, in_hull, rt, est.hull)


def _grid_tol(phi, c, grid):
    """Argmin slack allowing one cell of snapping: ``eps_arg + max slope * spacing``."""
    slope = np.abs(np.roll(phi[:, None] + c, -1, 0) - (phi[:, None] + c)).max()
    return clax.eps_arg(c) + float(slope)


@dataclass(frozen=True, eq=False)
class MixtureResult:
    mu: ProbMeasure
    nu: ProbMeasure
    components: list
    value: float
    cost: float
    certified: bool
    union_ok: bool


def finite_mixture_construction(model: LagrangianModel, grid: TorusGrid, phi, ys, lambdas,
                                t: float, rhos=None) -> MixtureResult:
    """``sum_i lambda_i mu_i`` with each ``mu_i`` from :func:`dirac_construction`.

    ``rhos`` optionally gives ``(covectors, weights)`` per target; the default
    spreads mass evenly over the reachable covectors of each target.
    """
    phi = as_potential(phi, grid.size).astype(float)
    ys = [int(y) for y in ys]
    lam = np.asarray(lambdas, dtype=float)
    if lam.shape != (len(ys),) or np.any(lam < 0) or abs(lam.sum() - 1) > 1e-12:
        raise DomainError("mixture weights must be a probability vector, one per target")
    comps = []
    for i, y in enumerate(ys):
        if rhos is not None and rhos[i] is not None:
            cov, w = rhos[i]
        else:
            cov, w = reachable_covectors(model, grid, phi, y, t), None
        comps.append(dirac_construction(model, grid, phi, y, t, cov, w))
    m = sum(l * d.mu.weights for l, d in zip(lam, comps))
    mu = ProbMeasure(m / m.sum())
    nw = np.zeros(grid.size)
    np.add.at(nw, ys, lam)
    nu = ProbMeasure(nw)
    c = fundamental_table(model, grid, 0.0, t).values
    value = k_minus_value(phi, mu, nu, c)
    cost = solve_kantorovich(mu, nu, c).value
    tol = DUAL_TOL + sum(l * d.tolerance for l, d in zip(lam, comps))
    union = np.unique(np.concatenate([d.mu.support for l, d in zip(lam, comps) if l > 0]))
    union_ok = bool(np.array_equal(union, mu.support))
    certified = bool(all(d.certified for d in comps) and abs(value - cost) <= tol and union_ok)
    return MixtureResult(mu, nu, comps, value, cost, certified, union_ok)


# ----------------------------------------------------------------- nets

@dataclass(frozen=True, eq=False)
class NetStep:
    n: int
    centers: np.ndarray
    nu_n: ProbMeasure
    ball_excess: float
    w1: float
    value: float
    mixture: MixtureResult


@dataclass(frozen=True, eq=False)
class NetResult:
    steps: list
    membership: dict
    portmanteau: dict
    stable_values: bool
    w1_ok: bool

    def to_json(self) -> dict:
        return {"schedule": [s.n for s in self.steps], "w1": [s.w1 for s in self.steps],
                "value": [s.value for s in self.steps],
                "certified": [s.mixture.certified for s in self.steps],
                "membership": {str(k): v for k, v in self.membership.items()},
                "portmanteau": {str(k): v for k, v in self.portmanteau.items()},
                "stable_values": self.stable_values, "w1_ok": self.w1_ok}


def net_of_support(grid: TorusGrid, nu: ProbMeasure, n: int) -> tuple[np.ndarray, np.ndarray]:
    """A 1/n-net of ``supp(nu)`` from grid nodes nearest to ``k/n``, with Voronoi weights.

    Centers whose Voronoi cell carries no mass are dropped.
    """
    cand = np.unique(grid.nearest_index(np.arange(n) / n))
    supp = nu.support
    d = np.abs(wrap(grid.coords[supp][:, None] - grid.coords[cand][None, :]))
    owner = d.argmin(axis=1)
    if d.min(axis=1).max() > 1.0 / n + 1e-12:
        raise SolverError(f"grid too coarse for a 1/{n}-net")
    r = np.zeros(cand.size)
    np.add.at(r, owner, nu.weights[supp])
    keep = r > 0
    return cand[keep], r[keep]


def net_approximation(model: LagrangianModel, grid: TorusGrid, phi, nu: ProbMeasure, t: float,
                      schedule=(2, 4, 8, 16, 32), stable_from: int = 8,
                      value_tol: float = 1e-3) -> NetResult:
    """Replace ``nu`` by weighted Diracs on nets and build (K-) solutions for each."""
    from .wasserstein import wasserstein_p

    phi = as_potential(phi, grid.size).astype(float)
    c = fundamental_table(model, grid, 0.0, t).values
    steps = []
    for n in schedule:
        centers, r = net_of_support(grid, nu, n)
        nw = np.zeros(grid.size)
        nw[centers] = r
        nu_n = ProbMeasure(nw)
        ball = sum(nu.weights[np.abs(wrap(grid.coords - grid.coords[y])) < 1.0 / n].sum()
                   for y in centers)
        mix = finite_mixture_construction(model, grid, phi, centers, r, t)
        steps.append(NetStep(int(n), centers, nu_n, float(ball - 1.0),
                             wasserstein_p(nu_n, nu, grid, 1), mix.value, mix))
    final = steps[-1].mixture.mu
    tol = _grid_tol(phi, c, grid)
    S = (phi[:, None] + c) <= clax.t_minus(phi, c)[None, :] + tol
    membership, port = {}, {}
    for s in steps:
        if s.n < stable_from:
            continue
        membership[s.n] = bool(all(S[x, s.centers].any() for x in final.support))
    for x in final.support:
        near = np.abs(wrap(grid.coords - grid.coords[x])) <= grid.spacing + 1e-12
        masses = [float(s.mixture.mu.weights[near].sum()) for s in steps if s.n >= stable_from]
        port[int(x)] = bool(min(masses) >= final.weights[x] - 1e-6)
    late = [s.value for s in steps if s.n >= stable_from]
    stable = bool(late and max(late) - min(late) <= value_tol)
    w1_ok = all(s.w1 <= 2.0 / s.n + 1e-12 for s in steps)
    return NetResult(steps, membership, port, stable, bool(w1_ok))


# ------------------------------------------------------------------ Monge

@dataclass(frozen=True, eq=False)
class MongeReport:
    optimal: bool
    integral_identity: bool
    in_subdiff: bool
    implications_ok: bool
    ties: bool
    atomless_surrogate: bool
    map_cost: float
    optimal_cost: float

    def to_json(self) -> dict:
        return {k: getattr(self, k) for k in ("optimal", "integral_identity", "in_subdiff",
                                               "implications_ok", "ties", "atomless_surrogate",
                                               "map_cost", "optimal_cost")}


def monge_check(T, mu: ProbMeasure, nu: ProbMeasure, c, phi=None,
                tol: float = DUAL_TOL) -> MongeReport:
    """Compare map optimality, the transform identity and c-subdifferential membership.

    ``T`` is an index array sending X to Y. Without ``phi`` the solver's
    dual potential is used. ``ties`` flags optimal plans that are not
    unique, where the reverse implication is only heuristic.
    """
    c = _check_problem(mu, nu, c)
    T = np.asarray(T, dtype=int)
    supp = mu.support
    img = np.zeros(nu.size)
    np.add.at(img, T[supp], mu.weights[supp])
    if np.abs(img - nu.weights).max() > 1e-10:
        raise PreconditionError("the map does not push mu to nu")
    kr = solve_kantorovich(mu, nu, c)
    phi = kr.phi if phi is None else as_potential(phi, mu.size).astype(float)
    map_cost = float((c[supp, T[supp]] * mu.weights[supp]).sum())
    optimal = map_cost <= kr.value + tol
    u = clax.t_minus(phi, c)
    lhs = float((u[T[supp]] * mu.weights[supp]).sum())
    rhs = float(((phi[supp] + c[supp, T[supp]]) * mu.weights[supp]).sum())
    eps = clax.eps_arg(c)
    identity = abs(lhs - rhs) <= eps
    member = bool(np.all(phi[supp] + c[supp, T[supp]] <= u[T[supp]] + eps))
    implications = (identity == member) and (not member or optimal)
    # ties: a second optimal plan exists if some zero-slack pair off the plan support is usable
    F = kr.phi[:, None] + c - kr.psi[None, :]
    zero = F <= eps
    ties = bool((zero[np.ix_(supp, nu.support)].sum() > len(kr.plan.support)))
    if optimal:
        # optimality must be witnessed by the extracted dual
        implications &= bool(np.all(F[supp, T[supp]] <= eps)) or ties
    uniform = bool(np.allclose(mu.weights[supp], 1.0 / supp.size) and supp.size >= 16)
    return MongeReport(bool(optimal), bool(identity), member, bool(implications), ties, uniform,
                       map_cost, kr.value)
