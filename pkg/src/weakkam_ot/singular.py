"""Superdifferentials and singular sets of semiconcave functions on torus grids.

Superdifferentials are estimated from one-sided difference quotients. In 1-D
the estimate at node ``x`` is the interval ``[pR, pL]`` of the right and left
quotients; in 2-D it is the rectangle spanned by the four quadrant gradients.

Singular nodes are detected from a per-node "diameter" ``d``: a node is
flagged when ``d`` is a local maximum among its grid neighbours and
``d + max(neighbour d) > theta``. Summing with the neighbour catches kinks
that fall between two nodes, where the jump is split over both.

The c-singular detector works with the c-superdifferential from ``clax``
and the covectors ``D_y c(x, y)`` of its members, so the two detectors
measure the same jump through different routes.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import clax
from .action import LagrangianModel, fundamental_table, lax_oleinik_evolve, leapfrog
from .errors import DomainError, PreconditionError
from .space_core import TorusGrid, as_cost, as_potential, wrap

HULL_TOL = 1e-10


# ------------------------------------------------------------------ geometry

def convex_hull_2d(points, tol: float = HULL_TOL) -> np.ndarray:
    """Counterclockwise hull vertices (Andrew's monotone chain), collinear points dropped."""
    pts = np.unique(np.asarray(points, dtype=float).reshape(-1, 2), axis=0)
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= tol:
            lower.pop()
        lower.append(p)
    for p in pts[::-1]:
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= tol:
            upper.pop()
        upper.append(p)
    return np.array(lower[:-1] + upper[:-1])


def _point_polygon_distance(p, poly) -> float:
    if len(poly) == 1:
        return float(np.linalg.norm(p - poly[0]))
    if len(poly) >= 3:
        nxt = np.roll(poly, -1, axis=0)
        e = nxt - poly
        crs = e[:, 0] * (p[1] - poly[:, 1]) - e[:, 1] * (p[0] - poly[:, 0])
        if np.all(crs >= -HULL_TOL):
            return 0.0
        segs = zip(poly, nxt)
    else:
        segs = [(poly[0], poly[1])]
    best = math.inf
    for a, b in segs:
        ab = b - a
        s = np.clip(np.dot(p - a, ab) / max(np.dot(ab, ab), 1e-300), 0.0, 1.0)
        best = min(best, float(np.linalg.norm(p - (a + s * ab))))
    return best


def hull_distance(a, b) -> float:
    """Hausdorff distance between two intervals ``[lo, hi]`` or two convex polygons."""
    a, b = np.asarray(a, dtype=float), np.asarray(b, dtype=float)
    if a.ndim == 1:
        return float(max(abs(a[0] - b[0]), abs(a[1] - b[1])))
    d1 = max(_point_polygon_distance(p, b) for p in a)
    d2 = max(_point_polygon_distance(p, a) for p in b)
    return float(max(d1, d2))


# ---------------------------------------------------------- superdifferential

@dataclass(frozen=True, eq=False)
class SuperdiffEstimate:
    """Superdifferential estimate at one node.

    ``reachable`` holds the sampled covectors, shape (k,) in 1-D and (k, 2)
    in 2-D. ``hull`` is ``[lo, hi]`` in 1-D and a counterclockwise vertex
    list in 2-D.
    """

    index: int
    reachable: np.ndarray
    hull: np.ndarray
    diameter: float
    active: tuple = ()

    def contains(self, p, tol: float = 0.0) -> bool:
        if self.hull.ndim == 1:
            return bool(self.hull[0] - tol <= float(p) <= self.hull[1] + tol)
        return _point_polygon_distance(np.asarray(p, dtype=float), self.hull) <= tol


def _as_grid_potential(phi, grid: TorusGrid) -> np.ndarray:
    phi = as_potential(phi, grid.size).astype(float)
    return phi if grid.dim == 1 else phi.reshape(grid.n, grid.n)


def _quotients(phi, grid: TorusGrid):
    """Forward and backward difference quotients per axis, flattened."""
    u = _as_grid_potential(phi, grid)
    h = grid.spacing
    fwd, bwd = [], []
    for ax in range(grid.dim):
        fwd.append(((np.roll(u, -1, ax) - u) / h).ravel())
        bwd.append(((u - np.roll(u, 1, ax)) / h).ravel())
    return fwd, bwd


def _estimate_from(reach: np.ndarray, index: int, active=()) -> SuperdiffEstimate:
    if reach.ndim == 1:
        hull = np.array([reach.min(), reach.max()])
        return SuperdiffEstimate(index, reach, hull, float(hull[1] - hull[0]), active)
    hull = convex_hull_2d(reach)
    diff = reach[:, None, :] - reach[None, :, :]
    return SuperdiffEstimate(index, reach, hull, float(np.sqrt((diff**2).sum(-1)).max()), active)


def superdifferential(phi, grid: TorusGrid, x: int) -> SuperdiffEstimate:
    """One-sided quotient estimate of the superdifferential at node ``x``."""
    fwd, bwd = _quotients(phi, grid)
    x = int(x)
    if grid.dim == 1:
        return _estimate_from(np.array([fwd[0][x], bwd[0][x]]), x)
    corners = np.array([[gx[x], gy[x]] for gx in (fwd[0], bwd[0]) for gy in (fwd[1], bwd[1])])
    return _estimate_from(corners, x)


def superdiff_diameters(phi, grid: TorusGrid) -> np.ndarray:
    """Diameter of the superdifferential estimate at every node."""
    fwd, bwd = _quotients(phi, grid)
    sq = sum((f - b) ** 2 for f, b in zip(fwd, bwd))
    return np.sqrt(sq)


def reachable_gradients(phi, grid: TorusGrid, x: int) -> np.ndarray:
    """Gradients sampled one cell away on either side of ``x`` (1-D).

    These stay on the smooth branches adjacent to a kink located anywhere
    between ``x - 1`` and ``x + 1``.
    """
    if grid.dim != 1:
        raise DomainError("reachable gradient sampling is implemented in 1-D")
    fwd, _ = _quotients(phi, grid)
    q = fwd[0]
    n = grid.n
    return np.array([q[(x - 2) % n], q[(x + 1) % n]])


# ------------------------------------------------------------ semiconcavity

@dataclass(frozen=True)
class SemiconcavityReport:
    ok: bool
    worst_excess: float
    worst_lag: tuple

    def __bool__(self) -> bool:
        return self.ok


def _lags(grid: TorusGrid, max_lag: float):
    k = int(math.floor(max_lag * grid.n + 1e-9))
    if grid.dim == 1:
        return [(i,) for i in range(1, k + 1)]
    out = []
    for i in range(0, k + 1):
        for j in range(-k, k + 1):
            if (i, j) <= (0, 0) or i * i + j * j > k * k:
                continue
            out.append((i, j))
    return out


def semiconcavity_check(phi, grid: TorusGrid, C: float, max_lag: float = 0.25,
                        tol: float = 1e-12) -> SemiconcavityReport:
    """Midpoint test ``phi(x+h) + phi(x-h) - 2 phi(x) <= C |h|^2`` for all nodes and lags."""
    u = _as_grid_potential(phi, grid)
    scale = 1.0 + float(np.abs(u).max())
    worst, worst_lag = -math.inf, ()
    for lag in _lags(grid, max_lag):
        axes = tuple(range(grid.dim))
        plus = np.roll(u, tuple(-l for l in lag), axes)
        minus = np.roll(u, lag, axes)
        h2 = sum(l * l for l in lag) * grid.spacing**2
        excess = float((plus + minus - 2 * u - C * h2).max())
        if excess > worst:
            worst, worst_lag = excess, lag
    return SemiconcavityReport(worst <= tol * scale, worst, worst_lag)


def semiconcavity_constant(phi, grid: TorusGrid) -> float:
    """Smallest C passing the lag-one midpoint test along the axes (at least 0)."""
    u = _as_grid_potential(phi, grid)
    best = 0.0
    for ax in range(grid.dim):
        d2 = (np.roll(u, -1, ax) + np.roll(u, 1, ax) - 2 * u) / grid.spacing**2
        best = max(best, float(d2.max()))
    return best


def sing_threshold(grid: TorusGrid, C: float) -> float:
    return 10.0 * grid.spacing * (1.0 + C)


def _neighbor_table(grid: TorusGrid) -> np.ndarray:
    """(N, 2*dim) neighbour indices; even columns step backwards, odd forwards."""
    idx = np.arange(grid.size)
    cols = []
    for ax in range(grid.dim):
        for s in (-1, 1):
            off = [0] * grid.dim
            off[ax] = s
            cols.append(grid.shift(idx, off))
    return np.stack(cols, axis=1)


def select_singular(d: np.ndarray, grid: TorusGrid, theta: float) -> np.ndarray:
    """Nodes where ``d`` is a local maximum and ``d + max(neighbour d) > theta``.

    Ties are broken toward the lowest index so a plateau yields one node.
    """
    nb = _neighbor_table(grid)
    dn = d[nb]
    idx = np.arange(grid.size)[:, None]
    strict = nb < idx
    local = np.all(np.where(strict, d[:, None] > dn, d[:, None] >= dn), axis=1)
    return np.flatnonzero(local & (d > 0) & (d + dn.max(axis=1) > theta))


def _resolve_C(phi, grid, C):
    if C is None:
        C = semiconcavity_constant(phi, grid)
        if C * grid.spacing > 1.0:
            raise PreconditionError(
                f"function is not semiconcave at grid resolution (lag-one constant {C:.3g})")
        return C
    rep = semiconcavity_check(phi, grid, C)
    if not rep:
        raise PreconditionError(
            f"semiconcavity test with C={C} fails by {rep.worst_excess:.3g} at lag {rep.worst_lag}")
    return C


def sing_set(phi, grid: TorusGrid, C: float | None = None,
             theta: float | None = None) -> np.ndarray:
    """Singular nodes of a semiconcave grid function.

    ``C`` defaults to the estimated semiconcavity constant and ``theta`` to
    ``10 * spacing * (1 + C)``.
    """
    C = _resolve_C(phi, grid, C)
    theta = sing_threshold(grid, C) if theta is None else theta
    return select_singular(superdiff_diameters(phi, grid), grid, theta)


def marginal_superdiff(F, grid: TorusGrid, x: int, tol: float | None = None) -> SuperdiffEstimate:
    """Superdifferential of ``u = min_s F[s]`` at ``x`` from the active members.

    Active members are ``M(x) = {s : F[s, x] <= u(x) + tol}``; the estimate is
    the hull of their central-difference gradients at ``x``.
    """
    F = np.atleast_2d(np.asarray(F, dtype=float))
    if F.shape[1] != grid.size:
        raise DomainError(f"family has {F.shape[1]} columns, grid has {grid.size} nodes")
    tol = clax.eps_arg(F) if tol is None else tol
    x = int(x)
    u = F.min(axis=0)
    active = np.flatnonzero(F[:, x] <= u[x] + tol)
    h = grid.spacing
    grads = []
    for s in active:
        if grid.dim == 1:
            grads.append((F[s, (x + 1) % grid.n] - F[s, (x - 1) % grid.n]) / (2 * h))
        else:
            g = [(F[s, grid.shift(x, o)] - F[s, grid.shift(x, tuple(-v for v in o))]) / (2 * h)
                 for o in ((1, 0), (0, 1))]
            grads.append(g)
    return _estimate_from(np.array(grads, dtype=float), x, tuple(int(s) for s in active))


# -------------------------------------------------------- c-singular detection

def c_covectors(c, grid: TorusGrid) -> np.ndarray:
    """Central differences ``D_y c(x, y)``; shape (N, N) in 1-D, (N, N, 2) in 2-D."""
    c = as_cost(c, (grid.size, grid.size)).astype(float)
    h = grid.spacing
    if grid.dim == 1:
        return (np.roll(c, -1, 1) - np.roll(c, 1, 1)) / (2 * h)
    cc = c.reshape(grid.size, grid.n, grid.n)
    parts = [((np.roll(cc, -1, ax) - np.roll(cc, 1, ax)) / (2 * h)).reshape(grid.size, -1)
             for ax in (1, 2)]
    return np.stack(parts, axis=-1)


def _spread(vecs: np.ndarray) -> float:
    if len(vecs) < 2:
        return 0.0
    if vecs.ndim == 1:
        return float(vecs.max() - vecs.min())
    diff = vecs[:, None, :] - vecs[None, :, :]
    return float(np.sqrt((diff**2).sum(-1)).max())


def c_superdiff_diameters(psi, c, grid: TorusGrid, tol: float | None = None) -> np.ndarray:
    """Per-node c-diameter.

    With ``G(y) = {D_y c(x, y) : x in d^c psi(y)}``, the diameter is the
    larger of ``spread(G(y))`` and half of ``spread(G(y) + G(y'))`` over grid
    neighbours ``y'``.
    """
    S = clax.superdiff_matrix(psi, c, tol)
    P = c_covectors(c, grid)
    G = [P[S[:, y], y] for y in range(grid.size)]
    nb = _neighbor_table(grid)
    d = np.zeros(grid.size)
    for y in range(grid.size):
        best = _spread(G[y])
        for z in nb[y]:
            best = max(best, 0.5 * _spread(np.concatenate([G[y], G[z]])))
        d[y] = best
    return d


def c_sing_set(psi, c, grid: TorusGrid, theta: float, tol: float | None = None) -> np.ndarray:
    return select_singular(c_superdiff_diameters(psi, c, grid, tol), grid, theta)


def within_cells(a, b, grid: TorusGrid, cells: int = 1) -> bool:
    """Whether every node of ``a`` lies within ``cells`` grid steps of some node of ``b``."""
    a, b = np.asarray(a, dtype=int), np.asarray(b, dtype=int)
    if a.size == 0:
        return True
    if b.size == 0:
        return False
    return bool(np.all(grid.index_distance(a[:, None], b[None, :]).min(axis=1) <= cells))


# -------------------------------------------------------------- graph checks

@dataclass(frozen=True, eq=False)
class GraphSnapshot:
    """Sampled pseudo-graph ``{(x, p)}`` on the 1-D torus."""

    x: np.ndarray
    p: np.ndarray
    lipschitz: float

    @property
    def points(self) -> np.ndarray:
        return np.column_stack([self.x, self.p])


def gradient_graph(values, grid: TorusGrid) -> GraphSnapshot:
    """Central-difference gradient graph of a grid function (1-D)."""
    u = as_potential(values, grid.size).astype(float)
    p = (np.roll(u, -1) - np.roll(u, 1)) / (2 * grid.spacing)
    lip = float(np.abs(np.roll(p, -1) - p).max() / grid.spacing)
    return GraphSnapshot(grid.coords.copy(), p, lip)


def superdiff_graph(phi, grid: TorusGrid) -> GraphSnapshot:
    """Graph of the superdifferential estimate, each interval sampled at step <= spacing."""
    fwd, bwd = _quotients(phi, grid)
    lo, hi = np.minimum(fwd[0], bwd[0]), np.maximum(fwd[0], bwd[0])
    xs, ps = [], []
    for i, x in enumerate(grid.coords):
        k = max(2, int(math.ceil((hi[i] - lo[i]) / grid.spacing)) + 1)
        pts = np.linspace(lo[i], hi[i], k)
        xs.extend([x] * k)
        ps.extend(pts)
    p = np.array(ps)
    return GraphSnapshot(np.array(xs), p, math.nan)


def phase_hausdorff(a: GraphSnapshot, b: GraphSnapshot) -> float:
    """Symmetric Hausdorff distance in phase space, positions taken mod 1."""
    dx = wrap(a.x[:, None] - b.x[None, :])
    dp = a.p[:, None] - b.p[None, :]
    d = np.sqrt(dx**2 + dp**2)
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def _argmax_regular(model: LagrangianModel, grid: TorusGrid, phi, t: float,
                    max_jump: int = 4) -> bool:
    """Unique argmax (within one cell) in the backward evolution, with bounded jumps."""
    H = fundamental_table(model, grid, 0.0, t).values
    g = phi[None, :] - H
    eps = clax.eps_arg(H)
    best = g.max(axis=1, keepdims=True)
    j = g.argmax(axis=1)
    idx = np.arange(grid.size)
    for x in idx:
        members = np.flatnonzero(g[x] >= best[x, 0] - eps)
        if grid.index_distance(members, j[x]).max() > 1:
            return False
    jumps = grid.index_distance(j[_neighbor_table(grid)], j[:, None])
    return bool(jumps.max() <= max_jump)


def t_phi_estimate(model: LagrangianModel, grid: TorusGrid, phi, t_max: float = 8.0,
                   t_start: float = 0.01, iters: int = 6, floor: float = 1e-4) -> float:
    """Largest sampled t keeping the backward evolution's argmax regular.

    Doubles from ``t_start`` until the test fails (or ``t_max`` is reached,
    which is returned), then bisects ``iters`` times.
    """
    phi = as_potential(phi, grid.size).astype(float)
    ok = lambda t: _argmax_regular(model, grid, phi, t)
    good, bad = None, None
    t = t_start
    if ok(t):
        good = t
        while good < t_max:
            t = min(2.0 * good, t_max)
            if not ok(t):
                bad = t
                break
            good = t
        if bad is None:
            return float(t_max)
    else:
        bad = t
        while good is None:
            t *= 0.5
            if t < floor:
                return 0.0
            if ok(t):
                good = t
            else:
                bad = t
    for _ in range(iters):
        mid = 0.5 * (good + bad)
        if ok(mid):
            good = mid
        else:
            bad = mid
    return float(good)


@dataclass(frozen=True, eq=False)
class ArnaudReport:
    defect: float
    c11_like: bool
    gradient_lipschitz: float
    t: float
    t_phi: float
    evolved: GraphSnapshot
    image: GraphSnapshot

    def to_json(self) -> dict:
        return {"hausdorff_defect": self.defect, "c11_like": self.c11_like,
                "gradient_lipschitz": self.gradient_lipschitz, "t": self.t, "t_phi": self.t_phi}


def arnaud_graph_check(model: LagrangianModel, grid: TorusGrid, phi, t: float,
                       dt: float | None = None, t_phi: float | None = None) -> ArnaudReport:
    """Compare the gradient graph of the backward evolution with the flowed graph.

    The evolved side is ``D T_t^+ phi`` from the refined grid evolution; the
    image side flows every sampled point of the superdifferential graph of
    ``phi`` backward by ``t`` with the leapfrog integrator.
    """
    if grid.dim != 1:
        raise DomainError("the graph check is implemented on 1-D grids")
    if not t > 0:
        raise DomainError("t must be positive")
    if dt is not None:
        model = replace(model, dt=dt)
    phi = as_potential(phi, grid.size).astype(float)
    if t_phi is None:
        t_phi = t_phi_estimate(model, grid, phi)
    if not t < t_phi:
        raise PreconditionError(f"t={t} is not below the regularity time estimate {t_phi:.4g}")
    evolved = gradient_graph(lax_oleinik_evolve(model, grid, phi, 0.0, t, "+", refine=True), grid)
    src = superdiff_graph(phi, grid)
    x, p, _ = leapfrog(model, src.x, src.p, -t)
    image = GraphSnapshot(np.asarray(x) % 1.0, np.asarray(p), math.nan)
    C = semiconcavity_constant(phi, grid)
    c11 = bool(evolved.lipschitz * grid.spacing <= sing_threshold(grid, C))
    return ArnaudReport(phase_hausdorff(evolved, image), c11, evolved.lipschitz, float(t),
                        float(t_phi), evolved, image)


# ------------------------------------------------------------ cost regimes

def _flow_feet(model, grid, y, covectors, tau):
    x, _, _ = leapfrog(model, np.full(len(covectors), grid.coords[y]), covectors, -tau)
    return np.asarray(x) % 1.0


def _feet_match(model, grid, S, y, covectors, tau, cells=2):
    """Backward feet of ``covectors`` at ``y`` against c-superdifferential members near ``y``."""
    feet = _flow_feet(model, grid, y, covectors, tau)
    near = [y] + list(grid.neighbors(y))
    members = np.unique(np.concatenate([np.flatnonzero(S[:, z]) for z in near]))
    d = np.abs(wrap(feet[:, None] - grid.coords[members][None, :])).min(axis=1)
    return feet, bool(np.all(d <= cells * grid.spacing + 1e-12))


@dataclass(frozen=True, eq=False)
class RegimeReport:
    sing: np.ndarray
    sing_c: np.ndarray
    holds: bool
    symmetric_difference: np.ndarray
    map_ok: bool
    ratios: np.ndarray
    theta: float
    envelope_defect: float
    t_psi: float | None = None

    def to_json(self) -> dict:
        return {"sing": self.sing.tolist(), "sing_c": self.sing_c.tolist(), "holds": self.holds,
                "symmetric_difference": self.symmetric_difference.tolist(),
                "map_ok": self.map_ok, "theta": self.theta,
                "envelope_defect": self.envelope_defect, "t_phi": self.t_psi}


def _both_sets(psi, c, grid):
    C = semiconcavity_constant(psi, grid)
    theta = sing_threshold(grid, C)
    d_plus = superdiff_diameters(psi, grid)
    d_c = c_superdiff_diameters(psi, c, grid)
    sets = {k: (select_singular(d_plus, grid, k * theta), select_singular(d_c, grid, k * theta))
            for k in (1.0, 0.5)}
    return theta, sets


def short_time_coincidence(model: LagrangianModel, grid: TorusGrid, psi, t1: float, t2: float,
                           t_psi: float | None = None) -> RegimeReport:
    """Compare Sing and Sing^c for ``c = h(t1, t2)`` below the regularity time.

    A sampled psi is first replaced by its grid c-concave envelope; the
    change is reported as ``envelope_defect``. Sets are compared up to one
    cell, each against the other detector run at half threshold.
    """
    if grid.dim != 1:
        raise DomainError("regime comparisons are implemented on 1-D grids")
    tau = float(t2) - float(t1)
    if not tau > 0:
        raise DomainError("need t2 > t1")
    psi = as_potential(psi, grid.size).astype(float)
    if t_psi is None:
        t_psi = t_phi_estimate(model, grid, psi)
    if not tau < t_psi:
        raise PreconditionError(f"t2 - t1 = {tau} is not below the regularity time {t_psi:.4g}")
    c = fundamental_table(model, grid, t1, t2).values
    env = clax.c_concave_envelope(psi, c)
    theta, sets = _both_sets(env, c, grid)
    sing, sing_c = sets[1.0]
    holds = within_cells(sing_c, sets[0.5][0], grid) and within_cells(sing, sets[0.5][1], grid)
    S = clax.superdiff_matrix(env, c)
    map_ok, ratios = True, []
    for y in sing:
        cov = reachable_gradients(env, grid, y)
        feet, ok = _feet_match(model, grid, S, y, cov, tau)
        map_ok &= ok
        dp = abs(cov[1] - cov[0])
        if dp > 0:
            ratios.append(abs(wrap(feet[1] - feet[0])) / dp)
    sym = np.setxor1d(sing, sing_c)
    return RegimeReport(sing, sing_c, bool(holds), sym, bool(map_ok), np.array(ratios), theta,
                        float(np.abs(env - psi).max()), float(t_psi))


def long_time_inclusion(model: LagrangianModel, grid: TorusGrid, psi, t1: float,
                        t2: float) -> RegimeReport:
    """Check ``Sing^c(psi)`` inside ``Sing(psi)`` (one-cell tolerance) for any t2 > t1.

    Reachable gradients at each c-singular node are flowed backward and must
    land on c-superdifferential members at or next to the node.
    """
    if grid.dim != 1:
        raise DomainError("regime comparisons are implemented on 1-D grids")
    tau = float(t2) - float(t1)
    if not tau > 0:
        raise DomainError("need t2 > t1")
    psi = as_potential(psi, grid.size).astype(float)
    c = fundamental_table(model, grid, t1, t2).values
    cc = clax.is_c_concave(psi, c)
    if not cc.concave:
        raise DomainError(f"psi is not c-concave (defect {float(np.abs(cc.defect).max()):.3g})")
    theta, sets = _both_sets(psi, c, grid)
    sing, sing_c = sets[1.0]
    holds = within_cells(sing_c, sets[0.5][0], grid)
    S = clax.superdiff_matrix(psi, c)
    map_ok = True
    for y in sing_c:
        _, ok = _feet_match(model, grid, S, y, reachable_gradients(psi, grid, y), tau)
        map_ok &= ok
    return RegimeReport(sing, sing_c, bool(holds), np.setdiff1d(sing_c, sing), bool(map_ok),
                        np.array([]), theta, 0.0)


def singular_report(sing, sing_c, hausdorff_defect=None, t_phi=None) -> dict:
    """CLI payload."""
    return {"sing": [int(i) for i in sing], "sing_c": [int(i) for i in sing_c],
            "hausdorff_defect": None if hausdorff_defect is None else float(hausdorff_defect),
            "t_phi": None if t_phi is None else float(t_phi)}
