"""Wasserstein distances, dynamical costs and random Lax-Oleinik operators.

Measures live on grid nodes. Random curves are realized as finite weighted
ensembles of discretized minimizers, so every law is a weighted empirical
measure and every expectation a weighted sum.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import clax
from .action import LagrangianModel, fundamental_solution, fundamental_table
from .errors import DomainError, SolverError
from .space_core import ProbMeasure, TorusGrid, as_potential, write_csv
from .transport import solve_kantorovich

AGREE_TOL = 1e-6


def _distance(space) -> np.ndarray:
    if isinstance(space, TorusGrid):
        return space.distance_matrix()
    d = np.asarray(space, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise DomainError("expected a grid or a square distance matrix")
    return d


def wasserstein_p(mu: ProbMeasure, nu: ProbMeasure, space, p: int = 1) -> float:
    """``W_p`` for ``p`` in {1, 2} through an exact transport solve with cost ``d**p``."""
    if p not in (1, 2):
        raise DomainError("p must be 1 or 2")
    d = _distance(space)
    val = solve_kantorovich(mu, nu, d**p).value
    return float(max(val, 0.0) ** (1.0 / p))


def potential_energy(phi, mu: ProbMeasure) -> float:
    phi = as_potential(phi, mu.size).astype(float)
    s = mu.support
    if not np.all(np.isfinite(phi[s])):
        raise DomainError("potential is not finite on the support")
    return float(phi[s] @ mu.weights[s])


@dataclass(frozen=True)
class LipLargeCert:
    kappa1: float
    kappa2: float
    violations: int
    pairs: int
    certified: bool
    bounded_cert: bool | None = None

    def to_json(self) -> dict:
        return {"kappa1": self.kappa1, "kappa2": self.kappa2, "violations": self.violations,
                "pairs": self.pairs, "certified": self.certified,
                "bounded_cert": self.bounded_cert}


def lip_in_large_check(phi, kappa1: float, kappa2: float, space, tol: float = 1e-12
                       ) -> LipLargeCert:
    """Exhaustive check of ``|phi(x) - phi(y)| <= kappa1 d(x, y) + kappa2``.

    On a compact grid the bounded-implies-(0, osc) fact is checked as well.
    """
    if kappa1 < 0 or kappa2 < 0:
        raise DomainError("constants must be nonnegative")
    d = _distance(space)
    phi = as_potential(phi, d.shape[0]).astype(float)
    diff = np.abs(phi[:, None] - phi[None, :])
    bad = int(np.count_nonzero(diff > kappa1 * d + kappa2 + tol))
    bounded = None
    if isinstance(space, TorusGrid):
        osc = float(phi.max() - phi.min())
        bounded = bool(np.all(diff <= osc + tol))
    return LipLargeCert(float(kappa1), float(kappa2), bad, d.size, bad == 0, bounded)


def lipschitz_constant(phi, space) -> float:
    d = _distance(space)
    phi = as_potential(phi, d.shape[0]).astype(float)
    off = d > 0
    return float((np.abs(phi[:, None] - phi[None, :])[off] / d[off]).max(initial=0.0))


# -------------------------------------------------------------- ensembles

def discrete_action(model: LagrangianModel, times: np.ndarray, xs: np.ndarray) -> float:
    """Discrete action of a sampled curve, kinetic energy from position increments."""
    xs = np.asarray(xs, dtype=float)
    dt = np.diff(times)
    inc = np.diff(xs, axis=0)
    kin = 0.5 * (inc**2 if xs.ndim == 1 else (inc**2).sum(-1)) / dt**2
    V = model.V(xs)
    return float((dt * (kin - 0.5 * (V[:-1] + V[1:]))).sum())


@dataclass(frozen=True, eq=False)
class PathEnsemble:
    """Weighted minimizers sampled on a common time grid (1-D positions unwrapped)."""

    grid: TorusGrid
    weights: np.ndarray
    times: np.ndarray
    xs: np.ndarray
    vs: np.ndarray
    start: np.ndarray
    end: np.ndarray
    actions: np.ndarray

    def __post_init__(self):
        if abs(float(self.weights.sum()) - 1.0) > 1e-10:
            raise DomainError("ensemble weights must sum to one")

    @property
    def size(self) -> int:
        return int(self.weights.size)

    def law(self, k: int) -> ProbMeasure:
        """Law of the snapped position at time sample ``k``."""
        m = np.zeros(self.grid.size)
        np.add.at(m, self.grid.nearest_index(self.xs[:, k] % 1.0), self.weights)
        return ProbMeasure(m)

    def endpoint_laws_ok(self, mu: ProbMeasure, nu: ProbMeasure, tol: float = 1e-10) -> bool:
        return bool(np.abs(self.law(0).weights - mu.weights).max() <= tol
                    and np.abs(self.law(-1).weights - nu.weights).max() <= tol)

    def slice(self, k: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Atoms ``(x, v)`` and weights of the phase-space law at sample ``k``."""
        return self.xs[:, k] % 1.0, self.vs[:, k], self.weights

    def rows(self):
        for i in range(self.size):
            for k, s in enumerate(self.times):
                yield (i, s, self.xs[i, k] % 1.0, self.vs[i, k], self.weights[i])

    def to_csv(self, path) -> None:
        write_csv(path, ["curve_id", "s", "x", "v", "weight"], self.rows())


def build_ensemble(model: LagrangianModel, grid: TorusGrid, pairs, weights, s: float, t: float
                   ) -> PathEnsemble:
    """Minimizing curves between node pairs ``(x, y)`` over ``[s, t]``."""
    if grid.dim != 1:
        raise DomainError("path ensembles are implemented on 1-D grids")
    xs, vs, acts, times = [], [], [], None
    for x, y in pairs:
        cr = fundamental_solution(model, s, t, grid.coords[int(x)], grid.coords[int(y)])
        xs.append(np.asarray(cr.xs, dtype=float).reshape(-1))
        vs.append(np.asarray(cr.vs, dtype=float).reshape(-1))
        acts.append(cr.value)
        times = cr.times
    p = np.asarray(pairs, dtype=int).reshape(-1, 2)
    return PathEnsemble(grid, np.asarray(weights, dtype=float), np.asarray(times),
                        np.array(xs), np.array(vs), p[:, 0], p[:, 1], np.array(acts))


def curve_integral(model: LagrangianModel, ens: PathEnsemble) -> float:
    """``sum_i w_i A(xi_i)`` recomputed from sampled positions."""
    return float(sum(w * discrete_action(model, ens.times, x) for w, x in zip(ens.weights, ens.xs)))


def slice_integral(model: LagrangianModel, ens: PathEnsemble) -> float:
    """Time integral of the expected Lagrangian over the slice laws.

    The Lagrangian on ``[s_k, s_{k+1}]`` uses the increment velocity and the
    averaged potential, matching the discrete action step by step.
    """
    dt = np.diff(ens.times)
    inc = np.diff(ens.xs, axis=1)
    V = model.V(ens.xs)
    lag = 0.5 * inc**2 / dt**2 - 0.5 * (V[:, :-1] + V[:, 1:])
    per_slice = ens.weights @ lag
    return float(per_slice @ dt)


@dataclass(frozen=True, eq=False)
class DynamicalCost:
    value: float
    curve_value: float
    agree: bool
    ensemble: PathEnsemble
    plan: np.ndarray


def dynamical_cost(model: LagrangianModel, grid: TorusGrid, mu: ProbMeasure, nu: ProbMeasure,
                   s: float, t: float) -> DynamicalCost:
    """``C^{s,t}(mu, nu)`` with an ensemble of minimizers along the optimal plan."""
    if not t > s:
        raise DomainError("dynamical cost needs t > s")
    h = fundamental_table(model, grid, s, t).values
    kr = solve_kantorovich(mu, nu, h)
    sup = kr.plan.support
    w = kr.plan.matrix[sup[:, 0], sup[:, 1]]
    ens = build_ensemble(model, grid, sup, w / w.sum(), s, t)
    cv = curve_integral(model, ens)
    return DynamicalCost(kr.value, cv, abs(cv - kr.value) <= AGREE_TOL, ens, kr.plan.matrix)


# --------------------------------------------------------- random operators

def localization_radius(model: LagrangianModel, phi, t: float, safety: float = 2.0) -> float:
    """A priori bound on the displacement of minimizers of ``phi(x) + h(0, t, x, y)``.

    Comparing with the constant curve at ``y`` gives
    ``d^2 / (2t) <= osc(phi) + t osc(V)``; the bound is scaled by ``safety``.
    """
    phi = np.asarray(phi, dtype=float)
    osc_v = model.oscillation()
    osc = float(phi.max() - phi.min())
    return safety * math.sqrt(2.0 * t * (osc + t * osc_v))


def _ball_argopt(grid: TorusGrid, g: np.ndarray, centers, radius: float, sign: float):
    """Per column ``j`` of ``g``, optimize over rows within ``radius`` of node ``centers[j]``.

    Returns ``(index, clipped)``; ``clipped`` marks optima on the ball boundary
    when the ball does not cover the torus.
    """
    d = grid.distance_matrix()[:, centers]
    inside = d <= radius + 1e-12
    masked = np.where(inside, sign * g, np.inf)
    idx = masked.argmin(axis=0)
    cols = np.arange(g.shape[1])
    covers = inside.all(axis=0)
    edge = d[idx, cols] > radius - grid.spacing
    return idx, edge & ~covers


@dataclass(frozen=True, eq=False)
class RandomLOResult:
    value: float
    transform_value: float
    witness: ProbMeasure
    ensemble: PathEnsemble
    expressions: tuple
    radius: float
    agree: bool

    def to_json(self) -> dict:
        return {"value": self.value, "transform_value": self.transform_value,
                "witness": [float(v) for v in self.witness.weights],
                "expressions": list(self.expressions), "radius": self.radius,
                "agree": self.agree}


def _localized(grid, g, centers, radius, sign):
    # a degenerate bound (zero oscillation) still needs a ball with an interior
    radius = max(radius, 2.0 * grid.spacing)
    idx, clipped = _ball_argopt(grid, g, centers, radius, sign)
    if np.any(clipped):
        radius *= 2.0
        idx, clipped = _ball_argopt(grid, g, centers, radius, sign)
        if np.any(clipped):
            raise SolverError("optimum still on the localization boundary after enlarging")
    return idx, radius


def p_minus(model: LagrangianModel, grid: TorusGrid, phi, nu: ProbMeasure, t: float,
            radius: float | None = None) -> RandomLOResult:
    """``P^-_t phi(nu)`` by direct localized minimization, compared with ``int T^-_t phi dnu``.

    The three expressions are: potential energy plus dynamical cost of the
    witness, the curve-wise integral and the slice-wise integral.
    """
    phi = as_potential(phi, grid.size).astype(float)
    if not t > 0:
        raise DomainError("t must be positive")
    h = fundamental_table(model, grid, 0.0, t).values
    rhs = float(clax.t_minus(phi, h) @ nu.weights)
    ys = nu.support
    radius = localization_radius(model, phi, t) if radius is None else radius
    g = phi[:, None] + h[:, ys]
    idx, radius = _localized(grid, g, ys, radius, 1.0)
    w = nu.weights[ys]
    direct = float(w @ g[idx, np.arange(ys.size)])
    m = np.zeros(grid.size)
    np.add.at(m, idx, w)
    mu = ProbMeasure(m)
    ens = build_ensemble(model, grid, np.stack([idx, ys], 1), w, 0.0, t)
    pe = potential_energy(phi, mu)
    e1 = pe + solve_kantorovich(mu, nu, h).value
    e2 = float(w @ phi[idx]) + curve_integral(model, ens)
    e3 = pe + slice_integral(model, ens)
    exprs = (e1, e2, e3)
    agree = abs(direct - rhs) <= AGREE_TOL and max(abs(e - direct) for e in exprs) <= AGREE_TOL
    return RandomLOResult(direct, rhs, mu, ens, exprs, float(radius), bool(agree))


def p_plus(model: LagrangianModel, grid: TorusGrid, phi, mu: ProbMeasure, t: float,
           radius: float | None = None) -> RandomLOResult:
    """Mirror of :func:`p_minus`: ``sup`` of ``phi(nu) - C^{0,t}(mu, nu)`` with forward curves."""
    phi = as_potential(phi, grid.size).astype(float)
    if not t > 0:
        raise DomainError("t must be positive")
    h = fundamental_table(model, grid, 0.0, t).values
    rhs = float(clax.t_plus(phi, h) @ mu.weights)
    xs = mu.support
    radius = localization_radius(model, phi, t) if radius is None else radius
    g = phi[:, None] - h[xs, :].T          # g[y, j] = phi(y) - h(xs[j], y)
    idx, radius = _localized(grid, g, xs, radius, -1.0)
    w = mu.weights[xs]
    direct = float(w @ g[idx, np.arange(xs.size)])
    m = np.zeros(grid.size)
    np.add.at(m, idx, w)
    nu = ProbMeasure(m)
    ens = build_ensemble(model, grid, np.stack([xs, idx], 1), w, 0.0, t)
    pe = potential_energy(phi, nu)
    e1 = pe - solve_kantorovich(mu, nu, h).value
    e2 = float(w @ phi[idx]) - curve_integral(model, ens)
    e3 = pe - slice_integral(model, ens)
    exprs = (e1, e2, e3)
    agree = abs(direct - rhs) <= AGREE_TOL and max(abs(e - direct) for e in exprs) <= AGREE_TOL
    return RandomLOResult(direct, rhs, nu, ens, exprs, float(radius), bool(agree))


def random_pushforward(grid: TorusGrid, m: ProbMeasure, rng: np.random.Generator) -> ProbMeasure:
    """Send each atom of ``m`` to an independent uniform grid node."""
    out = np.zeros(grid.size)
    s = m.support
    np.add.at(out, rng.integers(0, grid.size, s.size), m.weights[s])
    return ProbMeasure(out)


def competitor_margin(model: LagrangianModel, grid: TorusGrid, phi, target: ProbMeasure,
                      t: float, value: float, rng: np.random.Generator, count: int = 100,
                      side: str = "-") -> float:
    """Worst improvement of random competitors over ``value`` (nonpositive when none wins).

    ``side="-"``: competitors ``mu'`` with ``phi(mu') + C(mu', target)``;
    ``side="+"``: competitors ``nu'`` with ``phi(nu') - C(target, nu')``.
    """
    phi = as_potential(phi, grid.size).astype(float)
    h = fundamental_table(model, grid, 0.0, t).values
    worst = -math.inf
    for _ in range(count):
        other = random_pushforward(grid, target, rng)
        if side == "-":
            v = potential_energy(phi, other) + solve_kantorovich(other, target, h).value
            worst = max(worst, value - v)
        else:
            v = potential_energy(phi, other) - solve_kantorovich(target, other, h).value
            worst = max(worst, v - value)
    return float(worst)


@dataclass(frozen=True, eq=False)
class ELReport:
    defect: float
    per_curve: np.ndarray
    slice_masses_ok: bool


def euler_lagrange_slice_check(model: LagrangianModel, ens: PathEnsemble) -> ELReport:
    """Sup-norm residual of ``d/ds L_v - L_x`` on the sampled curves.

    With ``L = v^2/2 - V`` the residual is the second difference of the
    positions minus the force ``-V'``.
    """
    dt = float(np.diff(ens.times).mean())
    x = ens.xs
    if x.shape[1] < 3:
        return ELReport(0.0, np.zeros(ens.size), True)
    acc = (x[:, 2:] - 2 * x[:, 1:-1] + x[:, :-2]) / dt**2
    res = np.abs(acc - model.force(x[:, 1:-1])).max(axis=1)
    masses = all(abs(float(ens.slice(k)[2].sum()) - 1.0) <= 1e-12 for k in range(x.shape[1]))
    return ELReport(float(res.max(initial=0.0)), res, masses)
