"""Mechanical Lagrangians on flat tori: flow, fundamental solutions, weak KAM.

The model is ``L(x, v) = |v|^2/2 - V(x)`` with Hamiltonian
``H(x, p) = |p|^2/2 + V(x)``, so ``p = v`` along orbits.

Orbits are integrated by the Stormer-Verlet (leapfrog) scheme, and the
action of an orbit is the matching discrete action

    sum_k dt * ( |v_{k+1/2}|^2 / 2 - (V(x_k) + V(x_{k+1})) / 2 ),

whose critical points are exactly the leapfrog orbits. Fundamental solutions
on a grid are computed by shooting (dense velocity scan, then Newton steps
on the exact tangent of the discrete flow, safeguarded by bisection) for
every lift of the endpoint with ``|k| <= k_wind``. Long times are reached by
min-plus composition of shorter tables (the Markov property), because direct
shooting is exponentially ill-conditioned near hyperbolic equilibria.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import clax
from .errors import DomainError, ModelError, SolverError
from .space_core import TorusGrid, as_potential, wrap, write_csv

POTENTIALS = ("zero", "cosine", "shifted_cosine")
TWO_PI = 2.0 * math.pi


def worker_count() -> int:
    """Thread count for table construction, from ``WEAKKAM_OT_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("WEAKKAM_OT_THREADS", "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class LagrangianModel:
    """``V(x) = amplitude * sum_i cos(2 pi x_i)`` (+ ``shift`` for shifted_cosine)."""

    potential: str = "zero"
    amplitude: float = 1.0
    shift: float = 5.0
    dim: int = 1
    dt: float = 1e-3
    k_wind: int = 3
    # direct shooting is trusted while t * sqrt(max|V''|) stays below this
    shoot_horizon: float = 8.0

    def __post_init__(self):
        if self.potential not in POTENTIALS:
            raise DomainError(f"unknown potential {self.potential!r}; expected one of {POTENTIALS}")
        if self.dim not in (1, 2):
            raise DomainError("dimension must be 1 or 2")
        if not self.dt > 0:
            raise DomainError("dt must be positive")

    @property
    def is_free(self) -> bool:
        return self.potential == "zero" or self.amplitude == 0.0

    @property
    def _offset(self) -> float:
        return self.shift if self.potential == "shifted_cosine" else 0.0

    def V(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.potential == "zero":
            return np.zeros(x.shape if self.dim == 1 else x.shape[:-1])
        c = np.cos(TWO_PI * x)
        if self.dim == 2:
            c = c.sum(-1)
        return self.amplitude * c + self._offset

    def force(self, x) -> np.ndarray:
        """``-grad V``."""
        x = np.asarray(x, dtype=float)
        if self.potential == "zero":
            return np.zeros_like(x)
        return TWO_PI * self.amplitude * np.sin(TWO_PI * x)

    def lagrangian(self, x, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        kin = 0.5 * (v**2 if self.dim == 1 else (v**2).sum(-1))
        return kin - self.V(x)

    def hamiltonian(self, x, p) -> np.ndarray:
        p = np.asarray(p, dtype=float)
        kin = 0.5 * (p**2 if self.dim == 1 else (p**2).sum(-1))
        return kin + self.V(x)

    def curvature_bound(self) -> float:
        """``max |V''|``."""
        return 0.0 if self.is_free else TWO_PI**2 * abs(self.amplitude)

    def oscillation(self) -> float:
        return 0.0 if self.is_free else 2.0 * abs(self.amplitude) * self.dim

    def shootable(self, t: float) -> bool:
        return self.is_free or t * math.sqrt(self.curvature_bound()) <= self.shoot_horizon

    def steps(self, t: float) -> int:
        n = max(1, math.ceil(abs(t) / self.dt - 1e-9))
        # free motion is integrated exactly by any step; cap the work
        return min(n, 64) if self.is_free else n

    def potential_on(self, grid: TorusGrid) -> np.ndarray:
        return self.V(grid.coords)

    def to_dict(self) -> dict:
        return {"potential": self.potential, "amplitude": self.amplitude, "shift": self.shift,
                "dim": self.dim, "dt": self.dt, "k_wind": self.k_wind}


FREE = LagrangianModel("zero")
PENDULUM = LagrangianModel("cosine", 1.0)


@dataclass(frozen=True, eq=False)
class PhasePoint:
    x: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "x", np.asarray(self.x, dtype=float) % 1.0)
        object.__setattr__(self, "p", np.asarray(self.p, dtype=float))


# ---------------------------------------------------------------- integration

def _step(model, x, v, f, dt):
    vh = v + 0.5 * dt * f
    x = x + dt * vh
    f = model.force(x)
    return x, vh + 0.5 * dt * f, vh, f


def leapfrog(model: LagrangianModel, x0, v0, t: float, nsteps: int | None = None,
             record: bool = False):
    """Integrate from ``(x0, v0)`` over signed time ``t``; positions stay unwrapped.

    Returns ``(x, v, action)``; with ``record`` also the sampled orbit
    ``(xs, vs)`` of shape ``(nsteps + 1, ...)``.
    """
    x = np.array(x0, dtype=float)
    v = np.array(v0, dtype=float)
    n = nsteps or model.steps(t)
    dt = t / n
    f = model.force(x)
    Vx = model.V(x)
    S = np.zeros(Vx.shape)
    xs, vs = ([x.copy()], [v.copy()]) if record else (None, None)
    for _ in range(n):
        x, v, vh, f = _step(model, x, v, f, dt)
        Vn = model.V(x)
        kin = 0.5 * (vh**2 if model.dim == 1 else (vh**2).sum(-1))
        S = S + dt * (kin - 0.5 * (Vx + Vn))
        Vx = Vn
        if record:
            xs.append(x.copy())
            vs.append(v.copy())
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(v)):
            raise SolverError("leapfrog produced a non-finite state")
    if record:
        return x, v, S, np.array(xs), np.array(vs)
    return x, v, S


def _leapfrog_tangent_1d(model, x0, v0, t, nsteps):
    """1-D leapfrog carrying the action and ``d x(t) / d v0``."""
    x = np.array(x0, dtype=float)
    v = np.array(v0, dtype=float)
    x, v = np.broadcast_arrays(x, v)
    x, v = x.copy(), v.copy()
    dt = t / nsteps
    dx = np.zeros_like(x)
    dv = np.ones_like(x)
    S = np.zeros_like(x)
    if model.is_free:
        # exact: x(t) = x0 + v0 t, L = v0^2/2
        return x + v * t, v, 0.5 * v * v * t, np.full_like(x, t)
    a = model.amplitude
    off = model._offset
    s, c = np.sin(TWO_PI * x), np.cos(TWO_PI * x)
    for _ in range(nsteps):
        f = TWO_PI * a * s
        fp = TWO_PI**2 * a * c  # d force / dx
        vh = v + 0.5 * dt * f
        dvh = dv + 0.5 * dt * fp * dx
        Vx = a * c + off
        x = x + dt * vh
        dx = dx + dt * dvh
        s, c = np.sin(TWO_PI * x), np.cos(TWO_PI * x)
        f = TWO_PI * a * s
        fp = TWO_PI**2 * a * c
        v = vh + 0.5 * dt * f
        dv = dvh + 0.5 * dt * fp * dx
        S += dt * (0.5 * vh * vh - 0.5 * (Vx + a * c + off))
    return x, v, S, dx


@dataclass(frozen=True, eq=False)
class FlowResult:
    end: PhasePoint
    times: np.ndarray
    xs: np.ndarray
    ps: np.ndarray

    def energy_drift(self, model) -> float:
        e = model.hamiltonian(self.xs, self.ps)
        return float(np.abs(e - e[0]).max())


# Yoshida triple-jump weights: three leapfrog substeps give a 4th-order symplectic step
_W1 = 1.0 / (2.0 - 2.0 ** (1.0 / 3.0))
_YOSHIDA = (_W1, 1.0 - 2.0 * _W1, _W1)


def _yoshida_orbit(model, x, v, span, n):
    h = span / n
    x, v = np.array(x, dtype=float), np.array(v, dtype=float)
    xs, vs = [x.copy()], [v.copy()]
    f = model.force(x)
    for _ in range(n):
        for w in _YOSHIDA:
            x, v, _, f = _step(model, x, v, f, w * h)
        if not np.all(np.isfinite(x)) or not np.all(np.isfinite(v)):
            raise SolverError("flow produced a non-finite state")
        xs.append(x.copy())
        vs.append(v.copy())
    return np.array(xs), np.array(vs)


def hamiltonian_flow(model: LagrangianModel, start: PhasePoint, t1: float, t2: float,
                     dt: float | None = None, order: int = 4) -> FlowResult:
    """Orbit of ``x' = p, p' = -V'(x)`` from time t1 to t2 (either direction).

    ``order=2`` is plain leapfrog; ``order=4`` composes three leapfrog
    substeps per step (still symplectic, error O(dt^4)).
    """
    dt = model.dt if dt is None else dt
    if not dt > 0:
        raise DomainError("dt must be positive")
    if order not in (2, 4):
        raise DomainError("order must be 2 or 4")
    span = t2 - t1
    n = max(1, math.ceil(abs(span) / dt - 1e-9))
    if span == 0:
        xs, vs = start.x[None], start.p[None]
    elif order == 2:
        _, _, _, xs, vs = leapfrog(model, start.x, start.p, span, n, record=True)
    else:
        xs, vs = _yoshida_orbit(model, start.x, start.p, span, n)
    times = t1 + np.linspace(0.0, span, xs.shape[0])
    return FlowResult(PhasePoint(xs[-1], vs[-1]), times, xs, vs)


# ------------------------------------------------------------------ shooting

@dataclass(frozen=True, eq=False)
class ShootingResult:
    values: np.ndarray
    v0: np.ndarray
    lift: np.ndarray
    boundary_lift: bool


def _scan_velocities(model, t):
    k = model.k_wind
    vmax = (k + 1.0) / t + 2.0 * math.sqrt(2.0 * model.oscillation()) + 1.0 / t
    m = 3 if model.is_free else 2 * max(200, int(60 * vmax * t)) + 1
    return np.linspace(-vmax, vmax, m)


def _brackets(model, xs, ys, t, nsteps, chunk=8):
    """Sign changes of the endpoint map over the velocity scan, per lift."""
    k = model.k_wind
    lifts = np.arange(-k, k + 1)
    vs = _scan_velocities(model, t)
    X, _, Sv, _ = _leapfrog_tangent_1d(model, xs[:, None], vs[None, :], t, nsteps)
    disp = X - xs[:, None]                                        # (nx, m)
    out = []
    for r0 in range(0, xs.size, chunk):
        sl = slice(r0, r0 + chunk)
        target = wrap(ys[None, :] - xs[sl, None])[:, :, None] + lifts  # (c, ny, L)
        f = disp[sl, None, None, :] - target[..., None]                # (c, ny, L, m)
        lo, hi = f[..., :-1], f[..., 1:]
        br = ((lo <= 0) & (hi > 0)) | ((lo >= 0) & (hi < 0))
        ii, jj, ll, kk = np.nonzero(br)
        ii = ii + r0
        # drop brackets whose action bounds cannot compete with the best one
        sa, sb = Sv[ii, kk], Sv[ii, kk + 1]
        slack = np.abs(sb - sa) + 1e-9 * (1.0 + np.abs(sa))
        lower, upper = np.minimum(sa, sb) - slack, np.maximum(sa, sb) + slack
        key = ii * ys.size + jj
        best = np.full(xs.size * ys.size, np.inf)
        np.minimum.at(best, key, upper)
        keep = lower <= best[key]
        ii, jj, ll, kk = ii[keep], jj[keep], ll[keep], kk[keep]
        out.append((ii, jj, ll, kk, target[ii - r0, jj, ll], f[ii - r0, jj, ll, kk],
                    f[ii - r0, jj, ll, kk + 1]))
    ii, jj, ll, kk, z, fa, fb = (np.concatenate(a) for a in zip(*out))
    return lifts, vs, ii, jj, ll, kk, z, fa, fb


def _shoot_rows(model, xs, ys, t, nsteps, newton_iters=40):
    """Least action from each ``xs[i]`` to each ``ys[j]`` in time ``t`` (1-D)."""
    lifts, vs, ii, jj, ll, kk, z, fa, fb = _brackets(model, xs, ys, t, nsteps)
    if ii.size == 0:
        raise SolverError("shooting found no bracket for any endpoint")
    va, vb = vs[kk], vs[kk + 1]
    x0 = xs[ii]
    denom = np.where(fb != fa, fb - fa, 1.0)
    v = np.where(fa == 0, va, va - fa * (vb - va) / denom)
    scale = 1e-13 * (1.0 + np.abs(z))
    done = np.zeros(v.shape, dtype=bool)
    S = np.zeros(v.shape)
    for _ in range(newton_iters):
        act = ~done
        if not act.any():
            break
        Xa, _, Sa, dXa = _leapfrog_tangent_1d(model, x0[act], v[act], t, nsteps)
        r = Xa - x0[act] - z[act]
        S[act] = Sa
        ok = np.abs(r) <= scale[act]
        a_idx = np.flatnonzero(act)
        done[a_idx[ok]] = True
        # shrink brackets, then Newton step with bisection fallback
        lo_a, hi_a, fl = va[act], vb[act], fa[act]
        same = np.sign(r) == np.sign(fl)
        lo_a = np.where(same, v[act], lo_a)
        fl = np.where(same, r, fl)
        hi_a = np.where(same, hi_a, v[act])
        va[act], vb[act], fa[act] = lo_a, hi_a, fl
        with np.errstate(divide="ignore", invalid="ignore"):
            vn = v[act] - r / dXa
        a_, b_ = np.minimum(lo_a, hi_a), np.maximum(lo_a, hi_a)
        bad = ~np.isfinite(vn) | (vn <= a_) | (vn >= b_)
        vn = np.where(bad, 0.5 * (lo_a + hi_a), vn)
        upd = ~ok
        v[a_idx[upd]] = vn[upd]
        if np.all(np.abs(b_ - a_)[upd] < 1e-15 * (1 + np.abs(a_[upd]))):
            done[a_idx[upd]] = True
    rest = ~done
    if rest.any():
        Xr, _, Sr, _ = _leapfrog_tangent_1d(model, x0[rest], v[rest], t, nsteps)
        S[rest] = Sr
        bad = np.abs(Xr - x0[rest] - z[rest]) > 1e-9 * (1.0 + np.abs(z[rest]))
        S[np.flatnonzero(rest)[bad]] = np.inf
    nx, ny = xs.size, ys.size
    values = np.full((nx, ny), np.inf)
    best_v = np.zeros((nx, ny))
    best_l = np.zeros((nx, ny), dtype=int)
    order = np.lexsort((np.abs(lifts[ll]), S))  # least action, then smallest winding
    seen = np.zeros((nx, ny), dtype=bool)
    for q in order:
        i, j = ii[q], jj[q]
        if not np.isfinite(S[q]):
            break
        if not seen[i, j]:
            seen[i, j] = True
            values[i, j], best_v[i, j], best_l[i, j] = S[q], v[q], lifts[ll[q]]
    if not seen.all():
        miss = np.argwhere(~seen)[:5].tolist()
        raise SolverError(f"no shooting candidate converged for pairs {miss} (t={t})")
    return values, best_v, best_l


def _shoot_table(model, xs, ys, t, nsteps):
    work = min(worker_count(), xs.size)
    if work > 1:
        parts_x = np.array_split(xs, work)
        with ThreadPoolExecutor(work) as ex:
            parts = list(ex.map(lambda r: _shoot_rows(model, r, ys, t, nsteps), parts_x))
    else:
        parts = [_shoot_rows(model, xs, ys, t, nsteps)]
    values = np.vstack([p[0] for p in parts])
    v0 = np.vstack([p[1] for p in parts])
    lift = np.vstack([p[2] for p in parts])
    return ShootingResult(values, v0, lift, bool(np.any(np.abs(lift) == model.k_wind)))


@dataclass(frozen=True, eq=False)
class FundamentalSolutionTable:
    t1: float
    t2: float
    grid: TorusGrid
    values: np.ndarray
    v0: np.ndarray
    lift: np.ndarray | None = None
    boundary_lift: bool = False
    composed: bool = False

    @property
    def span(self) -> float:
        return self.t2 - self.t1

    def rows(self):
        n = self.grid.size
        for i in range(n):
            for j in range(n):
                v = self.v0[i, j]
                yield (self.t1, self.t2, i, j, self.values[i, j], *np.atleast_1d(v))

    def to_csv(self, path) -> None:
        extra = ["v0"] if self.grid.dim == 1 else ["v0_1", "v0_2"]
        write_csv(path, ["t1", "t2", "x_index", "y_index", "h", *extra], self.rows())


@dataclass(frozen=True, eq=False)
class CurveResult:
    value: float
    v0: np.ndarray
    lift: int
    times: np.ndarray
    xs: np.ndarray
    vs: np.ndarray


def fundamental_solution(model: LagrangianModel, t1: float, t2: float, x, y,
                         curve: bool = True) -> CurveResult:
    """``h(t1, t2, x, y)`` and a minimizing curve (positions unwrapped)."""
    t = t2 - t1
    if not t > 0:
        raise DomainError("fundamental solution needs t2 > t1")
    nsteps = model.steps(t)
    if model.dim == 2:
        if not model.is_free:
            raise NotImplementedError("2-D shooting is only implemented for V = 0")
        d = wrap(np.asarray(y, float) - np.asarray(x, float))
        v0 = d / t
        value, lift = float(0.5 * (d**2).sum() / t), 0
    else:
        vals, v0s, lifts = _shoot_rows(model, np.array([float(x)]), np.array([float(y)]), t, nsteps)
        value, v0, lift = float(vals[0, 0]), np.array(v0s[0, 0]), int(lifts[0, 0])
    if not curve:
        return CurveResult(value, v0, lift, np.array([t1, t2]), np.array([]), np.array([]))
    _, _, _, xs, vs = leapfrog(model, np.asarray(x, float), v0, t, nsteps, record=True)
    return CurveResult(value, v0, lift, t1 + np.linspace(0, t, nsteps + 1), xs, vs)


@lru_cache(maxsize=64)
def _direct_table(model: LagrangianModel, grid: TorusGrid, t: float) -> FundamentalSolutionTable:
    if grid.dim == 2:
        if not model.is_free:
            raise NotImplementedError("2-D tables are only implemented for V = 0")
        p = grid.points
        d = wrap(p[None, :, :] - p[:, None, :])
        return FundamentalSolutionTable(0.0, t, grid, 0.5 * (d**2).sum(-1) / t, d / t)
    xs = grid.coords
    r = _shoot_table(model, xs, xs, t, model.steps(t))
    return FundamentalSolutionTable(0.0, t, grid, r.values, r.v0, r.lift, r.boundary_lift)


def min_plus(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``(a * b)[x, y] = min_z a[x, z] + b[z, y]``."""
    out = np.empty((a.shape[0], b.shape[1]))
    for i in range(a.shape[0]):
        out[i] = (a[i][:, None] + b).min(axis=0)
    return out


@lru_cache(maxsize=128)
def _table(model: LagrangianModel, grid: TorusGrid, t: float) -> FundamentalSolutionTable:
    if model.shootable(t):
        return _direct_table(model, grid, t)
    half = _table(model, grid, 0.5 * t)
    vals = min_plus(half.values, half.values)
    return FundamentalSolutionTable(0.0, t, grid, vals, np.full(vals.shape, np.nan),
                                    boundary_lift=half.boundary_lift, composed=True)


def fundamental_table(model: LagrangianModel, grid: TorusGrid, t1: float, t2: float
                      ) -> FundamentalSolutionTable:
    """Grid table of ``h(t1, t2, x_i, y_j)``; the model is autonomous so only t2 - t1 matters."""
    t = float(t2) - float(t1)
    if not t > 0:
        raise DomainError("fundamental table needs t2 > t1")
    tab = _table(model, grid, t)
    if t1 == 0:
        return tab
    return FundamentalSolutionTable(float(t1), float(t2), grid, tab.values, tab.v0, tab.lift,
                                    tab.boundary_lift, tab.composed)


def clear_caches() -> None:
    _direct_table.cache_clear()
    _table.cache_clear()


# ---------------------------------------------------------- Lax-Oleinik on grids

def _refine_1d(g: np.ndarray, j: np.ndarray, sign: float) -> np.ndarray:
    """Parabolic refinement of the extremum of rows ``g`` around indices ``j``."""
    n = g.shape[1]
    r = np.arange(g.shape[0])
    gm, g0, gp = g[r, (j - 1) % n], g[r, j], g[r, (j + 1) % n]
    curv = gm - 2 * g0 + gp
    ok = sign * curv < 0
    with np.errstate(divide="ignore", invalid="ignore"):
        val = g0 - (gm - gp) ** 2 / (8 * curv)
    return np.where(ok, val, g0)


def lax_oleinik_evolve(model: LagrangianModel, grid: TorusGrid, phi, t1: float, t2: float,
                       direction: str = "-", refine: bool = False) -> np.ndarray:
    """Grid Lax-Oleinik evolution.

    ``direction="-"``: ``min_y phi(y) + h(t1, t2, y, x)``;
    ``direction="+"``: ``max_y phi(y) - h(t1, t2, x, y)``.
    ``refine`` replaces the discrete extremum by the vertex of the parabola
    through the optimum and its two neighbours (1-D only).
    """
    phi = as_potential(phi, grid.size)
    H = fundamental_table(model, grid, t1, t2).values
    if direction == "-":
        g = phi[None, :] + H.T        # g[x, y] = phi(y) + h(y, x)
        if not refine or grid.dim != 1:
            return g.min(axis=1)
        return _refine_1d(g, g.argmin(axis=1), 1.0)
    if direction == "+":
        g = phi[None, :] - H
        if not refine or grid.dim != 1:
            return g.max(axis=1)
        return _refine_1d(g, g.argmax(axis=1), -1.0)
    raise DomainError("direction must be '-' or '+'")


def markov_defect(model: LagrangianModel, grid: TorusGrid, s: float, t: float) -> float:
    """``max |h(0,t) - min_z h(0,s,.,z) + h(s,t,z,.)|`` on the grid."""
    a = fundamental_table(model, grid, 0.0, s).values
    b = fundamental_table(model, grid, s, t).values
    return float(np.abs(fundamental_table(model, grid, 0.0, t).values - min_plus(a, b)).max())


# ------------------------------------------------------ critical value, Peierls

@dataclass(frozen=True)
class ManeResult:
    value: float
    cross_check: dict
    agree: bool


def _max_potential(model: LagrangianModel) -> float:
    if model.is_free:
        return 0.0
    if model.dim == 2:
        return 2 * abs(model.amplitude) + model._offset
    xs = np.linspace(0.0, 1.0, 4097)
    i = int(np.argmax(model.V(xs)))
    res = minimize_scalar(lambda x: -float(model.V(x)), bounds=(xs[i] - 1 / 4096, xs[i] + 1 / 4096),
                          method="bounded", options={"xatol": 1e-12})
    return max(float(model.V(xs[i])), -float(res.fun))


def mane_critical_value(model: LagrangianModel, grid: TorusGrid | None = None,
                        times=(8.0, 16.0, 32.0), tol: float = 1e-2) -> ManeResult:
    """``c[0] = max V`` with the long-time diagonal cross-check ``-min_x h(0,T,x,x)/T``."""
    c0 = _max_potential(model)
    grid = grid or TorusGrid(model.dim, 32)
    checks = {}
    for T in times:
        diag = np.diag(fundamental_table(model, grid, 0.0, T).values)
        checks[float(T)] = float(-diag.min() / T)
    agree = all(abs(v - c0) <= tol for v in checks.values())
    if not agree:
        raise ModelError(f"critical value {c0} disagrees with diagonal action estimates {checks}")
    return ManeResult(c0, checks, agree)


@dataclass(frozen=True, eq=False)
class PeierlsTable:
    grid: TorusGrid
    values: np.ndarray
    c0: float
    times: tuple
    converged: bool
    last_change: float

    def barrier(self, i: int, j: int) -> float:
        return float(self.values[i, j])


def peierls_table(model: LagrangianModel, grid: TorusGrid, t_max: float = 4096.0,
                  tol: float = 1e-4, c0: float | None = None) -> PeierlsTable:
    """Tail of ``h(0,t,x,y) + c[0] t`` along ``t = 1, 2, 4, ...``.

    The sequence is followed until consecutive terms differ by less than
    ``tol`` in sup norm (``converged``) or ``t`` exceeds ``t_max``. The last
    term is returned: the running minimum over all sampled times would track
    the infimum over t, which undercuts the liminf when finite-time orbits
    (e.g. rotations near a separatrix) are cheaper than the limit.
    """
    c0 = _max_potential(model) if c0 is None else c0
    prev, times, change, t = None, [], math.inf, 1.0
    while t <= t_max:
        cur = fundamental_table(model, grid, 0.0, t).values + c0 * t
        times.append(t)
        if prev is not None:
            change = float(np.abs(cur - prev).max())
            if change < tol:
                return PeierlsTable(grid, cur, c0, tuple(times), True, change)
        prev = cur
        t *= 2.0
    return PeierlsTable(grid, prev, c0, tuple(times), False, change)


def peierls_barrier(model: LagrangianModel, grid: TorusGrid, x: int, y: int, **kw) -> float:
    return peierls_table(model, grid, **kw).barrier(x, y)


@dataclass(frozen=True, eq=False)
class StaticClassPartition:
    aubry: np.ndarray
    d: np.ndarray
    classes: list
    delta: float

    def class_of(self, i: int) -> np.ndarray | None:
        for c in self.classes:
            if i in c:
                return c
        return None


def default_static_threshold(grid: TorusGrid) -> float:
    return grid.spacing**2


def aubry_and_static_classes(peierls: PeierlsTable, delta: float | None = None
                             ) -> StaticClassPartition:
    """Aubry set ``{h(x,x) <= delta}`` and the components of ``d(x,y) <= delta`` on it."""
    h = peierls.values
    delta = default_static_threshold(peierls.grid) if delta is None else delta
    aubry = np.flatnonzero(np.diag(h) <= delta)
    if aubry.size == 0:
        raise ModelError("empty Aubry set; the static threshold is too small for this grid")
    d = h + h.T
    sub = d[np.ix_(aubry, aubry)] <= delta
    ncomp, labels = connected_components(csr_matrix(sub), directed=False)
    classes = [aubry[labels == k] for k in range(ncomp)]
    classes.sort(key=lambda c: int(c[0]))
    return StaticClassPartition(aubry, d, classes, delta)


@dataclass(frozen=True, eq=False)
class WeakKAMPair:
    u_minus: np.ndarray
    u_plus: np.ndarray
    iterations: tuple
    fixed_point_defect: float
    t_step: float


def _iterate(op, u, tol, max_iters):
    for k in range(1, max_iters + 1):
        nxt = op(u)
        if np.abs(nxt - u).max() < tol:
            return nxt, k
        u = nxt
    raise SolverError(f"Lax-Oleinik iteration did not settle within {max_iters} steps")


def weak_kam_pair(model: LagrangianModel, grid: TorusGrid, t_step: float = 1.0,
                  phi0=None, tol: float = 1e-6, max_iters: int = 10_000,
                  c0: float | None = None) -> WeakKAMPair:
    """Weak KAM pair from iterated normalized grid evolutions.

    ``u-`` is normalized to have minimum 0.
    """
    c0 = _max_potential(model) if c0 is None else c0
    H = fundamental_table(model, grid, 0.0, t_step).values + c0 * t_step
    u = np.zeros(grid.size) if phi0 is None else as_potential(phi0, grid.size)
    um, k1 = _iterate(lambda u: clax.t_minus(u, H), u, tol, max_iters)
    um = um - um.min()
    up, k2 = _iterate(lambda u: clax.t_plus(u, H), um, tol, max_iters)
    defect = float(np.abs(clax.t_minus(clax.t_plus(um, H), H) - um).max())
    if defect > 1e-4:
        raise SolverError(f"u- is not a fixed point of T-T+ (defect {defect:.3g})")
    return WeakKAMPair(um, up, (k1, k2), defect, t_step)


def static_class_superdiff(pair: WeakKAMPair, peierls: PeierlsTable, y: int,
                           tol: float | None = None, delta: float | None = None) -> np.ndarray:
    """``{x : u+(x) = u-(y) - h(x, y)}`` with slack ``max(eps_arg, delta)``."""
    h = peierls.values
    delta = default_static_threshold(peierls.grid) if delta is None else delta
    tol = max(clax.eps_arg(h), delta) if tol is None else tol
    gap = np.abs(pair.u_plus - (pair.u_minus[y] - h[:, y]))
    return np.flatnonzero(gap <= tol)


def static_class_in_superdiff(pair: WeakKAMPair, peierls: PeierlsTable,
                              partition: StaticClassPartition, y: int,
                              tol: float | None = None) -> bool:
    members = set(static_class_superdiff(pair, peierls, y, tol, partition.delta).tolist())
    return any(set(c.tolist()) <= members for c in partition.classes)
