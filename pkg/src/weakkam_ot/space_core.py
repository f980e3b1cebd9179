"""Finite metric spaces, flat torus grids, probability measures and plans.

Cost tables and potentials are plain numpy arrays (2-D and 1-D); the helpers
``as_cost`` and ``as_potential`` validate them. Object arrays of
``fractions.Fraction`` are accepted everywhere so that the transforms can be
run in exact arithmetic.
"""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .errors import DomainError

MASS_TOL = 1e-12
MARGINAL_TOL = 1e-10
FLUSH_BELOW = 1e-15


def triangle_inequality_holds(d: np.ndarray, tol=1e-12, exhaustive_up_to=128,
                               samples=10_000, seed=0) -> bool:
    """Check d[i,k] <= d[i,j] + d[j,k]; exhaustive for small tables, sampled otherwise."""
    n = d.shape[0]
    if n <= exhaustive_up_to:
        return not np.any(d[:, None, :] > d[:, :, None] + d[None, :, :] + tol)
    i, j, k = np.random.default_rng(seed).integers(0, n, size=(3, samples))
    return not np.any(d[i, k] > d[i, j] + d[j, k] + tol)


def _is_exact(a: np.ndarray) -> bool:
    return a.dtype == object


def as_potential(values, size: int | None = None) -> np.ndarray:
    """Validate a potential: a finite 1-D vector (float or Fraction)."""
    a = np.asarray(values)
    if a.dtype != object:
        a = a.astype(float)
    if a.ndim != 1:
        raise DomainError(f"potential must be 1-D, got shape {a.shape}")
    if size is not None and a.shape[0] != size:
        raise DomainError(f"potential has {a.shape[0]} values, space has {size}")
    if not _is_exact(a) and not np.all(np.isfinite(a)):
        raise DomainError("potential has non-finite values")
    return a


def as_cost(values, shape: tuple[int, int] | None = None) -> np.ndarray:
    """Validate a cost table: a finite 2-D matrix indexed ``c[x, y]``."""
    a = np.asarray(values)
    if a.dtype != object:
        a = a.astype(float)
    if a.ndim != 2:
        raise DomainError(f"cost table must be 2-D, got shape {a.shape}")
    if shape is not None and a.shape != tuple(shape):
        raise DomainError(f"cost table shape {a.shape} does not match {shape}")
    if not _is_exact(a) and not np.all(np.isfinite(a)):
        raise DomainError("cost table has non-finite entries")
    return a


def to_fractions(a) -> np.ndarray:
    """Convert a numeric array to an object array of exact fractions."""
    arr = np.asarray(a)
    out = np.empty(arr.shape, dtype=object)
    for idx, v in np.ndenumerate(arr):
        out[idx] = Fraction(v) if not isinstance(v, Fraction) else v
    return out


@dataclass(frozen=True, eq=False)
class FiniteSpace:
    points: np.ndarray
    metric: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[0] == 1 and np.asarray(self.points).ndim == 1:
            pts = pts.T
        d = np.asarray(self.metric, dtype=float)
        n = pts.shape[0]
        if d.shape != (n, n):
            raise DomainError(f"metric shape {d.shape} does not match {n} points")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise DomainError("metric must be finite and nonnegative")
        if np.any(np.diag(d) != 0) or not np.allclose(d, d.T, rtol=0, atol=1e-12):
            raise DomainError("metric must be symmetric with zero diagonal")
        if not triangle_inequality_holds(d):
            raise DomainError("metric violates the triangle inequality")
        labels = tuple(self.labels) if self.labels else tuple(str(i) for i in range(n))
        if len(labels) != n or len(set(labels)) != n:
            raise DomainError("point labels must be unique, one per point")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "metric", d)
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @classmethod
    def from_points(cls, points, labels=()) -> "FiniteSpace":
        pts = np.asarray(points, dtype=float)
        if pts.ndim == 1:
            pts = pts[:, None]
        diff = pts[:, None, :] - pts[None, :, :]
        return cls(pts, np.sqrt((diff**2).sum(-1)), labels)

    def to_json(self) -> dict:
        return {"points": self.points.tolist(), "metric": self.metric.tolist(),
                "labels": list(self.labels)}

    @classmethod
    def from_json(cls, obj: Mapping) -> "FiniteSpace":
        try:
            return cls(obj["points"], obj["metric"], tuple(obj.get("labels", ())))
        except KeyError as e:
            raise DomainError(f"space JSON missing key {e}") from None


@dataclass(frozen=True)
class TorusGrid:
    """Uniform grid on the flat torus (R/Z)^dim with ``n`` nodes per axis.

    Nodes are flattened in C order, so in 2-D node ``(i, j)`` has index
    ``i * n + j``.
    """

    dim: int
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise DomainError(f"torus dimension must be 1 or 2, got {self.dim}")
        if self.n < 8:
            raise DomainError(f"need at least 8 nodes per axis, got {self.n}")

    @property
    def spacing(self) -> float:
        return 1.0 / self.n

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def points(self) -> np.ndarray:
        ax = np.arange(self.n) / self.n
        if self.dim == 1:
            return ax[:, None]
        g = np.stack(np.meshgrid(ax, ax, indexing="ij"), axis=-1)
        return g.reshape(-1, 2)

    @property
    def coords(self) -> np.ndarray:
        """Node coordinates; shape (n,) in 1-D and (n*n, 2) in 2-D."""
        p = self.points
        return p[:, 0] if self.dim == 1 else p

    def multi_index(self, i):
        i = np.asarray(i)
        if self.dim == 1:
            return i[..., None] % self.n
        return np.stack(np.divmod(i, self.n), axis=-1) % self.n

    def flat_index(self, mi) -> np.ndarray:
        mi = np.asarray(mi) % self.n
        if self.dim == 1:
            return mi[..., 0]
        return mi[..., 0] * self.n + mi[..., 1]

    def shift(self, i, offset) -> np.ndarray:
        """Index of the node ``offset`` (per-axis integer steps) away from ``i``."""
        return self.flat_index(self.multi_index(i) + np.asarray(offset))

    def neighbors(self, i) -> list[int]:
        offs = [(-1,), (1,)] if self.dim == 1 else [(-1, 0), (1, 0), (0, -1), (0, 1)]
        return [int(self.shift(i, o)) for o in offs]

    def index_distance(self, i, j) -> np.ndarray:
        """Per-axis wrapped index distance, maximum over axes."""
        d = np.abs(self.multi_index(i) - self.multi_index(j)) % self.n
        return np.minimum(d, self.n - d).max(axis=-1)

    def nearest_index(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.dim == 1:
            return np.rint(x * self.n).astype(int) % self.n
        return self.flat_index(np.rint(x * self.n).astype(int))

    def distance_matrix(self) -> np.ndarray:
        p = self.points
        return torus_distance(p[:, None, :], p[None, :, :])

    def as_space(self) -> FiniteSpace:
        return FiniteSpace(self.points, self.distance_matrix())


def wrap(x):
    """Signed representative of ``x`` modulo 1 in [-1/2, 1/2)."""
    return (np.asarray(x) + 0.5) % 1.0 - 0.5


def torus_distance(a, b) -> np.ndarray:
    """Flat torus distance; the last axis holds coordinates (use shape (..., 1) in 1-D)."""
    d = np.abs(wrap(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))
    return np.sqrt((d**2).sum(-1))


def torus_distance_1d(a, b) -> np.ndarray:
    return np.abs(wrap(np.asarray(a, dtype=float) - np.asarray(b, dtype=float)))


@dataclass(frozen=True, eq=False)
class ProbMeasure:
    weights: np.ndarray
    tol_supp: float = 0.0

    def __post_init__(self):
        w = np.asarray(self.weights)
        exact = _is_exact(w)
        if not exact:
            w = np.array(w, dtype=float)
            w[np.abs(w) < FLUSH_BELOW] = 0.0
        if w.ndim != 1 or w.size == 0:
            raise DomainError("measure weights must be a nonempty 1-D vector")
        if exact:
            if any(v < 0 for v in w) or sum(w) != 1:
                raise DomainError("exact measure must be nonnegative and sum to 1")
        else:
            if not np.all(np.isfinite(w)) or np.any(w < 0):
                raise DomainError("measure weights must be finite and nonnegative")
            if abs(w.sum() - 1.0) > MASS_TOL:
                raise DomainError(f"measure mass {w.sum()!r} differs from 1")
        object.__setattr__(self, "weights", w)

    @property
    def size(self) -> int:
        return self.weights.shape[0]

    @property
    def support(self) -> np.ndarray:
        return support(self)

    @classmethod
    def dirac(cls, n: int, i: int) -> "ProbMeasure":
        w = np.zeros(n)
        w[i] = 1.0
        return cls(w)

    @classmethod
    def uniform(cls, n: int, on: Sequence[int] | None = None) -> "ProbMeasure":
        w = np.zeros(n)
        idx = np.arange(n) if on is None else np.asarray(on)
        w[idx] = 1.0 / len(idx)
        return cls(w)

    @classmethod
    def normalized(cls, weights) -> "ProbMeasure":
        w = np.asarray(weights, dtype=float)
        return cls(w / w.sum())

    def to_json(self) -> dict:
        return {"weights": [float(v) for v in self.weights]}

    @classmethod
    def from_json(cls, obj: Mapping) -> "ProbMeasure":
        if "weights" not in obj:
            raise DomainError("measure JSON missing 'weights'")
        return cls(np.asarray(obj["weights"], dtype=float))


@dataclass(frozen=True, eq=False)
class TransportPlan:
    matrix: np.ndarray

    def __post_init__(self):
        m = np.array(self.matrix, dtype=float)
        m[np.abs(m) < FLUSH_BELOW] = 0.0
        if m.ndim != 2 or not np.all(np.isfinite(m)) or np.any(m < 0):
            raise DomainError("plan must be a finite nonnegative matrix")
        if abs(m.sum() - 1.0) > MARGINAL_TOL:
            raise DomainError(f"plan mass {m.sum()!r} differs from 1")
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    @property
    def support(self) -> np.ndarray:
        """Support pairs (i, j), lexicographically sorted, shape (k, 2)."""
        return np.argwhere(self.matrix > 0)

    def integrate(self, table) -> float:
        return float((self.matrix * np.asarray(table, dtype=float)).sum())

    def is_coupling_of(self, mu: ProbMeasure, nu: ProbMeasure, tol=MARGINAL_TOL) -> bool:
        a, b = plan_marginals(self)
        return (np.abs(a.weights - mu.weights).max() <= tol
                and np.abs(b.weights - nu.weights).max() <= tol)

    def to_json(self) -> dict:
        return {"matrix": self.matrix.tolist()}

    @classmethod
    def from_json(cls, obj: Mapping) -> "TransportPlan":
        if "matrix" not in obj:
            raise DomainError("plan JSON missing 'matrix'")
        return cls(np.asarray(obj["matrix"], dtype=float))


def support(m: ProbMeasure) -> np.ndarray:
    return np.flatnonzero(np.asarray(m.weights) > m.tol_supp)


def pushforward(f, m: ProbMeasure, n_target: int | None = None) -> ProbMeasure:
    """Image measure ``f#m``.

    ``f`` is an index array, a mapping from source to target index, or a
    callable on indices. Points outside the support may be left unmapped
    (``-1`` or missing).
    """
    supp = support(m)
    if callable(f):
        img = {int(i): f(int(i)) for i in supp}
    elif isinstance(f, Mapping):
        img = {int(i): f.get(int(i)) for i in supp}
    else:
        arr = np.asarray(f)
        img = {int(i): (int(arr[i]) if i < arr.shape[0] else None) for i in supp}
    bad = [i for i, z in img.items() if z is None or z < 0]
    if bad:
        raise DomainError(f"support points {bad} are not mapped")
    if n_target is None:
        n_target = max(max(img.values()) + 1, m.size)
    if max(img.values()) >= n_target:
        raise DomainError("map sends a support point outside the target space")
    w = np.zeros(n_target, dtype=m.weights.dtype)
    for i, z in img.items():
        w[z] += m.weights[i]
    return ProbMeasure(w, m.tol_supp)


def plan_marginals(plan: TransportPlan) -> tuple[ProbMeasure, ProbMeasure]:
    m = plan.matrix
    return ProbMeasure(m.sum(axis=1)), ProbMeasure(m.sum(axis=0))


def projected_support_check(plan: TransportPlan) -> bool:
    """Whether the x-projection of supp(plan) equals the support of its x-marginal."""
    proj = np.unique(plan.support[:, 0])
    mu, _ = plan_marginals(plan)
    return np.array_equal(proj, support(mu))


def product_measure(m1: ProbMeasure, m2: ProbMeasure) -> TransportPlan:
    return TransportPlan(np.outer(m1.weights, m2.weights))


def load_json(path) -> dict:
    p = Path(path)
    if not p.exists():
        raise FileNotFoundError(p)
    with p.open() as fh:
        return json.load(fh)


def load_measure(path) -> ProbMeasure:
    return ProbMeasure.from_json(load_json(path))


def load_cost(path) -> np.ndarray:
    obj = load_json(path)
    if "matrix" not in obj:
        raise DomainError("cost JSON missing 'matrix'")
    return as_cost(obj["matrix"])


def load_potential(path) -> np.ndarray:
    obj = load_json(path)
    key = next((k for k in ("values", "phi", "psi", "weights") if k in obj), None)
    if key is None:
        raise DomainError("potential JSON needs a 'values' array")
    return as_potential(obj[key])


def fmt17(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def write_csv(path, header: Sequence[str], rows) -> None:
    """Write a table with 17 significant digits for floats."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt17(v) for v in row])


def read_csv(path) -> tuple[list[str], np.ndarray]:
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        data = np.array([[float(v) for v in row] for row in r])
    return header, data.reshape(-1, len(header))
