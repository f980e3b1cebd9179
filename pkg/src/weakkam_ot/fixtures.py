"""Named potentials and measures on 1-D grids, shared by scenarios, scripts and tests."""
from __future__ import annotations

from pathlib import Path
from typing import Mapping

import numpy as np

from .errors import ConfigError
from .space_core import ProbMeasure, TorusGrid, load_measure, load_potential, torus_distance_1d


def sine(grid: TorusGrid, amplitude: float = 0.05, freq: int = 1, phase: float = 0.0) -> np.ndarray:
    return amplitude * np.sin(2 * np.pi * (freq * grid.coords + phase))


def cosine(grid: TorusGrid, amplitude: float = 0.2, center: float = 0.5) -> np.ndarray:
    """``amplitude * cos(2 pi (x - center))``, maximal at ``center``."""
    return amplitude * np.cos(2 * np.pi * (grid.coords - center))


def two_parabola(grid: TorusGrid) -> np.ndarray:
    """``min(d(x, 1/4)^2, d(x, 3/4)^2)``: semiconcave, kinks at 0 and 1/2."""
    x = grid.coords
    return np.minimum(torus_distance_1d(x, 0.25) ** 2, torus_distance_1d(x, 0.75) ** 2)


def rounded_distance(grid: TorusGrid, r: float = 0.25) -> np.ndarray:
    """Torus distance to 0 with the convex corner at 0 rounded on radius ``r``.

    The only remaining kink is the concave one at 1/2.
    """
    d = torus_distance_1d(grid.coords, 0.0)
    return np.where(d < r, d**2 / (2 * r) + r / 2, d)


def distance_squared(grid: TorusGrid, center: float = 0.0) -> np.ndarray:
    return torus_distance_1d(grid.coords, center) ** 2


def random_fourier(grid: TorusGrid, rng: np.random.Generator, modes: int = 4,
                   amplitude: float = 0.3) -> np.ndarray:
    """Low-frequency trigonometric polynomial with coefficients decaying like 1/k."""
    k = np.arange(1, modes + 1)
    a, b = rng.normal(size=modes) / k, rng.normal(size=modes) / k
    arg = 2 * np.pi * np.outer(k, grid.coords)
    return amplitude * (a @ np.cos(arg) + b @ np.sin(arg))


def random_potential(grid: TorusGrid, rng: np.random.Generator, trial: int) -> np.ndarray:
    """Alternates rough node noise and smooth Fourier potentials."""
    if trial % 2 == 0:
        return rng.uniform(0.0, 0.1, grid.size)
    return random_fourier(grid, rng)


POTENTIALS = {
    "zero": lambda grid, **kw: np.zeros(grid.size),
    "sine": sine,
    "cosine": cosine,
    "two_parabola": two_parabola,
    "rounded_distance": rounded_distance,
    "distance_squared": distance_squared,
}


def potential_from_config(cfg, grid: TorusGrid, base: Path | None = None) -> np.ndarray:
    """Build a potential from a name, a table ``{kind=..., ...}``, a value list or a file."""
    if isinstance(cfg, str):
        cfg = {"kind": cfg}
    if isinstance(cfg, (list, tuple)):
        vals = np.asarray(cfg, dtype=float)
    elif isinstance(cfg, Mapping):
        cfg = dict(cfg)
        kind = cfg.pop("kind", None)
        if kind == "file":
            vals = load_potential(_resolve(cfg.get("path"), base))
        elif kind == "values":
            vals = np.asarray(cfg.get("values"), dtype=float)
        elif kind in POTENTIALS:
            try:
                vals = POTENTIALS[kind](grid, **cfg)
            except TypeError as e:
                raise ConfigError(f"bad parameters for potential {kind!r}: {e}") from e
        else:
            raise ConfigError(f"unknown potential kind {kind!r}; expected one of "
                              f"{sorted(POTENTIALS) + ['file', 'values']}")
    else:
        raise ConfigError(f"cannot build a potential from {cfg!r}")
    if vals.shape != (grid.size,):
        raise ConfigError(f"potential has {vals.size} values, grid has {grid.size} nodes")
    return vals


def measure_from_config(cfg, grid: TorusGrid, base: Path | None = None) -> ProbMeasure:
    """``{atoms=[...], weights=[...]}``, ``{kind="file", path=...}`` or ``"uniform"``."""
    if cfg == "uniform":
        return ProbMeasure.uniform(grid.size)
    if not isinstance(cfg, Mapping):
        raise ConfigError(f"cannot build a measure from {cfg!r}")
    if cfg.get("kind") == "file":
        m = load_measure(_resolve(cfg.get("path"), base))
        if m.size != grid.size:
            raise ConfigError("measure size does not match the grid")
        return m
    atoms = [int(a) for a in cfg.get("atoms", [])]
    if not atoms or any(not 0 <= a < grid.size for a in atoms):
        raise ConfigError(f"atoms must be grid indices in [0, {grid.size})")
    w = np.asarray(cfg.get("weights", [1.0] * len(atoms)), dtype=float)
    if w.shape != (len(atoms),) or np.any(w < 0) or w.sum() <= 0:
        raise ConfigError("weights must be nonnegative, one per atom")
    m = np.zeros(grid.size)
    np.add.at(m, atoms, w / w.sum())
    return ProbMeasure(m)


def _resolve(path, base: Path | None) -> Path:
    if path is None:
        raise ConfigError("file reference without a path")
    p = Path(path)
    if not p.is_absolute() and base is not None:
        p = base / p
    if not p.exists():
        raise ConfigError(f"referenced file does not exist: {p}")
    return p
