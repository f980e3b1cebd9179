"""Abstract Lax-Oleinik operators on finite spaces.

A cost table ``c`` has shape ``(|X|, |Y|)``. For ``phi`` on X and ``psi`` on Y::

    T^- phi(y) = min_x phi(x) + c(x, y)
    T^+ psi(x) = max_y psi(y) - c(x, y)

Every function works on float arrays and on object arrays of ``Fraction``;
in the second case all comparisons are exact (tolerance 0).
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError
from .space_core import as_cost, as_potential


def eps_arg(c) -> float:
    """Scale-aware argmin/argmax slack, ``1e-9 * (1 + max|c|)``; 0 in exact mode."""
    c = np.asarray(c)
    if c.dtype == object:
        return 0
    return 1e-9 * (1.0 + float(np.abs(c).max(initial=0.0)))


def _check(phi, c, axis):
    c = as_cost(c)
    phi = as_potential(phi, c.shape[axis])
    return phi, c


def t_minus(phi, c) -> np.ndarray:
    phi, c = _check(phi, c, 0)
    return (phi[:, None] + c).min(axis=0)


def t_plus(psi, c) -> np.ndarray:
    psi, c = _check(psi, c, 1)
    return (psi[None, :] - c).max(axis=1)


def _tol(c, tol):
    return eps_arg(c) if tol is None else tol


def subdiff_matrix(phi, c, tol=None) -> np.ndarray:
    """Boolean ``S[x, y]``: y belongs to the c-subdifferential of phi at x."""
    phi, c = _check(phi, c, 0)
    gap = phi[:, None] + c - t_minus(phi, c)[None, :]
    return np.asarray(gap <= _tol(c, tol), dtype=bool)


def superdiff_matrix(psi, c, tol=None) -> np.ndarray:
    """Boolean ``S[x, y]``: x belongs to the c-superdifferential of psi at y."""
    psi, c = _check(psi, c, 1)
    gap = t_plus(psi, c)[:, None] - (psi[None, :] - c)
    return np.asarray(gap <= _tol(c, tol), dtype=bool)


@dataclass(frozen=True, eq=False)
class CSubdiffSet:
    base: int
    members: np.ndarray
    tol: float

    def __contains__(self, i) -> bool:
        return int(i) in set(self.members.tolist())

    def __len__(self) -> int:
        return len(self.members)


def c_subdiff(phi, c, x: int, tol=None) -> CSubdiffSet:
    S = subdiff_matrix(phi, c, tol)
    return CSubdiffSet(int(x), np.flatnonzero(S[x]), _tol(c, tol))


def c_superdiff(psi, c, y: int, tol=None) -> CSubdiffSet:
    S = superdiff_matrix(psi, c, tol)
    return CSubdiffSet(int(y), np.flatnonzero(S[:, y]), _tol(c, tol))


def commutator_defect(psi, c) -> np.ndarray:
    """``T^- T^+ psi - psi``, nonnegative up to round-off."""
    psi, c = _check(psi, c, 1)
    return t_minus(t_plus(psi, c), c) - psi


def transform_defect(phi, c) -> np.ndarray:
    """``phi - T^+ T^- phi``, the mirror of :func:`commutator_defect`."""
    phi, c = _check(phi, c, 0)
    return phi - t_plus(t_minus(phi, c), c)


@dataclass(frozen=True, eq=False)
class CConcavity:
    concave: bool
    witness: np.ndarray | None
    defect: np.ndarray
    superdiff_nonempty: bool

    def __bool__(self) -> bool:
        return self.concave


def is_c_concave(psi, c, tol=None) -> CConcavity:
    """Decide c-concavity through the commutator defect.

    When concave, ``witness`` is ``T^+ psi`` and satisfies ``T^- witness = psi``.
    """
    psi, c = _check(psi, c, 1)
    tol = _tol(c, tol)
    phi = t_plus(psi, c)
    defect = t_minus(phi, c) - psi
    concave = bool(max(abs(v) for v in defect) <= tol)
    nonempty = bool(superdiff_matrix(psi, c, tol).any(axis=0).all())
    return CConcavity(concave, phi if concave else None, defect, nonempty)


def c_concave_envelope(psi, c) -> np.ndarray:
    """Smallest c-concave function above psi, ``T^- T^+ psi``."""
    return t_minus(t_plus(psi, c), c)


@dataclass(frozen=True, eq=False)
class CSingularReport:
    singular: np.ndarray
    cardinality: np.ndarray
    superdiff: list = field(repr=False)
    reachable: list = field(repr=False)
    reachable_from_neighbors: bool = True

    def to_json(self) -> dict:
        return {
            "sing_c": self.singular.tolist(),
            "superdiff": {str(y): m.tolist() for y, m in enumerate(self.superdiff)},
            "reachable": {str(y): m.tolist() for y, m in enumerate(self.reachable)},
            "reachable_from_neighbors": self.reachable_from_neighbors,
        }


def _ball(adj: Sequence[Sequence[int]], start: int, radius: int) -> list[int]:
    seen = {start: 0}
    q = deque([start])
    while q:
        u = q.popleft()
        if seen[u] == radius:
            continue
        for v in adj[u]:
            if v not in seen:
                seen[v] = seen[u] + 1
                q.append(v)
    return [v for v in seen if v != start]


def sing_c(psi, c, tol=None, y_adj=None, x_adj=None, radius: int = 2) -> CSingularReport:
    """Singular set of a c-concave psi and its c-reachable gradients.

    ``y_adj``/``x_adj`` are adjacency lists for Y and X. A member x of the
    superdifferential at y counts as reachable when some node within
    ``radius`` steps of y has a singleton superdifferential {x'} with x'
    equal or adjacent to x. Without adjacency the reachable sets are the
    full superdifferentials and ``reachable_from_neighbors`` is False.
    """
    psi, c = _check(psi, c, 1)
    tol = _tol(c, tol)
    cc = is_c_concave(psi, c, tol)
    if not cc.concave:
        worst = max(abs(v) for v in cc.defect)
        raise DomainError(f"psi is not c-concave (commutator defect {float(worst):.3g})")
    S = superdiff_matrix(psi, c, tol)
    card = S.sum(axis=0)
    members = [np.flatnonzero(S[:, y]) for y in range(S.shape[1])]
    if y_adj is None:
        return CSingularReport(np.flatnonzero(card >= 2), card, members,
                               [m.copy() for m in members], False)
    x_adj = x_adj if x_adj is not None else [[] for _ in range(S.shape[0])]
    reach = []
    for y, m in enumerate(members):
        if card[y] == 1:
            reach.append(m.copy())
            continue
        mset = set(m.tolist())
        found = set()
        for y2 in _ball(y_adj, y, radius):
            if card[y2] == 1:
                xs = int(members[y2][0])
                found |= mset & ({xs} | set(x_adj[xs]))
        reach.append(np.array(sorted(found), dtype=int))
    return CSingularReport(np.flatnonzero(card >= 2), card, members, reach, True)


def clax_report(psi, c) -> dict:
    """CLI payload for a single potential and cost."""
    psi, c = _check(psi, c, 1)
    defect = commutator_defect(psi, c)
    S = superdiff_matrix(psi, c)
    card = S.sum(axis=0)
    return {
        "psi": [float(v) for v in psi],
        "defect": [float(v) for v in defect],
        "sing_c": np.flatnonzero(card >= 2).tolist(),
        "superdiff": {str(y): np.flatnonzero(S[:, y]).tolist() for y in range(S.shape[1])},
    }
