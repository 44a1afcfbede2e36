"""Steiner symmetrization with respect to M, polarization, and greedy polarization.

Everything here acts fiberwise on Line1D fields: the Euclidean axis is
rearranged independently above every node of M, with the same polarizer
for all nodes.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .domain import Field, Line1D
from .errors import DomainError, ReflectionOutOfDomain, UnsupportedGrid

__all__ = [
    "Polarizer",
    "GreedyStatus",
    "GreedyStep",
    "GreedyTrace",
    "center_out_order",
    "steiner_symmetrize",
    "mirror",
    "polarize",
    "polarizer_candidates",
    "l1_distance",
    "greedy_polarization_step",
    "greedy_polarization_sequence",
]


def _require_line(u_or_E):
    E = u_or_E.euclid if isinstance(u_or_E, Field) else u_or_E
    if not isinstance(E, Line1D):
        raise UnsupportedGrid(f"rearrangements need a Line1D factor, got {type(E).__name__}")
    return E


@dataclass(frozen=True)
class Polarizer:
    """Half-line H of the Euclidean axis containing 0, bounded by ``y = center``.

    ``center`` must sit on the half lattice ``(spacing / 2) * Z`` and be nonzero;
    H is ``{y < center}`` for a positive center and ``{y > center}`` otherwise.
    """

    center: float
    spacing: float
    twice_index: int = field(init=False, repr=False)

    def __post_init__(self):
        if not self.spacing > 0:
            raise DomainError("spacing must be positive")
        q = 2.0 * self.center / self.spacing
        qi = int(round(q))
        if abs(q - qi) > 1e-9 * max(1.0, abs(q)):
            raise DomainError(f"center {self.center} is not on the half lattice of spacing {self.spacing}")
        if qi == 0:
            raise DomainError("a polarizer in H0 cannot be centred at 0")
        object.__setattr__(self, "twice_index", qi)
        object.__setattr__(self, "center", qi * self.spacing / 2.0)

    @classmethod
    def from_index(cls, twice_index: int, spacing: float) -> "Polarizer":
        return cls(twice_index * spacing / 2.0, spacing)

    @property
    def side(self) -> str:
        return "below" if self.twice_index > 0 else "above"

    def contains(self, j):
        """Membership of lattice index ``j`` (array-like) in the open half-line H."""
        j2 = 2 * np.asarray(j)
        return j2 < self.twice_index if self.twice_index > 0 else j2 > self.twice_index

    def reflect(self, j):
        return self.twice_index - np.asarray(j)


def center_out_order(J: int) -> np.ndarray:
    """Array positions visited centre-out: j = 0, +1, -1, +2, -2, ..."""
    order = [J]
    for k in range(1, J + 1):
        order += [J + k, J - k]
    return np.array(order)


def steiner_symmetrize(u: Field) -> Field:
    E = _require_line(u)
    vals = u.values
    ranked = np.take_along_axis(vals, np.argsort(-vals, axis=1, kind="stable"), axis=1)
    out = np.empty_like(vals)
    out[:, center_out_order(E.half_extent)] = ranked
    return u.with_values(out)


def mirror(u: Field) -> Field:
    _require_line(u)
    return u.with_values(u.values[:, ::-1])


def polarize(u: Field, H: Polarizer) -> Field:
    E = _require_line(u)
    if not np.isclose(H.spacing, E.spacing, rtol=1e-12, atol=0):
        raise DomainError("polarizer spacing does not match the grid")
    J = E.half_extent
    j = E.indices
    jb = H.reflect(j)
    inside = np.abs(jb) <= J
    vals = u.values
    # off-grid partners read as 0: an H-side cell keeps max(u, 0) = u, a
    # complement-side cell would hand its value to a cell we cannot store
    lost = ~inside & ~H.contains(j) & np.any(vals != 0, axis=0)
    if np.any(lost):
        bad = j[lost][0]
        raise ReflectionOutOfDomain(
            f"cell j={bad} carries mass but reflects to j={H.reflect(bad)} outside [-{J}, {J}]"
        )
    out = vals.copy()
    src = j[inside] + J
    dst = jb[inside] + J
    upper = H.contains(j[inside])
    a, b = vals[:, src], vals[:, dst]
    out[:, src] = np.where(upper, np.maximum(a, b), np.minimum(a, b))
    return u.with_values(out)


def polarizer_candidates(E) -> list:
    """Lattice polarizers of H0 with ``0 < |center| <= J * spacing``, ordered by |center|."""
    E = _require_line(E)
    out = []
    for q in range(1, 2 * E.half_extent + 1):
        out.append(Polarizer.from_index(q, E.spacing))
        out.append(Polarizer.from_index(-q, E.spacing))
    return out


def l1_distance(u: Field, v: Field) -> float:
    return float(np.sum(u.weights * np.abs(u.values - v.values)))


class GreedyStatus(str, enum.Enum):
    REACHED_TARGET = "ReachedTarget"
    REACHED_MIRROR = "ReachedMirror"
    STALLED = "Stalled"
    MAX_ITER = "MaxIter"


@dataclass(frozen=True)
class GreedyStep:
    polarizer: Polarizer
    alpha: float          # best improvement over all candidates
    improvement: float    # improvement of the chosen candidate
    distance: float       # L1 distance to the target after the step


@dataclass
class GreedyTrace:
    initial_distance: float
    steps: list = field(default_factory=list)
    status: Optional[GreedyStatus] = None

    @property
    def distances(self) -> list:
        return [self.initial_distance] + [st.distance for st in self.steps]


def greedy_polarization_step(u: Field, target: Field, kappa: float = 1.0):
    """One greedy step toward ``target``.

    Returns ``(field, polarizer, alpha)``; ``polarizer`` is None and the field
    is returned unchanged when no lattice polarizer improves the L1 distance.
    Candidates whose reflection would push mass off the grid are skipped.
    """
    if not 0 < kappa <= 1:
        raise DomainError(f"kappa must lie in (0, 1], got {kappa}")
    step = _best_candidate(u, target, kappa)
    if step is None:
        return u, None, 0.0
    new, H, alpha, _ = step
    if H is None:
        return u, None, alpha
    return new, H, alpha


def _best_candidate(u, target, kappa):
    d0 = l1_distance(u, target)
    scored = []
    for H in polarizer_candidates(u.euclid):
        try:
            uH = polarize(u, H)
        except ReflectionOutOfDomain:
            continue
        scored.append((H, uH, d0 - l1_distance(uH, target)))
    if not scored:
        return None
    alpha = max(gain for _, _, gain in scored)
    if alpha <= 0:
        return u, None, alpha, 0.0
    for H, uH, gain in scored:
        if gain >= kappa * alpha:
            return uH, H, alpha, gain
    raise AssertionError("unreachable: the maximiser satisfies the threshold")


def greedy_polarization_sequence(u: Field, kappa: float = 1.0, max_iter: Optional[int] = None):
    """Iterate greedy polarization until the symmetrization (or its mirror) is reached."""
    if not 0 < kappa <= 1:
        raise DomainError(f"kappa must lie in (0, 1], got {kappa}")
    E = _require_line(u)
    if max_iter is None:
        max_iter = 10 * E.cell_count ** 2
    target = steiner_symmetrize(u)
    flipped = mirror(target)
    trace = GreedyTrace(initial_distance=l1_distance(u, target))
    cur = u
    while True:
        if np.array_equal(cur.values, target.values):
            trace.status = GreedyStatus.REACHED_TARGET
            break
        if np.array_equal(cur.values, flipped.values):
            trace.status = GreedyStatus.REACHED_MIRROR
            break
        if len(trace.steps) >= max_iter:
            trace.status = GreedyStatus.MAX_ITER
            break
        step = _best_candidate(cur, target, kappa)
        if step is None or step[1] is None:
            trace.status = GreedyStatus.STALLED
            break
        cur, H, alpha, gain = step
        trace.steps.append(GreedyStep(H, alpha, gain, l1_distance(cur, target)))
    return cur, trace
