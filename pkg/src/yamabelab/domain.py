"""Discrete geometry of N = M x R^n: factors, fields, quadrature and gradients.

A field is a nonnegative matrix ``values[i, k]`` where ``i`` indexes a node of
the closed factor M and ``k`` a cell of the Euclidean factor. Every integral
is the weighted sum ``sum_ik w_i * vol_k * f(values[i, k])``.

Gradients live on edges. A Euclidean edge joins neighbouring cells of one
fiber, an M edge joins two nodes inside one Euclidean cell. The discrete
``s``-energy is the weighted sum of ``|difference / length|**s`` over all
edges, which reduces to the usual Dirichlet form when ``s = 2``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import DimensionError, DomainError, UnsupportedGrid

__all__ = [
    "ConformalExponents",
    "conformal_exponents",
    "Homogeneous",
    "WeightedGraph",
    "ManifoldFactor",
    "Line1D",
    "Radial",
    "EuclideanFactor",
    "Field",
    "unit_ball_volume",
    "unit_sphere_area",
    "total_volume",
    "lp_norm",
    "grad_lp_norm",
    "mass_profile",
]


@dataclass(frozen=True)
class ConformalExponents:
    m: int
    n: int
    d: int
    a: float
    p: float


def conformal_exponents(m: int, n: int) -> ConformalExponents:
    """Constants of the conformal Laplacian on an ``(m + n)``-dimensional product.

    >>> conformal_exponents(2, 1)
    ConformalExponents(m=2, n=1, d=3, a=8.0, p=6.0)
    """
    if int(m) != m or int(n) != n:
        raise DimensionError(f"dimensions must be integers, got m={m!r}, n={n!r}")
    m, n = int(m), int(n)
    if m < 2:
        raise DimensionError(f"the closed factor needs dimension m >= 2, got {m}")
    if n < 1:
        raise DimensionError(f"the Euclidean factor needs dimension n >= 1, got {n}")
    d = m + n
    return ConformalExponents(m=m, n=n, d=d, a=4.0 * (d - 1) / (d - 2), p=2.0 * d / (d - 2))


# --------------------------------------------------------------------------
# Closed factor M
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class Homogeneous:
    """M collapsed to a single node of volume ``volume`` and constant curvature."""

    volume: float
    scalar_curvature: float

    def __post_init__(self):
        if not (math.isfinite(self.volume) and self.volume > 0):
            raise DomainError(f"volume must be positive, got {self.volume}")
        if not math.isfinite(self.scalar_curvature):
            raise DomainError("scalar curvature must be finite")

    @property
    def node_count(self) -> int:
        return 1

    @property
    def weights(self) -> np.ndarray:
        return np.array([float(self.volume)])

    @property
    def curvature(self) -> np.ndarray:
        return np.array([float(self.scalar_curvature)])

    @property
    def edges(self) -> tuple:
        return ()


@dataclass(frozen=True)
class WeightedGraph:
    """M as a weighted graph: node volumes, per-node curvature, edge conductances."""

    node_weights: tuple
    scalar_curvature: tuple
    edges: tuple = ()

    def __post_init__(self):
        w = tuple(float(x) for x in self.node_weights)
        S = tuple(float(x) for x in self.scalar_curvature)
        if not w:
            raise DomainError("a weighted graph needs at least one node")
        if len(S) != len(w):
            raise DomainError("one scalar curvature value per node is required")
        if not all(math.isfinite(x) and x > 0 for x in w):
            raise DomainError("node weights must be finite and positive")
        if not all(math.isfinite(x) for x in S):
            raise DomainError("scalar curvature values must be finite")
        edges = []
        for e in self.edges:
            i, j, c = e
            if int(i) != i or int(j) != j:
                raise DomainError(f"edge endpoints must be integers: {e!r}")
            i, j, c = int(i), int(j), float(c)
            if not (0 <= i < len(w) and 0 <= j < len(w)):
                raise DomainError(f"edge {e!r} references a missing node")
            if i == j:
                raise DomainError(f"self-loop at node {i}")
            if not (math.isfinite(c) and c > 0):
                raise DomainError(f"conductance must be positive: {e!r}")
            edges.append((i, j, c))
        object.__setattr__(self, "node_weights", w)
        object.__setattr__(self, "scalar_curvature", S)
        object.__setattr__(self, "edges", tuple(edges))

    @property
    def volume(self) -> float:
        return math.fsum(self.node_weights)

    @property
    def node_count(self) -> int:
        return len(self.node_weights)

    @property
    def weights(self) -> np.ndarray:
        return np.array(self.node_weights)

    @property
    def curvature(self) -> np.ndarray:
        return np.array(self.scalar_curvature)


ManifoldFactor = Union[Homogeneous, WeightedGraph]


# --------------------------------------------------------------------------
# Euclidean factor R^n
# --------------------------------------------------------------------------


def unit_ball_volume(n: int) -> float:
    return math.pi ** (n / 2) / math.gamma(n / 2 + 1)


def unit_sphere_area(n: int) -> float:
    """Area of the unit sphere S^{n-1} in R^n (equal to 2 when n = 1)."""
    return 2.0 * math.pi ** (n / 2) / math.gamma(n / 2)


@dataclass(frozen=True)
class Line1D:
    """Symmetric lattice ``y_j = j * spacing`` for ``j = -J..J``."""

    half_extent: int
    spacing: float

    def __post_init__(self):
        if int(self.half_extent) != self.half_extent or self.half_extent < 1:
            raise DomainError(f"half_extent must be an integer >= 1, got {self.half_extent}")
        if not (math.isfinite(self.spacing) and self.spacing > 0):
            raise DomainError(f"spacing must be positive, got {self.spacing}")
        object.__setattr__(self, "half_extent", int(self.half_extent))
        object.__setattr__(self, "spacing", float(self.spacing))

    @property
    def cell_count(self) -> int:
        return 2 * self.half_extent + 1

    @property
    def indices(self) -> np.ndarray:
        return np.arange(-self.half_extent, self.half_extent + 1)

    @property
    def centers(self) -> np.ndarray:
        return self.indices * self.spacing

    @property
    def cell_volumes(self) -> np.ndarray:
        return np.full(self.cell_count, self.spacing)

    def edge_terms(self):
        """(weights, lengths) of the edges joining cell k to k + 1."""
        m = self.cell_count - 1
        return np.full(m, self.spacing), np.full(m, self.spacing)


@dataclass(frozen=True)
class Radial:
    """Uniform spherical shells ``r_{k-1} < |y| < r_k`` in R^n, ``r_k = k * r_max / K``."""

    n: int
    r_max: float
    cell_count: int
    shell_volumes: tuple = field(init=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"n must be an integer >= 1, got {self.n}")
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise DomainError(f"r_max must be positive, got {self.r_max}")
        if int(self.cell_count) != self.cell_count or self.cell_count < 1:
            raise DomainError(f"cell_count must be a positive integer, got {self.cell_count}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "cell_count", int(self.cell_count))
        object.__setattr__(self, "r_max", float(self.r_max))
        r = self.radii
        vols = unit_ball_volume(self.n) * (r[1:] ** self.n - r[:-1] ** self.n)
        object.__setattr__(self, "shell_volumes", tuple(float(v) for v in vols))

    @property
    def dr(self) -> float:
        return self.r_max / self.cell_count

    @property
    def radii(self) -> np.ndarray:
        """Shell boundaries r_0 = 0, ..., r_K = r_max."""
        return np.arange(self.cell_count + 1) * self.dr

    @property
    def centers(self) -> np.ndarray:
        return (np.arange(self.cell_count) + 0.5) * self.dr

    @property
    def cell_volumes(self) -> np.ndarray:
        return np.array(self.shell_volumes)

    def edge_terms(self):
        # interface at r_k between shells k-1 and k, flux area times dr
        r = self.radii[1:-1]
        weights = unit_sphere_area(self.n) * r ** (self.n - 1) * self.dr
        return weights, np.full(r.size, self.dr)


EuclideanFactor = Union[Line1D, Radial]


# --------------------------------------------------------------------------
# Fields
# --------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Field:
    """Nonnegative values on (M-node, Euclidean cell); immutable after construction."""

    manifold: ManifoldFactor
    euclid: EuclideanFactor
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=float)
        if vals.ndim == 1:
            vals = vals[None, :]
        shape = (self.manifold.node_count, self.euclid.cell_count)
        if vals.shape != shape:
            raise DomainError(f"values have shape {vals.shape}, factors require {shape}")
        if not np.all(np.isfinite(vals)):
            raise DomainError("field values must be finite")
        if np.any(vals < 0):
            raise DomainError("field values must be nonnegative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def with_values(self, values) -> "Field":
        return Field(self.manifold, self.euclid, values)

    @property
    def weights(self) -> np.ndarray:
        """Quadrature weight of every site, w_i * vol_k."""
        return np.outer(self.manifold.weights, self.euclid.cell_volumes)

    def has_zero_boundary(self) -> bool:
        if not isinstance(self.euclid, Line1D):
            return True
        return bool(np.all(self.values[:, 0] == 0) and np.all(self.values[:, -1] == 0))

    def __repr__(self):
        return f"Field({self.manifold!r}, {self.euclid!r}, shape={self.values.shape})"


def total_volume(M: ManifoldFactor, E: EuclideanFactor) -> float:
    return float(M.volume) * math.fsum(E.cell_volumes)


def _check_exponent(s: float) -> float:
    s = float(s)
    if not s >= 1:
        raise DomainError(f"exponent s must satisfy s >= 1, got {s}")
    return s


def _weighted_norm(weights, mags, s: float) -> float:
    """``(sum w |x|^s)^(1/s)``, scaled by max |x| so tiny or huge entries survive."""
    top = float(np.max(mags, initial=0.0))
    if top == 0.0 or not math.isfinite(top):
        return top
    return top * float(np.sum(weights * (mags / top) ** s)) ** (1.0 / s)


def lp_norm(u: Field, s: float) -> float:
    s = _check_exponent(s)
    return _weighted_norm(u.weights, u.values, s)


def edge_differences(u: Field):
    """All edge terms of ``u`` as flat arrays ``(weights, slopes)``.

    Euclidean edges come first (row-major over nodes), then M edges
    (edge order, then cell order).
    """
    vals = u.values
    ew, elen = u.euclid.edge_terms()
    w_nodes = u.manifold.weights
    weights = [np.outer(w_nodes, ew).ravel()]
    slopes = [((vals[:, 1:] - vals[:, :-1]) / elen).ravel()]
    vols = u.euclid.cell_volumes
    for i, j, c in u.manifold.edges:
        weights.append(c * vols)
        slopes.append(vals[i] - vals[j])
    return np.concatenate(weights), np.concatenate(slopes)


def grad_lp_norm(u: Field, s: float) -> float:
    s = _check_exponent(s)
    weights, slopes = edge_differences(u)
    return _weighted_norm(weights, np.abs(slopes), s)


def mass_profile(u: Field, s: float, radii: Sequence[float]) -> list:
    """Fraction of ``int u**s`` carried by cells whose centre lies in the ball B_t."""
    s = _check_exponent(s)
    radii = [float(t) for t in radii]
    if any(b < a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be increasing")
    top = float(np.max(u.values))
    # fractions are scale-free; normalizing keeps tiny fields from underflowing
    per_cell = np.sum(u.weights * (u.values / (top or 1.0)) ** s, axis=0)
    if isinstance(u.euclid, Line1D):
        dist = np.abs(u.euclid.centers)
    elif isinstance(u.euclid, Radial):
        dist = u.euclid.centers
    else:
        raise UnsupportedGrid(type(u.euclid).__name__)
    order = np.argsort(dist, kind="stable")
    # cumulative sums of nonnegative terms are monotone in floating point too
    captured = np.concatenate([[0.0], np.cumsum(per_cell[order])])
    total = captured[-1]
    if total == 0:
        raise DomainError("mass profile of the zero field is undefined")
    idx = np.searchsorted(dist[order], radii, side="right")
    return [float(captured[i] / total) for i in idx]
