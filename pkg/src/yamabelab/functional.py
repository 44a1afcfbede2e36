"""Yamabe energy, subcritical quotient, Euler-Lagrange residual and sphere constants."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .domain import ConformalExponents, Field, edge_differences, lp_norm
from .errors import DimensionError, DomainError

__all__ = [
    "QuotientValue",
    "laplacian",
    "dirichlet_energy",
    "energy",
    "yamabe_quotient",
    "el_residual",
    "sphere_volume",
    "yamabe_sphere_constant",
]


@dataclass(frozen=True)
class QuotientValue:
    numerator: float
    denominator: float
    value: float
    s: float


def laplacian(u: Field) -> np.ndarray:
    """Positive discrete Laplacian, the adjoint of the edge gradient.

    Built from the same edges as :func:`grad_lp_norm`, so that
    ``sum(weights * laplacian(u) * u) == grad_lp_norm(u, 2) ** 2``
    up to rounding. No edges leave the grid (natural boundary).
    """
    vals = u.values
    ew, elen = u.euclid.edge_terms()
    flux = np.outer(u.manifold.weights, ew / elen**2) * (vals[:, 1:] - vals[:, :-1])
    out = np.zeros_like(vals)
    out[:, :-1] -= flux
    out[:, 1:] += flux
    vols = u.euclid.cell_volumes
    for i, j, c in u.manifold.edges:
        f = c * vols * (vals[i] - vals[j])
        out[i] += f
        out[j] -= f
    return out / u.weights


def dirichlet_energy(u: Field) -> float:
    """``grad_lp_norm(u, 2) ** 2`` without the square root round trip."""
    w, slope = edge_differences(u)
    return float(np.sum(w * slope**2))


def _curvature_term(u: Field) -> float:
    S = u.manifold.curvature[:, None]
    return float(np.sum(u.weights * S * u.values**2))


def energy(u: Field, ce: ConformalExponents) -> float:
    return ce.a * dirichlet_energy(u) + _curvature_term(u)


def yamabe_quotient(u: Field, s: float, ce: ConformalExponents) -> QuotientValue:
    s = float(s)
    if not 2 < s <= ce.p:
        raise DomainError(f"s must lie in (2, {ce.p}], got {s}")
    if not np.any(u.values):
        raise DomainError("the quotient of the zero field is undefined")
    num = energy(u, ce)
    den = lp_norm(u, s) ** 2
    return QuotientValue(numerator=num, denominator=den, value=num / den, s=s)


def el_residual(u: Field, s: float, lam: float, ce: ConformalExponents) -> float:
    """Weighted L2 norm of ``a*Lap(u) + S*u - lam*u**(s-1)``."""
    S = u.manifold.curvature[:, None]
    r = ce.a * laplacian(u) + S * u.values - lam * u.values ** (s - 1)
    return float(math.sqrt(np.sum(u.weights * r**2)))


def sphere_volume(d: int) -> float:
    """Volume of the round unit sphere S^d."""
    if d < 1:
        raise DimensionError(f"d must be >= 1, got {d}")
    return 2.0 * math.pi ** ((d + 1) / 2) / math.gamma((d + 1) / 2)


def yamabe_sphere_constant(d: int) -> float:
    """Yamabe constant of the round S^d, ``d (d-1) Vol(S^d)^(2/d)``."""
    if d < 3:
        raise DimensionError(f"the sphere constant needs d >= 3, got {d}")
    return d * (d - 1) * sphere_volume(d) ** (2.0 / d)
