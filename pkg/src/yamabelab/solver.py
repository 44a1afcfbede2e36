"""Subcritical minimization of the Yamabe quotient on the radial reduction of M x R^n.

The unknown is a radial profile ``f(r)`` on the uniform mesh ``r_k = k*dr``,
``k = 0..K``, with ``f_K = 0`` (Dirichlet truncation at ``r_max``) and
``f'(0) = 0`` (the r = 0 node is a half control volume with no flux through
the origin). M enters only through its volume and constant scalar curvature.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from scipy.linalg import cho_solve_banded, cholesky_banded

from .domain import ConformalExponents, Field, Homogeneous, Radial, unit_sphere_area
from .errors import DomainError, NonConvergence
from .functional import yamabe_sphere_constant

log = logging.getLogger(__name__)

__all__ = [
    "RadialProblem",
    "SolverOptions",
    "SolveReport",
    "ContinuationEntry",
    "ContinuationReport",
    "minimize_subcritical",
    "continuation",
]


@dataclass(frozen=True, eq=False)
class RadialProblem:
    manifold: Homogeneous
    ce: ConformalExponents
    r_max: float = 12.0
    cells: int = 2400

    def __post_init__(self):
        if not isinstance(self.manifold, Homogeneous):
            raise DomainError("the radial solver needs a Homogeneous manifold factor")
        if not self.manifold.scalar_curvature > 0:
            raise DomainError("the scalar curvature of M must be positive")
        if not (math.isfinite(self.r_max) and self.r_max > 0):
            raise DomainError(f"r_max must be positive, got {self.r_max}")
        if int(self.cells) != self.cells or self.cells < 16:
            raise DomainError(f"the mesh needs at least 16 cells, got {self.cells}")
        object.__setattr__(self, "cells", int(self.cells))
        object.__setattr__(self, "r_max", float(self.r_max))

        n, K, dr = self.n, self.cells, self.dr
        area = self.manifold.volume * unit_sphere_area(n)
        edges = (np.arange(K + 1) + 0.5) * dr  # r_{k+1/2}, k = 0..K
        inner = np.concatenate([[0.0], edges[:-1]])
        # control volume of node k (k < K): V_M * |{r_{k-1/2} < |y| < r_{k+1/2}}|
        weights = area / n * (edges[:K] ** n - inner[:K] ** n)
        flux = area * edges[:K] ** (n - 1) / dr  # edge k -- k+1, divided by dr
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "_flux", flux)

    @property
    def n(self) -> int:
        return self.ce.n

    @property
    def S(self) -> float:
        return float(self.manifold.scalar_curvature)

    @property
    def dr(self) -> float:
        return self.r_max / self.cells

    @property
    def radii(self) -> np.ndarray:
        return np.arange(self.cells + 1) * self.dr

    # Operators on the K unknowns f_0..f_{K-1}.

    def stiffness_banded(self) -> np.ndarray:
        """Upper banded form of the stiffness matrix (Dirichlet form = f^T A f)."""
        c = self._flux
        diag = c.copy()
        diag[1:] += c[:-1]
        ab = np.zeros((2, self.cells))
        ab[0, 1:] = -c[:-1]
        ab[1] = diag
        return ab

    def stiffness_apply(self, f: np.ndarray) -> np.ndarray:
        c = self._flux
        d = np.diff(np.append(f, 0.0)) * c  # c_k (f_{k+1} - f_k)
        out = -d
        out[1:] += d[:-1]
        return out

    def laplacian(self, f: np.ndarray) -> np.ndarray:
        return self.stiffness_apply(f) / self.weights

    def dirichlet(self, f: np.ndarray) -> float:
        d = np.diff(np.append(f, 0.0))
        return float(np.sum(self._flux * d * d))

    def energy(self, f: np.ndarray) -> float:
        return self.ce.a * self.dirichlet(f) + self.S * float(np.sum(self.weights * f * f))

    def power(self, f: np.ndarray, s: float) -> float:
        return float(np.sum(self.weights * f**s))

    def norm(self, f: np.ndarray, s: float) -> float:
        return self.power(f, s) ** (1.0 / s)

    def quotient(self, f: np.ndarray, s: float) -> float:
        return self.energy(f) / self.norm(f, s) ** 2

    def residual(self, f: np.ndarray, s: float, lam: float) -> np.ndarray:
        return self.ce.a * self.laplacian(f) + self.S * f - lam * f ** (s - 1)

    def residual_norm(self, f: np.ndarray, s: float, lam: float) -> float:
        r = self.residual(f, s, lam)
        return math.sqrt(float(np.sum(self.weights * r * r)))

    def relative_quotient_change(self, f: np.ndarray, delta: np.ndarray, s: float) -> float:
        """``Q(f + delta) / Q(f) - 1`` evaluated without cancellation."""
        df, dd = np.diff(np.append(f, 0.0)), np.diff(np.append(delta, 0.0))
        w = self.weights
        dE = self.ce.a * float(np.sum(self._flux * dd * (2 * df + dd)))
        dE += self.S * float(np.sum(w * delta * (2 * f + delta)))
        with np.errstate(divide="ignore", invalid="ignore"):
            inc = np.where(f > 0, f**s * np.expm1(s * np.log1p(delta / np.where(f > 0, f, 1.0))),
                           np.maximum(f + delta, 0.0) ** s)
        dP = float(np.sum(w * inc))
        return float(np.expm1(np.log1p(dE / self.energy(f)) - 2.0 / s * np.log1p(dP / self.power(f, s))))

    def gaussian(self, s: float) -> np.ndarray:
        f = np.exp(-0.5 * self.radii[:-1] ** 2)
        return f / self.norm(f, s)


@dataclass
class SolverOptions:
    tol: float = 1e-8
    max_iter: int = 20000
    qtol: float = 1e-12
    metric: str = "h1"  # "h1": preconditioned by (a*Lap + S); "l2": plain gradient
    max_backtracks: int = 60


@dataclass
class SolveReport:
    s: float
    lambda_s: float
    profile: np.ndarray  # nodal values f_0..f_K, f_K = 0
    radii: np.ndarray
    iterations: int
    final_residual: float
    final_quotient: float
    norm_check: float
    boundary_mass: float
    converged: bool = True
    quotient_trace: list = field(default_factory=list, repr=False)
    decrements: list = field(default_factory=list, repr=False)  # relative Q change per step
    r_max: float = 0.0
    n: int = 1
    volume: float = 1.0
    scalar_curvature: float = 1.0

    def to_field(self) -> Field:
        """Shell-averaged values on a Radial factor with the solver's cells."""
        K = len(self.profile) - 1
        E = Radial(self.n, self.r_max, K)
        vals = 0.5 * (self.profile[:-1] + self.profile[1:])
        return Field(Homogeneous(self.volume, self.scalar_curvature), E, vals)


def _check_s(prob: RadialProblem, s: float, allow_critical: bool) -> float:
    s = float(s)
    p = prob.ce.p
    ok = 2 < s <= p if allow_critical else 2 < s < p
    if not ok:
        raise DomainError(f"s = {s} outside the admissible range (2, {p}{']' if allow_critical else ')'}")
    return s


def minimize_subcritical(prob: RadialProblem, s: float, opts: Optional[SolverOptions] = None,
                         init: Optional[np.ndarray] = None) -> SolveReport:
    """Minimize Q_s by a normalized projected gradient flow.

    Each step moves along ``-(a*Lap(u) + S*u - lam(u)*u**(s-1))`` (optionally
    preconditioned), clips negative values, and rescales to ``||u||_s = 1``.
    The step length is halved until Q_s strictly decreases.
    """
    return _minimize(prob, _check_s(prob, s, False), opts or SolverOptions(), init)


def _minimize(prob, s, opts, init):
    K = prob.cells
    if init is None:
        f = prob.gaussian(s)
    else:
        f = np.asarray(init, dtype=float)
        if f.shape == (K + 1,):
            f = f[:-1]
        if f.shape != (K,):
            raise DomainError(f"initial profile must have {K} or {K + 1} nodes, got {f.shape}")
        if np.any(f < 0) or not np.any(f > 0):
            raise DomainError("initial profile must be nonnegative and not identically zero")
        f = f / prob.norm(f, s)

    if opts.metric == "h1":
        factor = cholesky_banded(prob.ce.a * prob.stiffness_banded() + _mass_banded(prob))

        def direction(g):
            return cho_solve_banded((factor, False), prob.weights * g)

        tau0 = 1.0
    elif opts.metric == "l2":
        def direction(g):
            return g

        tau0 = 1.0 / (prob.ce.a * 4.0 / prob.dr**2 + prob.S)
    else:
        raise DomainError(f"unknown metric {opts.metric!r}")

    Q = prob.quotient(f, s)
    trace = [Q]
    deltas = []
    tau = tau0
    converged = False
    it = 0
    rel = math.inf
    while True:
        lam = prob.energy(f) / prob.power(f, s)
        res = prob.residual_norm(f, s, lam)
        if res < opts.tol and rel < opts.qtol:
            converged = True
            break
        if it >= opts.max_iter:
            break
        d = direction(prob.residual(f, s, lam))
        step = min(2.0 * tau, tau0) if opts.metric == "l2" else tau0
        for _ in range(opts.max_backtracks):
            delta = np.maximum(f - step * d, 0.0) - f
            trial = f + delta
            if np.any(trial > 0):
                dq = prob.relative_quotient_change(f, delta, s)
                if dq < 0:
                    break
            step *= 0.5
        else:
            # no strict decrease is representable any more
            converged = res < opts.tol
            break
        tau = step
        f = trial / prob.norm(trial, s)
        Q = prob.quotient(f, s)
        rel = -dq
        trace.append(Q)
        deltas.append(dq)
        it += 1

    lam = prob.energy(f) / prob.power(f, s)
    res = prob.residual_norm(f, s, lam)
    profile = np.append(f, 0.0)
    mass = prob.weights * f**s
    outer = prob.radii[:-1] > 0.9 * prob.r_max
    report = SolveReport(
        s=s,
        lambda_s=Q,
        profile=profile,
        radii=prob.radii,
        iterations=it,
        final_residual=res,
        final_quotient=Q,
        norm_check=prob.norm(f, s),
        boundary_mass=float(np.sum(mass[outer]) / np.sum(mass)),
        converged=converged,
        quotient_trace=trace,
        decrements=deltas,
        r_max=prob.r_max,
        n=prob.n,
        volume=prob.manifold.volume,
        scalar_curvature=prob.S,
    )
    if not converged:
        raise NonConvergence(
            f"s={s}: stopped after {it} iterations with residual {res:.3e} (tol {opts.tol:.1e})",
            report,
        )
    log.debug("s=%g converged in %d iterations, lambda=%.12g, residual=%.2e", s, it, Q, res)
    return report


def _mass_banded(prob):
    ab = np.zeros((2, prob.cells))
    ab[1] = prob.S * prob.weights
    return ab


@dataclass
class ContinuationEntry:
    s: float
    lambda_s: Optional[float]
    residual: Optional[float]
    subcritical: Optional[bool]
    iterations: int
    converged: bool
    warm_start: Optional[float]  # s of the profile used as initial guess
    report: Optional[SolveReport] = field(default=None, repr=False)


@dataclass
class ContinuationReport:
    sphere_constant: float
    entries: list = field(default_factory=list)

    def lambdas(self) -> dict:
        return {e.s: e.lambda_s for e in self.entries}


def continuation(prob: RadialProblem, s_list: Sequence[float],
                 opts: Optional[SolverOptions] = None) -> ContinuationReport:
    """Solve for each ``s`` in ascending order, warm-starting from the previous profile."""
    s_list = [float(s) for s in s_list]
    if any(b <= a for a, b in zip(s_list, s_list[1:])):
        raise DomainError("s_list must be strictly ascending")
    for s in s_list:
        _check_s(prob, s, True)
    opts = opts or SolverOptions()
    Y = yamabe_sphere_constant(prob.ce.d)
    out = ContinuationReport(sphere_constant=Y)
    prev, prev_s = None, None
    for s in s_list:
        try:
            rep = _minimize(prob, s, opts, prev)
        except NonConvergence as exc:
            rep = exc.report
            log.warning("%s", exc)
        out.entries.append(ContinuationEntry(
            s=s,
            lambda_s=rep.lambda_s,
            residual=rep.final_residual,
            subcritical=rep.lambda_s < Y,
            iterations=rep.iterations,
            converged=rep.converged,
            warm_start=prev_s,
            report=rep,
        ))
        if rep.converged:
            prev, prev_s = rep.profile, s
    return out
