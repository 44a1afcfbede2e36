"""Shooting oracle for the radial Euler-Lagrange equation.

Integrates ``-a (f'' + (n-1)/r f') + S f = f**(s-1)`` outward from the origin
and bisects on ``f(0)`` until the trajectory neither crosses zero nor turns
upward before ``r_max``. Integrals for the quotient are carried along as
extra ODE components, so nothing here touches the finite-difference mesh of
the flow solver.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.integrate import solve_ivp

from .domain import unit_sphere_area
from .errors import BracketFailure, DomainError
from .solver import RadialProblem

__all__ = ["shoot_radial", "shoot_once", "ShotResult"]

RTOL = 1e-11
ATOL = 1e-14

CROSSED, UPWARD = "crosses zero", "diverges upward"


class ShotResult:
    def __init__(self, sol, kind):
        self.sol = sol
        self.kind = kind


def _rhs(a, S, n, s):
    def rhs(r, y):
        f, g = y[0], y[1]
        fs = abs(f) ** (s - 2) * f
        w = r ** (n - 1)
        return [
            g,
            -(n - 1) / r * g + (S * f - fs) / a,
            w * g * g,
            w * f * f,
            w * abs(f) ** s,
        ]

    return rhs


def shoot_once(prob: RadialProblem, s: float, f0: float) -> ShotResult:
    a, S, n = prob.ce.a, prob.S, prob.n
    # series start away from the r = 0 singularity of the n >= 2 operator
    r0 = 1e-8 * prob.r_max if n > 1 else 0.0
    f2 = (S * f0 - f0 ** (s - 1)) / (a * n)
    y0 = [f0 + 0.5 * f2 * r0**2, f2 * r0, 0.0, 0.0, 0.0]
    rhs = _rhs(a, S, n, s)
    if n == 1:
        rhs_ = rhs

        def rhs(r, y):  # no first-order term when n = 1
            return rhs_(r if r > 0 else 1.0, y)

    def zero(r, y):
        return y[0]

    zero.terminal, zero.direction = True, -1

    def turn(r, y):
        return y[1]

    turn.terminal, turn.direction = True, 1

    sol = solve_ivp(rhs, (r0, prob.r_max), y0, method="RK45", rtol=RTOL, atol=ATOL,
                    events=(zero, turn), dense_output=True)
    if sol.status == -1:
        raise DomainError(f"integration failed: {sol.message}")
    kind = CROSSED if len(sol.t_events[0]) else UPWARD
    return ShotResult(sol, kind)


def shoot_radial(prob: RadialProblem, s: float, f0: float, bracket_tol: float = 1e-12):
    """Ground state of the truncated radial problem, normalized to ``||f||_s = 1``.

    Returns ``(profile, lam)`` with ``profile`` sampled on ``prob.radii`` and
    ``lam = Q_s(profile)``.
    """
    s = float(s)
    if not f0 > 0:
        raise DomainError("f0 must be positive")
    if not 2 < s:
        raise DomainError("s must exceed 2")
    lo = hi = None
    for k in range(0, 61):
        for trial in ((f0 * 2.0**k,) if k == 0 else (f0 * 2.0**k, f0 * 2.0**-k)):
            kind = shoot_once(prob, s, trial).kind
            if kind == CROSSED:
                hi = trial if hi is None else min(hi, trial)
            else:
                lo = trial if lo is None else max(lo, trial)
        if lo is not None and hi is not None and lo < hi:
            break
    else:
        raise BracketFailure(f"no sign change in the f0 sweep around {f0}")
    while (hi - lo) > bracket_tol * hi:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if shoot_once(prob, s, mid).kind == CROSSED:
            hi = mid
        else:
            lo = mid

    shot = shoot_once(prob, s, lo)
    sol = shot.sol
    r_end = sol.t[-1]
    Ig, I2, Is = sol.y[2:, -1]
    a, S = prob.ce.a, prob.S
    scale = prob.manifold.volume * unit_sphere_area(prob.n)
    norm_s = (scale * Is) ** (1.0 / s)
    lam = (a * scale * Ig + S * scale * I2) / norm_s**2

    radii = prob.radii
    prof = np.zeros(radii.size)
    inside = (radii <= r_end) & (radii >= sol.t[0])
    prof[inside] = sol.sol(radii[inside])[0]
    prof[radii < sol.t[0]] = sol.y[0, 0]
    prof[-1] = 0.0
    prof = np.maximum(prof, 0.0) / norm_s
    return prof, float(lam)


def scaling_law_lambda(lam_unit: float, c: float, s: float) -> float:
    """Multiplier of the equation's lambda when the solution is scaled by ``c``."""
    return lam_unit * c ** (2.0 - s)


def exact_line_ground_state(a: float, S: float, s: float, r):
    """Closed-form whole-line solution of ``-a f'' + S f = f**(s-1)`` (n = 1)."""
    amp = (S * s / 2.0) ** (1.0 / (s - 2.0))
    beta = 0.5 * (s - 2.0) * math.sqrt(S / a)
    return amp / np.cosh(beta * np.asarray(r)) ** (2.0 / (s - 2.0))
