"""Seeded invariant battery for the rearrangement and functional layers.

Random fields come from ``numpy.random.default_rng(seed)`` (PCG64). Each trial
draws a factor pair and two fields ``u <= v`` with zero boundary cells, then
runs every check on them. A check records a *violation*: the relative amount
by which an inequality or identity misses its tolerance (0 when it holds).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .domain import (
    Field,
    Homogeneous,
    Line1D,
    Radial,
    WeightedGraph,
    conformal_exponents,
    grad_lp_norm,
    lp_norm,
    mass_profile,
)
from .errors import ReflectionOutOfDomain
from .functional import dirichlet_energy, el_residual, laplacian, yamabe_quotient
from .rearrange import (
    GreedyStatus,
    Polarizer,
    greedy_polarization_sequence,
    polarize,
    polarizer_candidates,
    steiner_symmetrize,
)

REL = 1e-12


@dataclass
class PropertyResult:
    name: str
    anchor: str
    trials: int = 0
    failures: int = 0
    worst: float = 0.0

    def record(self, violation: float) -> None:
        self.trials += 1
        if violation > 0 or math.isnan(violation):
            self.failures += 1
            self.worst = max(self.worst, violation) if not math.isnan(violation) else math.inf

    @property
    def passed(self) -> bool:
        return self.failures == 0


@dataclass
class VerifyReport:
    seed: int
    trials: int
    properties: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(p.passed for p in self.properties)

    def rows(self):
        for p in self.properties:
            yield {
                "property": p.name,
                "anchor": p.anchor,
                "trials": p.trials,
                "failures": p.failures,
                "worst_violation": p.worst,
                "status": "pass" if p.passed else "FAIL",
            }


# --------------------------------------------------------------------------
# random inputs
# --------------------------------------------------------------------------


def random_manifold(rng, kind=None):
    kind = kind or ("Homogeneous" if rng.random() < 0.4 else "WeightedGraph")
    if kind == "Homogeneous":
        return Homogeneous(float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.5, 3.0)))
    nodes = int(rng.integers(2, 7))
    edges = [(i, i + 1, float(rng.uniform(0.2, 2.0))) for i in range(nodes - 1)]
    for i in range(nodes):
        for j in range(i + 2, nodes):
            if rng.random() < 0.3:
                edges.append((i, j, float(rng.uniform(0.2, 2.0))))
    return WeightedGraph(
        tuple(rng.uniform(0.5, 2.0, nodes)),
        tuple(rng.uniform(0.5, 3.0, nodes)),
        tuple(edges),
    )


def random_values(rng, nodes: int, J: int) -> np.ndarray:
    """Nonnegative values with zero boundary, random support, exact zeros and ties."""
    vals = np.zeros((nodes, 2 * J + 1))
    lo, hi = sorted(rng.integers(1, 2 * J, size=2))
    block = rng.uniform(0.0, 1.0, (nodes, hi - lo + 1))
    if rng.random() < 0.3:
        block = np.round(block * 4) / 4  # ties
    block[rng.random(block.shape) < 0.15] = 0.0
    vals[:, lo:hi + 1] = block
    return vals


def random_line_field(rng, M=None, J=None, spacing=None) -> Field:
    M = M or random_manifold(rng)
    J = int(J or rng.integers(2, 17))
    h = float(spacing or rng.choice([1.0, 0.5, 0.25, float(rng.uniform(0.1, 1.5))]))
    return Field(M, Line1D(J, h), random_values(rng, M.node_count, J))


def random_radial_field(rng, M=None) -> Field:
    M = M or random_manifold(rng)
    E = Radial(int(rng.integers(1, 4)), float(rng.uniform(1.0, 5.0)), int(rng.integers(4, 40)))
    vals = rng.uniform(0.0, 1.0, (M.node_count, E.cell_count))
    return Field(M, E, vals)


def valid_polarizers(u: Field, *others: Field) -> list:
    out = []
    for H in polarizer_candidates(u.euclid):
        try:
            for w in (u,) + others:
                polarize(w, H)
        except ReflectionOutOfDomain:
            continue
        out.append(H)
    return out


# --------------------------------------------------------------------------
# deterministic refinement check
# --------------------------------------------------------------------------


def _bump(y, center, radius, height):
    z = (np.asarray(y) - center) / radius
    out = np.zeros_like(z)
    inside = np.abs(z) < 1
    out[inside] = height * np.exp(1.0 - 1.0 / (1.0 - z[inside] ** 2))
    return out


def smooth_test_field(h: float, extent: float = 6.0) -> Field:
    """Two unequal smooth compactly supported bumps on [-extent, extent]."""
    J = int(round(extent / h))
    E = Line1D(J, h)
    y = E.centers
    vals = _bump(y, 1.2, 0.8, 1.0) + _bump(y, -0.9, 0.7, 0.6)
    return Field(Homogeneous(1.0, 1.0), E, vals)


def polarization_refinement(spacings=(0.1, 0.05, 0.025), center: float = 0.5) -> list:
    """Relative gap ``(||grad u||_2 - ||grad u^H||_2) / ||grad u||_2`` per spacing."""
    gaps = []
    for h in spacings:
        u = smooth_test_field(h)
        g = grad_lp_norm(u, 2)
        gH = grad_lp_norm(polarize(u, Polarizer(center, h)), 2)
        gaps.append((g - gH) / g)
    return gaps


# --------------------------------------------------------------------------
# the battery
# --------------------------------------------------------------------------


def _excess(lhs, rhs, rel=REL):
    """Relative amount by which ``lhs <= rhs * (1 + rel)`` fails."""
    bound = rhs + rel * abs(rhs)
    if lhs <= bound:
        return 0.0
    return (lhs - bound) / max(abs(rhs), 1e-300)


def _rel_diff(x, y, rel):
    d = abs(x - y)
    tol = rel * max(abs(x), abs(y))
    return 0.0 if d <= tol else d / max(abs(y), 1e-300)


def _same_multiset(a: Field, b: Field) -> float:
    return 0.0 if np.array_equal(np.sort(a.values, axis=1), np.sort(b.values, axis=1)) else 1.0


PROPERTIES = [
    ("lp_homogeneity", "||c u||_s = c ||u||_s"),
    ("mass_profile_monotone", "mass captured in M x B_t is nondecreasing in t and reaches 1"),
    ("grad_zero_iff_constant", "||grad u||_s = 0 iff u is constant"),
    ("purity", "identical inputs give bit-identical outputs"),
    ("multiset_polarize", "u^H is a rearrangement of u on each fiber"),
    ("multiset_symmetrize", "u* is a rearrangement of u on each fiber"),
    ("norm_polarize", "||u^H||_s = ||u||_s"),
    ("norm_symmetrize", "||u*||_s = ||u||_s"),
    ("dirichlet_polarize", "||grad u^H||_s <= ||grad u||_s"),
    ("polya_szego", "||grad u*||_s <= ||grad u||_s"),
    ("nonexpansive_symmetrize", "||u* - v*||_s <= ||u - v||_s"),
    ("nonexpansive_polarize", "||u^H - v^H||_s <= ||u - v||_s"),
    ("quotient_monotone", "Q_s(u*) <= Q_s(u)"),
    ("idempotent", "(u*)* = u*"),
    ("order_preserving", "u <= v implies u* <= v*"),
    ("greedy_descent", "greedy L1 distance to u* is nonincreasing, strictly while alpha > 0"),
    ("polarization_refinement", "||grad u||_2 - ||grad u^H||_2 -> 0 under refinement"),
    ("summation_by_parts", "<Lap u, u> = ||grad u||_2^2"),
    ("quotient_scale_invariant", "Q_s(c u) = Q_s(u)"),
    ("el_constant", "a Lap c + S c = lam c^(s-1) exactly when S c = lam c^(s-1)"),
    ("laplacian_constant", "Lap of a constant vanishes"),
]


def run_battery(seed: int = 42, trials: int = 500, greedy_every: int = 5) -> VerifyReport:
    rng = np.random.default_rng(seed)
    results = {name: PropertyResult(name, anchor) for name, anchor in PROPERTIES}
    rec = {name: r.record for name, r in results.items()}
    ce = conformal_exponents(2, 1)

    for t in range(trials):
        M = random_manifold(rng)
        u = random_line_field(rng, M)
        bump = np.zeros_like(u.values)
        bump[:, 1:-1] = rng.uniform(0.0, 0.5, (M.node_count, u.values.shape[1] - 2))
        v = u.with_values(u.values + bump * (rng.random(bump.shape) < 0.5))
        w = u.with_values(random_values(rng, M.node_count, u.euclid.half_extent))
        us, vs, ws = steiner_symmetrize(u), steiner_symmetrize(v), steiner_symmetrize(w)
        Hs = valid_polarizers(u, w)
        H = Hs[int(rng.integers(len(Hs)))]
        uH, wH = polarize(u, H), polarize(w, H)

        c = float(rng.uniform(0.1, 10.0))
        for s in (1.0, 2.0, 4.0):
            rec["lp_homogeneity"](_rel_diff(lp_norm(u.with_values(c * u.values), s), c * lp_norm(u, s), 1e-13))
            rec["norm_polarize"](_rel_diff(lp_norm(uH, s), lp_norm(u, s), REL))
            rec["norm_symmetrize"](_rel_diff(lp_norm(us, s), lp_norm(u, s), REL))

        if np.any(u.values):
            radii = sorted(rng.uniform(0, u.euclid.half_extent * u.euclid.spacing, 4)) + [1e9]
            prof = mass_profile(u, 2.0, radii)
            bad = any(b < a for a, b in zip(prof, prof[1:])) or prof[-1] != 1.0
            rec["mass_profile_monotone"](1.0 if bad else 0.0)

        const = u.with_values(np.full(u.values.shape, c))
        nonconst = grad_lp_norm(v, 2) > 0 if np.ptp(v.values) > 0 else True
        rec["grad_zero_iff_constant"](0.0 if grad_lp_norm(const, 1.0) == 0 and nonconst else 1.0)
        rec["purity"](0.0 if (
            grad_lp_norm(u, 3) == grad_lp_norm(u, 3)
            and np.array_equal(steiner_symmetrize(u).values, us.values)
            and np.array_equal(polarize(u, H).values, uH.values)
        ) else 1.0)

        rec["multiset_polarize"](_same_multiset(u, uH))
        rec["multiset_symmetrize"](_same_multiset(u, us))
        for s in (1.0, 2.0, 3.0):
            g = grad_lp_norm(u, s)
            rec["dirichlet_polarize"](_excess(grad_lp_norm(uH, s), g))
            rec["polya_szego"](_excess(grad_lp_norm(us, s), g))
        for s in (1.0, 2.0):
            d = lp_norm(u.with_values(np.abs(u.values - w.values)), s)
            rec["nonexpansive_symmetrize"](_excess(lp_norm(us.with_values(np.abs(us.values - ws.values)), s), d))
            rec["nonexpansive_polarize"](_excess(lp_norm(uH.with_values(np.abs(uH.values - wH.values)), s), d))
        if np.any(u.values):
            for s in sorted({3.0, 4.0, ce.p}):
                rec["quotient_monotone"](_excess(yamabe_quotient(us, s, ce).value, yamabe_quotient(u, s, ce).value))
                q1 = yamabe_quotient(u, s, ce).value
                q3 = yamabe_quotient(u.with_values(3.0 * u.values), s, ce).value
                rec["quotient_scale_invariant"](_rel_diff(q3, q1, 1e-13))
        rec["idempotent"](0.0 if np.array_equal(steiner_symmetrize(us).values, us.values) else 1.0)
        rec["order_preserving"](0.0 if np.all(us.values <= vs.values) else 1.0)

        if t % greedy_every == 0 and M.node_count <= 3:
            _, trace = greedy_polarization_sequence(u, 1.0 if t % 2 == 0 else 0.5)
            dist = trace.distances
            ok = all(b < a for a, b in zip(dist, dist[1:]))
            ok &= all(step.alpha > 0 for step in trace.steps)
            rec["greedy_descent"](0.0 if ok else 1.0)

        f = random_radial_field(rng, M) if t % 4 == 0 else w
        lhs = float(np.sum(f.weights * laplacian(f) * f.values))
        rec["summation_by_parts"](_rel_diff(lhs, dirichlet_energy(f), REL) if dirichlet_energy(f) > 0 else 0.0)
        fc = f.with_values(np.full(f.values.shape, c))
        rec["laplacian_constant"](float(np.max(np.abs(laplacian(fc)))))
        if isinstance(M, Homogeneous):
            s = float(rng.uniform(2.5, ce.p))
            Sval = M.scalar_curvature
            lam_ok = Sval * c ** (2 - s)  # S c = lam c^(s-1)
            r_ok = el_residual(fc, s, lam_ok, ce)
            r_bad = el_residual(fc, s, 1.5 * lam_ok, ce)
            scale = Sval * c * math.sqrt(np.sum(fc.weights))
            rec["el_constant"](0.0 if r_ok <= 1e-12 * scale and r_bad > 1e-3 * scale else 1.0)

    gaps = polarization_refinement()
    ok = all(g > 0 for g in gaps) and all(b < a for a, b in zip(gaps, gaps[1:]))
    rec["polarization_refinement"](0.0 if ok else 1.0)

    return VerifyReport(seed=seed, trials=trials, properties=list(results.values()))


def greedy_outcomes(seed: int, count: int, kappas=(1.0, 0.5)):
    """Run the greedy sequence on ``count`` seeded fields for each kappa.

    Returns a list of ``(field, kappa, final, trace, step_bound)``.
    """
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        M = random_manifold(rng, "Homogeneous") if rng.random() < 0.5 else random_manifold(rng)
        u = random_line_field(rng, M)
        bound = 10 * u.euclid.cell_count ** 2
        for kappa in kappas:
            final, trace = greedy_polarization_sequence(u, kappa, bound)
            out.append((u, kappa, final, trace, bound))
    return out


def in_h0_fixed_class(u: Field) -> bool:
    """Whether every fiber is nonincreasing in |y| (fixed by every lattice polarizer of H0)."""
    J = u.euclid.half_extent
    x = u.values
    for k in range(J):
        inner = np.minimum(x[:, J + k], x[:, J - k])
        outer = np.maximum(x[:, J + k + 1], x[:, J - k - 1])
        if np.any(inner < outer):
            return False
    return True


__all__ = [
    "PropertyResult",
    "VerifyReport",
    "GreedyStatus",
    "run_battery",
    "greedy_outcomes",
    "in_h0_fixed_class",
    "polarization_refinement",
    "smooth_test_field",
    "random_manifold",
    "random_line_field",
    "random_values",
    "valid_polarizers",
]
