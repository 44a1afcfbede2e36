import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yamabelab.domain import Field, Homogeneous, Line1D, Radial, conformal_exponents, grad_lp_norm
from yamabelab.errors import DimensionError, DomainError
from yamabelab.functional import (
    dirichlet_energy,
    el_residual,
    energy,
    laplacian,
    sphere_volume,
    yamabe_quotient,
    yamabe_sphere_constant,
)
from yamabelab.rearrange import steiner_symmetrize

from conftest import line_field

CE21 = conformal_exponents(2, 1)


def test_energy_examples():
    assert energy(line_field(np.ones(3), S=2.0), CE21) == 6.0
    assert energy(line_field([0, 1, 0], S=2.0), CE21) == 18.0
    assert energy(line_field(np.zeros(3), S=2.0), CE21) == 0.0


def test_quotient_of_constant():
    q = yamabe_quotient(line_field(np.ones(3), S=2.0), 4, CE21)
    assert q.value == pytest.approx(2 * math.sqrt(3), rel=1e-15)
    assert q.value == q.numerator / q.denominator and q.s == 4.0


def test_quotient_domain_errors():
    u = line_field([0, 1, 0])
    for s in (2.0, 1.5, 6.01):
        with pytest.raises(DomainError):
            yamabe_quotient(u, s, CE21)
    with pytest.raises(DomainError):
        yamabe_quotient(line_field(np.zeros(5)), 4, CE21)
    yamabe_quotient(u, CE21.p, CE21)  # s = p is admissible


def test_quotient_scale_invariant(triangle, rng):
    ce = conformal_exponents(3, 1)
    for _ in range(20):
        u = Field(triangle, Line1D(4, 0.3), rng.random((3, 9)))
        for s in (2.5, 3.0, ce.p):
            q1 = yamabe_quotient(u, s, ce).value
            q3 = yamabe_quotient(u.with_values(3 * u.values), s, ce).value
            assert q3 == pytest.approx(q1, rel=1e-13)


def test_quotient_decreases_under_symmetrization(triangle, rng):
    ce = conformal_exponents(3, 2)
    for _ in range(30):
        vals = np.zeros((3, 11))
        vals[:, 1:-1] = rng.random((3, 9))
        u = Field(triangle, Line1D(5, 0.5), vals)
        for s in (3.0, ce.p):
            assert yamabe_quotient(steiner_symmetrize(u), s, ce).value <= yamabe_quotient(u, s, ce).value * (1 + 1e-13)


def test_el_residual_constant_field():
    u = line_field(np.ones(5), volume=1.5, S=2.0)
    assert el_residual(u, 4.0, 2.0, CE21) == pytest.approx(0.0, abs=1e-12)
    vol = 1.5 * 5
    assert el_residual(u, 4.0, 0.0, CE21) == pytest.approx(2 * math.sqrt(vol), rel=1e-14)
    # a constant c solves S c = lam c^(s-1) only for lam = S c^(2-s)
    v = line_field(np.full(5, 2.0), S=2.0)
    q = yamabe_quotient(v, 4.0, CE21).value
    assert el_residual(v, 4.0, 2.0 * 2.0**-2, CE21) == pytest.approx(0.0, abs=1e-12)
    assert el_residual(v, 4.0, q, CE21) > 1e-3


def test_laplacian_of_constant_is_zero(triangle):
    for E in (Line1D(3, 0.7), Radial(3, 2.0, 6)):
        u = Field(triangle, E, np.full((3, E.cell_count), 1.3))
        assert np.all(laplacian(u) == 0)


def test_laplacian_hand_example():
    # single node, h = 1: (Lap u)_j = 2 u_j - u_{j-1} - u_{j+1} in the interior
    u = line_field([0, 1, 3, 1, 0])
    np.testing.assert_allclose(laplacian(u)[0], [-1, -1, 4, -1, -1])


def test_summation_by_parts(triangle, rng):
    for E in (Line1D(6, 0.2), Radial(2, 3.0, 12), Radial(1, 1.0, 5)):
        for _ in range(10):
            u = Field(triangle, E, rng.random((3, E.cell_count)))
            lhs = float(np.sum(u.weights * laplacian(u) * u.values))
            assert lhs == pytest.approx(grad_lp_norm(u, 2) ** 2, rel=1e-12)
            assert dirichlet_energy(u) == pytest.approx(grad_lp_norm(u, 2) ** 2, rel=1e-13)


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(0, 5), min_size=3, max_size=13).filter(lambda v: len(v) % 2 == 1 and any(v)))
def test_summation_by_parts_property(v):
    u = line_field(v, volume=2.0, h=0.3)
    lhs = float(np.sum(u.weights * laplacian(u) * u.values))
    assert lhs == pytest.approx(dirichlet_energy(u), rel=1e-12, abs=1e-12)


def test_sphere_volume():
    assert sphere_volume(1) == pytest.approx(2 * math.pi, rel=1e-15)
    assert sphere_volume(2) == pytest.approx(4 * math.pi, rel=1e-15)
    assert sphere_volume(3) == pytest.approx(2 * math.pi**2, rel=1e-15)
    assert sphere_volume(4) == pytest.approx(8 * math.pi**2 / 3, rel=1e-15)
    with pytest.raises(DimensionError):
        sphere_volume(0)


def test_sphere_constant():
    assert yamabe_sphere_constant(3) == pytest.approx(6 * (2 * math.pi**2) ** (2 / 3), rel=1e-15)
    assert yamabe_sphere_constant(3) == pytest.approx(43.823, abs=5e-4)
    assert yamabe_sphere_constant(4) == pytest.approx(12 * math.sqrt(8 * math.pi**2 / 3), rel=1e-15)
    with pytest.raises(DimensionError):
        yamabe_sphere_constant(2)


def test_sphere_constant_is_quotient_of_round_sphere():
    # on a round S^d the constant function is a minimizer: a*0 + S*Vol over Vol^(2/p)
    for d in (3, 4, 5, 7):
        Vol, S, p = sphere_volume(d), d * (d - 1), 2 * d / (d - 2)
        assert S * Vol ** (1 - 2 / p) == pytest.approx(yamabe_sphere_constant(d), rel=1e-14)
