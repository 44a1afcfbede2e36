import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from yamabelab.domain import (
    Field,
    Homogeneous,
    Line1D,
    Radial,
    WeightedGraph,
    conformal_exponents,
    grad_lp_norm,
    lp_norm,
    mass_profile,
    total_volume,
    unit_ball_volume,
)
from yamabelab.errors import DimensionError, DomainError

from conftest import line_field


@pytest.mark.parametrize("m, n, d, a, p", [(2, 1, 3, 8.0, 6.0), (2, 2, 4, 6.0, 4.0), (3, 2, 5, 16 / 3, 10 / 3)])
def test_conformal_exponents(m, n, d, a, p):
    ce = conformal_exponents(m, n)
    assert (ce.d, ce.a, ce.p) == (d, pytest.approx(a, rel=1e-15), pytest.approx(p, rel=1e-15))


@pytest.mark.parametrize("m, n", [(1, 3), (0, 5), (2, 0)])
def test_conformal_exponents_rejects_small_dimensions(m, n):
    with pytest.raises(DimensionError):
        conformal_exponents(m, n)


def test_total_volume():
    assert total_volume(Homogeneous(1, 1), Line1D(1, 1.0)) == 3
    assert total_volume(Homogeneous(2, 1), Line1D(2, 0.5)) == 5
    for K in (1, 7, 50):
        assert total_volume(Homogeneous(1, 1), Radial(2, 1.0, K)) == pytest.approx(math.pi, rel=1e-14)


def test_radial_shell_volumes_sum_to_ball():
    for n in (1, 2, 3, 5):
        E = Radial(n, 2.5, 13)
        assert math.fsum(E.shell_volumes) == pytest.approx(unit_ball_volume(n) * 2.5**n, rel=1e-13)
        r = E.radii
        assert E.shell_volumes[3] == pytest.approx(unit_ball_volume(n) * (r[4] ** n - r[3] ** n))


def test_factor_validation():
    with pytest.raises(DomainError):
        WeightedGraph((1.0, -1.0), (1.0, 1.0))
    with pytest.raises(DomainError):
        WeightedGraph((1.0, 1.0), (1.0, 1.0), ((0, 0, 1.0),))
    with pytest.raises(DomainError):
        WeightedGraph((1.0, 1.0), (1.0, 1.0), ((0, 2, 1.0),))
    with pytest.raises(DomainError):
        WeightedGraph((1.0, 1.0), (1.0, 1.0), ((0, 1, 0.0),))
    with pytest.raises(DomainError):
        Line1D(0, 1.0)
    with pytest.raises(DomainError):
        Homogeneous(0.0, 1.0)
    assert WeightedGraph((1.0, 2.5), (0.0, 1.0)).volume == 3.5


def test_field_rejects_negative_and_wrong_shape():
    with pytest.raises(DomainError):
        line_field([0, -1.0, 0])
    with pytest.raises(DomainError):
        Field(Homogeneous(1, 1), Line1D(1, 1.0), np.zeros(4))
    with pytest.raises(DomainError):
        line_field([0, np.nan, 0])


def test_field_is_immutable():
    u = line_field([0, 1, 0])
    with pytest.raises(ValueError):
        u.values[1] = 3.0


def test_lp_norm_examples():
    u = Field(Homogeneous(2, 1), Line1D(1, 1.0), np.ones(3))
    assert lp_norm(u, 2) == pytest.approx(math.sqrt(6), rel=1e-15)
    # single value 2 on a cell of total weight 2
    assert lp_norm(Field(Homogeneous(2, 1), Line1D(1, 1.0), [0, 2, 0]), 1) == 4
    assert lp_norm(line_field([0, 1, 2, 1, 0]), 2) == pytest.approx(math.sqrt(6), rel=1e-15)
    with pytest.raises(DomainError):
        lp_norm(u, 0.5)


def test_grad_lp_norm_examples():
    assert grad_lp_norm(line_field([0, 1, 0]), 2) == pytest.approx(math.sqrt(2), rel=1e-15)
    assert grad_lp_norm(line_field([0, 2, 0, 0, 0]), 1) == 4
    for s in (1, 2, 3.5):
        assert grad_lp_norm(line_field(np.full(7, 1.7)), s) == 0
    with pytest.raises(DomainError):
        grad_lp_norm(line_field([0, 1, 0]), 0.9)


def test_grad_brute_force_weighted_graph(triangle):
    # independent loop over every edge
    E = Line1D(2, 0.5)
    vals = np.arange(15, dtype=float).reshape(3, 5) % 4
    u = Field(triangle, E, vals)
    s = 3.0
    total = 0.0
    for i in range(3):
        for k in range(4):
            total += triangle.node_weights[i] * 0.5 * abs((vals[i, k + 1] - vals[i, k]) / 0.5) ** s
    for i, j, c in triangle.edges:
        for k in range(5):
            total += 0.5 * c * abs(vals[i, k] - vals[j, k]) ** s
    assert grad_lp_norm(u, s) == pytest.approx(total ** (1 / s), rel=1e-14)


def test_grad_radial_interfaces():
    E = Radial(2, 3.0, 3)  # dr = 1, interfaces at r = 1, 2
    u = Field(Homogeneous(1.0, 1.0), E, [3.0, 1.0, 0.0])
    expected = 2 * math.pi * 1 * 1 * 2.0**2 + 2 * math.pi * 2 * 1 * 1.0**2
    assert grad_lp_norm(u, 2) ** 2 == pytest.approx(expected, rel=1e-14)


def test_mass_profile_examples():
    u = line_field([0, 0, 1, 2, 1, 0, 0])
    assert mass_profile(u, 2, [2.0]) == [1.0]
    assert mass_profile(line_field(np.ones(5)), 1, [1.5]) == [pytest.approx(0.6, rel=1e-15)]
    v = line_field([0, 0, 0, 0, 1, 2, 0])
    assert mass_profile(v, 2, [0.0]) == [0.0]
    with pytest.raises(DomainError):
        mass_profile(line_field(np.zeros(5)), 2, [1.0])
    with pytest.raises(DomainError):
        mass_profile(u, 2, [2.0, 1.0])


def test_mass_profile_radial():
    E = Radial(2, 2.0, 4)
    u = Field(Homogeneous(1.0, 1.0), E, np.ones(4))
    frac = mass_profile(u, 1.0, [0.5, 1.0, 2.0])
    # centres 0.25, 0.75, 1.25, 1.75: B_1 holds the inner two shells = disc of radius 1
    assert frac == [pytest.approx(1 / 16), pytest.approx(1 / 4), 1.0]


values = st.lists(st.floats(0, 10, allow_nan=False), min_size=3, max_size=15).filter(lambda v: len(v) % 2 == 1)


@settings(max_examples=200, deadline=None)
@given(values, st.floats(0, 50), st.sampled_from([1.0, 1.5, 2.0, 4.0]))
def test_lp_norm_is_homogeneous(v, c, s):
    u = line_field(v)
    cu = line_field(c * np.asarray(v))
    assert lp_norm(cu, s) == pytest.approx(c * lp_norm(u, s), rel=1e-13, abs=1e-300)


@settings(max_examples=200, deadline=None)
@given(values, st.lists(st.floats(0, 20), min_size=1, max_size=6))
def test_mass_profile_nondecreasing(v, radii):
    u = line_field(v)
    if not np.any(u.values):
        return
    prof = mass_profile(u, 2.0, sorted(radii) + [100.0])
    assert all(b >= a for a, b in zip(prof, prof[1:]))
    assert prof[-1] == 1.0


@settings(max_examples=100, deadline=None)
@given(values)
def test_grad_zero_iff_constant(v):
    u = line_field(v)
    assert (grad_lp_norm(u, 2) == 0) == (np.ptp(u.values) == 0)


def test_operations_are_pure(triangle, rng):
    u = Field(triangle, Line1D(4, 0.3), rng.random((3, 9)))
    assert grad_lp_norm(u, 3) == grad_lp_norm(u, 3)
    assert lp_norm(u, 2.5) == lp_norm(u, 2.5)
    assert mass_profile(u, 2, [0.4, 1.0]) == mass_profile(u, 2, [0.4, 1.0])
