from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pcalc.errors import DomainError, UnresolvedNodeError
from pcalc.lattice import (
    ONE,
    PParam,
    TruncationPolicy,
    common_lattice_index,
    iter_ray,
    quadrature_lattice,
    ray,
    union_lattice,
)


@pytest.mark.parametrize("p", [0.0, 1.0, -0.5, 1.5, math.nan])
def test_pparam_rejects_values_outside_unit_interval(p):
    with pytest.raises(DomainError):
        PParam(p)


def test_policy_validation():
    with pytest.raises(DomainError):
        TruncationPolicy(eps=0.0)
    with pytest.raises(DomainError):
        TruncationPolicy(j_min=20, j_max=10)


def test_toward_ray_points_are_powers_of_the_base():
    r = ray(2.0, 0.5)
    # exponents 1, 1/2, 1/4, ... are exact in binary, so so are the points
    for j, x in enumerate(r.points):
        assert x == 2.0 ** (0.5**j)
        assert r.exponents[j] == 0.5**j


def test_toward_ray_truncation_level():
    pol = TruncationPolicy(eps=1e-12)
    r = ray(3.0, 0.5, policy=pol)
    J = r.truncation_level
    tol = 1e-12 * 3.0
    assert abs(r.points[J] - 1.0) < tol
    assert J >= pol.j_min
    assert abs(r.points[J - 1] - 1.0) >= tol


def test_toward_ray_below_one_increases_to_one():
    r = ray(0.3, 0.5)
    assert np.all(np.diff(r.points) > 0)
    assert abs(r.points[-1] - 1.0) < 1e-12


def test_j_min_is_respected_even_when_close_to_one():
    r = ray(1.0 + 1e-14, 0.5, policy=TruncationPolicy(j_min=5))
    assert r.truncation_level == 5


def test_j_max_caps_the_ray():
    r = ray(2.0, 0.99, policy=TruncationPolicy(j_max=20, j_min=8))
    assert r.truncation_level == 20


def test_away_ray_below_one_heads_to_zero():
    r = ray(0.5, 0.5, "away")
    assert list(r.points[:4]) == [0.5, 0.25, 0.0625, 0.00390625]
    assert r.points[-1] > 0.0


def test_away_ray_above_one_needs_a_cutoff():
    with pytest.raises(DomainError):
        ray(2.0, 0.5, "away")
    r = ray(2.0, 0.5, "away", upper=300.0)
    assert list(r.points) == [2.0, 4.0, 16.0, 256.0]


def test_ray_of_one_is_the_fixed_point():
    assert list(ray(1.0, 0.3).points) == [1.0]


def test_bad_ray_arguments():
    with pytest.raises(DomainError):
        ray(-1.0, 0.5)
    with pytest.raises(DomainError):
        ray(2.0, 0.5, "sideways")


def test_iter_ray_uses_multiplied_exponents():
    it = iter_ray(5.0, 0.3)
    e_expected = 1.0
    for _ in range(10):
        e, x = next(it)
        assert e == e_expected and x == 5.0**e
        e_expected *= 0.3


@pytest.mark.parametrize(
    "a, b, p, k",
    [
        (2.0 ** (1 / 16), 2.0, 0.5, 4),
        (2.0**0.5, 2.0, 0.5, 1),
        (3.0 ** (0.3**3), 3.0, 0.3, 3),
        (0.0625, 0.5, 0.5, 2),  # 0.5 ** (0.5 ** -2)
        (1.5, 2.0, 0.5, None),
        (0.5, 2.0, 0.5, None),  # straddles 1
        (2.0, 2.0, 0.5, None),
    ],
)
def test_common_lattice_index(a, b, p, k):
    assert common_lattice_index(a, b, p) == k


def test_common_lattice_index_scan_oracle():
    # 1.5 is not 2 ** (2 ** -k) for any k: the best match is far outside tolerance
    best = min(abs(1.5 - 2.0 ** (2.0**-k)) / 1.5 for k in range(1, 65))
    assert best > 1e-3
    assert common_lattice_index(1.5, 2.0, 0.5) is None


def _check_successors(lat):
    for i, s in enumerate(lat.succ):
        if s == ONE:
            continue
        assert lat.points[s] == pytest.approx(lat.points[i] ** lat.p.p, rel=1e-14)


def test_union_lattice_structure():
    lat = union_lattice(1.5, 3.0, 0.5)
    assert np.all(np.diff(lat.points) > 0)
    assert 1.5 in lat and 3.0 in lat
    assert 1.0 not in lat
    _check_successors(lat)
    # exactly one terminal per ray
    assert np.sum(lat.succ == ONE) == 2


def test_union_of_common_orbit_shares_points():
    b = 2.0
    a = b ** (0.5**4)
    lat = union_lattice(a, b, 0.5)
    rb, ra = ray(b, 0.5).points, ray(a, 0.5).points
    # the orbit of a is the tail of the orbit of b; each ray stops at its
    # own depth, so the union is the longer of the two
    assert len(lat) == max(len(rb), len(ra) + 4)
    assert all(x in lat for x in rb) and all(x in lat for x in ra)
    assert np.sum(lat.succ == ONE) == 1


def test_union_lattice_requires_order():
    with pytest.raises(DomainError):
        union_lattice(3.0, 2.0, 0.5)


def test_quadrature_lattice_straddling_contains_orbit_of_p():
    lat = quadrature_lattice(0.3, 2.0, 0.5)
    for t in (0.3, 0.09, 2.0, 0.5, 0.25, 0.5**0.5):
        assert t in lat
    _check_successors(lat)


def test_index_tolerance_and_miss():
    lat = union_lattice(1.5, 3.0, 0.5)
    i = lat.index(3.0)
    assert lat.index(3.0 * (1 + 4e-16)) == i
    with pytest.raises(UnresolvedNodeError):
        lat.index(2.5)


def test_succ_points_use_one_at_terminals():
    lat = union_lattice(1.5, 3.0, 0.5)
    sp = lat.succ_points()
    assert np.all(sp[lat.succ == ONE] == 1.0)


@settings(max_examples=50, deadline=None)
@given(
    st.floats(0.05, 0.95),
    st.floats(0.02, 0.98),
    st.floats(1.02, 20.0),
)
def test_quadrature_lattice_is_closed_under_powering(p, a, b):
    lat = quadrature_lattice(a, b, p)
    assert np.all(np.diff(lat.points) > 0)
    _check_successors(lat)
    assert a in lat and b in lat
