import math
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import gauge_by_bisection
from turan import geometry as geo
from turan.geometry import Box, Domain, LpBall, Point, Polytope, Translate, Union

BOX = geo.cube(1, 2)


def same_membership(a, b, pts):
    return all(a.contains(p) == b.contains(p) for p in pts)


def grid_1d(lo=-2, hi=2, n=1000):
    return [(F(lo) + F(hi - lo) * i / n,) for i in range(n + 1)]


def grid_2d(n=32):
    return [(F(i - n, n // 2), F(j - n, n // 2)) for i in range(2 * n + 1) for j in range(2 * n + 1)]


def test_box_membership_is_open():
    assert BOX.contains((F(3, 5), 0))
    assert not BOX.contains((1, 0))
    assert not BOX.contains((F(-1), F(1, 2)))


def test_torus_half_is_outside():
    dom = geo.interval(F(1, 2), space=geo.TORUS)
    assert not dom.contains((F(1, 2),))
    assert not dom.contains((F(-1, 2),))
    assert dom.contains((F(5, 4),))


def test_symmetrize_fixed_point_and_translate():
    assert same_membership(geo.symmetrize(BOX), BOX, grid_2d())
    shifted = Domain(geo.EUCLIDEAN, 1, Translate(Box((1,), (0,)), (F(1, 2),)))
    assert same_membership(geo.symmetrize(shifted), geo.interval(F(1, 2)), grid_1d())


def test_symmetrized_union_of_balls():
    c = F(1, 2)
    u = Domain(geo.EUCLIDEAN, 2, Union((LpBall(2, F(1, 3), (c, 0)), LpBall(2, F(1, 4), (-c, F(1, 10))))))
    s = geo.symmetrize(u)
    pts = grid_2d()
    assert all(s.contains(p) == s.contains(tuple(-x for x in p)) for p in pts)
    assert same_membership(geo.symmetrize(s), s, pts)


def test_minkowski_norm_examples():
    assert geo.minkowski_norm(BOX, (F(3, 10), 0)) == F(3, 10)
    assert geo.minkowski_norm(geo.ball(2, 1, 2), (F(3, 5), F(4, 5))) == 1
    poly = Domain(geo.EUCLIDEAN, 2, Polytope(((1, 1), (1, -1)), (1, 1)))
    assert geo.minkowski_norm(poly, (F(1, 2), 0)) == F(1, 2)
    assert gauge_by_bisection(poly, (0.5, 0.0)) == pytest.approx(0.5, abs=1e-12)


@given(st.fractions(F(-3), F(3), max_denominator=50), st.fractions(F(-3), F(3), max_denominator=50))
def test_minkowski_norm_matches_bisection(a, b):
    if a == 0 and b == 0:
        return
    for dom in (BOX, geo.ball(1, F(3, 2), 2), geo.ball("inf", 2, 2), Domain(geo.EUCLIDEAN, 2, Polytope(((1, 1), (1, -1)), (1, 2)))):
        assert float(geo.minkowski_norm(dom, (a, b))) == pytest.approx(gauge_by_bisection(dom, (a, b)), rel=1e-10)


def test_orbit_examples():
    assert geo.orbit(Point((F(1, 4), F(3, 4)))).size == 4
    assert geo.orbit(Point((F(1, 2), F(1, 3)))).size == 6
    assert not geo.orbit(Point((math.sqrt(2) / 2,), irrational=True)).finite
    with pytest.raises(geo.GeometryError):
        geo.orbit(Point((0.3,)))


@given(st.lists(st.fractions(F(-5), F(5), max_denominator=40), min_size=1, max_size=3))
def test_orbit_is_minimal_period(coords):
    m = geo.orbit(Point(tuple(coords))).size
    assert all((m * c).denominator == 1 for c in coords)
    assert all(any((k * c).denominator != 1 for c in coords) for k in range(1, m))


def test_compute_H_space_examples():
    assert geo.compute_H_space(BOX, Point((F(3, 10), 0))).elements == [2, 3]
    assert geo.compute_H_space(geo.interval(1), Point((F(3, 5),))).elements == []
    ring = Union((Box((F(1, 4),), (F(3, 4),)), Box((F(1, 4),), (F(-3, 4),)), Box((F(1, 10),), (0,))))
    dom = geo.symmetrize(Domain(geo.EUCLIDEAN, 1, ring))
    z = Point((F(11, 20),))
    expect = [k for k in range(2, 10) if dom.contains(z.scaled(k)) and dom.contains(z.scaled(-k))]
    assert geo.compute_H_space(dom, z).elements == expect == []


def test_compute_H_torus_examples():
    half = F(1, 2)
    assert geo.compute_H_torus(geo.interval(half, space=geo.TORUS), Point((F(1, 4),))).elements == []
    assert geo.compute_H_torus(geo.interval(half, space=geo.TORUS), Point((F(1, 5),))).elements == [2]
    assert geo.compute_H_torus(geo.cube(half, 2, geo.TORUS), Point((F(1, 4), F(1, 4)))).elements == []


def test_infinite_orbit_is_truncated():
    res = geo.compute_H_torus(geo.interval(F(1, 2), space=geo.TORUS), Point((math.sqrt(2) / 10,), irrational=True), n_max=40)
    assert not res.complete and res.bound == 40


def test_boundary_ambiguity_is_reported():
    warns = []
    BOX.contains((1 - 1e-14, 0.0), warns)
    assert warns and isinstance(warns[0], geo.BoundaryAmbiguous)
    warns = []
    BOX.contains((F(1), 0), warns)
    assert warns == []


def test_json_round_trip():
    shape = Union((Translate(Box((1, F(1, 2)), (0, 0)), (F(1, 3), 0)), LpBall("inf", 2, (0, 0)), Polytope(((1, 2),), (3,))))
    dom = Domain(geo.EUCLIDEAN, 2, shape)
    assert Domain.from_json(dom.to_json()) == dom
    with pytest.raises(geo.GeometryError):
        Domain.from_json({"space": "euclidean", "shape": {"type": "box", "halfwidths": ["1"], "center": ["0"], "colour": 1}})


def test_torus_shape_must_fit():
    with pytest.raises(geo.GeometryError):
        geo.interval(F(3, 4), space=geo.TORUS)


@pytest.mark.parametrize("p", [1, 2, "inf"])
def test_convex_body_gives_initial_segment(p):
    rng = np.random.default_rng(7)
    dom = geo.ball(p, 1, 2)
    count = 0
    while count < 200:
        n = int(rng.integers(1, 9))
        # pick z on the ray through a random rational direction with gauge in [1/(n+1), 1/n)
        d = (F(int(rng.integers(-9, 10)), 7), F(int(rng.integers(-9, 10)), 7))
        if d == (0, 0):
            continue
        if p == 2:
            dd = geo.minkowski_norm(dom, d, squared=True)
            if math.isqrt(dd.numerator) ** 2 != dd.numerator or math.isqrt(dd.denominator) ** 2 != dd.denominator:
                d = (abs(d[0]) + abs(d[1]), 0) if rng.random() < 0.5 else (0, abs(d[0]) + abs(d[1]))
        g = F(geo.minkowski_norm(dom, d))
        lo, hi = F(1, n + 1), F(1, n)
        t = lo + (hi - lo) * F(int(rng.integers(0, 100)), 100)
        z = tuple(c * t / g for c in d)
        assert F(geo.minkowski_norm(dom, z)) == t
        assert geo.compute_H_space(dom, Point(z)).elements == list(range(2, n + 1))
        count += 1


@given(st.fractions(F(1, 20), F(3, 2), max_denominator=30), st.sampled_from([F(1, 3), F(2), F(7, 5)]))
def test_H_is_dilation_invariant(x, alpha):
    z = Point((x, x / 3))
    a = geo.compute_H_space(BOX, z).elements
    b = geo.compute_H_space(BOX.scaled(alpha), Point(z.scaled(alpha))).elements
    assert a == b


@given(st.fractions(F(1, 20), F(1), max_denominator=30), st.fractions(F(1, 2), F(1), max_denominator=10))
def test_H_is_monotone_in_domain(x, r):
    z = Point((x, 0))
    small = set(geo.compute_H_space(geo.ball(2, r, 2), z).elements)
    large = set(geo.compute_H_space(geo.ball(2, 2 * r, 2), z).elements)
    assert small <= large
