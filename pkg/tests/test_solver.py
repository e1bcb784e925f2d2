import math
from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from turan import geometry as geo
from turan import solver
from turan.geometry import Point
from turan.indexset import IndexSet

BOX = geo.cube(1, 2)
TORUS_1 = geo.interval(F(1, 2), space=geo.TORUS)
TORUS_2 = geo.cube(F(1, 2), 2, geo.TORUS)


# -- discrete problems --------------------------------------------------------


@pytest.mark.parametrize(
    "H, m, expected",
    [([2], 6, 1.5), ([2], 5, 2.0), ([], 4, 1.0), ([], 2, 1.0), ([2, 3], 7, 2.0)],
)
def test_discrete_examples(H, m, expected):
    for f in (solver.solve_discrete, solver.solve_discrete_value_space):
        sol = f(H, m)
        assert sol.value == pytest.approx(expected, abs=1e-9)


def test_discrete_unbounded_example():
    sol = solver.solve_discrete([3], 4)
    assert sol.unbounded and sol.status == solver.UNBOUNDED
    assert solver.solve_discrete_value_space([3], 4).unbounded


def test_discrete_witness_is_grid_nonnegative():
    sol = solver.solve_discrete([2, 4], 11)
    assert sol.witness.grid_values(11).min() >= -1e-12
    assert sol.witness.lam == pytest.approx(sol.value)


def test_rational_formulations_agree_exactly():
    for H, m in [([2], 6), ([2, 5], 13), ([3, 4], 9), ([2, 3, 5, 8], 17)]:
        a = solver.solve_discrete(H, m, "rational")
        b = solver.solve_discrete_value_space(H, m, "rational")
        assert a.exact == b.exact


def random_problems():
    return st.integers(2, 32).flatmap(
        lambda m: st.tuples(st.lists(st.integers(2, max(2, m // 2)), unique=True, max_size=6).map(lambda H: [k for k in H if k <= m // 2]), st.just(m))
    )


@given(random_problems())
def test_matches_independent_reference(problem):
    H, m = problem
    ref = oracles.discrete_value(H, m)
    sol = solver.solve_discrete(H, m, "float")
    if ref is None:
        assert sol.unbounded
    else:
        assert sol.value == pytest.approx(ref, abs=1e-8)


@given(random_problems())
def test_both_formulations_agree(problem):
    H, m = problem
    a = solver.solve_discrete(H, m, "float")
    b = solver.solve_discrete_value_space(H, m, "float")
    assert a.unbounded == b.unbounded
    if not a.unbounded:
        assert a.value == pytest.approx(b.value, abs=1e-8)
        assert 0 <= a.value <= 2 + 1e-12


@given(random_problems(), st.data())
def test_discrete_value_is_monotone_in_H(problem, data):
    H2, m = problem
    H1 = data.draw(st.lists(st.sampled_from(H2), unique=True)) if H2 else []
    a, b = solver.solve_discrete(H1, m, "float"), solver.solve_discrete(H2, m, "float")
    if not b.unbounded and not a.unbounded:
        assert a.value <= b.value + 1e-9


# -- enclosures of M(H) ---------------------------------------------------------


@pytest.mark.parametrize(
    "H, ref",
    [
        (IndexSet.interval(2, 3), 2 * math.cos(math.pi / 5)),
        (IndexSet.finite([2]), 1 / math.cos(math.pi / 4)),
        (IndexSet.empty(), 1.0),
        (IndexSet.even(), math.pi / 2),
    ],
)
def test_bracket_examples(H, ref):
    enc = solver.bracket_M(H)
    assert enc.lower <= ref <= enc.upper
    assert enc.upper - enc.lower <= 5e-3
    assert 0 <= enc.lower <= enc.upper <= 2


def test_bracket_lower_witness_is_nonnegative():
    from turan.trigpoly import certified_min

    enc = solver.bracket_M(IndexSet.finite([2, 5]))
    lo, _ = certified_min(enc.lower_witness, 1 << 16)
    assert lo >= -1e-12
    assert enc.lower_witness.lam == pytest.approx(enc.lower, rel=1e-12)


def test_bracket_reports_binding_certificate():
    enc = solver.bracket_M(IndexSet.interval(2, 4))
    assert [c["kind"] for c in enc.certificates if c.get("binding")] == ["GridRelaxation"]
    enc = solver.bracket_M(IndexSet.tail(6))
    assert [c["kind"] for c in enc.certificates if c.get("binding")] == ["Duality"]


def test_bracket_refuses_aliasing_grid():
    with pytest.raises(ValueError):
        solver.bracket_M(IndexSet.finite([10]), solver.SolverConfig(n_trunc=16, m_grid=21))


def test_closed_form_examples():
    assert solver.closed_form(IndexSet.interval(2, 4)).value == sympy.sqrt(3)
    assert sympy.simplify(solver.closed_form(IndexSet.finite([3])).value - 2 / sympy.sqrt(3)) == 0
    assert solver.closed_form(IndexSet.odd()).value == 4 / sympy.pi
    assert solver.closed_form(IndexSet.finite([2, 5])) is None


DUALITY_SETS = [IndexSet.finite([n]) for n in range(2, 7)] + [IndexSet.interval(2, n) for n in range(2, 7)] + [IndexSet.even(), IndexSet.odd()]


@pytest.mark.parametrize("H", DUALITY_SETS, ids=lambda H: H.describe())
def test_closed_form_duality_product(H):
    a, b = solver.closed_form(H), solver.closed_form(H.complement())
    assert sympy.simplify(a.value * b.value - 2) == 0


@pytest.mark.parametrize("H", [IndexSet.interval(2, 5), IndexSet.finite([4]), IndexSet.all_but(3), IndexSet.tail(4), IndexSet.odd()], ids=lambda H: H.describe())
def test_closed_forms_lie_in_brackets(H):
    enc = solver.bracket_M(H)
    assert enc.contains(float(solver.closed_form(H)), 1e-12)


@settings(max_examples=12)
@given(st.lists(st.integers(2, 9), unique=True, max_size=3), st.data())
def test_relaxation_and_monotone_brackets(H2, data):
    H1 = data.draw(st.lists(st.sampled_from(H2), unique=True)) if H2 else []
    cfg = solver.SolverConfig(n_trunc=16)
    e1, e2 = solver.bracket_M(IndexSet.finite(H1), cfg), solver.bracket_M(IndexSet.finite(H2), cfg)
    assert e1.lower <= e2.upper + 1e-12
    m = 2 * max(H2, default=1) + 3
    for m in (m, m + 4):
        sol = solver.solve_discrete(H2, m, "float")
        assert sol.unbounded or sol.value >= e2.lower - 1e-9


# -- pointwise values -------------------------------------------------------


def test_pointwise_space_examples():
    enc = solver.pointwise_space(BOX, Point((F(3, 10), 0)))
    assert enc.status == solver.EXACT and enc.lower == pytest.approx(math.cos(math.pi / 5), abs=1e-12)
    enc = solver.pointwise_space(geo.interval(1), Point((F(3, 5),)))
    assert enc.lower == pytest.approx(0.5, abs=1e-12) and enc.upper == pytest.approx(0.5, abs=1e-12)
    assert solver.pointwise_space(BOX, Point((F(3, 2), 0))).status == solver.TRIVIAL_ZERO
    assert solver.pointwise_space(BOX, Point((0, 0))).status == solver.TRIVIAL_ONE


def test_pointwise_space_without_closed_form_is_a_bracket():
    enc = solver.pointwise_space(BOX, Point((F(3, 10), 0)), use_closed_form=False)
    assert enc.lower <= math.cos(math.pi / 5) <= enc.upper
    assert enc.width <= 1e-4


@pytest.mark.parametrize("alpha", [F(1, 3), F(2), F(7, 5)])
def test_pointwise_space_dilation_invariance(alpha):
    z = Point((F(2, 9), F(1, 10)))
    a = solver.pointwise_space(BOX, z)
    b = solver.pointwise_space(BOX.scaled(alpha), Point(z.scaled(alpha)))
    assert a.H == b.H
    assert (a.lower, a.upper) == pytest.approx((b.lower, b.upper), abs=1e-12)


def test_pointwise_space_domain_duality():
    enc = solver.pointwise_space(BOX, Point((F(1, 5), 0)))  # H = [2, 4]
    comp = solver.bracket_M(enc.H.complement()).halved()
    width = enc.width + comp.width
    assert abs(enc.mid * comp.mid - 0.5) <= width + 1e-12


@pytest.mark.parametrize(
    "dom, z, expected",
    [
        (TORUS_1, (F(1, 4),), 0.5),
        (TORUS_1, (F(1, 3),), 1.0),
        (TORUS_1, (F(1, 6),), 0.75),
        (TORUS_2, (F(1, 4), F(1, 4)), 0.5),
        (TORUS_2, (F(1, 8), F(3, 8)), (1 + math.cos(math.pi / 4)) / 2),
    ],
)
def test_pointwise_torus_examples(dom, z, expected):
    enc = solver.pointwise_torus(dom, Point(z))
    assert enc.status == solver.EXACT
    assert enc.lower == pytest.approx(expected, abs=1e-9)
    assert enc.upper == pytest.approx(expected, abs=1e-9)


def test_point_with_half_coordinate_is_outside_open_square():
    # (1/2, 1/3) reduces to (-1/2, 1/3), which is not in the open square
    enc = solver.pointwise_torus(TORUS_2, Point((F(1, 2), F(1, 3))))
    assert enc.status == solver.TRIVIAL_ZERO and enc.upper == 0


def test_pointwise_torus_rational_value_is_exact():
    enc = solver.pointwise_torus(TORUS_1, Point((F(1, 4),)), solver.SolverConfig(arithmetic="rational"))
    assert enc.exact == F(1, 2)


def test_infinite_orbit_gives_one_sided_bracket():
    z = Point((math.sqrt(2) / 10,), irrational=True)
    enc = solver.pointwise_torus(TORUS_1, z, n_max=24)
    assert enc.status == solver.BRACKET and enc.upper == 1.0
    assert 0.5 <= enc.lower <= 1.0
    assert any("infinite orbit" in w for w in enc.warnings)


def test_supplied_index_set_is_checked():
    z = Point((math.sqrt(2) / 10,), irrational=True)
    with pytest.raises(ValueError):
        solver.pointwise_torus(TORUS_1, z, n_max=24, index_set=IndexSet.even())


# -- sweeps -----------------------------------------------------------------


def test_delta_single_element():
    # M({k})/2 = 1/(2 cos(pi/2k)) decreases in k, so the sup sits at k = 2
    res = solver.delta_search(1, 8)
    assert res.best_H == (2,)
    assert res.enclosure.contains(1 / (2 * math.cos(math.pi / 4)), 1e-12)
    eight = dict(res.candidates)[(8,)]
    assert eight.contains(1 / (2 * math.cos(math.pi / 16)), 1e-12)
    assert all(enc.upper <= 0.875 + 1e-12 for _, enc in res.candidates)
    assert res.envelope_ok


def test_delta_pairs_pick_the_largest_bracket():
    res = solver.delta_search(2, 6)
    assert len(res.candidates) == 10
    assert res.enclosure.lower == max(enc.lower for _, enc in res.candidates)


def test_delta_rejects_large_searches():
    with pytest.raises(ValueError):
        solver.delta_search(5, 10)


def test_limit_scan():
    scan = solver.limit_scan(geo.interval(1), Point((F(3, 10),)), [4, 8, 16, 64])
    vals = [r.enclosure.lower for r in scan.rows]
    assert all(b <= a + 1e-12 for a, b in zip(vals, vals[1:]))
    assert abs(vals[-1] - math.cos(math.pi / 5)) <= 0.01
    assert all(v >= scan.space.lower - 1e-12 for v in vals)


def test_limit_scan_doubling():
    rows = solver.limit_scan(BOX, Point((F(3, 10), 0)), [5, 10, 20]).rows
    assert rows[1].enclosure.lower <= rows[0].enclosure.lower + 1e-12
    assert rows[2].enclosure.lower <= rows[1].enclosure.lower + 1e-12


def test_config_json():
    assert solver.SolverConfig().to_json() == {"N_trunc": 64, "m_grid": 1025, "N_samples": 65536, "arithmetic": "auto"}
