import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from turan.trigpoly import (
    CosinePolynomial,
    certified_min,
    coefficients_from_grid,
    witness_evencase,
    witness_zinomega,
    write_samples_csv,
)

ONE_PLUS_COS = CosinePolynomial(1.0, {1: 1.0})


def polys(max_k=12):
    return st.builds(
        CosinePolynomial,
        st.floats(-2, 3),
        st.dictionaries(st.integers(1, max_k), st.floats(-2, 2), max_size=5),
    )


def test_evaluate_examples():
    phi = witness_zinomega(5)
    assert phi.evaluate(0.0) == pytest.approx(5)
    assert phi.evaluate(0.2) == pytest.approx(0, abs=1e-12)
    assert phi.evaluate(0.4) == pytest.approx(0, abs=1e-12)
    assert ONE_PLUS_COS.evaluate(0.5) == pytest.approx(0, abs=1e-15)


def test_evencase_grid_pattern():
    # grid values are m/2 at 0, m/4 at the two neighbours and 0 elsewhere
    for m in range(4, 65, 2):
        vals = witness_evencase(m).grid_values(m)
        expect = np.zeros(m)
        expect[0], expect[1], expect[-1] = m / 2, m / 4, m / 4
        np.testing.assert_allclose(vals, expect, atol=1e-10)


def test_grid_values_examples():
    np.testing.assert_allclose(ONE_PLUS_COS.grid_values(4), [2, 1, 0, 1], atol=1e-15)
    np.testing.assert_allclose(witness_zinomega(5).grid_values(5), [5, 0, 0, 0, 0], atol=1e-12)


def test_certified_min_examples():
    lo, s = certified_min(ONE_PLUS_COS, 1024)
    assert lo <= 0 <= s <= 1e-5
    assert certified_min(CosinePolynomial(1.0, {}), 64) == (1.0, 1.0)
    lo, s = certified_min(CosinePolynomial(1.0, {1: 1.6}), 1024)
    assert lo <= -0.6 and s == pytest.approx(-0.6, abs=1e-12)
    assert -0.6 - lo <= 2 * math.pi * 1.6 / (2 * 1024)


def test_witness_coefficients():
    assert witness_zinomega(5).coeffs == {1: 2.0, 2: 2.0}
    assert witness_zinomega(4).coeffs == {1: 2.0, 2: 1.0}
    assert witness_zinomega(2).coeffs == {1: 1.0}
    c6 = witness_evencase(6).coeffs
    assert c6[1] == pytest.approx(1.5) and c6[2] == pytest.approx(0.5) and len(c6) == 2
    assert witness_evencase(4).coeffs == {1: 1.0}
    assert witness_evencase(8).lam == pytest.approx(1 + math.cos(math.pi / 4))


def test_spectrum_and_value_at_zero():
    phi = CosinePolynomial(1.0, {1: 0.5, 3: 0.25, 4: 0.0})
    assert phi.spectrum() == [3]
    assert phi.full_spectrum() == [-3, -1, 0, 1, 3]
    assert phi.evaluate(0.0) == pytest.approx(1.75)


def test_invalid_inputs():
    with pytest.raises(ValueError):
        CosinePolynomial(1.0, {0: 1.0})
    with pytest.raises(ValueError):
        witness_evencase(5)
    with pytest.raises(ValueError):
        certified_min(CosinePolynomial(1.0, {40: 1.0}), 16)


def test_json_and_csv(tmp_path):
    phi = CosinePolynomial(1.0, {1: 1.5, 3: -0.25})
    assert CosinePolynomial.from_json(phi.to_json()) == phi
    path = tmp_path / "phi.csv"
    write_samples_csv(phi, path, n_samples=8)
    rows = path.read_text().splitlines()
    assert rows[0] == "t,phi" and len(rows) == 10
    assert float(rows[1].split(",")[1]) == pytest.approx(2.25)


@given(polys(), st.floats(-3, 3))
def test_even_and_periodic(phi, t):
    v = phi.evaluate(t)
    assert phi.evaluate(-t) == pytest.approx(v, abs=1e-12)
    assert phi.evaluate(t + 1) == pytest.approx(v, abs=1e-11)


@given(st.integers(3, 40), st.data())
def test_grid_coefficients_round_trip(m, data):
    coeffs = data.draw(st.dictionaries(st.integers(1, m // 2), st.floats(-2, 2), max_size=6))
    const = data.draw(st.floats(-2, 2))
    phi = CosinePolynomial(const, coeffs)
    back = coefficients_from_grid(phi.grid_values(m))
    assert back[0] == pytest.approx(const, abs=1e-10)
    for k in range(1, m // 2 + 1):
        assert back[k] == pytest.approx(coeffs.get(k, 0.0), abs=1e-10)


@given(polys(max_k=24), st.integers(0, 10**6))
def test_certified_min_is_sound(phi, seed):
    lo, _ = certified_min(phi, 256)
    t = np.random.default_rng(seed).random(10_000)
    assert lo <= np.min(phi.evaluate(t)) + 1e-15


@pytest.mark.parametrize("m", range(2, 65))
def test_witnesses_are_grid_feasible(m):
    assert witness_zinomega(m).grid_values(m).min() >= -1e-12
    if m % 2 == 0 and m >= 4:
        assert witness_evencase(m).grid_values(m).min() >= -1e-12
