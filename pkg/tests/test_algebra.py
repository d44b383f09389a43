"""Exact group-algebra arithmetic and its float mirror."""

import random
from fractions import Fraction

import numpy as np
import pytest

from simplexdyn import (add, delta, make_cyclic, make_dihedral, make_symmetric,
                        multiply, parse_rational, format_rational, power, scale,
                        simplex_from_map, sup_distance, support, to_approx,
                        uniform_on, element_to_map)
from simplexdyn.algebra import (ApproxElement, convolve_floats,
                                evaluate_series_floats, float_coeffs,
                                series_trace)
from simplexdyn.groups import generated_subgroup

from conftest import random_simplex_point


def test_parse_and_format_rational():
    assert parse_rational("3/4") == Fraction(3, 4)
    assert parse_rational("2") == Fraction(2)
    assert parse_rational(0.5) == Fraction(1, 2)
    assert parse_rational(Fraction(1, 3)) == Fraction(1, 3)
    assert format_rational(Fraction(3, 4)) == "3/4"
    assert format_rational(Fraction(5)) == "5"
    assert parse_rational(format_rational(Fraction(-7, 12))) == Fraction(-7, 12)
    with pytest.raises(ValueError):
        parse_rational("1/0")
    with pytest.raises(ValueError):
        parse_rational("abc")


def test_point_mass_products():
    g = make_symmetric(3)
    for i in range(6):
        for j in range(6):
            assert multiply(delta(g, i), delta(g, j)) == delta(g, g.mul(i, j))


def test_power_matches_repeated_multiply():
    g = make_cyclic(7)
    x = simplex_from_map(g, {"t^1": "1/3", "t^2": "2/3"})
    acc = delta(g, g.identity)
    for n in range(5):
        assert power(x, n) == acc
        acc = multiply(acc, x)
    with pytest.raises(ValueError):
        power(x, -1)


def test_support_product_law():
    rng = random.Random(11)
    g = make_dihedral(4)
    for _ in range(40):
        x = random_simplex_point(g, rng)
        y = random_simplex_point(g, rng)
        expected = {g.mul(i, j)
                    for i in support(x).members for j in support(y).members}
        assert set(support(multiply(x, y)).members) == expected


def test_uniform_on_is_idempotent():
    g = make_cyclic(12)
    sub = generated_subgroup(g, (4,))
    c = uniform_on(sub)
    assert multiply(c, c) == c
    assert c.coeffs[0] == Fraction(1, 3)
    assert uniform_on(generated_subgroup(g, (0,))) == delta(g, 0)


def test_simplex_from_map_validation():
    g = make_cyclic(3)
    x = simplex_from_map(g, {"t^0": "1/2", "t^2": "1/2"})
    assert x.coeffs == (Fraction(1, 2), Fraction(0), Fraction(1, 2))
    with pytest.raises(ValueError):
        simplex_from_map(g, {"t^0": "1/2"})
    with pytest.raises(ValueError):
        simplex_from_map(g, {"t^0": "3/2", "t^1": "-1/2"})
    with pytest.raises(ValueError):
        simplex_from_map(g, {"nope": "1"})


def test_element_map_round_trip():
    g = make_symmetric(3)
    rng = random.Random(5)
    x = random_simplex_point(g, rng)
    assert simplex_from_map(g, element_to_map(x)) == x


def test_add_scale():
    g = make_cyclic(4)
    x = delta(g, 1)
    y = delta(g, 2)
    z = add(scale(Fraction(1, 4), x), scale(Fraction(3, 4), y))
    assert z.coeffs[1] == Fraction(1, 4) and z.coeffs[2] == Fraction(3, 4)


def test_sup_distance_mixed_kinds():
    g = make_cyclic(4)
    x = simplex_from_map(g, {"t^0": "1/2", "t^1": "1/2"})
    y = simplex_from_map(g, {"t^0": "1/4", "t^1": "3/4"})
    assert sup_distance(x, y) == 0.25
    assert sup_distance(x, to_approx(x)) == 0.0
    assert sup_distance(to_approx(x), to_approx(y)) == pytest.approx(0.25)


def test_convolve_floats_matches_exact():
    rng = random.Random(3)
    g = make_dihedral(4)
    for _ in range(20):
        x = random_simplex_point(g, rng)
        y = random_simplex_point(g, rng)
        exact = float_coeffs(multiply(x, y))
        approx = convolve_floats(g, float_coeffs(x), float_coeffs(y))
        assert np.max(np.abs(exact - approx)) < 1e-14


def test_evaluate_series_floats_matches_exact():
    g = make_cyclic(6)
    rng = random.Random(9)
    x = random_simplex_point(g, rng)
    terms = [(0, 0.25), (2, 0.5), (3, 0.25)]
    got = evaluate_series_floats(g, terms, float_coeffs(x))
    exact = add(scale(Fraction(1, 4), power(x, 0)),
                add(scale(Fraction(1, 2), power(x, 2)),
                    scale(Fraction(1, 4), power(x, 3))))
    assert np.max(np.abs(got - float_coeffs(exact))) < 1e-14


def test_series_trace_stays_on_simplex():
    g = make_cyclic(5)
    x = delta(g, 1)
    terms = [(2, 0.5), (3, 0.5)]
    trace = series_trace(g, terms, float_coeffs(x), 300)
    assert len(trace) == 300
    for t in trace:
        assert abs(float(t.coeffs.sum()) - 1.0) < 1e-9
    with pytest.raises(ValueError):
        series_trace(g, terms, float_coeffs(x), 0)


def test_series_trace_matches_exact_composition():
    g = make_symmetric(3)
    rng = random.Random(21)
    x = random_simplex_point(g, rng)
    half = Fraction(1, 2)
    trace = series_trace(g, [(0, 0.5), (2, 0.5)], float_coeffs(x), 6)
    y = x
    for k in range(6):
        y = add(scale(half, power(y, 0)), scale(half, power(y, 2)))
        assert np.max(np.abs(float_coeffs(y) - trace[k].coeffs)) < 1e-12


def test_approx_element_validation():
    g = make_cyclic(3)
    with pytest.raises(ValueError):
        ApproxElement(g, np.array([0.5, 0.6, 0.2]), slack=1e-12)
    with pytest.raises(ValueError):
        ApproxElement(g, np.array([1.5, -0.5, 0.0]), slack=1e-12)
    ok = ApproxElement(g, np.array([0.5, 0.25, 0.25]), slack=1e-12)
    assert ok.coeffs.flags.writeable is False
