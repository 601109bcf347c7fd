"""Grammar, diagnostics and printer round-trips."""

import random
from fractions import Fraction

import pytest

from ncinvert.freealg import NCSeries
from ncinvert.inversion import invert_fixed_point
from ncinvert.parsing import (
    MapFormError,
    ParseError,
    format_map,
    format_series,
    parse_expression,
    parse_map,
)
from ncinvert.randmaps import random_displacement
from ncinvert.rings import QQ, PrimeField


def test_parse_simple_polynomial():
    s = parse_expression("x^2 - 3*y + 1/2", ["x", "y"], QQ, 4)
    assert s.coefficient((0, 0)) == 1
    assert s.coefficient((1,)) == -3
    assert s.coefficient(()) == Fraction(1, 2)


def test_star_is_noncommutative():
    xy = parse_expression("x*y", ["x", "y"], QQ, 3)
    yx = parse_expression("y*x", ["x", "y"], QQ, 3)
    assert xy != yx


def test_power_is_repeated_self_multiplication():
    s = parse_expression("(x*y)^2", ["x", "y"], QQ, 4)
    assert s.coefficient((0, 1, 0, 1)) == 1
    assert s.term_count() == 1


def test_precedence_and_unary_minus():
    s = parse_expression("-x^2 + 2*x", ["x"], QQ, 3)
    assert s.coefficient((0, 0)) == -1
    assert s.coefficient((0,)) == 2
    t = parse_expression("1 - -x", ["x"], QQ, 3)
    assert t.coefficient((0,)) == 1


def test_juxtaposition_is_an_error():
    with pytest.raises(ParseError, match="juxtaposition"):
        parse_expression("x y", ["x", "y"], QQ, 3)
    with pytest.raises(ParseError, match="juxtaposition"):
        parse_expression("2 x", ["x"], QQ, 3)


def test_unknown_variable_reports_position():
    with pytest.raises(ParseError) as err:
        parse_expression("x + q", ["x", "y"], QQ, 3)
    assert err.value.line == 1
    assert err.value.col == 5


def test_unbalanced_parens():
    with pytest.raises(ParseError, match="expected '\\)'"):
        parse_expression("(x + y", ["x", "y"], QQ, 3)


def test_rational_literal_over_prime_field():
    field = PrimeField(5)
    s = parse_expression("1/2", ["x"], field, 2)
    # 2^(-1) = 3 mod 5
    assert s.coefficient(()) == 3


def test_map_with_header_and_semicolons():
    pm = parse_map("vars: x, y\nx - (y*x - x*y); y", QQ, 4)
    assert pm.variables == ["x", "y"]
    assert pm.f_map.form == "F"
    h = pm.f_map.h_vector()
    assert h[0].coefficient((1, 0)) == 1
    assert h[0].coefficient((0, 1)) == -1


def test_map_default_variable_names():
    pm = parse_map("z1 - z1^2", QQ, 4)
    assert pm.variables == ["z1"]


def test_map_shape_errors():
    with pytest.raises(MapFormError, match="stray linear term"):
        parse_map("x - y; y", QQ, 4, variables=["x", "y"])
    with pytest.raises(MapFormError, match="constant term"):
        parse_map("x + 1; y", QQ, 4, variables=["x", "y"])
    with pytest.raises(MapFormError, match="coefficient of z1 must be 1"):
        parse_map("2*x; y", QQ, 4, variables=["x", "y"])
    with pytest.raises(MapFormError, match="components but"):
        parse_map("x - x^2", QQ, 4, variables=["x", "y"])


def test_empty_source_is_a_parse_error():
    with pytest.raises(ParseError):
        parse_map("   \n", QQ, 4)


def test_format_series_basics():
    assert format_series(NCSeries.zero(QQ, 2, 3), ["x", "y"]) == "0"
    s = NCSeries.from_terms(
        QQ, 2, 4, [((0, 0, 0), Fraction(-1)), ((0, 1), Fraction(3, 2)), ((1,), Fraction(-1))]
    )
    assert format_series(s, ["x", "y"]) == "-y + 3/2*x*y - x^3"


def test_roundtrip_engine_outputs():
    rng = random.Random(17)
    for n in (1, 2, 3):
        names = ["x", "y", "w"][:n]
        h = random_displacement(rng, QQ, n, 5)
        g = invert_fixed_point(h)
        text = format_map(g, names)
        back = parse_map(text, QQ, 5)
        assert back.variables == names
        assert list(back.f_map.components) == list(g.components)


def test_roundtrip_over_prime_field():
    rng = random.Random(18)
    field = PrimeField(7)
    h = random_displacement(rng, field, 2, 5)
    g = invert_fixed_point(h)
    text = format_map(g, ["x", "y"])
    back = parse_map(text, field, 5)
    assert list(back.f_map.components) == list(g.components)
