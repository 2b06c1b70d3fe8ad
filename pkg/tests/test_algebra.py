"""Tests for the expression kernel: variables, parser, canonical forms, evaluation."""

from __future__ import annotations

import numpy as np
import pytest
import sympy

from nsq.algebra.expr import (
    canonical_pair,
    canonicalize,
    differentiate,
    equal,
    eval_numeric,
    is_zero,
    substitute,
    to_text,
    velocity_degree,
)
from nsq.algebra.parser import parse
from nsq.algebra.variables import E0, VariableSet
from nsq.errors import ParseError, SingularPointError, UnknownIdentifierError, ZeroDenominatorError
from nsq.symmetry.catalog import generator_catalog


@pytest.fixture
def two_body():
    return VariableSet.standard(2)


# --- VariableSet ---


class TestVariableSet:
    def test_standard_names(self):
        variables = VariableSet.standard(3, wave=True, momenta=True)
        assert variables.names == ("t", "x1", "x2", "x3", "v1", "v2", "v3", "u", "p1", "p2", "p3")
        assert variables.n == 3

    def test_rejects_zero_particles(self):
        with pytest.raises(ValueError):
            VariableSet.standard(0)

    def test_rejects_duplicates(self):
        with pytest.raises(ValueError, match="Duplicate"):
            VariableSet(positions=("x1", "x1"), velocities=("v1", "v2"))

    def test_rejects_reserved(self):
        with pytest.raises(ValueError, match="Reserved"):
            VariableSet(positions=("E0",), velocities=("v1",))

    def test_with_momenta_keeps_positions(self, two_body):
        extended = two_body.with_momenta()
        assert extended.positions == two_body.positions
        assert [p.name for p in extended.p] == ["p1", "p2"]


# --- Parser ---


class TestParse:
    def test_sum(self, two_body):
        x1, x2 = two_body.x
        assert parse("x1 + x2", two_body) == x1 + x2

    def test_goldfish_rhs(self, two_body):
        x1, x2 = two_body.x
        v1, v2 = two_body.v
        assert equal(parse("2*v1*v2/(x1 - x2)", two_body), 2 * v1 * v2 / (x1 - x2))

    def test_precedence(self, two_body):
        x1, x2 = two_body.x
        assert equal(parse("x1 + x2*x1^2", two_body), x1 + x2 * x1**2)
        assert equal(parse("-x1^2", two_body), -(x1**2))
        assert parse("2^3^2", two_body) == 2**9

    def test_constants(self, two_body):
        assert parse("E0", two_body) == E0
        assert parse("i*i", two_body) == -1

    def test_unknown_identifier(self, two_body):
        with pytest.raises(UnknownIdentifierError) as info:
            parse("x1 + y7", two_body)
        assert info.value.name == "y7"

    def test_syntax_error_has_position(self, two_body):
        with pytest.raises(ParseError) as info:
            parse("x1 + * x2", two_body)
        assert info.value.position == 5

    def test_unbalanced_parenthesis(self, two_body):
        with pytest.raises(ParseError):
            parse("(x1 + x2", two_body)

    def test_division_by_zero_polynomial(self, two_body):
        with pytest.raises(ZeroDenominatorError):
            parse("x1/(x2 - x2)", two_body)

    def test_non_integer_exponent(self, two_body):
        with pytest.raises(ParseError):
            parse("x1^x2", two_body)


# --- Canonical forms ---


class TestCanonical:
    def test_idempotent(self, two_body):
        e = parse("(x1^2 + 1)/(x1 - x2)^2 + x2/(x2 - x1)", two_body)
        once = canonicalize(e, two_body)
        assert canonicalize(once, two_body) == once

    def test_denominator_sign_is_normalized(self, two_body):
        assert to_text(parse("1/(x2 - x1)", two_body), two_body) == "(-1)/(x1 - x2)"

    def test_print_format(self, two_body):
        assert to_text(parse("x1 + x2", two_body), two_body) == "(x1 + x2)/(1)"

    def test_rational_coefficients_are_cleared(self, two_body):
        x1, x2 = two_body.x
        assert to_text(x1 / 2 + sympy.Rational(1, 3), two_body) == "(3*x1 + 2)/(6)"
        assert to_text((2 * x1 + 2) / (4 * x2), two_body) == "(x1 + 1)/(2*x2)"
        assert to_text(sympy.Rational(-9, 4)) == "(-9)/(4)"

    def test_gaussian_coefficients_are_cleared(self, two_body):
        x1, _ = two_body.x
        assert to_text(sympy.I * x1 / 2 + sympy.Rational(1, 3), two_body) == "(3*i*x1 + 2)/(6)"
        num, den = canonical_pair(sympy.I * x1 / 2, two_body)
        assert all(c.as_real_imag()[0].is_Integer and c.as_real_imag()[1].is_Integer for c in num.coeffs() + den.coeffs())

    def test_print_parse_identity_on_catalog(self, two_body):
        for v in generator_catalog():
            for c in v.coefficients():
                assert equal(parse(to_text(c, two_body), two_body), c, two_body)

    def test_difference_of_squares_is_zero(self, two_body):
        assert is_zero(parse("(x1 - x2)^2 - x1^2 + 2*x1*x2 - x2^2", two_body))

    def test_nonzero(self, two_body):
        assert not is_zero(parse("x1 - x2", two_body))

    def test_random_expressions_cancel(self, two_body):
        rng = np.random.default_rng(3)
        x1, x2 = two_body.x
        for _ in range(5):
            a, b, c = (sympy.Rational(int(rng.integers(-9, 10)), int(rng.integers(1, 10))) for _ in range(3))
            e = (a * x1**2 + b * x2) / (x1 - c * x2 + 7)
            assert is_zero(e - e)
            assert is_zero(e + 1 - e - 1)

    def test_exp_leaves_are_sampled(self, two_body):
        x1, x2 = two_body.x
        assert is_zero(sympy.exp(x1) * sympy.exp(x2) - sympy.exp(x1 + x2))
        assert not is_zero(sympy.exp(sympy.I * x1) - 1)


# --- Calculus and substitution ---


class TestDifferentiate:
    def test_product(self, two_body):
        assert differentiate(parse("x1*x2", two_body), "x1", two_body) == two_body.x[1]

    def test_coefficient_derivative(self, two_body):
        f11 = parse("(x1^2 + 1)/(x1 - x2)^2", two_body)
        expected = parse("-2*(x1*x2 + 1)/(x1 - x2)^3", two_body)
        assert equal(differentiate(f11, "x1", two_body), expected, two_body)

    def test_derivative_matches_finite_difference(self, two_body):
        f11 = parse("(x1^2 + 1)/(x1 - x2)^2", two_body)
        df = differentiate(f11, "x1", two_body)
        rng = np.random.default_rng(5)
        h = 1e-6
        for _ in range(5):
            x1, x2 = rng.uniform(-3, 3), rng.uniform(4, 6)
            numeric = (
                eval_numeric(f11, {"x1": x1 + h, "x2": x2}) - eval_numeric(f11, {"x1": x1 - h, "x2": x2})
            ) / (2 * h)
            assert abs(numeric - eval_numeric(df, {"x1": x1, "x2": x2})) < 1e-6

    def test_constant(self, two_body):
        assert differentiate(sympy.Integer(7), "x1", two_body) == 0

    def test_quotient_rule(self, two_body):
        x1, x2 = two_body.x
        f, g = x1**2 + x2, x1 - 3 * x2
        lhs = differentiate(f / g, x1, two_body)
        rhs = (sympy.diff(f, x1) * g - f * sympy.diff(g, x1)) / g**2
        assert equal(lhs, rhs, two_body)


class TestSubstitute:
    def test_change_of_variable(self, two_body):
        x1, x2 = two_body.x
        y1 = sympy.Symbol("y1")
        assert substitute(x1 + x2, {x1: y1 - x2}) == y1

    def test_cancellation(self, two_body):
        assert substitute(parse("x1/x1", two_body), {}) == 1

    def test_simultaneous(self, two_body):
        x1, x2 = two_body.x
        assert substitute(x1 - x2, {x1: x2, x2: x1}, two_body) == x2 - x1

    def test_zero_denominator(self, two_body):
        x1, x2 = two_body.x
        with pytest.raises(ZeroDenominatorError):
            substitute(1 / (x1 - x2), {x1: x2}, two_body)


class TestEvalNumeric:
    def test_sum(self, two_body):
        assert eval_numeric(parse("x1 + x2", two_body), {"x1": 1, "x2": 2}) == 3

    def test_coefficient_value(self, two_body):
        f11 = parse("(x1^2 + 1)/(x1 - x2)^2", two_body)
        assert eval_numeric(f11, {"x1": 2, "x2": 1}) == pytest.approx(5)

    def test_exp_of_zero(self, two_body):
        assert eval_numeric(parse("exp(i*0)", two_body), {}) == 1

    def test_plane_wave_value(self, two_body):
        value = eval_numeric(parse("exp(i*5)", two_body), {})
        assert value == pytest.approx(complex(np.cos(5), np.sin(5)))

    def test_singular_point(self, two_body):
        with pytest.raises(SingularPointError):
            eval_numeric(parse("1/(x1 - x2)", two_body), {"x1": 1.0, "x2": 1.0})

    def test_missing_value(self, two_body):
        with pytest.raises(ValueError):
            eval_numeric(parse("x1 + x2", two_body), {"x1": 1})


class TestVelocityDegree:
    def test_quadratic(self, two_body):
        e = parse("(v1*x1 - v2*x2)^2/(x1 - x2)^2 + v1", two_body)
        assert velocity_degree(e, two_body.v) == 2

    def test_velocity_in_denominator(self, two_body):
        with pytest.raises(ValueError):
            velocity_degree(parse("1/v1", two_body), two_body.v)
