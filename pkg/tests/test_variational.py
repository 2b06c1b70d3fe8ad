"""Tests for Lagrangians, the Noether condition, first integrals and the Legendre transform."""

from __future__ import annotations

import pytest
import sympy

from nsq.algebra.expr import equal, eval_numeric, is_zero, velocity_degree
from nsq.algebra.parser import parse
from nsq.algebra.variables import VariableSet
from nsq.errors import DegenerateLagrangianError, SingularHessianError
from nsq.quantize.schrodinger import quantize
from nsq.quantize.transform import elementary_symmetric_map
from nsq.symmetry.catalog import catalog_field, generator_catalog, noether_basis, rotation_field
from nsq.symmetry.fields import FAIL, VectorField
from nsq.symmetry.systems import goldfish_system, total_derivative
from nsq.variational.lagrangian import (
    Lagrangian,
    euler_lagrange,
    goldfish_lagrangian,
    hamilton_system,
    legendre_transform,
    pullback_lagrangian,
    velocity_hessian,
)
from nsq.variational.noether import first_integral, noether_condition, noether_expression


@pytest.fixture(scope="module")
def catalog():
    return generator_catalog()


@pytest.fixture(scope="module")
def lagrangian():
    return goldfish_lagrangian()


@pytest.fixture(scope="module")
def system(lagrangian):
    return euler_lagrange(lagrangian)


@pytest.fixture
def free_particle():
    variables = VariableSet.standard(1)
    return Lagrangian(variables.v[0] ** 2 / 2, variables)


# --- Lagrangian ---


class TestLagrangian:
    def test_velocity_degree(self, lagrangian):
        assert lagrangian.velocity_degree() == 2

    def test_value(self, lagrangian):
        value = eval_numeric(lagrangian.L, {"x1": 2, "x2": 1, "v1": 1, "v2": 0})
        assert value == pytest.approx(1)

    def test_gauge_rejects_velocities(self, lagrangian):
        with pytest.raises(ValueError):
            lagrangian.with_gauge(lagrangian.variables.v[0])

    def test_gauge_adds_total_derivative(self, lagrangian):
        x1, x2 = lagrangian.variables.x
        gauged = lagrangian.with_gauge(x1 * x2)
        extra = gauged.total() - lagrangian.L
        assert is_zero(extra - total_derivative(x1 * x2, lagrangian.variables, with_accelerations=False))

    def test_degenerate_rejected(self):
        variables = VariableSet.standard(1)
        with pytest.raises(DegenerateLagrangianError):
            euler_lagrange(Lagrangian(variables.v[0] ** 4, variables))

    def test_singular_hessian(self):
        variables = VariableSet.standard(2)
        v1, v2 = variables.v
        with pytest.raises(SingularHessianError) as info:
            euler_lagrange(Lagrangian((v1 + v2) ** 2 / 2, variables))
        assert info.value.determinant == 0

    def test_hessian(self, lagrangian):
        x1, x2 = lagrangian.variables.x
        M = velocity_hessian(lagrangian)
        assert equal(M[0, 0], 1 + x2**2)
        assert equal(M[0, 1], 1 + x1 * x2)


class TestEulerLagrange:
    def test_free_particle(self, free_particle):
        assert euler_lagrange(free_particle).rhs == (0,)

    def test_reproduces_goldfish(self, system):
        assert system.same_as(goldfish_system(2))

    def test_gauge_does_not_change_equations(self, lagrangian):
        t = lagrangian.variables.t
        x1, x2 = lagrangian.variables.x
        gauged = lagrangian.with_gauge(t * x1**2 * x2 + x2**3)
        assert euler_lagrange(gauged).same_as(goldfish_system(2))

    @pytest.mark.parametrize("n", [2, 3])
    def test_pullback_lagrangian(self, n):
        pulled = pullback_lagrangian(elementary_symmetric_map(n))
        assert euler_lagrange(pulled).same_as(goldfish_system(n))

    def test_pullback_matches_two_body(self, lagrangian):
        pulled = pullback_lagrangian(elementary_symmetric_map(2))
        assert is_zero(pulled.L - lagrangian.L)


# --- Noether ---


class TestNoetherCondition:
    def test_time_translation(self, catalog, lagrangian):
        result = noether_condition(catalog_field(catalog, 7), lagrangian)
        assert result.is_noether
        assert result.gauge.free_symbols == set()

    def test_gamma13_fails(self, catalog, lagrangian):
        result = noether_condition(catalog_field(catalog, 13), lagrangian)
        assert result.status == FAIL
        assert not is_zero(result.obstruction)

    @pytest.mark.parametrize("index", range(6, 13))
    def test_individual_noether_generators(self, catalog, lagrangian, index):
        v = catalog_field(catalog, index)
        result = noether_condition(v, lagrangian)
        assert result.is_noether
        E = noether_expression(v, lagrangian)
        assert is_zero(total_derivative(result.gauge, lagrangian.variables, with_accelerations=False) - E)

    @pytest.mark.parametrize("index", [5, 14])
    def test_rotation_parts_fail_alone(self, catalog, lagrangian, index):
        assert not noether_condition(catalog_field(catalog, index), lagrangian).is_noether

    def test_rotation_combination(self, catalog, lagrangian):
        assert noether_condition(rotation_field(catalog), lagrangian).is_noether

    def test_eight_of_fifteen(self, catalog, lagrangian):
        passing = [v.name for v in noether_basis(catalog) if noether_condition(v, lagrangian).is_noether]
        assert len(passing) == 8
        assert "Gamma5+3*Gamma14" in passing

    def test_gauge_freedom_keeps_status(self, catalog, lagrangian):
        x1, x2 = lagrangian.variables.x
        gauged = lagrangian.with_gauge(x1 * x2)
        for k in (3, 7, 9, 13):
            v = catalog_field(catalog, k)
            assert noether_condition(v, gauged).status == noether_condition(v, lagrangian).status

    def test_variable_mismatch(self, lagrangian):
        with pytest.raises(ValueError):
            noether_condition(VectorField(1, (0, 0, 0)), lagrangian)


class TestFirstIntegral:
    def test_energy_is_minus_lagrangian(self, catalog, lagrangian, system):
        v = catalog_field(catalog, 7)
        result = noether_condition(v, lagrangian)
        integral = first_integral(v, lagrangian, result.gauge, system)
        assert is_zero(integral + lagrangian.L)

    def test_free_momentum(self, free_particle):
        v = VectorField(0, (1,))
        result = noether_condition(v, free_particle)
        assert first_integral(v, free_particle, result.gauge) == free_particle.variables.v[0]

    def test_gamma11_is_velocity_linear(self, catalog, lagrangian, system):
        v = catalog_field(catalog, 11)
        result = noether_condition(v, lagrangian)
        integral = first_integral(v, lagrangian, result.gauge, system)
        assert velocity_degree(integral, lagrangian.variables.v) == 1

    def test_all_integrals_conserved(self, catalog, lagrangian, system):
        for v in noether_basis(catalog):
            result = noether_condition(v, lagrangian)
            if result.is_noether:
                integral = first_integral(v, lagrangian, result.gauge, system)
                rate = total_derivative(integral, lagrangian.variables)
                assert is_zero(rate.subs(system.acceleration_bindings()))


# --- Legendre ---


class TestLegendre:
    def test_free_particle(self, free_particle):
        p1 = free_particle.variables.with_momenta().p[0]
        assert equal(legendre_transform(free_particle), p1**2 / 2)

    def test_two_body_hamiltonian(self, lagrangian):
        variables = lagrangian.variables.with_momenta()
        expected = parse("((p1*x1 - p2*x2)^2 + (p1 - p2)^2)/(2*(x1 - x2)^2)", variables)
        assert equal(legendre_transform(lagrangian), expected, variables)

    def test_hamilton_equations(self, lagrangian):
        H = legendre_transform(lagrangian)
        assert hamilton_system(H, lagrangian).same_as(goldfish_system(2))

    @pytest.mark.parametrize("n", [2, 3])
    def test_principal_symbol_matches_quantization(self, n):
        transform = elementary_symmetric_map(n)
        pulled = pullback_lagrangian(transform)
        H = legendre_transform(pulled)
        p = pulled.variables.with_momenta().p
        f = quantize(n).f
        symbol = sympy.Rational(1, 2) * sum(f[j][k] * p[j] * p[k] for j in range(n) for k in range(n))
        assert is_zero(H - symbol)
