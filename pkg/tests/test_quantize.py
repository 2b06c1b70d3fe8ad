"""Tests for point transformations, the Schrödinger constructor, PDE symmetries and plane-wave residuals."""

from __future__ import annotations

import json

import numpy as np
import pytest
import sympy

from nsq.algebra.expr import equal, eval_numeric, is_zero
from nsq.algebra.variables import E0, VariableSet
from nsq.errors import SchemaError, SingularPointError, TransformError
from nsq.quantize.numeric import (
    finite_difference_derivatives,
    pde_residual,
    plane_wave,
    random_wave_vector,
    sample_points,
)
from nsq.quantize.schrodinger import (
    JetSpace,
    LinearEvolutionPDE,
    PDESymmetry,
    free_coefficients,
    load_pde,
    matches_free,
    omega_catalog,
    pde_from_json,
    pde_to_json,
    quantize,
    reduce_to_free,
    scaling_symmetry,
    verify_pde_symmetry,
    write_pde,
)
from nsq.quantize.transform import (
    PointTransformation,
    elementary_symmetric_map,
    identity_map,
    push_ode,
    pushforward_field,
    vandermonde_product,
)
from nsq.symmetry.catalog import catalog_field, generator_catalog, noether_fields, time_dilation
from nsq.symmetry.fields import FAIL, PASS
from nsq.symmetry.systems import free_particle_system, goldfish_system
from nsq.tools.quantize import two_body_reference


@pytest.fixture(scope="module")
def two_body_pde():
    return quantize(2)


@pytest.fixture(scope="module")
def esm2():
    return elementary_symmetric_map(2)


@pytest.fixture
def linear_potential():
    """2i u_t + u_xx + x1 u = 0."""
    x1 = VariableSet.standard(1, wave=True).x[0]
    return LinearEvolutionPDE(1, ((1,),), (0,), x1)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


# --- Point transformations ---


class TestElementarySymmetricMap:
    def test_two_body_forward(self, esm2):
        x1, x2 = esm2.variables.x
        assert esm2.forward == (x1 + x2, x1 * x2)

    def test_two_body_determinant(self, esm2):
        x1, x2 = esm2.variables.x
        assert equal(esm2.determinant, x1 - x2) or equal(esm2.determinant, x2 - x1)

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_determinant_is_vandermonde(self, n):
        transform = elementary_symmetric_map(n)
        vandermonde = vandermonde_product(transform.variables.x)
        assert is_zero(transform.determinant - vandermonde) or is_zero(transform.determinant + vandermonde)

    def test_single_particle_is_identity(self):
        transform = elementary_symmetric_map(1)
        assert transform.forward == transform.variables.x
        assert transform.jacobian[0, 0] == 1

    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_inverse_jacobian(self, n):
        assert elementary_symmetric_map(n).check_inverse()

    def test_singular_map_rejected(self):
        variables = VariableSet.standard(2)
        x1, x2 = variables.x
        with pytest.raises(TransformError):
            PointTransformation(variables, variables, (x1 + x2, 2 * x1 + 2 * x2))

    def test_symmetric_reduction(self, esm2):
        x1, x2 = esm2.variables.x
        y1, y2 = esm2.target.x
        assert equal(esm2.to_target(x1**2 + x2**2), y1**2 - 2 * y2)

    def test_antisymmetric_ratio(self, esm2):
        x1, x2 = esm2.variables.x
        y1, y2 = esm2.target.x
        assert equal(esm2.to_target((x1**2 - x2**2) / (x1 - x2)), y1)

    def test_non_symmetric_rejected(self, esm2):
        x1, _ = esm2.variables.x
        with pytest.raises(TransformError):
            esm2.to_target(x1)


class TestPushOde:
    @pytest.mark.parametrize("n", [2, 3])
    def test_goldfish_linearizes(self, n):
        pushed = push_ode(goldfish_system(n), elementary_symmetric_map(n))
        assert pushed.same_as(free_particle_system(n))

    def test_identity_map(self):
        system = goldfish_system(2)
        assert push_ode(system, identity_map(system.variables)).same_as(system)

    def test_variable_mismatch(self, esm2):
        with pytest.raises(TransformError):
            push_ode(goldfish_system(3), esm2)


class TestPushforwardField:
    def test_time_translations(self, esm2):
        catalog = generator_catalog()
        y1, y2 = esm2.target.x
        expected = {7: 1, 4: y1, 2: y2}
        for index, xi in expected.items():
            pushed = pushforward_field(catalog_field(catalog, index), esm2)
            assert equal(pushed.xi, xi)
            assert all(is_zero(e) for e in pushed.etas)

    def test_time_dilation(self, esm2):
        pushed = pushforward_field(time_dilation(), esm2)
        assert equal(pushed.xi, esm2.target.t)
        assert all(is_zero(e) for e in pushed.etas)

    def test_free_particle_translations(self, esm2):
        catalog = generator_catalog()
        t = esm2.target.t
        y1, y2 = esm2.target.x
        expected = {8: (0, -t, 0), 9: (0, -1, 0), 10: (0, 0, t), 11: (0, 0, 1)}
        for index, (xi, eta1, eta2) in expected.items():
            pushed = pushforward_field(catalog_field(catalog, index), esm2)
            assert equal(pushed.xi, xi)
            assert equal(pushed.etas[0], eta1)
            assert equal(pushed.etas[1], eta2)

    def test_rotation_part(self, esm2):
        pushed = pushforward_field(catalog_field(generator_catalog(), 5), esm2)
        y1, y2 = esm2.target.x
        assert equal(pushed.etas[0], -y2)
        assert equal(pushed.etas[1], 0)

    def test_projective_generator(self, esm2):
        pushed = pushforward_field(catalog_field(generator_catalog(), 12), esm2)
        t = esm2.target.t
        y1, y2 = esm2.target.x
        assert equal(pushed.xi, t**2)
        assert equal(pushed.etas[0], t * y1)
        assert equal(pushed.etas[1], t * y2)


# --- Schrödinger constructor ---


class TestQuantize:
    def test_two_body_coefficients(self, two_body_pde):
        reference = two_body_reference()
        assert equal(two_body_pde.f[0][0], reference["f11"])
        assert equal(two_body_pde.f[0][1], reference["f12"])
        assert equal(two_body_pde.f[1][0], reference["f12"])
        assert equal(two_body_pde.f[1][1], reference["f22"])
        assert two_body_pde.h0 == -(E0**2)

    def test_h_formula_reproduces_diagonal_derivatives(self, two_body_pde):
        x1, x2 = two_body_pde.variables.x
        assert equal(two_body_pde.h[0], sympy.diff(two_body_pde.f[0][0], x1))
        assert equal(two_body_pde.h[1], sympy.diff(two_body_pde.f[1][1], x2))

    def test_coefficient_value(self, two_body_pde):
        assert eval_numeric(two_body_pde.f[0][0], {"x1": 2, "x2": 1}) == pytest.approx(5)

    def test_single_particle_is_free(self):
        pde = quantize(1)
        assert pde.f == ((1,),)
        assert pde.h == (0,)

    def test_numeric_e0(self):
        assert quantize(2, 3).h0 == -9

    def test_f_is_positive_semidefinite(self, rng):
        pde = quantize(3, 1)
        for _, x in sample_points(3, 50, rng):
            point = {"x1": x[0], "x2": x[1], "x3": x[2]}
            f = np.array([[eval_numeric(c, point).real for c in row] for row in pde.f])
            assert np.all(np.linalg.eigvalsh(f) >= -1e-9)

    def test_rejects_asymmetric_f(self):
        variables = VariableSet.standard(2, wave=True)
        x1, _ = variables.x
        with pytest.raises(ValueError, match="symmetric"):
            LinearEvolutionPDE(2, ((1, x1), (0, 1)), (0, 0), -1)

    def test_rejects_time_dependence(self):
        with pytest.raises(ValueError, match="depends on t"):
            LinearEvolutionPDE(1, ((sympy.Symbol("t"),),), (0,), -1)

    def test_bind_e0(self, two_body_pde):
        assert two_body_pde.bind_e0(2).h0 == -4


class TestReduction:
    def test_two_body_reduces_to_free(self, two_body_pde, esm2):
        coefficients = reduce_to_free(two_body_pde, esm2)
        assert matches_free(coefficients, 2)
        assert coefficients["psi_y1y1"] == 1
        assert coefficients["psi_y1y2"] == 0

    def test_three_body_reduces_to_free(self):
        assert matches_free(reduce_to_free(quantize(3), elementary_symmetric_map(3)), 3)

    def test_free_coefficient_layout(self):
        assert set(free_coefficients(2)) == {"psi", "psi_t", "psi_y1", "psi_y2", "psi_y1y1", "psi_y1y2", "psi_y2y2"}

    def test_perturbed_equation_does_not_reduce(self, esm2):
        pde = quantize(2)
        shifted = LinearEvolutionPDE(2, pde.f, pde.h, pde.h0 + 1)
        assert not matches_free(reduce_to_free(shifted, esm2), 2)


# --- PDE symmetries ---


class TestPDESymmetries:
    def test_mu_values(self):
        omegas = omega_catalog()
        variables = VariableSet.standard(2)
        t = variables.t
        x1, x2 = variables.x
        assert omegas[1].mu == -sympy.I * E0**2 * t / 2
        assert omegas[2].mu == 0
        assert equal(omegas[3].mu, -sympy.I * (x1 + x2))

    def test_geometric_parts_follow_noether_fields(self):
        for omega, v in zip(omega_catalog(), noether_fields()):
            assert omega.xi == v.xi and omega.etas == v.etas

    def test_omega3_is_time_translation(self):
        omega3 = omega_catalog()[2]
        assert omega3.xi == 1 and omega3.etas == (0, 0) and omega3.mu == 0

    @pytest.mark.parametrize("index", range(8))
    def test_omegas_pass(self, two_body_pde, index):
        s = omega_catalog()[index]
        assert verify_pde_symmetry(s, two_body_pde).status == PASS

    def test_scaling(self, two_body_pde):
        assert verify_pde_symmetry(scaling_symmetry(2), two_body_pde).passed

    def test_perturbed_omega4_fails(self, two_body_pde):
        x1, x2 = two_body_pde.variables.x
        s = omega_catalog()[3].with_mu(-sympy.I * (x1 + 2 * x2))
        report = verify_pde_symmetry(s, two_body_pde)
        assert report.status == FAIL
        assert report.detail.startswith("nonzero at")

    def test_numeric_e0_binding(self):
        pde = quantize(2, 1)
        s = omega_catalog()[1]
        s = s.with_mu(s.mu.subs(E0, 1))
        assert verify_pde_symmetry(s, pde).passed

    def test_plain_translation_broken_by_potential(self, linear_potential):
        assert verify_pde_symmetry(PDESymmetry(0, (1,), 0), linear_potential).status == FAIL

    def test_translation_with_phase_under_potential(self, linear_potential):
        t = linear_potential.variables.t
        assert verify_pde_symmetry(PDESymmetry(0, (1,), sympy.I * t / 2), linear_potential).passed

    def test_time_translation_under_potential(self, linear_potential):
        assert verify_pde_symmetry(PDESymmetry(1, (0,), 0), linear_potential).passed

    def test_size_mismatch(self, two_body_pde):
        with pytest.raises(ValueError):
            verify_pde_symmetry(PDESymmetry(1, (0, 0, 0), 0), two_body_pde)

    def test_jet_names(self):
        jets = JetSpace(VariableSet.standard(2, wave=True))
        assert jets.d().name == "u"
        assert jets.d(0, 2).name == "u_tx2"
        assert jets.d(2, 1).name == "u_x1x2"


# --- JSON ---


class TestPDEJson:
    def test_round_trip(self, two_body_pde, tmp_path):
        path = tmp_path / "pde.json"
        write_pde(path, two_body_pde)
        loaded = load_pde(path)
        assert loaded.n == 2
        for a, b in zip(loaded.f, two_body_pde.f):
            assert all(equal(p, q) for p, q in zip(a, b))
        assert equal(loaded.h0, two_body_pde.h0)

    def test_export_shape(self, two_body_pde):
        data = json.loads(pde_to_json(two_body_pde))
        assert data["N"] == 2
        assert data["h0"] == "(-E0^2)/(1)"
        assert len(data["f"]) == 2 and len(data["h"]) == 2

    def test_shape_mismatch(self):
        with pytest.raises(SchemaError):
            pde_from_json('{"N": 2, "f": [["1"]], "h": ["0", "0"], "h0": "-1"}')

    def test_asymmetric_rejected(self):
        with pytest.raises(SchemaError):
            pde_from_json('{"N": 2, "f": [["1", "x1"], ["0", "1"]], "h": ["0", "0"], "h0": "-1"}')

    def test_unreadable(self, tmp_path):
        with pytest.raises(SchemaError):
            load_pde(tmp_path / "missing.json")


# --- Plane waves ---


class TestPlaneWave:
    def test_value(self, esm2):
        u = plane_wave([1.0, 1.0], 1.0, esm2)
        assert u(0.0, [2.0, 1.0]) == pytest.approx(np.exp(5j))

    def test_trivial_wave_is_constant(self, esm2):
        u = plane_wave([0.0, 0.0], 0.0, esm2)
        assert u(0.7, [0.3, -0.4]) == pytest.approx(1)
        assert pde_residual(quantize(2, 0), u, [(0.7, np.array([0.3, -0.4]))], 0.0) == pytest.approx(0)

    def test_analytic_matches_finite_differences(self, esm2):
        u = plane_wave([0.4, -0.7], 1.0, esm2)
        analytic = u.derivatives(0.2, np.array([0.5, -0.6]))
        numeric = finite_difference_derivatives(u, 0.2, np.array([0.5, -0.6]))
        for a, b in zip(analytic, numeric):
            assert np.max(np.abs(np.subtract(a, b))) < 1e-6

    def test_position_dependent_h0(self, linear_potential):
        assert pde_residual(linear_potential, lambda t, x: 1.0, [(0.0, np.array([2.0]))]) == pytest.approx(2.0)

    def test_two_body_residual(self, esm2, rng):
        pde = quantize(2, 1)
        points = sample_points(2, 20, rng)
        for _ in range(4):
            u = plane_wave(random_wave_vector(2, rng), 1.0, esm2)
            assert pde_residual(pde, u, points, 1.0) < 1e-10

    @pytest.mark.parametrize("n", [3, 4])
    def test_general_residual(self, n, rng):
        pde = quantize(n, 1)
        u = plane_wave(random_wave_vector(n, rng), 1.0, elementary_symmetric_map(n))
        points = sample_points(n, 20, rng)
        assert pde_residual(pde, u, points, 1.0) < 1e-8
        for t, x in points:
            for a, b in zip(u.derivatives(t, x), finite_difference_derivatives(u, t, x)):
                assert np.max(np.abs(np.subtract(a, b))) < 1e-6

    def test_non_solution(self):
        pde = quantize(2, 1)
        residual = pde_residual(pde, lambda t, x: complex(np.exp(1j * t)), [(0.3, np.array([1.0, -1.0]))], 1.0)
        assert residual == pytest.approx(3, rel=1e-6)

    def test_constant_with_zero_energy(self):
        residual = pde_residual(quantize(2, 0), lambda t, x: 1 + 0j, [(0.0, np.array([1.0, -1.0]))], 0.0)
        assert residual == pytest.approx(0, abs=1e-12)

    def test_collision_point_rejected(self, esm2):
        u = plane_wave([1.0, 0.0], 1.0, esm2)
        with pytest.raises(SingularPointError):
            pde_residual(quantize(2, 1), u, [(0.0, np.array([0.5, 0.5]))], 1.0)

    def test_sample_points_are_separated(self, rng):
        for _, x in sample_points(4, 30, rng):
            assert np.min(np.diff(np.sort(x))) > 0.4
