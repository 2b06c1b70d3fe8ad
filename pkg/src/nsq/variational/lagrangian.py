"""Lagrangians quadratic in the velocities: Euler–Lagrange equations, Legendre transform, Hamilton's equations."""

from __future__ import annotations

import logging
from dataclasses import dataclass, replace

import sympy

from nsq.algebra.expr import Expr, canonicalize, is_zero, velocity_degree
from nsq.algebra.variables import VariableSet
from nsq.errors import DegenerateLagrangianError, SingularHessianError
from nsq.quantize.transform import PointTransformation
from nsq.symmetry.systems import ODESystem, total_derivative

logger = logging.getLogger(__name__)

MAX_VELOCITY_DEGREE = 2


@dataclass(frozen=True)
class Lagrangian:
    """L(t, x, v) plus an optional gauge term D_t g(t, x)."""

    L: Expr
    variables: VariableSet
    gauge: Expr = sympy.Integer(0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "L", sympy.sympify(self.L))
        object.__setattr__(self, "gauge", sympy.sympify(self.gauge))
        if self.gauge.free_symbols & set(self.variables.v):
            raise ValueError(f"Gauge term depends on velocities: {self.gauge}")

    @property
    def n(self) -> int:
        return self.variables.n

    def total(self) -> Expr:
        return self.L + total_derivative(self.gauge, self.variables, with_accelerations=False)

    def with_gauge(self, gauge: Expr) -> Lagrangian:
        return replace(self, gauge=gauge)

    def velocity_degree(self) -> int:
        try:
            return velocity_degree(self.total(), self.variables.v)
        except ValueError as e:
            raise DegenerateLagrangianError(str(e)) from e

    def momenta(self) -> tuple[Expr, ...]:
        """p_k = ∂L/∂v_k."""
        L = self.total()
        return tuple(sympy.diff(L, vk) for vk in self.variables.v)


def goldfish_lagrangian() -> Lagrangian:
    """L = ½((v1 + v2)² + (x2 v1 + x1 v2)²) for the two-body system."""
    variables = VariableSet.standard(2)
    x1, x2 = variables.x
    v1, v2 = variables.v
    L = sympy.Rational(1, 2) * ((v1 + v2) ** 2 + (x2 * v1 + x1 * v2) ** 2)
    return Lagrangian(L, variables)


def pullback_lagrangian(transform: PointTransformation) -> Lagrangian:
    """½ |J v|²: the free-particle kinetic energy in the source coordinates."""
    variables = transform.variables
    velocity = sympy.Matrix(variables.v)
    ydot = transform.jacobian * velocity
    L = sympy.Rational(1, 2) * sum(component**2 for component in ydot)
    return Lagrangian(sympy.expand(L), variables)


def require_supported(lagrangian: Lagrangian) -> None:
    degree = lagrangian.velocity_degree()
    if degree > MAX_VELOCITY_DEGREE:
        raise DegenerateLagrangianError(
            f"Lagrangian has velocity degree {degree}; at most {MAX_VELOCITY_DEGREE} is supported"
        )


def velocity_hessian(lagrangian: Lagrangian) -> sympy.Matrix:
    L = lagrangian.total()
    return sympy.hessian(L, lagrangian.variables.v).applyfunc(
        lambda e: canonicalize(e, lagrangian.variables)
    )


def _inverse_hessian(lagrangian: Lagrangian) -> tuple[sympy.Matrix, Expr]:
    """(adjugate, determinant) of the velocity Hessian; raises if it is singular."""
    M = velocity_hessian(lagrangian)
    det = canonicalize(M.det(), lagrangian.variables)
    if is_zero(det, lagrangian.variables):
        raise SingularHessianError(det)
    return M.adjugate(), det


def euler_lagrange(lagrangian: Lagrangian) -> ODESystem:
    """Solve d/dt(∂L/∂v_k) = ∂L/∂x_k for the accelerations."""
    require_supported(lagrangian)
    variables = lagrangian.variables
    t, x, v = variables.t, variables.x, variables.v
    adjugate, det = _inverse_hessian(lagrangian)

    L = lagrangian.total()
    forces = []
    for xk, vk in zip(x, v):
        Lv = sympy.diff(L, vk)
        force = sympy.diff(L, xk) - sympy.diff(Lv, t)
        for xj, vj in zip(x, v):
            force -= sympy.diff(Lv, xj) * vj
        forces.append(force)

    accelerations = adjugate * sympy.Matrix(forces) / det
    rhs = tuple(canonicalize(a, variables) for a in accelerations)
    logger.debug("Euler-Lagrange system for N=%d: %s", variables.n, rhs)
    return ODESystem(variables, rhs)


def legendre_transform(lagrangian: Lagrangian) -> Expr:
    """H(t, x, p) = Σ p_k v_k − L with v solved from p = ∂L/∂v.

    The result is written over ``lagrangian.variables.with_momenta()``.
    """
    require_supported(lagrangian)
    variables = lagrangian.variables.with_momenta()
    adjugate, det = _inverse_hessian(lagrangian)

    L = lagrangian.total()
    at_rest = {vk: 0 for vk in variables.v}
    offset = sympy.Matrix([sympy.diff(L, vk).subs(at_rest) for vk in variables.v])
    velocity = adjugate * (sympy.Matrix(variables.p) - offset) / det

    H = sum(pk * vk for pk, vk in zip(variables.p, variables.v)) - L
    H = H.subs(dict(zip(variables.v, velocity)), simultaneous=True)
    return canonicalize(H, variables)


def hamilton_system(H: Expr, lagrangian: Lagrangian) -> ODESystem:
    """Second-order system implied by ẋ = ∂H/∂p, ṗ = −∂H/∂x, written back in (t, x, v) via p = ∂L/∂v."""
    variables = lagrangian.variables.with_momenta()
    t, x, p = variables.t, variables.x, variables.p
    Hp = [sympy.diff(H, pk) for pk in p]
    Hx = [sympy.diff(H, xk) for xk in x]

    rhs = []
    for k in range(variables.n):
        acc = sympy.diff(Hp[k], t)
        for j in range(variables.n):
            acc += sympy.diff(Hp[k], x[j]) * Hp[j] - sympy.diff(Hp[k], p[j]) * Hx[j]
        rhs.append(acc)

    momenta = dict(zip(p, lagrangian.momenta()))
    base = lagrangian.variables
    return ODESystem(
        base,
        tuple(canonicalize(r.subs(momenta, simultaneous=True), base) for r in rhs),
    )
