"""Noether point symmetries: the condition X^(1)L + L D_t ξ = D_t g, gauge reconstruction and first integrals.

The gauge g(t, x) is rebuilt by integrating along straight coordinate
segments from a fixed base point, first in t, then x1, x2, ... in turn.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import sympy

from nsq.algebra.expr import Expr, canonicalize, is_rational, is_zero
from nsq.algebra.variables import VariableSet
from nsq.errors import ConservationError, DegenerateLagrangianError, InconclusiveZeroTestError
from nsq.symmetry.fields import FAIL, INCONCLUSIVE, PASS, VectorField, first_prolongation
from nsq.symmetry.systems import ODESystem, total_derivative
from nsq.variational.lagrangian import Lagrangian, euler_lagrange, require_supported

logger = logging.getLogger(__name__)

MAX_BASE_SHIFTS = 8


@dataclass
class NoetherResult:
    name: str
    status: str
    gauge: Expr | None = None
    obstruction: Expr = sympy.Integer(0)
    detail: str = ""

    @property
    def is_noether(self) -> bool:
        return self.status == PASS


@dataclass(frozen=True)
class _Split:
    """E = A + Σ B_k v_k + (terms of degree ≥ 2 in v)."""

    free: Expr
    linear: tuple[Expr, ...]
    higher: Expr


def noether_expression(v: VectorField, lagrangian: Lagrangian) -> Expr:
    """E = X^(1)(L) + L D_t ξ."""
    variables = lagrangian.variables
    L = lagrangian.total()
    result = v.apply(L)
    for eta, vk in zip(first_prolongation(v), variables.v):
        result += eta * sympy.diff(L, vk)
    return result + L * total_derivative(v.xi, variables, with_accelerations=False)


def _split_by_velocity(e: Expr, variables: VariableSet) -> _Split:
    num, den = sympy.fraction(sympy.cancel(sympy.together(e)))
    if den.free_symbols & set(variables.v):
        raise DegenerateLagrangianError(f"Velocities appear in a denominator: {e}")
    poly = sympy.Poly(num, *variables.v)
    free = sympy.Integer(0)
    linear = [sympy.Integer(0)] * variables.n
    higher = sympy.Integer(0)
    for monom, coeff in poly.terms():
        degree = sum(monom)
        if degree == 0:
            free += coeff
        elif degree == 1:
            linear[monom.index(1)] += coeff
        else:
            higher += coeff * sympy.Mul(*(vk**m for vk, m in zip(variables.v, monom)))
    return _Split(free / den, tuple(c / den for c in linear), higher / den)


def _integrability_obstruction(split: _Split, variables: VariableSet) -> Expr | None:
    """First non-vanishing mixed-partial condition, or None when all hold."""
    t, x = variables.t, variables.x
    B = split.linear
    for k in range(variables.n):
        condition = sympy.diff(B[k], t) - sympy.diff(split.free, x[k])
        if not is_zero(condition, variables):
            return condition
        for j in range(k + 1, variables.n):
            condition = sympy.diff(B[k], x[j]) - sympy.diff(B[j], x[k])
            if not is_zero(condition, variables):
                return condition
    return None


def _base_point(variables: VariableSet, shift: int) -> tuple[sympy.Integer, tuple[sympy.Integer, ...]]:
    """(0, N, N-1, ..., 1) for shift 0; later shifts stay off the collision set."""
    n = variables.n
    t0 = sympy.Integer(shift)
    x0 = tuple(sympy.Integer((n - j) * (shift + 1) + shift) for j in range(n))
    return t0, x0


def _singular_at(exprs: list[Expr], point: dict) -> bool:
    for e in exprs:
        _, den = sympy.fraction(sympy.together(e))
        if den.free_symbols and sympy.expand(den.subs(point)) == 0:
            return True
    return False


def _segment(integrand: Expr, var: sympy.Symbol, start: Expr, stop: Expr) -> Expr:
    antiderivative = sympy.integrate(sympy.cancel(integrand), var)
    return antiderivative.subs(var, stop) - antiderivative.subs(var, start)


def reconstruct_gauge(split: _Split, variables: VariableSet) -> Expr:
    """Line integral of (A, B_1, ..., B_N) from the base point to (t, x)."""
    t, x = variables.t, variables.x
    coefficients = [split.free, *split.linear]
    for shift in range(MAX_BASE_SHIFTS):
        t0, x0 = _base_point(variables, shift)
        if not _singular_at(coefficients, {t: t0, **dict(zip(x, x0))}):
            break
        logger.warning("Gauge base point (%s, %s) is singular; shifting", t0, x0)
    else:
        raise InconclusiveZeroTestError("No regular base point found for gauge integration")

    # t-leg with x fixed at the base
    along = dict(zip(x, x0))
    s = sympy.Dummy("s")
    g = _segment(split.free.subs(along).subs(t, s), s, t0, t)
    # x_k-legs: earlier coordinates already moved, later ones still at the base
    for k in range(variables.n):
        fixed = {x[j]: x0[j] for j in range(k + 1, variables.n)}
        integrand = split.linear[k].subs(fixed).subs(x[k], s)
        g += _segment(integrand, s, x0[k], x[k])
    return canonicalize(g, variables) if is_rational(g) else sympy.simplify(g)


def noether_condition(v: VectorField, lagrangian: Lagrangian) -> NoetherResult:
    """Decide whether ``v`` is a Noether point symmetry of ``lagrangian`` and rebuild its gauge."""
    variables = lagrangian.variables
    if v.variables != variables:
        raise ValueError(f"Field variables {v.variables.names} do not match {variables.names}")
    v.check_point()
    require_supported(lagrangian)

    E = noether_expression(v, lagrangian)
    try:
        split = _split_by_velocity(E, variables)
        if not is_zero(split.higher, variables):
            logger.debug("%s: Noether expression has velocity degree > 1", v.name)
            return NoetherResult(
                v.name,
                FAIL,
                obstruction=canonicalize(split.higher, variables),
                detail="X^(1)L + L D_t(xi) is not affine in the velocities",
            )
        obstruction = _integrability_obstruction(split, variables)
        if obstruction is not None:
            return NoetherResult(
                v.name,
                FAIL,
                obstruction=canonicalize(obstruction, variables),
                detail="integrability condition for the gauge fails",
            )
        g = reconstruct_gauge(split, variables)
        check = total_derivative(g, variables, with_accelerations=False) - E
        if not is_zero(check, variables):
            return NoetherResult(v.name, INCONCLUSIVE, detail=f"reconstructed gauge {g} does not reproduce E")
    except InconclusiveZeroTestError as e:
        return NoetherResult(v.name, INCONCLUSIVE, detail=str(e))
    logger.debug("%s: Noether symmetry with gauge %s", v.name, g)
    return NoetherResult(v.name, PASS, gauge=g)


def first_integral(
    v: VectorField,
    lagrangian: Lagrangian,
    gauge: Expr,
    system: ODESystem | None = None,
) -> Expr:
    """I = ξL + Σ (η_k − ξ v_k) ∂L/∂v_k − g, checked to satisfy D_t I = 0 on solutions."""
    variables = lagrangian.variables
    L = lagrangian.total()
    integral = v.xi * L - gauge
    for eta, vk in zip(v.etas, variables.v):
        integral += (eta - v.xi * vk) * sympy.diff(L, vk)
    integral = canonicalize(integral, variables)

    system = system or euler_lagrange(lagrangian)
    rate = total_derivative(integral, variables).subs(system.acceleration_bindings(), simultaneous=True)
    if not is_zero(rate, variables):
        raise ConservationError(f"First integral of {v.name or 'field'} is not conserved: D_t I = {rate}")
    return integral
