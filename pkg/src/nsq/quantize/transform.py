"""Point transformations y = y(x), their Jacobians, and pushing ODE systems and fields through them."""

from __future__ import annotations

import itertools
import logging
from dataclasses import dataclass, field

import sympy
from sympy.polys.polyfuncs import symmetrize

from nsq.algebra.expr import Expr, canonicalize, is_rational, is_zero
from nsq.algebra.variables import VariableSet
from nsq.errors import TransformError
from nsq.symmetry.fields import VectorField
from nsq.symmetry.systems import ODESystem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class PointTransformation:
    """y_a = forward_a(x) with J_aj = ∂y_a/∂x_j and B = J⁻¹ (rows indexed by x, columns by y).

    Expressions in x are rewritten in y either through an explicit ``inverse``
    x(y) or, for maps symmetric in x, by reduction to elementary symmetric
    polynomials.
    """

    variables: VariableSet
    target: VariableSet
    forward: tuple[Expr, ...]
    inverse: tuple[Expr, ...] | None = None
    symmetric: bool = False
    jacobian: sympy.ImmutableMatrix = field(init=False, repr=False, compare=False)
    determinant: Expr = field(init=False, repr=False, compare=False)
    inverse_jacobian: sympy.ImmutableMatrix = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        n = self.variables.n
        if len(self.forward) != n or self.target.n != n:
            raise ValueError(f"Transformation needs {n} components on both sides")
        x = self.variables.x
        J = sympy.ImmutableMatrix(n, n, lambda a, j: sympy.diff(self.forward[a], x[j]))
        det = canonicalize(J.det(), self.variables)
        if is_zero(det, self.variables):
            raise TransformError(f"Jacobian of {self.forward} is singular everywhere")
        B = (J.adjugate() / det).applyfunc(lambda e: canonicalize(e, self.variables))
        object.__setattr__(self, "jacobian", J)
        object.__setattr__(self, "determinant", det)
        object.__setattr__(self, "inverse_jacobian", sympy.ImmutableMatrix(B))

    @property
    def n(self) -> int:
        return self.variables.n

    def check_inverse(self) -> bool:
        """J·B = I symbolically."""
        product = self.jacobian * self.inverse_jacobian
        return all(
            is_zero(product[a, b] - (1 if a == b else 0), self.variables)
            for a in range(self.n)
            for b in range(self.n)
        )

    def to_target(self, e: Expr) -> Expr:
        """Rewrite an expression in (t, x, ...) as one in (t, y, ...)."""
        e = sympy.sympify(e)
        if is_rational(e):
            e = canonicalize(e, self.variables)
        x = self.variables.x
        if not e.free_symbols & set(x):
            return e
        if self.inverse is not None:
            return canonicalize(e.subs(dict(zip(x, self.inverse)), simultaneous=True), self.target)
        if self.symmetric:
            reduced = self._reduce_symmetric(e)
            if reduced is not None:
                return canonicalize(reduced, self.target)
        raise TransformError(f"Cannot express {e} in {self.target.positions}")

    def _reduce_symmetric(self, e: Expr) -> Expr | None:
        num, den = sympy.fraction(e)
        pair = self._symmetric_pair(num, den)
        if pair is None:
            # antisymmetric numerator and denominator become symmetric after one Vandermonde factor
            vandermonde = vandermonde_product(self.variables.x)
            pair = self._symmetric_pair(sympy.expand(num * vandermonde), sympy.expand(den * vandermonde))
        if pair is None:
            return None
        return pair[0] / pair[1]

    def _symmetric_pair(self, num: Expr, den: Expr) -> tuple[Expr, Expr] | None:
        reduced = []
        for part in (num, den):
            value = _in_elementary(part, self.variables.x, self.target.x)
            if value is None:
                return None
            reduced.append(value)
        return reduced[0], reduced[1]


def vandermonde_product(x: tuple[sympy.Symbol, ...]) -> Expr:
    """Π_{i<j} (x_i − x_j)."""
    return sympy.Mul(*(x[i] - x[j] for i, j in itertools.combinations(range(len(x)), 2)))


def _in_elementary(p: Expr, x: tuple[sympy.Symbol, ...], y: tuple[sympy.Symbol, ...]) -> Expr | None:
    if not p.free_symbols & set(x):
        return p
    symmetric, remainder, definitions = symmetrize(sympy.expand(p), *x, formal=True)
    if remainder != 0:
        return None
    names = {s: y[k] for k, (s, _) in enumerate(definitions)}
    return symmetric.subs(names, simultaneous=True)


def elementary_symmetric(x: tuple[sympy.Symbol, ...], degree: int) -> Expr:
    return sympy.Add(*(sympy.Mul(*combo) for combo in itertools.combinations(x, degree)))


def elementary_symmetric_map(n: int) -> PointTransformation:
    """y_a = e_a(x1, ..., xN), the linearizing map of the N-body goldfish system."""
    variables = VariableSet.standard(n)
    target = VariableSet.standard(n, position_prefix="y", velocity_prefix="w")
    forward = tuple(elementary_symmetric(variables.x, a) for a in range(1, n + 1))
    return PointTransformation(variables, target, forward, symmetric=True)


def identity_map(variables: VariableSet) -> PointTransformation:
    return PointTransformation(variables, variables, variables.x, inverse=variables.x)


def push_ode(sys: ODESystem, transform: PointTransformation) -> ODESystem:
    """ÿ_a = Σ J_aj ẍ_j + Σ ∂_k J_aj ẋ_j ẋ_k on solutions, with ẋ = B ẏ, written in (t, y, w)."""
    if sys.variables != transform.variables:
        raise TransformError("System and transformation use different variables")
    variables = transform.variables
    x, v = variables.x, variables.v
    J = transform.jacobian
    velocity = transform.inverse_jacobian * sympy.Matrix(transform.target.v)
    velocity_bindings = dict(zip(v, velocity))

    rhs = []
    for a in range(transform.n):
        acc = sympy.Integer(0)
        for j in range(transform.n):
            acc += J[a, j] * sys.rhs[j]
            for k in range(transform.n):
                acc += sympy.diff(J[a, j], x[k]) * v[j] * v[k]
        acc = canonicalize(acc, variables)
        rhs.append(transform.to_target(acc.subs(velocity_bindings, simultaneous=True)))
    logger.debug("Pushed system to %s: %s", transform.target.positions, rhs)
    return ODESystem(transform.target, tuple(rhs))


def pushforward_field(v: VectorField, transform: PointTransformation) -> VectorField:
    """ξ ∂t + Σ X(y_a) ∂y_a, expressed in the target coordinates."""
    if v.variables != transform.variables:
        raise TransformError("Field and transformation use different variables")
    variables = transform.variables
    etas = []
    for a, y in enumerate(transform.forward):
        component = v.xi * sympy.diff(y, variables.t)
        for j, eta in enumerate(v.etas):
            component += eta * transform.jacobian[a, j]
        etas.append(transform.to_target(component))
    return VectorField(transform.to_target(v.xi), tuple(etas), name=v.name, variables=transform.target)
