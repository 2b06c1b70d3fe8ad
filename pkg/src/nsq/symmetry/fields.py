"""Point-symmetry generators, their second prolongation, verification and Lie brackets."""

from __future__ import annotations

import logging
from collections.abc import Iterable
from dataclasses import dataclass, field

import sympy

from nsq.algebra.expr import Expr, canonicalize, is_zero
from nsq.algebra.variables import VariableSet
from nsq.errors import InconclusiveZeroTestError
from nsq.symmetry.systems import ODESystem, total_derivative

logger = logging.getLogger(__name__)

PASS = "pass"
FAIL = "fail"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class VectorField:
    """ξ(t,x) ∂t + Σ η_k(t,x) ∂x_k."""

    xi: Expr
    etas: tuple[Expr, ...]
    name: str = ""
    variables: VariableSet | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "xi", sympy.sympify(self.xi))
        object.__setattr__(self, "etas", tuple(sympy.sympify(e) for e in self.etas))
        if self.variables is None:
            object.__setattr__(self, "variables", VariableSet.standard(len(self.etas)))
        elif self.variables.n != len(self.etas):
            raise ValueError(f"Field has {len(self.etas)} space coefficients for N={self.variables.n}")

    @property
    def n(self) -> int:
        return len(self.etas)

    def coefficients(self) -> tuple[Expr, ...]:
        return (self.xi, *self.etas)

    def check_point(self) -> None:
        """Coefficients of a point symmetry may not depend on velocities."""
        velocities = set(self.variables.v) | set(self.variables.a)
        for c in self.coefficients():
            if c.free_symbols & velocities:
                raise ValueError(f"Field {self.name or '?'} is not a point field: {c}")

    def apply(self, f: Expr) -> Expr:
        """The derivation ξ f_t + Σ η_k f_{x_k}."""
        result = self.xi * sympy.diff(f, self.variables.t)
        for eta, x in zip(self.etas, self.variables.x):
            result += eta * sympy.diff(f, x)
        return result

    def __add__(self, other: VectorField) -> VectorField:
        return VectorField(
            self.xi + other.xi,
            tuple(a + b for a, b in zip(self.etas, other.etas, strict=True)),
            name=f"{self.name}+{other.name}" if self.name and other.name else "",
            variables=self.variables,
        )

    def __neg__(self) -> VectorField:
        return self.scale(-1)

    def __sub__(self, other: VectorField) -> VectorField:
        combined = self + other.scale(-1)
        name = f"{self.name}-{other.name}" if self.name and other.name else ""
        return combined.renamed(name)

    def __rmul__(self, c: int | sympy.Rational) -> VectorField:
        return self.scale(c)

    def scale(self, c: int | sympy.Rational | Expr) -> VectorField:
        c = sympy.sympify(c)
        name = f"({c})*{self.name}" if self.name else ""
        return VectorField(c * self.xi, tuple(c * e for e in self.etas), name=name, variables=self.variables)

    def renamed(self, name: str) -> VectorField:
        return VectorField(self.xi, self.etas, name=name, variables=self.variables)

    def canonical(self) -> VectorField:
        return VectorField(
            canonicalize(self.xi, self.variables),
            tuple(canonicalize(e, self.variables) for e in self.etas),
            name=self.name,
            variables=self.variables,
        )

    def is_zero_field(self) -> bool:
        return all(is_zero(c, self.variables) for c in self.coefficients())


def linear_combination(terms: Iterable[tuple[int | sympy.Rational, VectorField]], name: str = "") -> VectorField:
    """Σ c_i v_i with exact rational coefficients."""
    terms = list(terms)
    if not terms:
        raise ValueError("Empty linear combination")
    result: VectorField | None = None
    for c, v in terms:
        scaled = v.scale(sympy.Rational(c))
        result = scaled if result is None else result + scaled
    return result.renamed(name or result.name)


@dataclass(frozen=True)
class ProlongedField:
    base: VectorField
    eta1: tuple[Expr, ...]
    eta2: tuple[Expr, ...]

    def apply(self, f: Expr) -> Expr:
        """X^(1) acting on a function of (t, x, v)."""
        result = self.base.apply(f)
        for eta, v in zip(self.eta1, self.base.variables.v):
            result += eta * sympy.diff(f, v)
        return result


@dataclass
class SymmetryReport:
    name: str
    status: str
    residuals: list[Expr] = field(default_factory=list)
    detail: str = ""

    @property
    def passed(self) -> bool:
        return self.status == PASS


def _check_variables(v: VectorField, sys: ODESystem) -> None:
    if v.variables != sys.variables:
        raise ValueError(f"Field variables {v.variables.names} do not match system {sys.variables.names}")
    v.check_point()


def first_prolongation(v: VectorField) -> tuple[Expr, ...]:
    """η^(1)_k = D_t η_k − v_k D_t ξ."""
    variables = v.variables
    dxi = total_derivative(v.xi, variables, with_accelerations=False)
    return tuple(
        total_derivative(eta, variables, with_accelerations=False) - vk * dxi
        for eta, vk in zip(v.etas, variables.v)
    )


def prolong(v: VectorField, sys: ODESystem) -> ProlongedField:
    """Second prolongation, evaluated on solutions (a_m -> rhs_m)."""
    _check_variables(v, sys)
    variables = sys.variables
    eta1 = first_prolongation(v)
    dxi = total_derivative(v.xi, variables, with_accelerations=False)
    bindings = sys.acceleration_bindings()
    eta2 = []
    for e1, ak in zip(eta1, variables.a):
        raw = total_derivative(e1, variables) - ak * dxi
        eta2.append(raw.subs(bindings, simultaneous=True))
    return ProlongedField(v, eta1, tuple(eta2))


def verify_point_symmetry(v: VectorField, sys: ODESystem) -> SymmetryReport:
    """Residual R_n = η^(2)_n − X^(1)(rhs_n) must vanish for every equation."""
    pv = prolong(v, sys)
    residuals = [e2 - pv.apply(f) for e2, f in zip(pv.eta2, sys.rhs)]
    try:
        vanishing = [is_zero(r, sys.variables) for r in residuals]
    except InconclusiveZeroTestError as e:
        return SymmetryReport(v.name, INCONCLUSIVE, residuals, detail=str(e))
    status = PASS if all(vanishing) else FAIL
    logger.debug("Point symmetry %s on N=%d: %s", v.name, sys.n, status)
    shown = [sympy.Integer(0) if z else canonicalize(r, sys.variables) for r, z in zip(residuals, vanishing)]
    return SymmetryReport(v.name, status, shown)


def commutator(v: VectorField, w: VectorField) -> VectorField:
    """[v, w] with coefficients v(w^i) − w(v^i)."""
    if v.variables != w.variables:
        raise ValueError("Fields live on different variable sets")
    xi = v.apply(w.xi) - w.apply(v.xi)
    etas = tuple(v.apply(we) - w.apply(ve) for ve, we in zip(v.etas, w.etas))
    name = f"[{v.name},{w.name}]" if v.name and w.name else ""
    return VectorField(xi, etas, name=name, variables=v.variables).canonical()
