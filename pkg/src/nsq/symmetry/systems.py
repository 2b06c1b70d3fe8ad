"""Second-order ODE systems in normal form and the goldfish many-body system."""

from __future__ import annotations

from dataclasses import dataclass

import sympy

from nsq.algebra.expr import Expr, is_zero
from nsq.algebra.variables import VariableSet


@dataclass(frozen=True)
class ODESystem:
    """ẍ_n = rhs_n(t, x, v) for n = 1..N."""

    variables: VariableSet
    rhs: tuple[Expr, ...]

    def __post_init__(self) -> None:
        if len(self.rhs) != self.variables.n:
            raise ValueError(f"Expected {self.variables.n} right-hand sides, got {len(self.rhs)}")
        accelerations = set(self.variables.a)
        for f in self.rhs:
            if sympy.sympify(f).free_symbols & accelerations:
                raise ValueError(f"Right-hand side contains second derivatives: {f}")

    @property
    def n(self) -> int:
        return self.variables.n

    def acceleration_bindings(self) -> dict[sympy.Symbol, Expr]:
        """a_m -> rhs_m, used to evaluate expressions on solutions."""
        return dict(zip(self.variables.a, self.rhs))

    def same_as(self, other: ODESystem) -> bool:
        """Equation-by-equation symbolic identity."""
        if self.n != other.n:
            return False
        return all(is_zero(f - g, self.variables) for f, g in zip(self.rhs, other.rhs))


def total_derivative(e: Expr, variables: VariableSet, with_accelerations: bool = True) -> Expr:
    """D_t = ∂t + Σ v_m ∂x_m (+ Σ a_m ∂v_m)."""
    result = sympy.diff(e, variables.t)
    for x, v in zip(variables.x, variables.v):
        result += v * sympy.diff(e, x)
    if with_accelerations:
        for v, a in zip(variables.v, variables.a):
            result += a * sympy.diff(e, v)
    return result


def goldfish_system(n: int) -> ODESystem:
    """ẍ_n = 2 Σ_{m≠n} ẋ_n ẋ_m / (x_n − x_m)."""
    variables = VariableSet.standard(n)
    x, v = variables.x, variables.v
    rhs = []
    for k in range(n):
        terms = [2 * v[k] * v[m] / (x[k] - x[m]) for m in range(n) if m != k]
        rhs.append(sympy.Add(*terms))
    return ODESystem(variables, tuple(rhs))


def free_particle_system(n: int, position_prefix: str = "y", velocity_prefix: str = "w") -> ODESystem:
    """ÿ = 0 in N dimensions."""
    variables = VariableSet.standard(n, position_prefix=position_prefix, velocity_prefix=velocity_prefix)
    return ODESystem(variables, tuple(sympy.Integer(0) for _ in range(n)))
