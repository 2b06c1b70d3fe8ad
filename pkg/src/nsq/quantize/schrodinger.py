"""Schrödinger equations 2i u_t + Σ f_kj u_jk + Σ h_k u_k + h0 u = 0 built from the linearizing map.

Also holds the Lie symmetries of the two-body equation (with u-linear
characteristic ω = μ u), their verification by prolongation on the jet
space, and the chain-rule reduction back to the free equation.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import sympy
from pydantic import ValidationError

from nsq.algebra.expr import Expr, canonicalize, is_zero, to_text
from nsq.algebra.parser import parse
from nsq.algebra.variables import E0, VariableSet
from nsq.errors import InconclusiveZeroTestError, NsqError, SchemaError
from nsq.quantize.transform import PointTransformation, elementary_symmetric_map
from nsq.schemas import PDEModel
from nsq.symmetry.catalog import noether_fields
from nsq.symmetry.fields import FAIL, INCONCLUSIVE, PASS, SymmetryReport, VectorField

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class LinearEvolutionPDE:
    n: int
    f: tuple[tuple[Expr, ...], ...]
    h: tuple[Expr, ...]
    h0: Expr
    variables: VariableSet = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", VariableSet.standard(self.n, wave=True))
        object.__setattr__(self, "f", tuple(tuple(sympy.sympify(e) for e in row) for row in self.f))
        object.__setattr__(self, "h", tuple(sympy.sympify(e) for e in self.h))
        object.__setattr__(self, "h0", sympy.sympify(self.h0))
        if len(self.f) != self.n or any(len(row) != self.n for row in self.f) or len(self.h) != self.n:
            raise ValueError(f"Coefficient shapes do not match N={self.n}")
        forbidden = {self.variables.t, self.variables.u}
        for e in (*(c for row in self.f for c in row), *self.h, self.h0):
            if e.free_symbols & forbidden:
                raise ValueError(f"Coefficient {e} depends on t or u")
        for j in range(self.n):
            for k in range(j + 1, self.n):
                if not is_zero(self.f[j][k] - self.f[k][j], self.variables):
                    raise ValueError(f"f is not symmetric at ({j + 1}, {k + 1})")

    def operator(self, u: Expr, ux: list[Expr], uxx: list[list[Expr]]) -> Expr:
        """Σ f_kj u_jk + Σ h_k u_k + h0 u."""
        result = self.h0 * u
        for k in range(self.n):
            result += self.h[k] * ux[k]
            for j in range(self.n):
                result += self.f[k][j] * uxx[j][k]
        return result

    def bind_e0(self, value: Expr | float) -> LinearEvolutionPDE:
        bound = {E0: sympy.sympify(value)}
        return LinearEvolutionPDE(self.n, self.f, self.h, self.h0.subs(bound))


def quantize(n: int, e0: Expr = E0) -> LinearEvolutionPDE:
    """Push 2iψ_t + Δ_y ψ − E0²ψ = 0 through the elementary-symmetric map.

    f_kj = Σ_a B_ja B_ka and h_j = Σ_a Σ_m B_ma ∂B_ja/∂x_m with B the inverse Jacobian.
    """
    transform = elementary_symmetric_map(n)
    variables = transform.variables
    x = variables.x
    B = transform.inverse_jacobian
    f = tuple(
        tuple(canonicalize(sum(B[j, a] * B[k, a] for a in range(n)), variables) for j in range(n))
        for k in range(n)
    )
    h = tuple(
        canonicalize(
            sum(B[m, a] * sympy.diff(B[j, a], x[m]) for a in range(n) for m in range(n)),
            variables,
        )
        for j in range(n)
    )
    logger.info("Constructed Schrödinger equation for N=%d", n)
    return LinearEvolutionPDE(n, f, h, -sympy.sympify(e0) ** 2)


# --- jets ---


class JetSpace:
    """Symbols u_J for multi-indices J over (t, x1, ..., xN), created on demand."""

    def __init__(self, variables: VariableSet, wave: str | None = None) -> None:
        self.name = wave or variables.wave or "u"
        self.base = (variables.t, *variables.x)
        self._counts: dict[sympy.Symbol, tuple[int, ...]] = {}

    @property
    def jets(self) -> set[sympy.Symbol]:
        return set(self._counts)

    def jet(self, counts: tuple[int, ...]) -> sympy.Symbol:
        if len(counts) != len(self.base):
            raise ValueError(f"Multi-index {counts} has the wrong length")
        if not any(counts):
            symbol = sympy.Symbol(self.name)
        else:
            suffix = "".join(var.name * c for var, c in zip(self.base, counts))
            symbol = sympy.Symbol(f"{self.name}_{suffix}")
        self._counts[symbol] = tuple(counts)
        return symbol

    def d(self, *indices: int) -> sympy.Symbol:
        """Jet for derivatives by base indices (0 is t, k is x_k)."""
        counts = [0] * len(self.base)
        for i in indices:
            counts[i] += 1
        return self.jet(tuple(counts))

    def total_derivative(self, e: Expr, index: int) -> Expr:
        result = sympy.diff(e, self.base[index])
        for symbol in e.free_symbols & self.jets:
            counts = list(self._counts[symbol])
            counts[index] += 1
            result += sympy.diff(e, symbol) * self.jet(tuple(counts))
        return result


# --- symmetries ---


@dataclass(frozen=True)
class PDESymmetry:
    """ξ ∂t + Σ η_k ∂x_k + μ u ∂u."""

    xi: Expr
    etas: tuple[Expr, ...]
    mu: Expr
    name: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "xi", sympy.sympify(self.xi))
        object.__setattr__(self, "etas", tuple(sympy.sympify(e) for e in self.etas))
        object.__setattr__(self, "mu", sympy.sympify(self.mu))

    @property
    def n(self) -> int:
        return len(self.etas)

    @classmethod
    def from_field(cls, v: VectorField, mu: Expr, name: str = "") -> PDESymmetry:
        return cls(v.xi, v.etas, mu, name or v.name)

    def with_mu(self, mu: Expr) -> PDESymmetry:
        return PDESymmetry(self.xi, self.etas, mu, self.name)


def omega_mus() -> list[Expr]:
    """μ1..μ8 of the two-body equation, paired with ``noether_fields`` order."""
    variables = VariableSet.standard(2)
    t = variables.t
    x1, x2 = variables.x
    i, half = sympy.I, sympy.Rational(1, 2)
    return [
        sympy.Integer(0),
        -half * i * E0**2 * t,
        sympy.Integer(0),
        -i * (x1 + x2),
        sympy.Integer(0),
        i * x1 * x2,
        sympy.Integer(0),
        (i * x1 * x2 - t) + half * i * (x1**2 * x2**2 + x1**2 + x2**2 - t**2 * E0**2),
    ]


def omega_catalog() -> list[PDESymmetry]:
    """Ω1..Ω8: the eight Noether fields lifted with their u-coefficients."""
    return [
        PDESymmetry.from_field(v, mu, name=f"Omega{k}")
        for k, (v, mu) in enumerate(zip(noether_fields(), omega_mus()), start=1)
    ]


def scaling_symmetry(n: int) -> PDESymmetry:
    """Ω9 = u∂u, present for every linear homogeneous equation."""
    return PDESymmetry(0, tuple(0 for _ in range(n)), 1, name="Omega9")


def prolongation_residual(s: PDESymmetry, pde: LinearEvolutionPDE, jets: JetSpace) -> Expr:
    """pr X applied to the equation, with u_t and u_tx eliminated through the equation itself."""
    n = pde.n
    variables = pde.variables
    xi, etas, mu = s.xi, s.etas, s.mu

    u = jets.d()
    ut = jets.d(0)
    ux = [jets.d(k) for k in range(1, n + 1)]
    uxx = [[jets.d(j, k) for k in range(1, n + 1)] for j in range(1, n + 1)]
    characteristic = mu * u - xi * ut - sum(eta * uk for eta, uk in zip(etas, ux))

    def coefficient(*indices: int) -> Expr:
        """φ^J = D_J Q + ξ u_{J,t} + Σ η_k u_{J,x_k}."""
        result = characteristic
        for i in indices:
            result = jets.total_derivative(result, i)
        result += xi * jets.d(*indices, 0)
        for k, eta in enumerate(etas, start=1):
            result += eta * jets.d(*indices, k)
        return result

    def along(e: Expr) -> Expr:
        value = xi * sympy.diff(e, variables.t)
        for eta, xk in zip(etas, variables.x):
            value += eta * sympy.diff(e, xk)
        return value

    residual = 2 * sympy.I * coefficient(0) + along(pde.h0) * u + pde.h0 * coefficient()
    for k in range(n):
        residual += along(pde.h[k]) * ux[k] + pde.h[k] * coefficient(k + 1)
        for j in range(n):
            residual += along(pde.f[k][j]) * uxx[j][k] + pde.f[k][j] * coefficient(j + 1, k + 1)

    # evolution elimination: u_t first, then u_{t x_k}
    spatial = pde.operator(u, ux, uxx)
    ut_value = sympy.I / 2 * spatial
    bindings = {ut: ut_value}
    for k in range(1, n + 1):
        bindings[jets.d(0, k)] = jets.total_derivative(ut_value, k)
    return sympy.expand(residual.subs(bindings, simultaneous=True))


def verify_pde_symmetry(s: PDESymmetry, pde: LinearEvolutionPDE) -> SymmetryReport:
    """The prolonged residual must vanish coefficient by coefficient in the jet symbols."""
    if s.n != pde.n:
        raise ValueError(f"Symmetry acts on N={s.n}, equation has N={pde.n}")
    variables = pde.variables
    jets = JetSpace(variables)
    residual = prolongation_residual(s, pde, jets)

    present = sorted(residual.free_symbols & jets.jets, key=lambda sym: sym.name)
    parts = [residual.subs({sym: 0 for sym in present})]
    parts.extend(sympy.diff(residual, sym) for sym in present)
    labels = ["1", *(sym.name for sym in present)]

    nonzero = []
    try:
        for label, part in zip(labels, parts):
            if not is_zero(part, variables):
                nonzero.append((label, canonicalize(part, variables)))
    except InconclusiveZeroTestError as e:
        return SymmetryReport(s.name, INCONCLUSIVE, detail=str(e))

    status = FAIL if nonzero else PASS
    logger.debug("PDE symmetry %s on N=%d: %s", s.name, pde.n, status)
    detail = ", ".join(label for label, _ in nonzero)
    return SymmetryReport(s.name, status, [part for _, part in nonzero], detail=detail and f"nonzero at {detail}")


# --- reduction ---


def reduce_to_free(pde: LinearEvolutionPDE, transform: PointTransformation) -> dict[str, Expr]:
    """Substitute u = ψ(t, y(x)) and return the coefficient of every ψ-jet up to second order."""
    n = pde.n
    if transform.n != n:
        raise ValueError("Transformation and equation disagree on N")
    x = transform.variables.x
    J = transform.jacobian
    psi = JetSpace(transform.target, wave="psi")

    ux = [sum(J[a, j] * psi.d(a + 1) for a in range(n)) for j in range(n)]
    uxx = [
        [
            sum(J[a, j] * J[b, k] * psi.d(a + 1, b + 1) for a in range(n) for b in range(n))
            + sum(sympy.diff(J[a, j], x[k]) * psi.d(a + 1) for a in range(n))
            for k in range(n)
        ]
        for j in range(n)
    ]
    expression = sympy.expand(2 * sympy.I * psi.d(0) + pde.operator(psi.d(), ux, uxx))

    wanted = [psi.d(), psi.d(0), *(psi.d(a) for a in range(1, n + 1))]
    wanted += [psi.d(a, b) for a in range(1, n + 1) for b in range(a, n + 1)]
    return {
        sym.name: transform.to_target(canonicalize(sympy.diff(expression, sym), transform.variables))
        for sym in wanted
    }


def free_coefficients(n: int, e0: Expr = E0) -> dict[str, Expr]:
    """Coefficients of 2iψ_t + Δψ − E0²ψ in the same layout as ``reduce_to_free``."""
    target = VariableSet.standard(n, position_prefix="y", velocity_prefix="w")
    psi = JetSpace(target, wave="psi")
    expected = {psi.d().name: -sympy.sympify(e0) ** 2, psi.d(0).name: 2 * sympy.I}
    for a in range(1, n + 1):
        expected[psi.d(a).name] = sympy.Integer(0)
        for b in range(a, n + 1):
            expected[psi.d(a, b).name] = sympy.Integer(1 if a == b else 0)
    return expected


def matches_free(coefficients: dict[str, Expr], n: int, e0: Expr = E0) -> bool:
    expected = free_coefficients(n, e0)
    return coefficients.keys() == expected.keys() and all(
        is_zero(coefficients[key] - expected[key]) for key in expected
    )


# --- JSON ---


def pde_to_model(pde: LinearEvolutionPDE) -> PDEModel:
    variables = pde.variables
    return PDEModel(
        N=pde.n,
        f=[[to_text(e, variables) for e in row] for row in pde.f],
        h=[to_text(e, variables) for e in pde.h],
        h0=to_text(pde.h0, variables),
    )


def pde_to_json(pde: LinearEvolutionPDE) -> str:
    return pde_to_model(pde).model_dump_json(indent=2)


def pde_from_json(text: str) -> LinearEvolutionPDE:
    try:
        model = PDEModel.model_validate_json(text)
    except ValidationError as e:
        raise SchemaError(f"Malformed PDE JSON: {e}") from e
    variables = VariableSet.standard(model.N, wave=True)
    try:
        return LinearEvolutionPDE(
            model.N,
            tuple(tuple(parse(e, variables) for e in row) for row in model.f),
            tuple(parse(e, variables) for e in model.h),
            parse(model.h0, variables),
        )
    except (NsqError, ValueError) as e:
        raise SchemaError(f"Malformed PDE coefficients: {e}") from e


def write_pde(path: str | Path, pde: LinearEvolutionPDE) -> None:
    Path(path).write_text(pde_to_json(pde))


def load_pde(path: str | Path) -> LinearEvolutionPDE:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as e:
        raise SchemaError(f"Cannot read {path}: {e}") from e
    return pde_from_json(text)
