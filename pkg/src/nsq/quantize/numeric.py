"""Numeric residual tests: transformed plane waves checked against a constructed equation."""

from __future__ import annotations

import logging
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field

import numpy as np
import sympy

from nsq.algebra.expr import compile_numeric
from nsq.algebra.variables import E0
from nsq.errors import SingularPointError
from nsq.quantize.schrodinger import LinearEvolutionPDE
from nsq.quantize.transform import PointTransformation

logger = logging.getLogger(__name__)

COLLISION_GAP = 1e-3
FD_STEP = 1e-4

Point = tuple[float, np.ndarray]


@dataclass
class PlaneWave:
    """u(t, x) = exp(i k·y(x) − ½ i (|k|² + E0²) t)."""

    k: np.ndarray
    e0: float
    transform: PointTransformation
    _forward: Callable = field(init=False, repr=False)
    _jacobian: Callable = field(init=False, repr=False)
    _hessian: Callable = field(init=False, repr=False)

    def __post_init__(self) -> None:
        self.k = np.asarray(self.k, dtype=float)
        if self.k.shape != (self.transform.n,):
            raise ValueError(f"Wave vector needs {self.transform.n} components")
        x = self.transform.variables.x
        J = self.transform.jacobian
        n = self.transform.n
        self._forward = compile_numeric(list(self.transform.forward), x)
        self._jacobian = compile_numeric(list(J), x)
        self._hessian = compile_numeric(
            [sympy.diff(J[a, j], x[m]) for a in range(n) for j in range(n) for m in range(n)], x
        )

    @property
    def omega(self) -> float:
        return 0.5 * (float(self.k @ self.k) + self.e0**2)

    def _values(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        n = self.transform.n
        y = np.asarray(self._forward(*x), dtype=float)
        J = np.asarray(self._jacobian(*x), dtype=float).reshape(n, n)
        dJ = np.asarray(self._hessian(*x), dtype=float).reshape(n, n, n)
        return y, J, dJ

    def __call__(self, t: float, x: Sequence[float]) -> complex:
        y, _, _ = self._values(np.asarray(x, dtype=float))
        return complex(np.exp(1j * (self.k @ y) - 1j * self.omega * t))

    def derivatives(self, t: float, x: Sequence[float]) -> tuple[complex, complex, np.ndarray, np.ndarray]:
        """(u, u_t, ∇u, Hessian of u) from the chain rule."""
        y, J, dJ = self._values(np.asarray(x, dtype=float))
        u = np.exp(1j * (self.k @ y) - 1j * self.omega * t)
        kJ = self.k @ J
        grad = 1j * kJ * u
        # ∂_m ∂_j u = [i Σ_a k_a ∂_m J_aj − (k·J_j)(k·J_m)] u
        hess = (1j * np.einsum("a,ajm->jm", self.k, dJ) - np.outer(kJ, kJ)) * u
        return complex(u), complex(-1j * self.omega * u), grad, hess


def plane_wave(k: Sequence[float], e0: float, transform: PointTransformation) -> PlaneWave:
    return PlaneWave(np.asarray(k, dtype=float), float(e0), transform)


def finite_difference_derivatives(
    u: Callable[[float, np.ndarray], complex],
    t: float,
    x: np.ndarray,
    step: float = FD_STEP,
) -> tuple[complex, complex, np.ndarray, np.ndarray]:
    """Central differences for u_t, ∇u and the Hessian."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    eye = np.eye(n) * step
    u0 = u(t, x)
    ut = (u(t + step, x) - u(t - step, x)) / (2 * step)
    grad = np.array([(u(t, x + eye[j]) - u(t, x - eye[j])) / (2 * step) for j in range(n)])
    hess = np.empty((n, n), dtype=complex)
    for j in range(n):
        hess[j, j] = (u(t, x + eye[j]) - 2 * u0 + u(t, x - eye[j])) / step**2
        for m in range(j + 1, n):
            value = (
                u(t, x + eye[j] + eye[m])
                - u(t, x + eye[j] - eye[m])
                - u(t, x - eye[j] + eye[m])
                + u(t, x - eye[j] - eye[m])
            ) / (4 * step**2)
            hess[j, m] = hess[m, j] = value
    return complex(u0), complex(ut), grad, hess


@dataclass
class _CompiledPDE:
    f: Callable
    h: Callable
    h0: Callable
    n: int

    @classmethod
    def build(cls, pde: LinearEvolutionPDE, e0: float) -> _CompiledPDE:
        x = pde.variables.x
        f = compile_numeric([c for row in pde.f for c in row], x)
        h = compile_numeric(list(pde.h), x)
        h0 = compile_numeric(pde.h0.subs(E0, e0), x)
        return cls(f, h, h0, pde.n)

    def coefficients(self, x: np.ndarray) -> tuple[np.ndarray, np.ndarray, complex]:
        f = np.asarray(self.f(*x), dtype=complex).reshape(self.n, self.n)
        h = np.asarray(self.h(*x), dtype=complex).reshape(self.n)
        return f, h, complex(self.h0(*x))


def _check_point(x: np.ndarray) -> None:
    for j in range(len(x)):
        for m in range(j + 1, len(x)):
            if abs(x[j] - x[m]) <= COLLISION_GAP:
                raise SingularPointError(f"x{j + 1} - x{m + 1}", {"x": x.tolist()})


def pde_residual(
    pde: LinearEvolutionPDE,
    u: Callable[[float, np.ndarray], complex],
    points: Sequence[Point],
    e0: float = 1.0,
    finite_differences: bool = False,
) -> float:
    """max |2i u_t + Σ f u_xx + Σ h u_x + h0 u| over ``points``.

    Analytic derivatives are used when ``u`` provides them, central
    differences otherwise (or when ``finite_differences`` is set).
    """
    compiled = _CompiledPDE.build(pde, e0)
    worst = 0.0
    for t, x in points:
        x = np.asarray(x, dtype=float)
        _check_point(x)
        if hasattr(u, "derivatives") and not finite_differences:
            u0, ut, grad, hess = u.derivatives(t, x)
        else:
            u0, ut, grad, hess = finite_difference_derivatives(u, t, x)
        f, h, h0 = compiled.coefficients(x)
        value = 2j * ut + np.sum(f * hess) + h @ grad + h0 * u0
        worst = max(worst, abs(value))
    logger.debug("Residual over %d points: %.3e", len(points), worst)
    return worst


def sample_points(
    n: int,
    count: int,
    rng: np.random.Generator,
    bound: float = 1.5,
    min_gap: float = 0.4,
) -> list[Point]:
    """Random (t, x) with |x_i − x_j| > min_gap, by rejection."""
    points: list[Point] = []
    while len(points) < count:
        x = rng.uniform(-bound, bound, size=n)
        if n > 1 and np.min(np.diff(np.sort(x))) <= min_gap:
            continue
        points.append((float(rng.uniform(-1.0, 1.0)), x))
    return points


def random_wave_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    return rng.uniform(-1.0, 1.0, size=n)
