"""Exact rational-function kernel: canonical forms, zero tests, derivatives, evaluation.

Expressions are plain sympy expressions. The rational fragment (integers,
Gaussian coefficients, declared symbols, field operations and integer
powers) is decided exactly through the canonical numerator/denominator
pair; ``exp`` leaves are opaque and fall back to exact sampling.
"""

from __future__ import annotations

import functools
import logging
from collections.abc import Callable, Iterable, Mapping, Sequence

import numpy as np
import sympy
from sympy.printing.str import StrPrinter

from nsq.algebra.variables import E0, VariableSet
from nsq.errors import (
    InconclusiveZeroTestError,
    SingularPointError,
    ZeroDenominatorError,
)

logger = logging.getLogger(__name__)

Expr = sympy.Expr

ZERO_TEST_SAMPLES = 8
SAMPLE_BOUND = 97
SINGULAR_GAP = 1e-6
SINGULAR_TOL = 1e-12
MAX_RESAMPLES = 200

# Placeholder generator for constant expressions
_CONSTANT_GEN = sympy.Symbol("_c")


def is_rational(e: Expr) -> bool:
    """True if ``e`` lies in the exact fragment (no exp or other functions)."""
    return not e.atoms(sympy.Function) and not any(
        isinstance(a, sympy.Pow) and not a.exp.is_Integer for a in e.atoms(sympy.Pow)
    )


def generators(e: Expr, variables: VariableSet | None = None) -> tuple[sympy.Symbol, ...]:
    """Polynomial generators in canonical order: declared variables, then E0, then the rest by name."""
    free = e.free_symbols
    ordered: list[sympy.Symbol] = []
    if variables is not None:
        ordered = [s for s in variables.ordering if s in free]
    rest = sorted(free.difference(ordered), key=lambda s: (s != E0, s.name))
    return (*ordered, *rest)


def canonical_pair(e: Expr, variables: VariableSet | None = None) -> tuple[sympy.Poly, sympy.Poly]:
    """Reduced (numerator, denominator) with the denominator's leading coefficient made positive."""
    e = sympy.sympify(e)
    if not is_rational(e):
        raise ValueError(f"Expression is outside the rational fragment: {e}")
    gens = generators(e, variables) or (_CONSTANT_GEN,)
    num, den = sympy.fraction(sympy.cancel(sympy.together(e)))
    pnum = sympy.Poly(num, *gens)
    pden = sympy.Poly(den, *gens)
    if pden.is_zero:
        raise ZeroDenominatorError(f"Denominator of {e} is the zero polynomial")
    lead = pden.LC()
    if lead.is_real and lead < 0:
        pnum, pden = -pnum, -pden
    return _clear_denominators(pnum, pden)


def _clear_denominators(pnum: sympy.Poly, pden: sympy.Poly) -> tuple[sympy.Poly, sympy.Poly]:
    """Scale both sides so all coefficients are Gaussian integers with unit content."""
    parts = [part for c in (*pnum.coeffs(), *pden.coeffs()) for part in sympy.sympify(c).as_real_imag()]
    if not all(part.is_Rational for part in parts):
        return pnum, pden
    scale = functools.reduce(sympy.ilcm, (int(part.q) for part in parts), 1)
    content = functools.reduce(sympy.igcd, (int(part * scale) for part in parts), 0)
    factor = sympy.Rational(scale, content)
    if factor == 1:
        return pnum, pden
    gens = pnum.gens
    return sympy.Poly(pnum.as_expr() * factor, *gens), sympy.Poly(pden.as_expr() * factor, *gens)


def canonicalize(e: Expr, variables: VariableSet | None = None) -> Expr:
    """Return the canonical form numerator/denominator as an expression."""
    e = sympy.sympify(e)
    if not is_rational(e):
        return sympy.together(e)
    num, den = canonical_pair(e, variables)
    return num.as_expr() / den.as_expr()


def canonical_key(e: Expr, variables: VariableSet | None = None) -> tuple:
    num, den = canonical_pair(e, variables)
    return (num.gens, tuple(num.terms()), tuple(den.terms()))


def equal(a: Expr, b: Expr, variables: VariableSet | None = None) -> bool:
    """Exact equality on the rational fragment, sampled otherwise."""
    return is_zero(sympy.sympify(a) - sympy.sympify(b), variables)


def differentiate(e: Expr, var: sympy.Symbol | str, variables: VariableSet | None = None) -> Expr:
    if isinstance(var, str):
        if variables is None:
            raise ValueError("A VariableSet is required to differentiate by name")
        var = variables.lookup(var)
    return canonicalize(sympy.diff(e, var), variables)


def substitute(
    e: Expr,
    bindings: Mapping[sympy.Symbol, Expr],
    variables: VariableSet | None = None,
) -> Expr:
    """Simultaneous substitution followed by canonicalization."""
    result = sympy.sympify(e).subs(dict(bindings), simultaneous=True)
    if result.has(sympy.zoo, sympy.nan):
        raise ZeroDenominatorError(f"Substitution {dict(bindings)} produces a zero denominator")
    if is_rational(result):
        _, den = sympy.fraction(sympy.together(result))
        if sympy.expand(den) == 0:
            raise ZeroDenominatorError(f"Substitution {dict(bindings)} produces a zero denominator")
    return canonicalize(result, variables)


def is_zero(
    e: Expr,
    variables: VariableSet | None = None,
    rng: np.random.Generator | None = None,
) -> bool:
    """Decide whether ``e`` is identically zero.

    The rational fragment is decided by expanding the numerator of the
    combined fraction. Expressions with ``exp`` leaves are evaluated exactly
    at random rational points; they count as zero only if every sample vanishes.
    """
    e = sympy.sympify(e)
    if is_rational(e):
        num, _ = sympy.fraction(sympy.together(e))
        return sympy.expand(num) == 0
    return _sampled_zero(e, rng or np.random.default_rng(0))


def _random_rational(rng: np.random.Generator) -> sympy.Rational:
    num = int(rng.integers(-SAMPLE_BOUND, SAMPLE_BOUND + 1))
    den = 0
    while den == 0:
        den = int(rng.integers(-SAMPLE_BOUND, SAMPLE_BOUND + 1))
    return sympy.Rational(num, den)


def _sampled_zero(e: Expr, rng: np.random.Generator) -> bool:
    symbols = sorted(e.free_symbols, key=lambda s: s.name)
    _, den = sympy.fraction(sympy.together(e))
    accepted = 0
    attempts = 0
    while accepted < ZERO_TEST_SAMPLES:
        attempts += 1
        if attempts > MAX_RESAMPLES:
            raise InconclusiveZeroTestError(f"Could not sample {e} away from its singularities")
        point = {s: _random_rational(rng) for s in symbols}
        den_value = complex(sympy.N(den.subs(point)))
        if abs(den_value) < SINGULAR_GAP:
            continue
        value = sympy.simplify(e.subs(point))
        if value != 0:
            logger.debug("Sampled non-zero value %s for %s", value, e)
            return False
        accepted += 1
    return True


def free_variables(e: Expr) -> set[str]:
    return {s.name for s in sympy.sympify(e).free_symbols}


def _point_args(point: Mapping, symbols: Sequence[sympy.Symbol]) -> list[complex]:
    by_name = {(k.name if isinstance(k, sympy.Symbol) else str(k)): v for k, v in point.items()}
    missing = [s.name for s in symbols if s.name not in by_name]
    if missing:
        raise ValueError(f"No value supplied for {missing}")
    return [by_name[s.name] for s in symbols]


def eval_numeric(e: Expr, point: Mapping[sympy.Symbol | str, complex]) -> complex:
    """Floating evaluation with complex arithmetic; rejects points on a denominator zero."""
    e = sympy.sympify(e)
    symbols = sorted(e.free_symbols, key=lambda s: s.name)
    args = _point_args(point, symbols)
    _, den = sympy.fraction(sympy.together(e))
    if den.free_symbols:
        den_value = sympy.lambdify(symbols, den, "numpy")(*args)
        if abs(complex(den_value)) < SINGULAR_TOL:
            raise SingularPointError(den, dict(zip([s.name for s in symbols], args)))
    return complex(sympy.lambdify(symbols, e, "numpy")(*args))


def compile_numeric(
    exprs: Expr | Iterable[Expr],
    symbols: Sequence[sympy.Symbol],
) -> Callable[..., np.ndarray]:
    """Compile one or more expressions to a numpy function of ``symbols``."""
    if isinstance(exprs, sympy.Basic):
        return sympy.lambdify(list(symbols), exprs, "numpy")
    return sympy.lambdify(list(symbols), list(exprs), "numpy")


def velocity_degree(e: Expr, velocities: Sequence[sympy.Symbol]) -> int:
    """Total degree in the velocity symbols (the denominator must be velocity-free)."""
    num, den = sympy.fraction(sympy.cancel(sympy.together(e)))
    if den.free_symbols.intersection(velocities):
        raise ValueError(f"Velocities appear in a denominator: {e}")
    if num == 0:
        return 0
    return sympy.Poly(num, *velocities).total_degree()


# --- printing ---


class _CanonicalPrinter(StrPrinter):
    def _print_ImaginaryUnit(self, expr: Expr) -> str:
        return "i"

    def _print_Pow(self, expr: Expr, rational: bool = False) -> str:
        base, exp = expr.as_base_exp()
        if exp.is_Integer and exp > 0:
            return f"{self.parenthesize(base, 1000)}^{exp}"
        return super()._print_Pow(expr, rational)


_printer = _CanonicalPrinter({"order": "none"})


def _format_coeff(c: Expr) -> tuple[int, str]:
    """Split a Gaussian-integer coefficient into (sign, magnitude text)."""
    re_part, im_part = c.as_real_imag()
    if im_part == 0:
        return (-1 if re_part < 0 else 1), str(abs(re_part))
    if re_part == 0:
        mag = abs(im_part)
        return (-1 if im_part < 0 else 1), "i" if mag == 1 else f"{mag}*i"
    return 1, f"({re_part}{'+' if im_part > 0 else '-'}{abs(im_part)}*i)"


def format_poly(poly: sympy.Poly) -> str:
    """Terms in lexicographic generator order, powers written with ``^``."""
    if poly.is_zero:
        return "0"
    parts: list[str] = []
    for monom, coeff in poly.terms():
        sign, mag = _format_coeff(coeff)
        factors = [
            gen.name if power == 1 else f"{gen.name}^{power}"
            for gen, power in zip(poly.gens, monom)
            if power
        ]
        if mag == "1" and factors:
            body = "*".join(factors)
        else:
            body = "*".join([mag, *factors])
        if not parts:
            parts.append(f"-{body}" if sign < 0 else body)
        else:
            parts.append(f" - {body}" if sign < 0 else f" + {body}")
    return "".join(parts)


def to_text(e: Expr, variables: VariableSet | None = None) -> str:
    """Print the canonical form as ``(numerator)/(denominator)``."""
    e = sympy.sympify(e)
    if not is_rational(e):
        return _printer.doprint(e)
    num, den = canonical_pair(e, variables)
    return f"({format_poly(num)})/({format_poly(den)})"
