"""quantize: build (or load) the Schrödinger equation, check it symbolically and against plane waves."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import numpy as np
import sympy

from nsq.algebra.expr import equal, to_text
from nsq.algebra.parser import parse
from nsq.algebra.variables import E0, VariableSet
from nsq.errors import UsageError
from nsq.quantize.numeric import pde_residual, plane_wave, random_wave_vector, sample_points
from nsq.quantize.schrodinger import (
    LinearEvolutionPDE,
    load_pde,
    omega_catalog,
    pde_to_json,
    quantize,
    scaling_symmetry,
    verify_pde_symmetry,
    write_pde,
)
from nsq.quantize.transform import elementary_symmetric_map
from nsq.symmetry.fields import SymmetryReport
from nsq.tools.report import Check, RunReport

logger = logging.getLogger(__name__)

WAVES = 4
EXACT_RESIDUAL = 1e-10
GENERAL_RESIDUAL = 1e-8


def parse_e0(text: str) -> sympy.Expr:
    """``E0`` keeps the constant symbolic; otherwise an exact number such as 1, 3/2 or 0.5."""
    if text == "E0":
        return E0
    try:
        return sympy.Rational(text)
    except (TypeError, ValueError) as e:
        raise UsageError(f"--e0 must be E0 or a number, got {text!r}") from e


def two_body_reference() -> dict[str, sympy.Expr]:
    """Closed-form coefficients of the two-body equation."""
    variables = VariableSet.standard(2)
    x1, x2 = variables.x
    f11 = parse("(x1^2 + 1)/(x1 - x2)^2", variables)
    f22 = parse("(x2^2 + 1)/(x1 - x2)^2", variables)
    return {
        "f11": f11,
        "f12": parse("-(x1*x2 + 1)/(x1 - x2)^2", variables),
        "f22": f22,
        "h1": sympy.diff(f11, x1),
        "h2": sympy.diff(f22, x2),
        "h0": -(E0**2),
    }


def coefficient_check(pde: LinearEvolutionPDE) -> Check:
    reference = two_body_reference()
    actual = {
        "f11": pde.f[0][0],
        "f12": pde.f[0][1],
        "f22": pde.f[1][1],
        "h1": pde.h[0],
        "h2": pde.h[1],
        "h0": pde.h0,
    }
    mismatched = [name for name in reference if not equal(actual[name], reference[name], pde.variables)]
    detail = "matches closed-form coefficients" if not mismatched else f"differs in {', '.join(mismatched)}"
    return Check.of("two-body-coefficients", not mismatched, detail)


def pde_symmetry_check(report: SymmetryReport, pde: LinearEvolutionPDE) -> Check:
    residuals = [to_text(r, pde.variables) for r in report.residuals]
    return Check(report.name, report.status, report.detail, {"residuals": residuals})


def residual_check(
    pde: LinearEvolutionPDE,
    rng: np.random.Generator,
    count: int,
    e0: float,
    threshold: float,
) -> Check:
    transform = elementary_symmetric_map(pde.n)
    points = sample_points(pde.n, count, rng)
    worst = max(
        pde_residual(pde, plane_wave(random_wave_vector(pde.n, rng), e0, transform), points, e0)
        for _ in range(WAVES)
    )
    return Check.of(
        "plane-wave-residual",
        worst < threshold,
        f"max |residual| = {worst:.3e} over {count} points (threshold {threshold:g})",
        max_residual=worst,
    )


def run_quantize(
    n: int = 2,
    e0: str = "E0",
    verify_symmetries: bool = False,
    out: str | Path | None = None,
    source: str | Path | None = None,
    seed: int = 0,
    points: int = 20,
    numeric_e0: float = 1.0,
) -> RunReport:
    report = RunReport("quantize")
    e0_value = parse_e0(e0)
    if source:
        pde = load_pde(source)
    else:
        if n < 1:
            raise UsageError("--n must be at least 1")
        pde = quantize(n, e0_value)
    if verify_symmetries and pde.n != 2:
        raise UsageError("--verify-symmetries is only available for N=2")

    report.payload["pde"] = json.loads(pde_to_json(pde))
    if out:
        write_pde(out, pde)
        logger.info("Wrote equation to %s", out)

    if pde.n == 2 and e0_value == E0:
        report.add(coefficient_check(pde))
    if verify_symmetries:
        for s in [*omega_catalog(), scaling_symmetry(2)]:
            if e0_value != E0:
                s = s.with_mu(s.mu.subs(E0, e0_value))
            report.add(pde_symmetry_check(verify_pde_symmetry(s, pde), pde))

    if not pde.h0.free_symbols and (-pde.h0).is_nonnegative:
        numeric_e0 = float(sympy.sqrt(-pde.h0))
    threshold = EXACT_RESIDUAL if pde.n <= 2 else GENERAL_RESIDUAL
    report.add(residual_check(pde, np.random.default_rng(seed), points, numeric_e0, threshold))
    return report.finish()
