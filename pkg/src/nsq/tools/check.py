"""check: the full symbolic and numeric self-test of the pipeline."""

from __future__ import annotations

import asyncio
import itertools
import logging
from collections.abc import Callable
from pathlib import Path

import numpy as np
import sympy

from nsq.algebra.expr import is_zero, to_text
from nsq.algebra.parser import parse
from nsq.dynamics.algebraic import approaching_initial_data
from nsq.dynamics.batch import cross_check_batch
from nsq.dynamics.integrate import integrate_rk
from nsq.dynamics.invariants import monitor_invariants
from nsq.dynamics.trajectory import random_initial_data
from nsq.errors import NsqError, SchemaError
from nsq.quantize.numeric import (
    finite_difference_derivatives,
    pde_residual,
    plane_wave,
    random_wave_vector,
    sample_points,
)
from nsq.quantize.schrodinger import (
    matches_free,
    omega_catalog,
    quantize,
    reduce_to_free,
    scaling_symmetry,
    verify_pde_symmetry,
)
from nsq.quantize.transform import elementary_symmetric_map, push_ode, pushforward_field
from nsq.symmetry.catalog import (
    generator_catalog,
    load_catalog,
    noether_basis,
    perturbed,
    printed_dilation,
    time_dilation,
    time_translations,
)
from nsq.symmetry.fields import PASS, VectorField, commutator, verify_point_symmetry
from nsq.symmetry.systems import goldfish_system
from nsq.tools.noether import EXPECTED_NOETHER, noether_record
from nsq.tools.quantize import coefficient_check
from nsq.tools.report import Check, RunReport
from nsq.variational.lagrangian import (
    euler_lagrange,
    goldfish_lagrangian,
    hamilton_system,
    legendre_transform,
)
from nsq.variational.noether import first_integral, noether_condition

logger = logging.getLogger(__name__)

# (catalog index, eta index) pairs perturbed by a factor (1 + x1)
NEGATIVE_CONTROLS = ((1, 0), (8, 0), (11, 0), (13, 0), (15, 0))
RESIDUAL_POINTS = 20
FD_AGREEMENT = 1e-6
DYNAMICS_SAMPLES = 20
DRIFT_LIMIT = 1e-6


def _linearizes(n: int) -> bool:
    pushed = push_ode(goldfish_system(n), elementary_symmetric_map(n))
    return all(is_zero(r, pushed.variables) for r in pushed.rhs)


def check_catalog(catalog: list[VectorField]) -> Check:
    system = goldfish_system(2)
    failing = [v.name for v in catalog if not verify_point_symmetry(v, system).passed]
    controls = [perturbed(catalog[i - 1], k) for i, k in NEGATIVE_CONTROLS]
    accepted = [v.name for v in controls if verify_point_symmetry(v, system).passed]
    detail = f"{len(catalog) - len(failing)}/{len(catalog)} verified, {len(controls) - len(accepted)}/{len(controls)} controls rejected"
    return Check.of("catalog-symmetries", not failing and not accepted, detail, failing=failing, accepted_controls=accepted)


def check_noether_partition(catalog: list[VectorField]) -> Check:
    basis = noether_basis(catalog)
    lagrangian = goldfish_lagrangian()
    system = euler_lagrange(lagrangian)
    passing = [noether_record(k, basis, lagrangian, system)["status"] == PASS for k in range(1, len(basis) + 1)]
    count = sum(passing)
    return Check.of(
        "noether-partition",
        count == EXPECTED_NOETHER,
        f"{count} Noether, {len(basis) - count} not (Gamma5 taken as Gamma5 + 3*Gamma14)",
    )


def check_abelian(catalog: list[VectorField]) -> Check:
    translations = time_translations(catalog)
    brackets = {
        f"[{v.name},{w.name}]": commutator(v, w) for v, w in itertools.combinations(translations, 2)
    }
    nonzero = [name for name, b in brackets.items() if not b.is_zero_field()]

    transform = elementary_symmetric_map(2)
    dilation = pushforward_field(time_dilation(catalog), transform)
    t = transform.target.t
    is_t_dt = is_zero(dilation.xi - t) and all(is_zero(e) for e in dilation.etas)

    listed = printed_dilation(catalog)
    listed_brackets = [
        v.name for v in translations if not commutator(v, listed).is_zero_field()
    ]
    detail = (
        f"time translations commute pairwise; {time_dilation(catalog).name} = t*d/dt; "
        f"listed {listed.name} has xi = {to_text(listed.xi, listed.variables)} "
        f"and fails to commute with {', '.join(listed_brackets) or 'none'}"
    )
    return Check.of("abelian-subalgebra", not nonzero and is_t_dt, detail, nonzero=nonzero)


def check_linearization(sizes: tuple[int, ...]) -> Check:
    failed = [n for n in sizes if not _linearizes(n)]
    return Check.of("linearization", not failed, f"ÿ = 0 for N in {list(sizes)}", failed=failed)


def check_coefficients() -> Check:
    check = coefficient_check(quantize(2))
    check.name = "quantization-coefficients"
    return check


def check_pde_symmetries() -> Check:
    pde = quantize(2)
    symmetries = [*omega_catalog(), scaling_symmetry(2)]
    failing = [s.name for s in symmetries if not verify_pde_symmetry(s, pde).passed]
    control = omega_catalog()[3]
    x1, x2 = pde.variables.x
    control = control.with_mu(-sympy.I * (x1 + 2 * x2))
    control_rejected = not verify_pde_symmetry(control, pde).passed
    detail = f"{len(symmetries) - len(failing)}/{len(symmetries)} verified, perturbed Omega4 rejected: {control_rejected}"
    return Check.of("pde-symmetries", not failing and control_rejected, detail, failing=failing)


def check_reduction(sizes: tuple[int, ...]) -> Check:
    failed = [n for n in sizes if not matches_free(reduce_to_free(quantize(n), elementary_symmetric_map(n)), n)]
    return Check.of("reduction-identity", not failed, f"free equation recovered for N in {list(sizes)}", failed=failed)


def check_residuals(sizes: tuple[int, ...], rng: np.random.Generator) -> Check:
    worst = 0.0
    worst_fd = 0.0
    for n in sizes:
        pde = quantize(n, 1)
        transform = elementary_symmetric_map(n)
        points = sample_points(n, RESIDUAL_POINTS, rng)
        wave = plane_wave(random_wave_vector(n, rng), 1.0, transform)
        worst = max(worst, pde_residual(pde, wave, points, 1.0))
        for t, x in points:
            analytic = wave.derivatives(t, x)
            numeric = finite_difference_derivatives(wave, t, x)
            worst_fd = max(worst_fd, *(float(np.max(np.abs(np.subtract(a, b)))) for a, b in zip(analytic, numeric)))
    ok = worst < 1e-8 and worst_fd < FD_AGREEMENT
    detail = f"max residual {worst:.3e}, finite-difference disagreement {worst_fd:.3e}"
    return Check.of("general-n-residuals", ok, detail, max_residual=worst, max_fd_disagreement=worst_fd)


def check_dynamics(rng: np.random.Generator, tol: float, concurrency: int) -> Check:
    # half receding, half with neighbours closing in but not colliding before t = 1
    inits = [random_initial_data(2 + (k % 2), rng) for k in range(DYNAMICS_SAMPLES // 2)]
    inits += [approaching_initial_data(2 + (k % 2), rng) for k in range(DYNAMICS_SAMPLES - len(inits))]
    times = np.linspace(0.1, 1.0, 10).tolist()
    summary = asyncio.run(cross_check_batch(inits, times, tol=tol, concurrency=concurrency))
    ok = summary["failed"] == 0 and summary["max_discrepancy"] < 1e-6
    detail = f"{summary['successful']}/{summary['total_items']} ran, max discrepancy {summary['max_discrepancy']:.3e}"
    return Check.of("dynamics-cross-check", ok, detail, errors=summary["errors"])


def check_conservation(catalog: list[VectorField], rng: np.random.Generator, tol: float) -> Check:
    lagrangian = goldfish_lagrangian()
    system = euler_lagrange(lagrangian)
    integrals = {}
    for v in noether_basis(catalog):
        result = noether_condition(v, lagrangian)
        if result.is_noether:
            integrals[v.name] = first_integral(v, lagrangian, result.gauge, system)
    trajectories = [
        integrate_rk(random_initial_data(2, rng), 1.0, tol=tol),
        integrate_rk(approaching_initial_data(2, rng), 1.0, tol=tol),
    ]
    reports = [monitor_invariants(trajectory, integrals) for trajectory in trajectories]
    report = max(reports, key=lambda r: r.max_drift)
    energy = integrals.get(catalog[6].name)
    energy_is_lagrangian = energy is not None and is_zero(energy + lagrangian.L, lagrangian.variables)
    ok = len(integrals) == EXPECTED_NOETHER and report.max_drift < DRIFT_LIMIT and energy_is_lagrangian
    detail = f"{len(integrals)} integrals on {len(trajectories)} trajectories, max drift {report.max_drift:.3e}, Gamma7 integral = -L: {energy_is_lagrangian}"
    return Check.of("conservation", ok, detail, **report.to_dict())


def check_hamiltonian() -> Check:
    lagrangian = goldfish_lagrangian()
    H = legendre_transform(lagrangian)
    variables = lagrangian.variables.with_momenta()
    reference = parse("((p1*x1 - p2*x2)^2 + (p1 - p2)^2)/(2*(x1 - x2)^2)", variables)
    same_h = is_zero(H - reference, variables)
    same_system = hamilton_system(H, lagrangian).same_as(goldfish_system(2))
    return Check.of(
        "hamiltonian",
        same_h and same_system,
        f"H matches reference form: {same_h}; Hamilton's equations give the goldfish system: {same_system}",
        H=to_text(H, variables),
    )


def check_jacobians(sizes: tuple[int, ...]) -> Check:
    failed = [n for n in sizes if not elementary_symmetric_map(n).check_inverse()]
    return Check.of("jacobian-inverse", not failed, f"J*B = I for N in {list(sizes)}", failed=failed)


def _guarded(name: str, fn: Callable[[], Check]) -> Check:
    try:
        return fn()
    except (NsqError, ValueError, ArithmeticError) as e:
        logger.exception("Check %s raised", name)
        return Check.of(name, False, f"{type(e).__name__}: {e}")


def run_check(
    full: bool = False,
    catalog_path: str | Path | None = None,
    seed: int = 0,
    tol: float = 1e-9,
    concurrency: int = 4,
) -> RunReport:
    report = RunReport("check")
    try:
        catalog = load_catalog(catalog_path) if catalog_path else generator_catalog()
    except SchemaError as e:
        report.add(Check.of("catalog-load", False, str(e)))
        return report.finish()

    rng = np.random.default_rng(seed)
    linear_sizes = (2, 3, 4) if full else (2, 3)
    plan: list[tuple[str, Callable[[], Check]]] = [
        ("catalog-symmetries", lambda: check_catalog(catalog)),
        ("noether-partition", lambda: check_noether_partition(catalog)),
        ("abelian-subalgebra", lambda: check_abelian(catalog)),
        ("linearization", lambda: check_linearization(linear_sizes)),
        ("quantization-coefficients", check_coefficients),
        ("pde-symmetries", check_pde_symmetries),
        ("reduction-identity", lambda: check_reduction((2, 3, 4) if full else (2,))),
        ("general-n-residuals", lambda: check_residuals((3, 4), rng)),
        ("dynamics-cross-check", lambda: check_dynamics(rng, tol, concurrency)),
        ("conservation", lambda: check_conservation(catalog, rng, tol)),
        ("hamiltonian", check_hamiltonian),
    ]
    if full:
        plan.append(("jacobian-inverse", lambda: check_jacobians((1, 2, 3, 4))))

    for name, fn in plan:
        check = report.add(_guarded(name, fn))
        logger.info("%s: %s", name, check.status)
    return report.finish()
