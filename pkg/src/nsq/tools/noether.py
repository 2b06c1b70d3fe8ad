"""noether: the Noether condition, gauges and first integrals over the two-body catalog."""

from __future__ import annotations

import logging
from pathlib import Path

from nsq.algebra.expr import to_text
from nsq.errors import UsageError
from nsq.symmetry.catalog import CATALOG_SIZE, catalog_field, generator_catalog, load_catalog, noether_basis
from nsq.symmetry.fields import FAIL, PASS, VectorField
from nsq.symmetry.systems import ODESystem
from nsq.tools.report import Check, RunReport
from nsq.variational.lagrangian import Lagrangian, euler_lagrange, goldfish_lagrangian
from nsq.variational.noether import first_integral, noether_condition

logger = logging.getLogger(__name__)

EXPECTED_NOETHER = 8


def noether_record(
    index: int,
    basis: list[VectorField],
    lagrangian: Lagrangian,
    system: ODESystem | None = None,
) -> dict:
    v = catalog_field(basis, index)
    result = noether_condition(v, lagrangian)
    variables = lagrangian.variables
    record = {"index": index, "name": v.name, "status": result.status, "detail": result.detail}
    if result.is_noether:
        integral = first_integral(v, lagrangian, result.gauge, system)
        record["gauge"] = to_text(result.gauge, variables)
        record["first_integral"] = to_text(integral, variables)
    elif result.status == FAIL:
        record["obstruction"] = to_text(result.obstruction, variables)
    return record


def run_noether(
    all_generators: bool = False,
    index: int | None = None,
    catalog_path: str | Path | None = None,
) -> RunReport:
    """Check every basis member (``all_generators``) or a single index.

    The basis is the catalog with Gamma5 replaced by Gamma5 + 3*Gamma14.
    """
    if all_generators == (index is not None):
        raise UsageError("Pass exactly one of --all or --index")
    if index is not None and not 1 <= index <= CATALOG_SIZE:
        raise UsageError(f"--index must be in 1..{CATALOG_SIZE}")

    report = RunReport("noether")
    catalog = load_catalog(catalog_path) if catalog_path else generator_catalog()
    basis = noether_basis(catalog)
    lagrangian = goldfish_lagrangian()
    system = euler_lagrange(lagrangian)

    indices = range(1, CATALOG_SIZE + 1) if all_generators else [index]
    records = [noether_record(k, basis, lagrangian, system) for k in indices]
    report.payload["generators"] = records

    if all_generators:
        passing = [r["name"] for r in records if r["status"] == PASS]
        failing = [r["name"] for r in records if r["status"] != PASS]
        report.add(
            Check.of(
                "noether-partition",
                len(passing) == EXPECTED_NOETHER and len(failing) == CATALOG_SIZE - EXPECTED_NOETHER,
                f"{len(passing)} Noether, {len(failing)} not",
                noether=passing,
                other=failing,
            )
        )
    else:
        record = records[0]
        detail = record.get("first_integral") or record.get("obstruction") or record["detail"]
        report.add(Check(record["name"], record["status"], detail, record))
    logger.info("Noether condition checked for %d generators", len(records))
    return report.finish()
