"""symmetries: verify the generator catalog or user fields against the goldfish system."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from pathlib import Path

from nsq.algebra.expr import to_text
from nsq.algebra.variables import VariableSet
from nsq.errors import UsageError
from nsq.symmetry.catalog import generator_catalog, load_catalog, parse_field, write_catalog
from nsq.symmetry.fields import SymmetryReport, VectorField, verify_point_symmetry
from nsq.symmetry.systems import ODESystem, goldfish_system
from nsq.tools.report import Check, RunReport

logger = logging.getLogger(__name__)


def symmetry_check(v: VectorField, system: ODESystem) -> Check:
    report: SymmetryReport = verify_point_symmetry(v, system)
    residuals = [to_text(r, system.variables) for r in report.residuals]
    detail = report.detail
    if not report.passed and not detail:
        detail = "nonzero residual: " + "; ".join(r for r in residuals if r != "(0)/(1)")
    return Check(v.name, report.status, detail, {"residuals": residuals})


def run_symmetries(
    n: int = 2,
    catalog: bool = False,
    fields: Sequence[str] = (),
    catalog_path: str | Path | None = None,
    export: str | Path | None = None,
) -> RunReport:
    report = RunReport("symmetries")
    if catalog == bool(fields):
        raise UsageError("Pass exactly one of --catalog or --field")
    if catalog and n != 2:
        raise UsageError("The generator catalog is for N=2 only")

    system = goldfish_system(n)
    if catalog:
        generators = load_catalog(catalog_path) if catalog_path else generator_catalog()
    else:
        variables = VariableSet.standard(n)
        generators = [parse_field(text, variables) for text in fields]
        generators = [v if v.name else v.renamed(f"field{k}") for k, v in enumerate(generators, start=1)]

    for v in generators:
        report.add(symmetry_check(v, system))
    if export:
        write_catalog(export, generators)
        logger.info("Wrote %d fields to %s", len(generators), export)
    logger.info("Verified %d fields on N=%d", len(generators), n)
    return report.finish()
