"""The fifteen Lie point symmetries of the two-body goldfish system, plus JSON import/export."""

from __future__ import annotations

import json
import logging
from pathlib import Path

import sympy
from pydantic import ValidationError

from nsq.algebra.expr import to_text
from nsq.algebra.parser import parse
from nsq.algebra.variables import VariableSet
from nsq.errors import NsqError, SchemaError
from nsq.schemas import CatalogModel, FieldModel
from nsq.symmetry.fields import VectorField, linear_combination

logger = logging.getLogger(__name__)

CATALOG_SIZE = 15

# Catalog members that are Noether symmetries of the two-body Lagrangian on
# their own. Gamma5 and Gamma14 are not; their combination Gamma5 + 3*Gamma14 is.
NOETHER_INDICES = (6, 7, 8, 9, 10, 11, 12)
ROTATION_INDEX = 5


def _two_body() -> VariableSet:
    return VariableSet.standard(2)


def generator_catalog() -> list[VectorField]:
    """Gamma1..Gamma15 in catalog order."""
    variables = _two_body()
    t = variables.t
    x1, x2 = variables.x
    d = x1 - x2
    R = sympy.Rational

    raw: list[tuple[sympy.Expr, tuple[sympy.Expr, sympy.Expr]]] = [
        (t * x1 * x2, (x1**3 * x2 / d, -x1 * x2**3 / d)),
        (x1 * x2, (0, 0)),
        (t * (x1 + x2), (x1**2, x2**2)),
        (x1 + x2, (0, 0)),
        (0, (-(x1**2) * x2 / d, x1 * x2**2 / d)),
        (t, (x1**2 / (2 * d), -(x2**2) / (2 * d))),
        (1, (0, 0)),
        (0, (-t * x1 / d, t * x2 / d)),
        (0, (-x1 / d, x2 / d)),
        (0, (-t / d, t / d)),
        (0, (-1 / d, 1 / d)),
        (t**2, (t * x1**2 / d, -t * x2**2 / d)),
        (0, (-R(1, 3) * x1, -R(1, 3) * x2)),
        (0, (-(2 * x1 + x2) / (3 * d), (x1 + 2 * x2) / (3 * d))),
        (0, (-(x1**2 + 2 * x1 * x2) / (3 * d), (x2**2 + 2 * x1 * x2) / (3 * d))),
    ]
    return [
        VectorField(xi, etas, name=f"Gamma{k}", variables=variables)
        for k, (xi, etas) in enumerate(raw, start=1)
    ]


def catalog_field(catalog: list[VectorField], index: int) -> VectorField:
    """1-based lookup."""
    if not 1 <= index <= len(catalog):
        raise IndexError(f"Catalog index {index} outside 1..{len(catalog)}")
    return catalog[index - 1]


def rotation_field(catalog: list[VectorField] | None = None) -> VectorField:
    """Gamma5 + 3*Gamma14: a rotation plus a translation in the linearizing coordinates."""
    catalog = catalog or generator_catalog()
    return linear_combination(
        [(1, catalog_field(catalog, 5)), (3, catalog_field(catalog, 14))],
        name="Gamma5+3*Gamma14",
    )


def noether_fields(catalog: list[VectorField] | None = None) -> list[VectorField]:
    """The eight Noether point symmetries, in the order paired with Omega1..Omega8."""
    catalog = catalog or generator_catalog()
    return [rotation_field(catalog), *(catalog_field(catalog, k) for k in NOETHER_INDICES)]


def noether_basis(catalog: list[VectorField] | None = None) -> list[VectorField]:
    """The catalog with Gamma5 replaced by Gamma5 + 3*Gamma14.

    Still a basis of the fifteen-dimensional algebra; in this basis exactly
    eight members are Noether symmetries and seven are not.
    """
    catalog = catalog or generator_catalog()
    basis = list(catalog)
    basis[ROTATION_INDEX - 1] = rotation_field(catalog)
    return basis


def time_translations(catalog: list[VectorField] | None = None) -> list[VectorField]:
    """{Gamma7, Gamma4, Gamma2} = {∂t, y1∂t, y2∂t}: pairwise commuting, all along ∂t."""
    catalog = catalog or generator_catalog()
    return [catalog_field(catalog, 7), catalog_field(catalog, 4), catalog_field(catalog, 2)]


def printed_dilation(catalog: list[VectorField] | None = None) -> VectorField:
    """Gamma6 − Gamma3 − ½ Gamma15, the combination listed alongside the time translations.

    Its time coefficient is t(1 − x1 − x2), so it is not t∂t and does not
    commute with Gamma7; see ``time_dilation`` for the combination that is t∂t.
    """
    catalog = catalog or generator_catalog()
    return linear_combination(
        [
            (1, catalog_field(catalog, 6)),
            (-1, catalog_field(catalog, 3)),
            (sympy.Rational(-1, 2), catalog_field(catalog, 15)),
        ],
        name="Gamma6-Gamma3-1/2*Gamma15",
    )


def time_dilation(catalog: list[VectorField] | None = None) -> VectorField:
    """Gamma6 + Gamma13 + ½ Gamma15 = t∂t."""
    catalog = catalog or generator_catalog()
    return linear_combination(
        [
            (1, catalog_field(catalog, 6)),
            (1, catalog_field(catalog, 13)),
            (sympy.Rational(1, 2), catalog_field(catalog, 15)),
        ],
        name="Gamma6+Gamma13+1/2*Gamma15",
    )


def perturbed(v: VectorField, k: int = 0) -> VectorField:
    """``v`` with its k-th space coefficient multiplied by (1 + x1); used as a negative control."""
    x1 = v.variables.x[0]
    etas = list(v.etas)
    etas[k] = etas[k] * (1 + x1)
    return VectorField(v.xi, tuple(etas), name=f"{v.name}~", variables=v.variables)


def abelian_subalgebra(catalog: list[VectorField] | None = None) -> list[VectorField]:
    """The four generators listed for the linearizing subalgebra, as printed."""
    catalog = catalog or generator_catalog()
    return [*time_translations(catalog), printed_dilation(catalog)]


# --- JSON ---


def field_to_model(v: VectorField) -> FieldModel:
    return FieldModel(
        name=v.name,
        xi=to_text(v.xi, v.variables),
        etas=[to_text(e, v.variables) for e in v.etas],
    )


def field_from_model(model: FieldModel, variables: VariableSet | None = None) -> VectorField:
    variables = variables or VariableSet.standard(len(model.etas))
    if variables.n != len(model.etas):
        raise SchemaError(f"Field {model.name!r} has {len(model.etas)} etas, expected {variables.n}")
    return VectorField(
        parse(model.xi, variables),
        tuple(parse(e, variables) for e in model.etas),
        name=model.name,
        variables=variables,
    )


def parse_field(text: str, variables: VariableSet | None = None) -> VectorField:
    """Build a field from its JSON text ``{"xi": ..., "etas": [...]}``."""
    try:
        model = FieldModel.model_validate_json(text)
    except ValidationError as e:
        raise SchemaError(f"Malformed field JSON: {e}") from e
    try:
        return field_from_model(model, variables)
    except NsqError as e:
        raise SchemaError(f"Malformed field expression: {e}") from e


def catalog_to_json(catalog: list[VectorField]) -> str:
    model = CatalogModel([field_to_model(v) for v in catalog])
    return model.model_dump_json(indent=2)


def load_catalog(path: str | Path) -> list[VectorField]:
    """Read and validate a catalog file written by ``catalog_to_json``."""
    path = Path(path)
    try:
        model = CatalogModel.model_validate_json(path.read_text())
    except OSError as e:
        raise SchemaError(f"Cannot read catalog {path}: {e}") from e
    except ValidationError as e:
        raise SchemaError(f"Malformed catalog {path}: {e}") from e
    if len(model.root) != CATALOG_SIZE:
        raise SchemaError(f"Catalog {path} has {len(model.root)} fields, expected {CATALOG_SIZE}")
    variables = _two_body()
    try:
        fields = [field_from_model(m, variables) for m in model.root]
    except NsqError as e:
        raise SchemaError(f"Malformed catalog {path}: {e}") from e
    logger.info("Loaded %d generators from %s", len(fields), path)
    return fields


def write_catalog(path: str | Path, catalog: list[VectorField]) -> None:
    Path(path).write_text(catalog_to_json(catalog))


def dump_catalog(catalog: list[VectorField]) -> list[dict]:
    return json.loads(catalog_to_json(catalog))
