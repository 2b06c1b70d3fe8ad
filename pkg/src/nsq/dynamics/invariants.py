"""Drift of conserved quantities along sampled trajectories."""

from __future__ import annotations

import logging
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field

import numpy as np
import sympy

from nsq.algebra.expr import SINGULAR_TOL, Expr, compile_numeric
from nsq.algebra.variables import VariableSet
from nsq.dynamics.trajectory import Trajectory

logger = logging.getLogger(__name__)


@dataclass
class IntegralDrift:
    name: str
    initial: float
    max_drift: float
    skipped: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "initial": self.initial,
            "max_drift": self.max_drift,
            "skipped_samples": self.skipped,
        }


@dataclass
class InvariantReport:
    drifts: list[IntegralDrift]

    @property
    def max_drift(self) -> float:
        return max((d.max_drift for d in self.drifts), default=0.0)

    @property
    def flagged(self) -> bool:
        return any(d.skipped for d in self.drifts)

    def to_dict(self) -> dict:
        return {"max_drift": self.max_drift, "integrals": [d.to_dict() for d in self.drifts]}


def _named(integrals: Mapping[str, Expr] | Sequence[Expr]) -> dict[str, Expr]:
    if isinstance(integrals, Mapping):
        return dict(integrals)
    return {f"I{k}": e for k, e in enumerate(integrals, start=1)}


def monitor_invariants(
    traj: Trajectory,
    integrals: Mapping[str, Expr] | Sequence[Expr],
    variables: VariableSet | None = None,
) -> InvariantReport:
    """Evaluate each integral along ``traj`` and report max |I(t) − I(0)|."""
    variables = variables or VariableSet.standard(traj.n)
    symbols = [variables.t, *variables.x, *variables.v]
    columns = np.column_stack([traj.times, traj.positions, traj.velocities])

    drifts = []
    for name, expr in _named(integrals).items():
        expr = sympy.sympify(expr)
        _, den = sympy.fraction(sympy.together(expr))
        value_fn = compile_numeric(expr, symbols)
        den_fn = compile_numeric(den, symbols)

        values: list[complex] = []
        skipped: list[int] = []
        for index, row in enumerate(columns):
            if abs(complex(den_fn(*row))) < SINGULAR_TOL:
                skipped.append(index)
                continue
            value = complex(value_fn(*row))
            if not np.isfinite(value):
                skipped.append(index)
                continue
            values.append(value)
        if skipped:
            logger.warning("%s: skipped %d singular samples", name, len(skipped))
        if not values:
            drifts.append(IntegralDrift(name, float("nan"), float("nan"), skipped))
            continue
        initial = values[0]
        drift = max(abs(v - initial) for v in values)
        drifts.append(IntegralDrift(name, initial.real, float(drift), skipped))
    return InvariantReport(drifts)
