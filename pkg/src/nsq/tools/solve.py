"""solve: goldfish positions from the algebraic formula, the RK integrator, or both."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np

from nsq.dynamics.algebraic import algebraic_trajectory, solve_algebraic
from nsq.dynamics.integrate import DEFAULT_TOL, integrate_rk
from nsq.dynamics.trajectory import InitialData, Trajectory
from nsq.errors import BranchError, CollisionError, TrackingError, UsageError
from nsq.tools.report import Check, RunReport

logger = logging.getLogger(__name__)

METHODS = ("algebraic", "rk", "both")
AGREEMENT = 1e-6


def parse_grid(text: str) -> list[float]:
    """``start:stop:count`` → evenly spaced times, endpoints included."""
    try:
        start, stop, count = text.split(":")
        times = np.linspace(float(start), float(stop), int(count))
    except ValueError as e:
        raise UsageError(f"--grid must look like start:stop:count, got {text!r}") from e
    if len(times) < 1:
        raise UsageError("--grid needs at least one point")
    return [float(t) for t in times]


def run_solve(
    init_path: str | Path,
    t: float | None = None,
    grid: str | None = None,
    method: str = "both",
    tol: float = DEFAULT_TOL,
    out: str | Path | None = None,
) -> RunReport:
    if method not in METHODS:
        raise UsageError(f"--method must be one of {', '.join(METHODS)}")
    if t is not None and grid is not None:
        raise UsageError("Pass at most one of --t or --grid")
    times = parse_grid(grid) if grid else [1.0 if t is None else float(t)]
    if any(s < 0 for s in times) or len(set(times)) != len(times):
        raise UsageError("Times must be non-negative and distinct")
    times = sorted(times)

    init = InitialData.load(init_path)
    report = RunReport("solve")
    report.payload["times"] = times

    algebraic: np.ndarray | None = None
    if method in ("algebraic", "both"):
        try:
            algebraic = np.array([solve_algebraic(init, s) for s in times])
            report.payload["algebraic"] = algebraic.tolist()
            report.add(Check.of("algebraic", True, f"{len(times)} times"))
        except (BranchError, TrackingError) as e:
            report.add(Check.of("algebraic", False, str(e)))

    trajectory: Trajectory | None = None
    if method in ("rk", "both"):
        try:
            trajectory = integrate_rk(init, times[-1], tol=tol, t_eval=times)
            report.payload["rk"] = trajectory.positions.tolist()
            detail = f"{len(trajectory.events)} near-collision events" if trajectory.events else "no collisions"
            report.add(Check.of("rk", True, detail))
        except CollisionError as e:
            events = [ev.to_dict() for ev in e.trajectory.events] if e.trajectory else []
            report.add(Check.of("rk", False, str(e), events=events))
            trajectory = e.trajectory

    if method == "both" and algebraic is not None and trajectory is not None and len(trajectory) == len(times):
        discrepancy = float(np.max(np.abs(algebraic - trajectory.positions)))
        report.add(
            Check.of(
                "cross-check",
                discrepancy < AGREEMENT,
                f"max |algebraic - rk| = {discrepancy:.3e}",
                max_discrepancy=discrepancy,
            )
        )

    if out:
        if trajectory is None and algebraic is not None:
            trajectory = algebraic_trajectory(init, np.array(times))
        if trajectory is not None:
            trajectory.write(out)
            logger.info("Wrote trajectory to %s", out)
    return report.finish()
