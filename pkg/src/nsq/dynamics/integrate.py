"""Adaptive Runge–Kutta integration of the goldfish equations with collision monitoring."""

from __future__ import annotations

import logging
from collections.abc import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from nsq.algebra.expr import compile_numeric
from nsq.dynamics.trajectory import CollisionEvent, InitialData, Trajectory, min_gap
from nsq.errors import CollisionError, NsqError
from nsq.symmetry.systems import ODESystem, goldfish_system

logger = logging.getLogger(__name__)

NEAR_COLLISION_GAP = 1e-4
COLLISION_GAP = 1e-8
DEFAULT_TOL = 1e-9


def _closest_pair(positions: np.ndarray) -> tuple[int, int]:
    order = np.argsort(positions)
    k = int(np.argmin(np.diff(positions[order])))
    i, j = sorted((int(order[k]) + 1, int(order[k + 1]) + 1))
    return i, j


def _rhs(system: ODESystem):
    variables = system.variables
    accelerations = compile_numeric(list(system.rhs), [variables.t, *variables.x, *variables.v])
    n = system.n

    def fun(t: float, state: np.ndarray) -> np.ndarray:
        acc = np.asarray(accelerations(t, *state), dtype=float).reshape(n)
        return np.concatenate([state[n:], acc])

    return fun


def _samples(solution, n: int, with_events: bool) -> tuple[np.ndarray, np.ndarray]:
    """Sample times and (2N, k) states; event states stand in when no t_eval point was reached."""
    times = np.asarray(solution.t, dtype=float)
    states = np.asarray(solution.y, dtype=float).reshape(2 * n, -1)
    if times.size or not with_events:
        return times, states
    times = np.concatenate([np.asarray(te, dtype=float) for te in solution.t_events])
    if not times.size:
        return times, states
    states = np.concatenate([np.asarray(ye, dtype=float).reshape(-1, 2 * n) for ye in solution.y_events]).T
    order = np.argsort(times)
    return times[order], states[:, order]


def _gap_event(n: int, threshold: float, terminal: bool):
    def event(t: float, state: np.ndarray) -> float:
        return min_gap(state[:n]) - threshold

    event.terminal = terminal
    event.direction = -1
    return event


def integrate_rk(
    init: InitialData,
    t_end: float,
    tol: float = DEFAULT_TOL,
    t_eval: Sequence[float] | None = None,
    system: ODESystem | None = None,
) -> Trajectory:
    """Dormand–Prince 4(5) with rtol = atol = tol.

    Gaps below NEAR_COLLISION_GAP are recorded as events; a gap below
    COLLISION_GAP (or a solver breakdown) raises
    CollisionError carrying the trajectory up to that point.
    """
    if tol <= 0:
        raise ValueError(f"Tolerance must be positive, got {tol}")
    n = init.n
    if t_end == 0:
        return Trajectory([0.0], [init.positions], [init.velocities])
    system = system or goldfish_system(n)
    y0 = np.concatenate([init.positions, init.velocities])
    events = [] if n == 1 else [_gap_event(n, NEAR_COLLISION_GAP, False), _gap_event(n, COLLISION_GAP, True)]

    solution = solve_ivp(
        _rhs(system),
        (0.0, t_end),
        y0,
        method="RK45",
        rtol=tol,
        atol=tol,
        t_eval=None if t_eval is None else np.asarray(t_eval, dtype=float),
        events=events or None,
    )

    recorded: list[CollisionEvent] = []
    if events:
        for t_event, y_event in zip(solution.t_events[0], solution.y_events[0]):
            positions = y_event[:n]
            event = CollisionEvent(float(t_event), _closest_pair(positions), min_gap(positions))
            logger.warning("Near collision at t=%.6g: particles %s, gap %.3e", event.time, event.pair, event.gap)
            recorded.append(event)

    times, states = _samples(solution, n, bool(events))
    trajectory = Trajectory(times, states[:n].T, states[n:].T, events=recorded)
    collided = bool(events) and len(solution.t_events[1]) > 0
    # accelerations only blow up where two particles meet
    if collided or (solution.status == -1 and events):
        last = recorded[-1].time if recorded else float(trajectory.times[-1]) if len(trajectory) else 0.0
        raise CollisionError(f"Particles collide near t={last:.6g}", trajectory=trajectory)
    if solution.status == -1:
        raise NsqError(f"Integration failed: {solution.message}")
    return trajectory
