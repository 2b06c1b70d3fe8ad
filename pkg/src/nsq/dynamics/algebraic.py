"""Closed-form goldfish positions: roots of Π(x − x_m(0)) − t Σ ẋ_m(0) Π_{l≠m}(x − x_l(0)).

Roots are assigned to particles by continuity from t → 0, stepping through a
geometric time ladder and matching neighbouring root sets by minimal total
displacement.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import linear_sum_assignment

from nsq.dynamics.trajectory import InitialData, Trajectory, min_gap
from nsq.errors import BranchError, TrackingError

logger = logging.getLogger(__name__)

IMAG_TOL = 1e-9
NEWTON_TOL = 1e-12
NEWTON_STEPS = 8
LADDER_START = 1e-3
LADDER_RATIO = 2.0
MAX_HALVINGS = 12
VELOCITY_STEP = 1e-5
SCREEN_POINTS = 64
SCREEN_MARGIN = 1.5
SCREEN_GAP = 0.05
MAX_DRAWS = 1000


def cleared_polynomial(init: InitialData, t: float) -> np.ndarray:
    """Coefficients, lowest degree first, of the degree-N polynomial whose roots are x_n(t)."""
    x0 = np.asarray(init.positions)
    v0 = np.asarray(init.velocities)
    coeffs = P.polyfromroots(x0)
    for m in range(init.n):
        others = np.delete(x0, m)
        coeffs = P.polysub(coeffs, t * v0[m] * P.polyfromroots(others))
    return coeffs


def _polish(coeffs: np.ndarray, roots: np.ndarray) -> np.ndarray:
    derivative = P.polyder(coeffs)
    roots = roots.copy()
    for _ in range(NEWTON_STEPS):
        values = P.polyval(roots, coeffs)
        slopes = P.polyval(roots, derivative)
        safe = np.abs(slopes) > 0
        step = np.zeros_like(roots)
        step[safe] = values[safe] / slopes[safe]
        roots = roots - step
        if np.max(np.abs(step)) <= NEWTON_TOL * max(1.0, np.max(np.abs(roots))):
            break
    return roots


def polynomial_roots(init: InitialData, t: float) -> np.ndarray:
    """Real roots (unordered) at time t; complex roots mean the particles have collided."""
    coeffs = cleared_polynomial(init, t)
    roots = _polish(coeffs, P.polyroots(coeffs).astype(complex))
    if np.max(np.abs(roots.imag)) > IMAG_TOL:
        raise BranchError(f"Complex roots at t={t}: {roots}")
    return np.sort(roots.real)


def is_collision_free(init: InitialData, horizon: float, gap: float = SCREEN_GAP) -> bool:
    """Real roots at least ``gap`` apart on a grid reaching SCREEN_MARGIN * horizon."""
    for t in np.linspace(0.0, SCREEN_MARGIN * horizon, SCREEN_POINTS)[1:]:
        try:
            roots = polynomial_roots(init, float(t))
        except BranchError:
            return False
        if min_gap(roots) < gap:
            return False
    return True


def approaching_initial_data(
    n: int,
    rng: np.random.Generator,
    horizon: float = 1.0,
    spacing: float = 0.5,
    speed: float = 1.5,
) -> InitialData:
    """Mixed-sign velocities with at least one neighbour pair closing in, collision-free past ``horizon``."""
    if n < 2:
        raise ValueError("Approaching data needs at least two particles")
    for _ in range(MAX_DRAWS):
        gaps = spacing + rng.uniform(0.0, 1.0, size=n)
        positions = np.cumsum(gaps) - gaps.sum() / 2
        velocities = rng.uniform(-speed, speed, size=n)
        if velocities.min() >= 0 or velocities.max() <= 0 or not np.any(velocities[:-1] > velocities[1:]):
            continue
        init = InitialData(tuple(positions), tuple(velocities))
        if is_collision_free(init, horizon):
            return init
    raise ValueError(f"No collision-free approaching data for N={n} within {MAX_DRAWS} draws")


def _match(previous: np.ndarray, roots: np.ndarray) -> np.ndarray | None:
    """Order ``roots`` like ``previous``; None when the assignment is ambiguous."""
    cost = np.abs(previous[:, None] - roots[None, :])
    rows, cols = linear_sum_assignment(cost)
    matched = roots[cols[np.argsort(rows)]]
    if np.max(np.abs(matched - previous)) >= min_gap(previous) / 2:
        return None
    return matched


def _track(init: InitialData, t_prev: float, prev: np.ndarray, t: float, depth: int = 0) -> np.ndarray:
    matched = _match(prev, polynomial_roots(init, t))
    if matched is not None:
        return matched
    if depth >= MAX_HALVINGS:
        raise TrackingError(f"Cannot assign roots to particles between t={t_prev} and t={t}")
    middle = 0.5 * (t_prev + t)
    at_middle = _track(init, t_prev, prev, middle, depth + 1)
    return _track(init, middle, at_middle, t, depth + 1)


def time_ladder(t: float) -> np.ndarray:
    """±LADDER_START, doubling, ending exactly at t."""
    span = abs(t)
    if span <= LADDER_START:
        return np.array([t])
    steps = math.ceil(math.log(span / LADDER_START, LADDER_RATIO))
    ladder = LADDER_START * LADDER_RATIO ** np.arange(steps)
    return np.append(ladder[ladder < span], span) * math.copysign(1.0, t)


def solve_algebraic(init: InitialData, t: float) -> np.ndarray:
    """x_n(t) in particle order; at t = 0 the initial positions."""
    start = np.asarray(init.positions, dtype=float)
    if t == 0:
        return start.copy()
    if init.n == 1:
        return polynomial_roots(init, t)
    current, t_prev = start, 0.0
    for step in time_ladder(t):
        current = _track(init, t_prev, current, float(step))
        t_prev = float(step)
    return current


@dataclass
class AlgebraicState:
    positions: np.ndarray
    velocities: np.ndarray
    approximate: bool = True


def algebraic_velocities(init: InitialData, t: float, step: float = VELOCITY_STEP) -> AlgebraicState:
    """Positions and finite-difference velocities of the tracked roots."""
    x = solve_algebraic(init, t)
    if abs(t) <= step:
        # forward difference; a central one would straddle t = 0
        velocities = (solve_algebraic(init, t + step) - x) / step
    else:
        velocities = (solve_algebraic(init, t + step) - solve_algebraic(init, t - step)) / (2 * step)
    return AlgebraicState(x, velocities)


def algebraic_trajectory(init: InitialData, times: np.ndarray) -> Trajectory:
    """Tracked roots at each time, with approximate velocities."""
    states = [algebraic_velocities(init, float(t)) for t in times]
    return Trajectory(
        np.asarray(times, dtype=float),
        np.array([s.positions for s in states]),
        np.array([s.velocities for s in states]),
        approximate=True,
    )
