"""Concurrent algebraic-vs-RK cross-checks over many initial conditions."""

from __future__ import annotations

import asyncio
from collections.abc import Sequence

import numpy as np

from nsq.dynamics.algebraic import solve_algebraic
from nsq.dynamics.integrate import DEFAULT_TOL, integrate_rk
from nsq.dynamics.trajectory import InitialData


def cross_check(init: InitialData, times: Sequence[float], tol: float = DEFAULT_TOL) -> dict:
    """Max componentwise |algebraic − RK| over ``times``."""
    times = sorted(float(t) for t in times)
    trajectory = integrate_rk(init, times[-1], tol=tol, t_eval=times)
    algebraic = np.array([solve_algebraic(init, t) for t in times])
    discrepancy = float(np.max(np.abs(algebraic - trajectory.positions)))
    return {"n": init.n, "max_discrepancy": discrepancy}


async def cross_check_batch(
    inits: Sequence[InitialData],
    times: Sequence[float],
    tol: float = DEFAULT_TOL,
    concurrency: int = 4,
) -> dict:
    """Run ``cross_check`` for every initial condition in worker threads.

    Returns per-item results in input order plus summary stats.
    """
    semaphore = asyncio.Semaphore(concurrency)
    results: list[dict | None] = [None] * len(inits)
    errors: list[dict] = []

    async def process_item(idx: int, init: InitialData) -> None:
        async with semaphore:
            try:
                results[idx] = await asyncio.to_thread(cross_check, init, times, tol)
            except Exception as e:
                errors.append({"index": idx, "error": str(e), "positions": list(init.positions)})

    tasks = [process_item(i, init) for i, init in enumerate(inits)]
    await asyncio.gather(*tasks)

    successful = [r for r in results if r is not None]
    return {
        "total_items": len(inits),
        "successful": len(successful),
        "failed": len(errors),
        "max_discrepancy": max((r["max_discrepancy"] for r in successful), default=0.0),
        "results": results,
        "errors": errors[:10],
    }
