"""Initial data and sampled trajectories, with JSON/CSV import and export."""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from nsq.errors import SchemaError
from nsq.schemas import InitialDataModel


def min_gap(positions: np.ndarray) -> float:
    """Smallest pairwise distance (inf for a single particle)."""
    positions = np.sort(np.asarray(positions, dtype=float))
    if len(positions) < 2:
        return float("inf")
    return float(np.min(np.diff(positions)))


@dataclass(frozen=True)
class InitialData:
    positions: tuple[float, ...]
    velocities: tuple[float, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "positions", tuple(float(p) for p in self.positions))
        object.__setattr__(self, "velocities", tuple(float(v) for v in self.velocities))
        if not self.positions or len(self.positions) != len(self.velocities):
            raise ValueError("positions and velocities must be non-empty and of equal length")
        if self.min_gap == 0:
            raise ValueError(f"Initial positions are not distinct: {self.positions}")

    @property
    def n(self) -> int:
        return len(self.positions)

    @property
    def min_gap(self) -> float:
        return min_gap(np.array(self.positions))

    def permuted(self, order: list[int]) -> InitialData:
        return InitialData(
            tuple(self.positions[i] for i in order),
            tuple(self.velocities[i] for i in order),
        )

    @classmethod
    def from_model(cls, model: InitialDataModel) -> InitialData:
        return cls(tuple(model.positions), tuple(model.velocities))

    @classmethod
    def from_json(cls, text: str) -> InitialData:
        try:
            return cls.from_model(InitialDataModel.model_validate_json(text))
        except ValidationError as e:
            raise SchemaError(f"Malformed initial data: {e}") from e

    @classmethod
    def load(cls, path: str | Path) -> InitialData:
        path = Path(path)
        try:
            return cls.from_json(path.read_text())
        except OSError as e:
            raise SchemaError(f"Cannot read initial data {path}: {e}") from e

    def to_json(self) -> str:
        return InitialDataModel(positions=list(self.positions), velocities=list(self.velocities)).model_dump_json()


def random_initial_data(
    n: int,
    rng: np.random.Generator,
    spacing: float = 0.5,
    speed: tuple[float, float] = (0.2, 1.5),
) -> InitialData:
    """Separated positions with positive velocities; such data never collides for t > 0."""
    gaps = spacing + rng.uniform(0.0, 1.0, size=n)
    positions = np.cumsum(gaps) - gaps.sum() / 2
    velocities = rng.uniform(*speed, size=n)
    return InitialData(tuple(positions), tuple(velocities))


@dataclass
class CollisionEvent:
    time: float
    pair: tuple[int, int]
    gap: float

    def to_dict(self) -> dict:
        return {"time": self.time, "pair": list(self.pair), "gap": self.gap}


@dataclass
class Trajectory:
    """Samples (t, x, v); ``approximate`` marks velocities obtained by finite differences."""

    times: np.ndarray
    positions: np.ndarray
    velocities: np.ndarray
    events: list[CollisionEvent] = field(default_factory=list)
    approximate: bool = False

    def __post_init__(self) -> None:
        self.times = np.asarray(self.times, dtype=float)
        self.positions = np.atleast_2d(np.asarray(self.positions, dtype=float))
        self.velocities = np.atleast_2d(np.asarray(self.velocities, dtype=float))
        if self.positions.shape != self.velocities.shape or len(self.times) != len(self.positions):
            raise ValueError("Trajectory arrays have inconsistent shapes")
        if len(self.times) > 1 and np.any(np.diff(self.times) * np.sign(self.times[-1] - self.times[0]) <= 0):
            raise ValueError("Trajectory times must be strictly monotone")

    @property
    def n(self) -> int:
        return self.positions.shape[1]

    def __len__(self) -> int:
        return len(self.times)

    def state(self, index: int) -> dict[str, float]:
        """Named sample for expression evaluation: t, x1..xN, v1..vN."""
        values = {"t": float(self.times[index])}
        for k in range(self.n):
            values[f"x{k + 1}"] = float(self.positions[index, k])
            values[f"v{k + 1}"] = float(self.velocities[index, k])
        return values

    def header(self) -> list[str]:
        return ["t", *(f"x{k + 1}" for k in range(self.n)), *(f"v{k + 1}" for k in range(self.n))]

    def rows(self) -> list[list[float]]:
        return [
            [float(t), *map(float, x), *map(float, v)]
            for t, x, v in zip(self.times, self.positions, self.velocities)
        ]

    def to_dict(self) -> dict:
        return {
            "columns": self.header(),
            "rows": self.rows(),
            "events": [e.to_dict() for e in self.events],
            "approximate_velocities": self.approximate,
        }

    def write_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(self.header())
            writer.writerows(self.rows())

    def write_json(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=2))

    def write(self, path: str | Path) -> None:
        """CSV or JSON by file suffix."""
        if Path(path).suffix.lower() == ".json":
            self.write_json(path)
        else:
            self.write_csv(path)
