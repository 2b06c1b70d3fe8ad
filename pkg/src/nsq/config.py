"""Settings loaded from the environment (and an optional .env file)."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

from dotenv import load_dotenv

# Load .env from the project root (next to pyproject.toml)
load_dotenv(Path(__file__).resolve().parents[2] / ".env")

DEFAULT_SEED = 0
DEFAULT_TOL = 1e-9
DEFAULT_E0 = 1.0
DEFAULT_SAMPLE_POINTS = 20
DEFAULT_CONCURRENCY = 4


@dataclass
class Settings:
    seed: int = DEFAULT_SEED
    tol: float = DEFAULT_TOL
    e0: float = DEFAULT_E0
    sample_points: int = DEFAULT_SAMPLE_POINTS
    catalog_path: Path | None = None
    concurrency: int = DEFAULT_CONCURRENCY
    log_level: str = "WARNING"


def load_settings() -> Settings:
    """Build settings from NSQ_* environment variables."""
    catalog = os.environ.get("NSQ_CATALOG_PATH")
    return Settings(
        seed=int(os.environ.get("NSQ_SEED", DEFAULT_SEED)),
        tol=float(os.environ.get("NSQ_TOL", DEFAULT_TOL)),
        e0=float(os.environ.get("NSQ_E0", DEFAULT_E0)),
        sample_points=int(os.environ.get("NSQ_SAMPLE_POINTS", DEFAULT_SAMPLE_POINTS)),
        catalog_path=Path(catalog) if catalog else None,
        concurrency=int(os.environ.get("NSQ_CONCURRENCY", DEFAULT_CONCURRENCY)),
        log_level=os.environ.get("NSQ_LOG_LEVEL", "WARNING").upper(),
    )
