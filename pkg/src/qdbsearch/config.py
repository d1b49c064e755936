"""Environment-driven runtime settings."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from functools import lru_cache
from typing import Literal

from qdbsearch.errors import InputError

DEFAULT_QUBIT_CAP = 26
MAX_MATRIX_QUBITS = 12


@dataclass(frozen=True)
class Settings:
    qubit_cap: int
    matrix_cap: int
    threads: int | None
    norm_check: Literal["gate", "circuit"]
    tolerance: float


def _int_env(name: str, default: int | None) -> int | None:
    raw = os.getenv(name)
    if raw is None or not raw.strip():
        return default
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"{name} must be an integer, got {raw!r}") from None
    if value < 1:
        raise InputError(f"{name} must be positive, got {value}")
    return value


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Read the QDBSEARCH_* environment once; call `get_settings.cache_clear()` to re-read."""
    qubit_cap = _int_env("QDBSEARCH_QUBIT_CAP", DEFAULT_QUBIT_CAP)
    matrix_cap = _int_env("QDBSEARCH_MATRIX_CAP", MAX_MATRIX_QUBITS)
    threads = _int_env("QDBSEARCH_THREADS", None)

    norm_check = os.getenv("QDBSEARCH_NORM_CHECK", "gate").strip().lower()
    if norm_check not in ("gate", "circuit"):
        raise InputError(f"QDBSEARCH_NORM_CHECK must be 'gate' or 'circuit', got {norm_check!r}")

    raw_tol = os.getenv("QDBSEARCH_TOLERANCE", "1e-9")
    try:
        tolerance = float(raw_tol)
    except ValueError:
        raise InputError(f"QDBSEARCH_TOLERANCE must be a float, got {raw_tol!r}") from None
    if not math.isfinite(tolerance) or tolerance < 0:
        raise InputError(f"QDBSEARCH_TOLERANCE must be a finite non-negative float, got {raw_tol!r}")

    assert qubit_cap is not None and matrix_cap is not None
    return Settings(
        qubit_cap=qubit_cap,
        matrix_cap=min(matrix_cap, MAX_MATRIX_QUBITS),
        threads=threads,
        norm_check="gate" if norm_check == "gate" else "circuit",
        tolerance=tolerance,
    )
