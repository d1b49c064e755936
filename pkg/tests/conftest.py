from __future__ import annotations

from pathlib import Path

import logfire
import pytest

from qdbsearch.qmem import Database, QubitLayout

logfire.configure(send_to_logfire=False, console=False)

ROOT = Path(__file__).resolve().parents[1]


@pytest.fixture
def data_dir() -> Path:
    return ROOT / "data"


@pytest.fixture
def db4() -> Database:
    """The N = 4 example: records [3, 0, 1, 2] (11, 00, 01, 10)."""
    return Database(2, 2, (3, 0, 1, 2))


@pytest.fixture
def layout4(db4: Database) -> QubitLayout:
    return QubitLayout.for_database(db4)
