"""Generate the larger sample databases under data/.

Records are drawn with a fixed seed so the files are reproducible. The target record
(all ones) is planted exactly once, which gives the unique-match cases used for the
performance runs (n=6, m=4 and n=8, m=4).
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from qdbsearch.qmem import Database, format_database

SIZES = ((6, 4), (8, 4))


def unique_target_database(n: int, m: int, seed: int) -> Database:
    rng = np.random.default_rng(seed)
    target = (1 << m) - 1
    records = [int(r) for r in rng.integers(0, target, size=1 << n)]
    records[int(rng.integers(0, 1 << n))] = target
    return Database(n, m, tuple(records))


def write_database(db: Database, path: Path) -> None:
    header = f"# seeded sample, target {'1' * db.m} occurs once\n"
    path.write_text(header + format_database(db), encoding="utf-8")


def main() -> None:
    root = Path(__file__).resolve().parents[1]
    for n, m in SIZES:
        out = root / "data" / f"db_n{n}_m{m}.txt"
        write_database(unique_target_database(n, m, seed=n * 100 + m), out)
        print(f"Wrote {out}")


if __name__ == "__main__":
    main()
