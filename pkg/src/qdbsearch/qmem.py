"""Classical database model, its text format, and the quantum memory LOAD circuit.

Each nonzero record d_k becomes one generalized Toffoli column: n mixed-polarity
controls spelling k on the address register (negative control for a 0 bit) and
targets on the data qubits where d_k has a 1. Encoding the column selection in the
control polarities replaces an explicit binary-to-unary converter with the same unitary.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

import logfire
import numpy as np

from qdbsearch.circuit import Circuit, to_unitary
from qdbsearch.errors import (
    BadBitChar,
    BadEncoding,
    BadHeader,
    LayoutMismatch,
    RecordWidthMismatch,
    ValueOutOfRange,
    WrongRecordCount,
)
from qdbsearch.gates import Control, MultiControlledX
from qdbsearch.statevec import RegisterSlice, StateVector, apply_circuit, check_disjoint

_HEADER = re.compile(r"^(\d+) (\d+)$")


@dataclass(frozen=True)
class Database:
    n: int
    m: int
    records: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "records", tuple(int(r) for r in self.records))
        if self.n < 1 or self.m < 1:
            raise BadHeader(f"address and record widths must be at least 1, got n={self.n} m={self.m}")
        if len(self.records) != 1 << self.n:
            raise WrongRecordCount(f"n={self.n} needs {1 << self.n} records, got {len(self.records)}")
        for address, record in enumerate(self.records):
            if not 0 <= record < (1 << self.m):
                raise RecordWidthMismatch(f"record {record} at address {address} does not fit in m={self.m} bits")

    @property
    def size(self) -> int:
        return 1 << self.n

    def solutions(self, s: int) -> tuple[int, ...]:
        return tuple(x for x, record in enumerate(self.records) if record == s)


@dataclass(frozen=True)
class QubitLayout:
    """Global qubit order: address, data, target_s, kickback, c_flag, one_wire."""

    n: int
    m: int

    def __post_init__(self) -> None:
        check_disjoint(self.registers())

    @classmethod
    def for_database(cls, db: Database) -> QubitLayout:
        return cls(db.n, db.m)

    @property
    def address(self) -> RegisterSlice:
        return RegisterSlice(0, self.n)

    @property
    def data(self) -> RegisterSlice:
        return RegisterSlice(self.n, self.m)

    @property
    def target_s(self) -> RegisterSlice:
        return RegisterSlice(self.n + self.m, self.m)

    @property
    def kickback(self) -> RegisterSlice:
        return RegisterSlice(self.n + 2 * self.m, 1)

    @property
    def c_flag(self) -> RegisterSlice:
        return RegisterSlice(self.n + 2 * self.m + 1, 1)

    @property
    def one_wire(self) -> RegisterSlice:
        return RegisterSlice(self.n + 2 * self.m + 2, 1)

    @property
    def qubit_count(self) -> int:
        return self.n + 2 * self.m + 3

    def registers(self) -> dict[str, RegisterSlice]:
        return {
            "address": self.address,
            "data": self.data,
            "target_s": self.target_s,
            "kickback": self.kickback,
            "c_flag": self.c_flag,
            "one_wire": self.one_wire,
        }

    def check(self, db: Database) -> None:
        if (self.n, self.m) != (db.n, db.m):
            raise LayoutMismatch(f"layout is for n={self.n} m={self.m}, database has n={db.n} m={db.m}")


def parse_bits(text: str, m: int) -> int:
    """Read an MSB-left bit string of exactly m characters."""
    bad = sorted({ch for ch in text if ch not in "01"})
    if bad:
        raise BadBitChar(f"{text!r} contains characters other than 0/1: {bad}")
    if len(text) != m:
        raise RecordWidthMismatch(f"{text!r} has {len(text)} bits, expected m={m}")
    return int(text, 2)


def format_bits(value: int, m: int) -> str:
    return format(value, f"0{m}b")


def parse_database(text: str) -> Database:
    header: tuple[int, int] | None = None
    records: list[int] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if header is None:
            match = _HEADER.match(line)
            if match is None:
                raise BadHeader(f"line {lineno}: expected 'n m', got {line!r}")
            header = (int(match.group(1)), int(match.group(2)))
            if header[0] < 1 or header[1] < 1:
                raise BadHeader(f"line {lineno}: n and m must be at least 1, got {line!r}")
            continue
        try:
            records.append(parse_bits(line, header[1]))
        except (BadBitChar, RecordWidthMismatch) as exc:
            raise type(exc)(f"line {lineno}: {exc}") from None

    if header is None:
        raise BadHeader("database has no 'n m' header line")
    n, m = header
    if len(records) != 1 << n:
        raise WrongRecordCount(f"header declares n={n} ({1 << n} records) but the body has {len(records)}")
    return Database(n, m, tuple(records))


def load_database(path: Path) -> Database:
    with logfire.span("qdbsearch.qmem.load_database", path=str(path)):
        try:
            text = Path(path).read_text(encoding="utf-8")
        except UnicodeDecodeError as exc:
            raise BadEncoding(f"{path} is not UTF-8 text: {exc.reason} at byte {exc.start}") from None
        db = parse_database(text)
        logfire.info("qdbsearch.qmem.database_loaded", n=db.n, m=db.m, records=db.size)
        return db


def format_database(db: Database) -> str:
    lines = [f"{db.n} {db.m}", *(format_bits(record, db.m) for record in db.records)]
    return "\n".join(lines) + "\n"


def random_database(n: int, m: int, rng: np.random.Generator, *, ensure: int | None = None) -> Database:
    """Uniform random records; with `ensure`, one random address is overwritten with that value."""
    records = [int(r) for r in rng.integers(0, 1 << m, size=1 << n)]
    if ensure is not None:
        if not 0 <= ensure < (1 << m):
            raise ValueOutOfRange(f"value {ensure} does not fit m={m} bits")
        records[int(rng.integers(0, 1 << n))] = ensure
    return Database(n, m, tuple(records))


def build_load_circuit(db: Database, layout: QubitLayout) -> Circuit:
    layout.check(db)
    address, data = layout.address, layout.data
    gates = []
    for k, record in enumerate(db.records):
        if record == 0:
            continue
        controls = tuple(Control(address.bit(j), bool((k >> j) & 1)) for j in range(db.n))
        targets = tuple(data.bit(i) for i in range(db.m) if (record >> i) & 1)
        gates.append(MultiControlledX(controls=controls, targets=targets))
    return Circuit(layout.qubit_count, tuple(gates))


def load_twice_is_identity(
    db: Database,
    layout: QubitLayout,
    *,
    mode: str = "auto",
    trials: int = 8,
    seed: int = 0,
) -> float:
    """Deviation of LOAD . LOAD from the identity on address (x) data.

    Address and data are the lowest n + m qubits, so the check runs on that sub-register.
    Matrix mode (n + m <= 10) measures the dense product; state mode applies LOAD twice to
    random states and reports the worst amplitude deviation.
    """
    load = build_load_circuit(db, layout)
    qubits = db.n + db.m
    restricted = Circuit(qubits, load.gates)
    if mode == "auto":
        mode = "matrix" if qubits <= 10 else "state"

    if mode == "matrix":
        unitary = to_unitary(restricted)
        product = unitary @ unitary
        product[np.diag_indices_from(product)] -= 1.0
        return float(np.max(np.abs(product)))
    if mode != "state":
        raise ValueError(f"unknown mode {mode!r}")

    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(trials):
        amplitudes = rng.normal(size=1 << qubits) + 1j * rng.normal(size=1 << qubits)
        amplitudes /= np.sqrt(np.sum(np.abs(amplitudes) ** 2))
        state = StateVector(qubits, amplitudes)
        reference = state.amplitudes.copy()
        apply_circuit(apply_circuit(state, restricted), restricted)
        worst = max(worst, float(np.max(np.abs(state.amplitudes - reference))))
    return worst
