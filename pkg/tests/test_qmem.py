from __future__ import annotations

from itertools import product
from pathlib import Path

import numpy as np
import pytest

from qdbsearch.circuit import Circuit, gate_stats, to_unitary
from qdbsearch.errors import (
    BadBitChar,
    BadEncoding,
    BadHeader,
    LayoutMismatch,
    RecordWidthMismatch,
    WrongRecordCount,
)
from qdbsearch.gates import Control, MultiControlledX
from qdbsearch.qmem import (
    Database,
    QubitLayout,
    build_load_circuit,
    format_database,
    load_database,
    load_twice_is_identity,
    parse_bits,
    parse_database,
    random_database,
)
from qdbsearch.statevec import apply_circuit, marginal_probability, new_basis_state


def test_parse_example() -> None:
    db = parse_database("2 2\n11\n00\n01\n10\n")
    assert (db.n, db.m, db.records) == (2, 2, (3, 0, 1, 2))


def test_parse_single_bit() -> None:
    assert parse_database("1 1\n0\n1\n").records == (0, 1)


def test_parse_ignores_comments_blank_lines_and_crlf() -> None:
    db = parse_database("# header comment\r\n2 2\r\n\r\n11\r\n# middle\r\n00\r\n01\r\n10\r\n")
    assert db.records == (3, 0, 1, 2)


@pytest.mark.parametrize(
    ("text", "error"),
    [
        ("2 2\n11\n00\n01\n", WrongRecordCount),
        ("2 2\n11\n00\n01\n10\n11\n", WrongRecordCount),
        ("2 2\n11\n0x\n01\n10\n", BadBitChar),
        ("2 2\n11\n000\n01\n10\n", RecordWidthMismatch),
        ("2,2\n11\n00\n01\n10\n", BadHeader),
        ("", BadHeader),
    ],
)
def test_parse_errors(text: str, error: type[Exception]) -> None:
    with pytest.raises(error):
        parse_database(text)


def test_parse_bits_width() -> None:
    assert parse_bits("01", 2) == 1
    with pytest.raises(RecordWidthMismatch):
        parse_bits("0101", 2)


def test_format_round_trip(db4: Database) -> None:
    assert parse_database(format_database(db4)) == db4


def test_sample_file(data_dir: Path, db4: Database) -> None:
    assert load_database(data_dir / "db_n2_m2.txt") == db4


def test_layout_registers(layout4: QubitLayout) -> None:
    regs = layout4.registers()
    names = list(regs)
    assert not any(regs[a].overlaps(regs[b]) for i, a in enumerate(names) for b in names[i + 1 :])
    covered = sorted(q for reg in regs.values() for q in reg.qubits)
    assert covered == list(range(layout4.qubit_count)) == list(range(9))
    assert regs["kickback"].offset == 6 and regs["c_flag"].offset == 7 and regs["one_wire"].offset == 8


def test_load_gate_list(db4: Database, layout4: QubitLayout) -> None:
    a0, a1 = layout4.address.bit(0), layout4.address.bit(1)
    d0, d1 = layout4.data.bit(0), layout4.data.bit(1)
    assert build_load_circuit(db4, layout4).gates == (
        MultiControlledX(controls=(Control(a0, False), Control(a1, False)), targets=(d0, d1)),
        MultiControlledX(controls=(Control(a0, False), Control(a1, True)), targets=(d0,)),
        MultiControlledX(controls=(Control(a0, True), Control(a1, True)), targets=(d1,)),
    )


def test_load_is_the_xor_permutation(db4: Database, layout4: QubitLayout) -> None:
    n, m = db4.n, db4.m
    unitary = to_unitary(Circuit(n + m, build_load_circuit(db4, layout4).gates))
    for x, d in product(range(1 << n), range(1 << m)):
        column = x | (d << n)
        image = x | ((d ^ db4.records[x]) << n)
        assert unitary[image, column] == 1
        assert np.count_nonzero(unitary[:, column]) == 1


def test_load_reveals_record(db4: Database, layout4: QubitLayout) -> None:
    load = build_load_circuit(db4, layout4)
    for x in range(4):
        state = apply_circuit(new_basis_state(layout4.qubit_count, x), load)
        assert marginal_probability(state, layout4.data, db4.records[x]) == 1.0
        assert marginal_probability(state, layout4.address, x) == 1.0


def test_zero_records_give_empty_circuit() -> None:
    db = Database(2, 3, (0, 0, 0, 0))
    assert len(build_load_circuit(db, QubitLayout.for_database(db))) == 0
    assert load_twice_is_identity(db, QubitLayout.for_database(db)) == 0.0


def test_layout_mismatch(db4: Database) -> None:
    with pytest.raises(LayoutMismatch):
        build_load_circuit(db4, QubitLayout(2, 3))


def test_load_twice_is_identity(db4: Database, layout4: QubitLayout) -> None:
    assert load_twice_is_identity(db4, layout4) <= 1e-9
    assert load_twice_is_identity(db4, layout4, mode="state") <= 1e-9


def test_load_involution_on_random_databases() -> None:
    rng = np.random.default_rng(5)
    for _ in range(20):
        db = random_database(int(rng.integers(1, 4)), int(rng.integers(1, 4)), rng)
        assert load_twice_is_identity(db, QubitLayout.for_database(db)) <= 1e-9


def test_load_arity_bound() -> None:
    rng = np.random.default_rng(9)
    for _ in range(10):
        db = random_database(4, 4, rng)
        stats = gate_stats(build_load_circuit(db, QubitLayout.for_database(db)))
        assert stats.counts["mcx"] == sum(1 for r in db.records if r)
        assert stats.max_arity == db.n + max(bin(r).count("1") for r in db.records)
        assert stats.max_arity <= db.n + db.m


def test_random_database_plants_value() -> None:
    db = random_database(3, 2, np.random.default_rng(0), ensure=3)
    assert 3 in db.records


def test_non_utf8_file(tmp_path: Path) -> None:
    path = tmp_path / "db.txt"
    path.write_bytes(b"1 1\n\xff\n1\n")
    with pytest.raises(BadEncoding, match="not UTF-8"):
        load_database(path)
