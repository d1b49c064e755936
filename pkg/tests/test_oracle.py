from __future__ import annotations

import numpy as np
import pytest

from qdbsearch.circuit import Circuit
from qdbsearch.errors import LayoutMismatch, ValueOutOfRange
from qdbsearch.gates import Hadamard
from qdbsearch.grover import build_initial_state
from qdbsearch.oracle import build_comparator, build_double_query, build_oracle_query
from qdbsearch.qmem import Database, QubitLayout
from qdbsearch.statevec import StateVector, apply_circuit, marginal_probability, new_basis_state
from qdbsearch.verify import oracle_equivalence_check, restore_check


def _comparator_input(layout: QubitLayout, d: int, s: int, c: int) -> StateVector:
    index = (d << layout.data.offset) | (s << layout.target_s.offset) | (c << layout.c_flag.offset)
    index |= 1 << layout.kickback.offset
    state = new_basis_state(layout.qubit_count, index)
    return apply_circuit(state, Circuit(layout.qubit_count, (Hadamard(layout.kickback.offset),)))


@pytest.mark.parametrize(("d", "s", "c", "sign"), [(1, 1, 1, -1), (1, 2, 1, 1), (1, 1, 0, 1), (0, 0, 1, -1)])
def test_comparator_phase(layout4: QubitLayout, d: int, s: int, c: int, sign: int) -> None:
    before = _comparator_input(layout4, d, s, c)
    after = apply_circuit(before.copy(), build_comparator(layout4))
    assert np.allclose(after.amplitudes, sign * before.amplitudes, atol=1e-12)


def test_comparator_restores_registers(layout4: QubitLayout) -> None:
    for d in range(4):
        for s in range(4):
            state = apply_circuit(_comparator_input(layout4, d, s, 1), build_comparator(layout4))
            assert marginal_probability(state, layout4.data, d) == pytest.approx(1.0)
            assert marginal_probability(state, layout4.target_s, s) == pytest.approx(1.0)


def test_single_query_toggles_c_and_leaves_data_loaded(db4: Database, layout4: QubitLayout) -> None:
    single = build_oracle_query(db4, 1, layout4)
    state = apply_circuit(build_initial_state(db4, 1, layout4), single)
    assert marginal_probability(state, layout4.c_flag, 1) == pytest.approx(1.0)
    assert marginal_probability(state, layout4.data, 0) == pytest.approx(0.25)

    apply_circuit(state, single)
    assert marginal_probability(state, layout4.c_flag, 0) == pytest.approx(1.0)
    assert marginal_probability(state, layout4.data, 0) == pytest.approx(1.0)


def test_double_query_restores(db4: Database, layout4: QubitLayout) -> None:
    for s in range(4):
        assert restore_check(db4, s, layout4) <= 1e-10


def test_double_query_matches_ideal_oracle(db4: Database, layout4: QubitLayout) -> None:
    for s in range(4):
        assert oracle_equivalence_check(db4, s, layout4) <= 1e-9
        assert oracle_equivalence_check(db4, s, layout4, mode="subspace") <= 1e-9


def test_double_query_on_uniform_state(db4: Database, layout4: QubitLayout) -> None:
    start = build_initial_state(db4, 1, layout4)
    state = apply_circuit(start.copy(), build_double_query(db4, 1, layout4).double_query)
    expected = start.amplitudes.copy()
    address = np.arange(expected.size) & 0b11
    expected[address == 2] *= -1
    assert np.allclose(state.amplitudes, expected, atol=1e-12)

    # ancillas |0>_d |01>_s, kickback component |0> carries 1/sqrt(2)
    base = (1 << layout4.target_s.offset) | (1 << layout4.one_wire.offset)
    address_amplitudes = state.amplitudes[[base | x for x in range(4)]] * np.sqrt(2)
    assert np.allclose(address_amplitudes, [0.5, 0.5, -0.5, 0.5], atol=1e-12)


def test_no_solution_is_identity() -> None:
    db = Database(2, 2, (0, 0, 0, 0))
    layout = QubitLayout.for_database(db)
    start = build_initial_state(db, 3, layout)
    state = apply_circuit(start.copy(), build_double_query(db, 3, layout).double_query)
    assert np.allclose(state.amplitudes, start.amplitudes, atol=1e-12)


def test_non_solution_records_do_not_matter(db4: Database, layout4: QubitLayout) -> None:
    # s = 1 sits at address 2; rewriting the other records to different non-matches changes nothing
    mutated = Database(2, 2, (2, 3, 1, 0))
    start = build_initial_state(db4, 1, layout4)
    original = apply_circuit(start.copy(), build_double_query(db4, 1, layout4).double_query)
    changed = apply_circuit(start.copy(), build_double_query(mutated, 1, layout4).double_query)
    assert np.allclose(original.amplitudes, changed.amplitudes, atol=1e-12)


def test_query_markers(db4: Database, layout4: QubitLayout) -> None:
    block = build_double_query(db4, 1, layout4)
    assert block.query_markers == (0, len(block.single_query))


def test_query_rejects_bad_inputs(db4: Database, layout4: QubitLayout) -> None:
    with pytest.raises(ValueOutOfRange):
        build_oracle_query(db4, 4, layout4)
    with pytest.raises(LayoutMismatch):
        build_oracle_query(db4, 1, QubitLayout(3, 2))
