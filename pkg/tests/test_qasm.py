from __future__ import annotations

import numpy as np
import pytest

from qdbsearch.circuit import Circuit, Marker, to_unitary
from qdbsearch.errors import ParseError, UnsupportedGate
from qdbsearch.gates import Control, Gate, Hadamard, MultiControlledX, PauliX, cnot
from qdbsearch.grover import build_grover_circuit
from qdbsearch.oracle import build_double_query
from qdbsearch.qasm import export_qasm, import_qasm
from qdbsearch.qmem import Database, QubitLayout


def test_empty_circuit() -> None:
    assert export_qasm(Circuit(2)) == "OPENQASM 3.0;\nqubit[2] q;\n"


def test_negative_control_line() -> None:
    gate = MultiControlledX(controls=(Control(1, False),), targets=(0,))
    assert export_qasm(Circuit(2, (gate,))).splitlines()[-1] == "negctrl @ x q[1], q[0];"


def test_mixed_polarity_modifiers() -> None:
    gate = MultiControlledX(controls=(Control(0, False), Control(1, False), Control(2)), targets=(3, 4))
    lines = export_qasm(Circuit(5, (gate,))).splitlines()[2:]
    assert lines == [
        "negctrl(2) @ ctrl @ x q[0], q[1], q[2], q[3];",
        "negctrl(2) @ ctrl @ x q[0], q[1], q[2], q[4];",
    ]


def test_round_trip_grover_circuit(db4: Database, layout4: QubitLayout) -> None:
    circuit = build_grover_circuit(db4, 1, layout4, 2)
    parsed = import_qasm(export_qasm(circuit))
    assert parsed == circuit


def test_round_trip_preserves_unitary(db4: Database, layout4: QubitLayout) -> None:
    query = build_double_query(db4, 2, layout4).single_query
    assert np.array_equal(to_unitary(import_qasm(export_qasm(query))), to_unitary(query))


def test_markers_round_trip_between_gates() -> None:
    gate = MultiControlledX(controls=(Control(0),), targets=(1,))
    circuit = Circuit(2, (gate, gate), (Marker(1, "query"),))
    parsed = import_qasm(export_qasm(circuit))
    assert parsed.gates == (gate, gate)
    assert parsed.markers == (Marker(1, "query"),)


@pytest.mark.parametrize(
    "gates",
    [
        (cnot(0, 1), cnot(0, 2)),
        (MultiControlledX(controls=(), targets=(1, 2)),),
        (MultiControlledX(controls=(), targets=(1,)), PauliX(1)),
        (MultiControlledX(controls=(Control(0, False),), targets=(1, 2)), cnot(0, 2, positive=False)),
    ],
)
def test_gate_list_round_trips_exactly(gates: tuple[Gate, ...]) -> None:
    circuit = Circuit(3, gates)
    assert import_qasm(export_qasm(circuit)).gates == gates


def test_multi_target_lines_are_tagged() -> None:
    gate = MultiControlledX(controls=(Control(0),), targets=(1, 2))
    assert export_qasm(Circuit(3, (gate,))).splitlines()[2:] == [
        "// @mcx 2",
        "ctrl @ x q[0], q[1];",
        "ctrl @ x q[0], q[2];",
    ]


def test_import_accepts_include_and_comments() -> None:
    text = 'OPENQASM 3.0;\ninclude "stdgates.inc";\n// comment\nqubit[2] q;\nh q[0]; // trailing\nx q[1];\n'
    assert import_qasm(text) == Circuit(2, (Hadamard(0), PauliX(1)))


@pytest.mark.parametrize(
    "line",
    ["cz q[0], q[1];", "ctrl @ h q[0], q[1];", "inv @ x q[0];"],
)
def test_unsupported_gates(line: str) -> None:
    with pytest.raises(UnsupportedGate):
        import_qasm(f"OPENQASM 3.0;\nqubit[2] q;\n{line}\n")


def test_parse_error_reports_line() -> None:
    with pytest.raises(ParseError) as info:
        import_qasm("OPENQASM 3.0;\nqubit[2] q;\nh q[0];\nx q[0]\n")
    assert info.value.line == 4


@pytest.mark.parametrize(
    "text",
    [
        "qubit[2] q;\nh q[0];\n",
        "OPENQASM 3.0;\nh q[0];\n",
        "OPENQASM 3.0;\nqubit[2] q;\nh q[2];\n",
        "OPENQASM 3.0;\nqubit[2] q;\nctrl @ x q[0];\n",
        "OPENQASM 3.0;\nqubit[2] q;\nctrl @ x q[0], q[0];\n",
        "OPENQASM 3.0;\nqubit[2] q;\nrz(0.5) q[0];\n",
        "OPENQASM 3.0;\nqubit[3] q;\n// @mcx 2\nctrl @ x q[0], q[1];\n",
        "OPENQASM 3.0;\nqubit[3] q;\n// @mcx 2\nctrl @ x q[0], q[1];\nnegctrl @ x q[0], q[2];\n",
        "OPENQASM 3.0;\nqubit[3] q;\n// @mcx 2\nh q[1];\nx q[2];\n",
        "OPENQASM 3.0;\nqubit[3] q;\n// @mcx 0\nx q[1];\n",
        "OPENQASM 3.0;\nqubit[3] q;\n// @mcx 2\nx q[1];\n// @marker query\nx q[2];\n",
        "OPENQASM 3.0;\nqubit[3] q;\n// @mcx 2\nx q[1];\nx q[1];\n",
    ],
)
def test_malformed_programs(text: str) -> None:
    with pytest.raises(ParseError):
        import_qasm(text)
