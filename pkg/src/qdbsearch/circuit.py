"""Immutable circuits, dense unitaries, gate statistics and classical folding."""

from __future__ import annotations

from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field

import logfire
import numpy as np

from qdbsearch._kernels import apply_gate_rows
from qdbsearch.config import get_settings
from qdbsearch.errors import DimensionMismatch, MatrixCapExceeded, NotClassicallyFoldable, QubitOutOfRange
from qdbsearch.gates import Control, Gate, Hadamard, MultiControlledX, PauliX, mcx


@dataclass(frozen=True)
class Marker:
    """A labeled position: the marker sits before the gate at `position`."""

    position: int
    label: str


@dataclass(frozen=True)
class Circuit:
    qubit_count: int
    gates: tuple[Gate, ...] = ()
    markers: tuple[Marker, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "markers", tuple(self.markers))
        if self.qubit_count < 0:
            raise QubitOutOfRange(f"qubit_count must be non-negative, got {self.qubit_count}")
        for gate in self.gates:
            for qubit in gate.qubits:
                if qubit >= self.qubit_count:
                    raise QubitOutOfRange(f"{gate} touches qubit {qubit} but the circuit has {self.qubit_count}")
        for marker in self.markers:
            if not 0 <= marker.position <= len(self.gates):
                raise ValueError(f"marker {marker} outside circuit of {len(self.gates)} gates")

    def __len__(self) -> int:
        return len(self.gates)

    def __add__(self, other: Circuit) -> Circuit:
        if other.qubit_count != self.qubit_count:
            raise DimensionMismatch(f"cannot concatenate {self.qubit_count}- and {other.qubit_count}-qubit circuits")
        shift = len(self.gates)
        return Circuit(
            self.qubit_count,
            self.gates + other.gates,
            self.markers + tuple(Marker(m.position + shift, m.label) for m in other.markers),
        )

    def marked(self, label: str) -> Circuit:
        """Same circuit with a marker in front of the first gate."""
        return Circuit(self.qubit_count, self.gates, (Marker(0, label), *self.markers))

    def marker_count(self, label: str) -> int:
        return sum(1 for m in self.markers if m.label == label)


@dataclass(frozen=True)
class GateStats:
    qubit_count: int
    total: int
    counts: dict[str, int] = field(default_factory=dict)
    mcx_by_controls: dict[int, int] = field(default_factory=dict)
    max_arity: int = 0


def gate_stats(circuit: Circuit) -> GateStats:
    counts = Counter(gate.kind for gate in circuit.gates)
    by_controls = Counter(len(g.controls) for g in circuit.gates if isinstance(g, MultiControlledX))
    return GateStats(
        qubit_count=circuit.qubit_count,
        total=len(circuit.gates),
        counts={kind: counts.get(kind, 0) for kind in ("h", "x", "mcx")},
        mcx_by_controls=dict(sorted(by_controls.items())),
        max_arity=max((g.arity for g in circuit.gates), default=0),
    )


def _check_matrix_cap(circuit: Circuit) -> None:
    cap = get_settings().matrix_cap
    if circuit.qubit_count > cap:
        raise MatrixCapExceeded(f"dense unitaries are limited to {cap} qubits, circuit has {circuit.qubit_count}")


def to_unitary(circuit: Circuit) -> np.ndarray:
    """Dense 2**Q x 2**Q unitary; column j is the image of basis state j."""
    _check_matrix_cap(circuit)
    with logfire.span("qdbsearch.circuit.to_unitary", qubits=circuit.qubit_count, gates=len(circuit)):
        matrix = np.eye(1 << circuit.qubit_count, dtype=np.complex128)
        for gate in circuit.gates:
            apply_gate_rows(matrix, gate, circuit.qubit_count)
        return matrix


def unitarity_check(circuit: Circuit) -> float:
    """Max-entry deviation of U^dagger U from the identity."""
    unitary = to_unitary(circuit)
    product = unitary.conj().T @ unitary
    product[np.diag_indices_from(product)] -= 1.0
    return float(np.max(np.abs(product), initial=0.0))


def kept_qubits(qubit_count: int, fixed: Iterable[int]) -> tuple[int, ...]:
    """Qubits surviving a fold, in order; survivor k becomes qubit k of the folded circuit."""
    dropped = set(fixed)
    return tuple(q for q in range(qubit_count) if q not in dropped)


def specialize_circuit(circuit: Circuit, fixed: Mapping[int, int]) -> Circuit:
    """Fold qubits that never leave the computational basis into compile-time bits.

    `fixed` maps qubit -> classical value at the start of the circuit. Controls on fixed
    qubits are evaluated (gate dropped when unsatisfied, control removed otherwise) and
    X-type gates on fixed qubits with all-fixed controls update the classical bits.
    """
    bits: dict[int, int] = {}
    for qubit, value in fixed.items():
        if not 0 <= qubit < circuit.qubit_count:
            raise QubitOutOfRange(f"fixed qubit {qubit} outside {circuit.qubit_count}-qubit circuit")
        if value not in (0, 1):
            raise NotClassicallyFoldable(f"fixed qubit {qubit} needs a classical bit, got {value!r}")
        bits[qubit] = value

    kept = kept_qubits(circuit.qubit_count, bits)
    index = {q: i for i, q in enumerate(kept)}
    gates: list[Gate] = []
    new_position: list[int] = []

    for gate in circuit.gates:
        new_position.append(len(gates))
        if isinstance(gate, Hadamard):
            if gate.target in bits:
                raise NotClassicallyFoldable(f"Hadamard on fixed qubit {gate.target}")
            gates.append(Hadamard(index[gate.target]))
            continue
        if isinstance(gate, PauliX):
            if gate.target in bits:
                bits[gate.target] ^= 1
            else:
                gates.append(PauliX(index[gate.target]))
            continue

        fixed_targets = [t for t in gate.targets if t in bits]
        quantum_controls = [c for c in gate.controls if c.qubit not in bits]
        if fixed_targets and quantum_controls:
            raise NotClassicallyFoldable(f"{gate} targets fixed qubits {fixed_targets} under quantum controls")
        if any(bits[c.qubit] != int(c.positive) for c in gate.controls if c.qubit in bits):
            continue
        for t in fixed_targets:
            bits[t] ^= 1
        free_targets = [index[t] for t in gate.targets if t not in bits]
        if free_targets:
            gates.append(mcx((Control(index[c.qubit], c.positive) for c in quantum_controls), free_targets))
    new_position.append(len(gates))

    markers = tuple(Marker(new_position[m.position], m.label) for m in circuit.markers)
    logfire.debug(
        "qdbsearch.circuit.folded",
        fixed=len(fixed),
        gates_before=len(circuit),
        gates_after=len(gates),
    )
    return Circuit(len(kept), tuple(gates), markers)
