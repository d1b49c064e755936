"""Dense statevector: construction, gate application, marginals and seeded sampling.

Basis index bit i is qubit i (little-endian), so a register is a contiguous bit field.
Gates are applied in place; a `StateVector` belongs to a single simulation run.
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from qdbsearch._kernels import apply_gate_rows
from qdbsearch.circuit import Circuit
from qdbsearch.config import get_settings
from qdbsearch.errors import (
    DimensionMismatch,
    IndexOutOfRange,
    NormDrift,
    OverlappingRegisters,
    QubitCapExceeded,
    QubitOutOfRange,
    ValueOutOfRange,
)
from qdbsearch.gates import Gate

NORM_TOLERANCE = 1e-10


@dataclass(frozen=True)
class RegisterSlice:
    """Qubits [offset, offset + width); qubit offset + i holds bit i of the register value."""

    offset: int
    width: int

    def __post_init__(self) -> None:
        if self.offset < 0 or self.width < 0:
            raise QubitOutOfRange(f"invalid register slice offset={self.offset} width={self.width}")

    @property
    def stop(self) -> int:
        return self.offset + self.width

    @property
    def qubits(self) -> range:
        return range(self.offset, self.stop)

    def bit(self, i: int) -> int:
        """Global qubit index of bit i."""
        if not 0 <= i < self.width:
            raise QubitOutOfRange(f"bit {i} outside register of width {self.width}")
        return self.offset + i

    def overlaps(self, other: RegisterSlice) -> bool:
        return self.offset < other.stop and other.offset < self.stop


def check_disjoint(registers: Mapping[str, RegisterSlice]) -> None:
    """Raise if any two named registers share a qubit."""
    items = list(registers.items())
    for i, (name, reg) in enumerate(items):
        for other_name, other in items[i + 1 :]:
            if reg.overlaps(other):
                raise OverlappingRegisters(f"{name} {reg} overlaps {other_name} {other}")


def remap_slice(reg: RegisterSlice, kept: Sequence[int]) -> RegisterSlice:
    """Position of `reg` inside a folded circuit whose surviving qubits are `kept`."""
    position = {q: i for i, q in enumerate(kept)}
    missing = [q for q in reg.qubits if q not in position]
    if missing:
        raise QubitOutOfRange(f"register {reg} lost qubits {missing} in folding")
    if reg.width == 0:
        return RegisterSlice(sum(1 for q in kept if q < reg.offset), 0)
    return RegisterSlice(position[reg.offset], reg.width)


@dataclass(eq=False)
class StateVector:
    qubit_count: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        cap = get_settings().qubit_cap
        if self.qubit_count > cap:
            raise QubitCapExceeded(f"{self.qubit_count} qubits exceeds the cap of {cap} (QDBSEARCH_QUBIT_CAP)")
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (1 << self.qubit_count,):
            raise DimensionMismatch(
                f"expected {1 << self.qubit_count} amplitudes for {self.qubit_count} qubits, "
                f"got shape {self.amplitudes.shape}"
            )
        self.check_norm()

    def copy(self) -> StateVector:
        return StateVector(self.qubit_count, self.amplitudes.copy())

    def probabilities(self) -> np.ndarray:
        return self.amplitudes.real**2 + self.amplitudes.imag**2

    def norm_squared(self) -> float:
        # numpy pairwise summation over a fixed shape: deterministic
        return float(np.sum(self.probabilities()))

    def check_norm(self) -> None:
        drift = abs(self.norm_squared() - 1.0)
        if drift > NORM_TOLERANCE:
            raise NormDrift(f"state norm drifted by {drift:.3e} (tolerance {NORM_TOLERANCE:.0e})")

    def _check_register(self, reg: RegisterSlice) -> None:
        if reg.stop > self.qubit_count:
            raise QubitOutOfRange(f"register {reg} exceeds {self.qubit_count} qubits")


def new_basis_state(qubit_count: int, index: int) -> StateVector:
    if not 0 <= index < (1 << qubit_count):
        raise IndexOutOfRange(f"basis index {index} outside [0, {1 << qubit_count})")
    cap = get_settings().qubit_cap
    if qubit_count > cap:
        raise QubitCapExceeded(f"{qubit_count} qubits exceeds the cap of {cap} (QDBSEARCH_QUBIT_CAP)")
    amplitudes = np.zeros(1 << qubit_count, dtype=np.complex128)
    amplitudes[index] = 1.0
    return StateVector(qubit_count, amplitudes)


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Apply `gate` to `state` in place and return it."""
    apply_gate_rows(state.amplitudes.reshape(-1, 1), gate, state.qubit_count)
    if get_settings().norm_check == "gate":
        state.check_norm()
    return state


def apply_circuit(state: StateVector, circuit: Circuit) -> StateVector:
    """Apply the gates of `circuit` in order, in place."""
    if circuit.qubit_count != state.qubit_count:
        raise DimensionMismatch(f"circuit has {circuit.qubit_count} qubits, state has {state.qubit_count}")
    per_gate = get_settings().norm_check == "gate"
    rows = state.amplitudes.reshape(-1, 1)
    for gate in circuit.gates:
        apply_gate_rows(rows, gate, state.qubit_count)
        if per_gate:
            state.check_norm()
    if not per_gate:
        state.check_norm()
    return state


def register_distribution(state: StateVector, reg: RegisterSlice) -> np.ndarray:
    """Marginal distribution of `reg`: entry v is the probability of reading value v."""
    state._check_register(reg)
    high = state.qubit_count - reg.stop
    probs = state.probabilities().reshape(1 << high, 1 << reg.width, 1 << reg.offset)
    return probs.sum(axis=(0, 2))


def marginal_probability(state: StateVector, reg: RegisterSlice, value: int) -> float:
    if not 0 <= value < (1 << reg.width):
        raise ValueOutOfRange(f"value {value} does not fit a {reg.width}-qubit register")
    return float(register_distribution(state, reg)[value])


def sample_register(state: StateVector, reg: RegisterSlice, shots: int, seed: int) -> dict[int, int]:
    """Draw `shots` independent readouts of `reg`; same inputs and seed give the same histogram."""
    if shots < 0:
        raise ValueOutOfRange(f"shots must be non-negative, got {shots}")
    if shots == 0:
        return {}
    dist = register_distribution(state, reg)
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, dist / dist.sum())
    return {int(value): int(count) for value, count in enumerate(counts) if count}
