"""Gate set: Hadamard, Pauli X and the mixed-polarity multi-target generalized Toffoli."""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from typing import NamedTuple

from qdbsearch.errors import OverlappingControlTarget, QubitOutOfRange


class Control(NamedTuple):
    """A control wire. `positive=False` fires on |0> (the white dot)."""

    qubit: int
    positive: bool = True


def _check_qubit(qubit: int) -> None:
    if qubit < 0:
        raise QubitOutOfRange(f"qubit index must be non-negative, got {qubit}")


@dataclass(frozen=True)
class Hadamard:
    target: int

    kind = "h"

    def __post_init__(self) -> None:
        _check_qubit(self.target)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)

    @property
    def arity(self) -> int:
        return 1


@dataclass(frozen=True)
class PauliX:
    target: int

    kind = "x"

    def __post_init__(self) -> None:
        _check_qubit(self.target)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (self.target,)

    @property
    def arity(self) -> int:
        return 1


@dataclass(frozen=True)
class MultiControlledX:
    """X on every target, conditioned on all controls matching their polarity.

    Controls and targets are stored sorted by qubit index so equal gates compare equal.
    With no controls the gate is a simultaneous X on all targets.
    """

    controls: tuple[Control, ...]
    targets: tuple[int, ...]

    kind = "mcx"

    def __post_init__(self) -> None:
        controls = tuple(sorted(Control(int(c[0]), bool(c[1])) for c in self.controls))
        targets = tuple(sorted(int(t) for t in self.targets))
        if not targets:
            raise OverlappingControlTarget("multi-controlled X needs at least one target")
        for qubit in (*(c.qubit for c in controls), *targets):
            _check_qubit(qubit)
        wires = [c.qubit for c in controls] + list(targets)
        if len(set(wires)) != len(wires):
            raise OverlappingControlTarget(f"controls and targets must be distinct qubits, got {wires}")
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "targets", targets)

    @property
    def qubits(self) -> tuple[int, ...]:
        return (*(c.qubit for c in self.controls), *self.targets)

    @property
    def arity(self) -> int:
        return len(self.controls) + len(self.targets)


Gate = Hadamard | PauliX | MultiControlledX


def mcx(controls: Iterable[Control | tuple[int, bool]], targets: Iterable[int]) -> Gate:
    """Build an X-type gate, collapsing the uncontrolled single-target case to `PauliX`."""
    controls = tuple(controls)
    targets = tuple(targets)
    if not controls and len(targets) == 1:
        return PauliX(targets[0])
    return MultiControlledX(controls=controls, targets=targets)  # type: ignore[arg-type]


def cnot(control: int, target: int, *, positive: bool = True) -> MultiControlledX:
    return MultiControlledX(controls=(Control(control, positive),), targets=(target,))
