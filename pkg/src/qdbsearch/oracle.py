"""Comparator and oracle query assembly.

One query is: toggle c (CNOT from the constant-one wire), LOAD, comparator. The comparator
only kicks a phase when c = 1, so with c starting at 0 the odd query marks solutions and the
even query merely un-LOADs the data register back to |0...0>.
"""

from __future__ import annotations

from dataclasses import dataclass

import logfire

from qdbsearch.circuit import Circuit
from qdbsearch.errors import ValueOutOfRange
from qdbsearch.gates import Control, MultiControlledX, cnot
from qdbsearch.qmem import Database, QubitLayout, build_load_circuit

QUERY_MARKER = "query"


@dataclass(frozen=True)
class OracleBlock:
    single_query: Circuit
    double_query: Circuit

    @property
    def query_markers(self) -> tuple[int, ...]:
        return tuple(m.position for m in self.double_query.markers if m.label == QUERY_MARKER)


def build_comparator(layout: QubitLayout, *, drop_bit: int | None = None) -> Circuit:
    """Phase kickback on `kickback` iff data == target_s and c == 1; data and target_s restored.

    `drop_bit` omits the computing CNOT of that bit (mutation used to test the checkers).
    """
    data, target = layout.data, layout.target_s
    compute = [cnot(target.bit(i), data.bit(i)) for i in range(layout.m) if i != drop_bit]
    uncompute = [cnot(target.bit(i), data.bit(i)) for i in reversed(range(layout.m))]
    phase = MultiControlledX(
        controls=(*(Control(q, False) for q in data.qubits), Control(layout.c_flag.offset, True)),
        targets=(layout.kickback.offset,),
    )
    return Circuit(layout.qubit_count, (*compute, phase, *uncompute))


def _check_target(db: Database, s: int) -> None:
    if not 0 <= s < (1 << db.m):
        raise ValueOutOfRange(f"target {s} does not fit m={db.m} bits")


def build_oracle_query(db: Database, s: int, layout: QubitLayout, *, comparator: Circuit | None = None) -> Circuit:
    _check_target(db, s)
    layout.check(db)
    toggle = Circuit(layout.qubit_count, (cnot(layout.one_wire.offset, layout.c_flag.offset),))
    if comparator is None:
        comparator = build_comparator(layout)
    return (toggle + build_load_circuit(db, layout) + comparator).marked(QUERY_MARKER)


def build_double_query(
    db: Database, s: int, layout: QubitLayout, *, comparator: Circuit | None = None
) -> OracleBlock:
    with logfire.span("qdbsearch.oracle.build_double_query", n=db.n, m=db.m, s=s):
        single = build_oracle_query(db, s, layout, comparator=comparator)
        block = OracleBlock(single_query=single, double_query=single + single)
        logfire.info("qdbsearch.oracle.built", single_gates=len(single), double_gates=len(block.double_query))
        return block
