"""Grover search driver over the explicit memory oracle."""

from __future__ import annotations

import math
from collections.abc import Iterable
from time import perf_counter
from typing import Literal

import logfire
from pydantic import BaseModel, ConfigDict, Field, NonNegativeInt

from qdbsearch.circuit import Circuit, GateStats, gate_stats, kept_qubits, specialize_circuit
from qdbsearch.errors import RestoreViolation, ValueOutOfRange, ZeroMultiplicity
from qdbsearch.gates import Control, Hadamard, PauliX, mcx
from qdbsearch.oracle import QUERY_MARKER, build_double_query
from qdbsearch.qmem import Database, QubitLayout
from qdbsearch.statevec import (
    NORM_TOLERANCE,
    RegisterSlice,
    StateVector,
    apply_circuit,
    check_disjoint,
    marginal_probability,
    new_basis_state,
    register_distribution,
    remap_slice,
    sample_register,
)

DIFFUSION_MARKER = "diffusion"


class SearchOptions(BaseModel):
    model_config = ConfigDict(frozen=True)

    iterations: Literal["auto"] | NonNegativeInt = "auto"
    shots: int = Field(1024, ge=0)
    seed: int = Field(0, ge=0, lt=2**64)
    fold: bool = False
    restore: bool = True


class RunReport(BaseModel):
    n: int
    m: int
    s: int
    target: str
    multiplicity: int
    iterations: int
    query_count: int
    restore: bool
    success_probabilities: list[float]
    data_restored: list[float]
    histogram: dict[int, int]
    shots: int
    seed: int
    found: bool
    reported_address: int | None
    qubit_count: int
    folded_qubits: int
    gate_stats: GateStats
    wall_time_s: float

    @property
    def success_probability(self) -> float:
        return self.success_probabilities[-1]


def build_initialization(layout: QubitLayout, s: int) -> Circuit:
    """Gates taking |0...0> to the starting state: H on address, |s>, |->, c = 0, |1>."""
    gates = [Hadamard(q) for q in layout.address.qubits]
    gates += [PauliX(layout.target_s.bit(i)) for i in range(layout.m) if (s >> i) & 1]
    gates.append(PauliX(layout.one_wire.offset))
    gates += [PauliX(layout.kickback.offset), Hadamard(layout.kickback.offset)]
    return Circuit(layout.qubit_count, tuple(gates))


def build_initial_state(db: Database, s: int, layout: QubitLayout) -> StateVector:
    if not 0 <= s < (1 << db.m):
        raise ValueOutOfRange(f"target {s} does not fit m={db.m} bits")
    layout.check(db)
    return apply_circuit(new_basis_state(layout.qubit_count, 0), build_initialization(layout, s))


def build_diffusion(layout: QubitLayout) -> Circuit:
    """2|psi><psi| - I on the address register, up to a global phase of -1."""
    address = list(layout.address.qubits)
    pivot, rest = address[0], address[1:]
    layer_h = [Hadamard(q) for q in address]
    layer_x = [PauliX(q) for q in address]
    reflect = [Hadamard(pivot), mcx((Control(q) for q in rest), (pivot,)), Hadamard(pivot)]
    gates = (*layer_h, *layer_x, *reflect, *layer_x, *layer_h)
    return Circuit(layout.qubit_count, gates).marked(DIFFUSION_MARKER)


def iteration_count(size: int, multiplicity: int) -> int:
    """floor(pi / (4 * arcsin(sqrt(M / N))))."""
    if size < 1:
        raise ValueOutOfRange(f"search space size must be >= 1, got {size}")
    if multiplicity == 0:
        raise ZeroMultiplicity("no record matches the target; the iteration schedule is undefined")
    if not 0 < multiplicity <= size:
        raise ValueOutOfRange(f"multiplicity {multiplicity} outside [1, {size}]")
    theta = math.asin(math.sqrt(multiplicity / size))
    # 1e-12 keeps exact-integer ratios such as M/N = 1/2 from rounding down
    return math.floor(math.pi / (4 * theta) + 1e-12)


def build_grover_circuit(
    db: Database, s: int, layout: QubitLayout, iterations: int, *, restore: bool = True
) -> Circuit:
    """Initialization followed by `iterations` rounds of (query block, diffusion)."""
    block = build_double_query(db, s, layout)
    query = block.double_query if restore else block.single_query
    step = query + build_diffusion(layout)
    circuit = build_initialization(layout, s)
    for _ in range(iterations):
        circuit = circuit + step
    return circuit


def _success(state: StateVector, address: RegisterSlice, solutions: tuple[int, ...]) -> float:
    if not solutions:
        return 0.0
    dist = register_distribution(state, address)
    return float(sum(dist[x] for x in solutions))


def success_probability(state: StateVector, db: Database, s: int, layout: QubitLayout) -> float:
    """Probability that reading the address register yields a record equal to s."""
    return _success(state, layout.address, db.solutions(s))


def _mode(histogram: dict[int, int]) -> int | None:
    if not histogram:
        return None
    return min(histogram, key=lambda address: (-histogram[address], address))


def run_search(db: Database, s: int, options: SearchOptions | None = None) -> RunReport:
    options = options or SearchOptions()
    layout = QubitLayout.for_database(db)
    solutions = db.solutions(s)
    multiplicity = len(solutions)

    with logfire.span(
        "qdbsearch.grover.run_search",
        n=db.n,
        m=db.m,
        s=s,
        multiplicity=multiplicity,
        fold=options.fold,
        restore=options.restore,
    ):
        start = perf_counter()
        if options.iterations == "auto":
            if multiplicity == 0:
                logfire.warning("qdbsearch.grover.no_solution", s=s, fallback="schedule as M=1")
            iterations = iteration_count(db.size, max(multiplicity, 1))
        else:
            iterations = options.iterations

        block = build_double_query(db, s, layout)
        query = block.double_query if options.restore else block.single_query
        step = query + build_diffusion(layout)
        init = build_initialization(layout, s)
        state_qubits = layout.qubit_count
        address, data, c_flag = layout.address, layout.data, layout.c_flag

        if options.fold:
            fixed_start = {q: 0 for q in layout.target_s.qubits} | {layout.one_wire.offset: 0}
            fixed_loop = {layout.target_s.bit(i): (s >> i) & 1 for i in range(db.m)} | {layout.one_wire.offset: 1}
            kept = kept_qubits(layout.qubit_count, fixed_loop)
            init = specialize_circuit(init, fixed_start)
            step = specialize_circuit(step, fixed_loop)
            state_qubits = len(kept)
            address, data, c_flag = (remap_slice(r, kept) for r in (address, data, c_flag))
            check_disjoint({"address": address, "data": data, "c_flag": c_flag})
            logfire.info("qdbsearch.grover.folded", qubits=state_qubits, removed=layout.qubit_count - state_qubits)

        state = apply_circuit(new_basis_state(state_qubits, 0), init)
        probabilities = [_success(state, address, solutions)]
        restored: list[float] = []
        query_count = 0

        for iteration in range(1, iterations + 1):
            apply_circuit(state, step)
            query_count += step.marker_count(QUERY_MARKER)
            probabilities.append(_success(state, address, solutions))
            data_zero = marginal_probability(state, data, 0)
            restored.append(data_zero)
            if options.restore:
                c_zero = marginal_probability(state, c_flag, 0)
                if abs(data_zero - 1.0) > NORM_TOLERANCE or abs(c_zero - 1.0) > NORM_TOLERANCE:
                    raise RestoreViolation(
                        f"after iteration {iteration}: P(data=0)={data_zero:.12f}, P(c=0)={c_zero:.12f}"
                    )
            logfire.debug("qdbsearch.grover.iteration", iteration=iteration, success=probabilities[-1])

        histogram = sample_register(state, address, options.shots, options.seed)
        reported = _mode(histogram)
        found = reported is not None and db.records[reported] == s
        stats = gate_stats(build_grover_circuit(db, s, layout, iterations, restore=options.restore))

        report = RunReport(
            n=db.n,
            m=db.m,
            s=s,
            target=format(s, f"0{db.m}b"),
            multiplicity=multiplicity,
            iterations=iterations,
            query_count=query_count,
            restore=options.restore,
            success_probabilities=[min(max(p, 0.0), 1.0) for p in probabilities],
            data_restored=restored,
            histogram=histogram,
            shots=options.shots,
            seed=options.seed,
            found=found,
            reported_address=reported,
            qubit_count=state_qubits,
            folded_qubits=layout.qubit_count - state_qubits,
            gate_stats=stats,
            wall_time_s=perf_counter() - start,
        )
        logfire.info(
            "qdbsearch.grover.done",
            iterations=iterations,
            queries=query_count,
            success=report.success_probability,
            found=found,
            reported_address=reported,
        )
        return report


def seed_sweep(db: Database, s: int, options: SearchOptions, seeds: Iterable[int]) -> list[RunReport]:
    """One independent run per seed, reports in seed order."""
    with logfire.span("qdbsearch.grover.seed_sweep", n=db.n, m=db.m, s=s):
        return [run_search(db, s, options.model_copy(update={"seed": seed})) for seed in seeds]
