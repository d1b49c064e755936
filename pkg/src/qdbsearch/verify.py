"""Brute-force and closed-form references for the memory, comparator and search circuits."""

from __future__ import annotations

import math
from collections.abc import Iterator
from dataclasses import dataclass
from itertools import product

import logfire
import numpy as np

from qdbsearch.circuit import Circuit, to_unitary, unitarity_check
from qdbsearch.config import get_settings
from qdbsearch.errors import MatrixCapExceeded
from qdbsearch.gates import Hadamard
from qdbsearch.grover import SearchOptions, build_diffusion, run_search
from qdbsearch.oracle import build_comparator, build_double_query, build_oracle_query
from qdbsearch.qmem import Database, QubitLayout, build_load_circuit, load_twice_is_identity, random_database
from qdbsearch.statevec import StateVector, apply_circuit, marginal_probability, new_basis_state


@dataclass(frozen=True)
class VerificationResult:
    check: str
    error: float
    worst_case: str
    passed: bool


def multiplicity(db: Database, s: int) -> int:
    return sum(1 for record in db.records if record == s)


def ideal_phase_oracle_matrix(db: Database, s: int) -> np.ndarray:
    if db.n > get_settings().matrix_cap:
        raise MatrixCapExceeded(f"ideal oracle matrix limited to n <= {get_settings().matrix_cap}, got n={db.n}")
    return np.diag([-1.0 if record == s else 1.0 for record in db.records]).astype(np.complex128)


def ideal_success_probability(size: int, solutions: int, iterations: int) -> float:
    """sin^2((2r + 1) theta) with sin^2(theta) = M / N; zero when there is no solution."""
    if solutions == 0:
        return 0.0
    theta = math.asin(math.sqrt(solutions / size))
    return math.sin((2 * iterations + 1) * theta) ** 2


def _prepared_input(layout: QubitLayout, x: int, s: int) -> StateVector:
    """|x>|0>_d|s>|->|0>_c|1>: the inputs the oracle contract is stated on."""
    index = x | (s << layout.target_s.offset) | (1 << layout.one_wire.offset) | (1 << layout.kickback.offset)
    state = new_basis_state(layout.qubit_count, index)
    return apply_circuit(state, Circuit(layout.qubit_count, (Hadamard(layout.kickback.offset),)))


def corrupt_comparator(layout: QubitLayout, s: int) -> Circuit:
    """Comparator with one gate removed so that the drop is observable.

    Drops the computing CNOT of the lowest set bit of s; for s = 0 every such CNOT is inert,
    so the phase gate is dropped instead.
    """
    set_bits = [i for i in range(layout.m) if (s >> i) & 1]
    if set_bits:
        return build_comparator(layout, drop_bit=set_bits[0])
    intact = build_comparator(layout)
    return Circuit(layout.qubit_count, intact.gates[: layout.m] + intact.gates[layout.m + 1 :])


def oracle_equivalence_check(
    db: Database,
    s: int,
    layout: QubitLayout,
    *,
    double_query: Circuit | None = None,
    mode: str = "auto",
) -> float:
    """Worst amplitude deviation of the double query from the ideal phase oracle.

    Compared only on the prepared inputs |x> (x) ancillas; outside that subspace the double
    query is not (and need not be) the ideal oracle.
    """
    if double_query is None:
        double_query = build_double_query(db, s, layout).double_query
    phases = [-1.0 if record == s else 1.0 for record in db.records]
    inputs = [_prepared_input(layout, x, s) for x in range(db.size)]
    if mode == "auto":
        mode = "matrix" if layout.qubit_count <= get_settings().matrix_cap else "subspace"

    with logfire.span("qdbsearch.verify.oracle_equivalence", n=db.n, m=db.m, s=s, mode=mode):
        if mode == "matrix":
            unitary = to_unitary(double_query)
            basis = np.stack([state.amplitudes for state in inputs], axis=1)
            return float(np.max(np.abs(unitary @ basis - basis * np.array(phases))))
        if mode != "subspace":
            raise ValueError(f"unknown mode {mode!r}")
        worst = 0.0
        for phase, state in zip(phases, inputs, strict=True):
            expected = state.amplitudes * phase
            apply_circuit(state, double_query)
            worst = max(worst, float(np.max(np.abs(state.amplitudes - expected))))
        return worst


def restore_check(db: Database, s: int, layout: QubitLayout, *, double_query: Circuit | None = None) -> float:
    """Worst 1 - P(data = 0) or 1 - P(c = 0) after one double query on each prepared input."""
    if double_query is None:
        double_query = build_double_query(db, s, layout).double_query
    worst = 0.0
    for x in range(db.size):
        state = apply_circuit(_prepared_input(layout, x, s), double_query)
        data_zero = marginal_probability(state, layout.data, 0)
        c_zero = marginal_probability(state, layout.c_flag, 0)
        worst = max(worst, abs(1.0 - data_zero), abs(1.0 - c_zero))
    return worst


def _unitarity_targets(db: Database, s: int, layout: QubitLayout, comparator: Circuit) -> dict[str, Circuit]:
    cap = get_settings().matrix_cap
    load = build_load_circuit(db, layout)
    targets = {
        "load": Circuit(db.n + db.m, load.gates),
        "diffusion": Circuit(db.n, build_diffusion(layout).gates),
    }
    if layout.qubit_count <= cap:
        query = build_oracle_query(db, s, layout, comparator=comparator)
        targets |= {"comparator": comparator, "double_query": query + query}
    return {name: c for name, c in targets.items() if c.qubit_count <= cap}


def verify_database(db: Database, s: int, layout: QubitLayout, *, corrupt: bool = False) -> list[VerificationResult]:
    tolerance = get_settings().tolerance
    comparator = corrupt_comparator(layout, s) if corrupt else build_comparator(layout)
    double_query = build_double_query(db, s, layout, comparator=comparator).double_query
    case = f"n={db.n} m={db.m} s={s} records={list(db.records)}"
    results: list[VerificationResult] = []

    def record(check: str, error: float, detail: str = "") -> None:
        worst = f"{case} {detail}".strip()
        results.append(VerificationResult(check, error, worst, error <= tolerance))

    with logfire.span("qdbsearch.verify.database", n=db.n, m=db.m, s=s, corrupt=corrupt):
        record("load_involution", load_twice_is_identity(db, layout))

        unitarity = {name: unitarity_check(c) for name, c in _unitarity_targets(db, s, layout, comparator).items()}
        worst_name = max(unitarity, key=unitarity.__getitem__)
        record("unitarity", unitarity[worst_name], f"circuit={worst_name}")

        record("restore", restore_check(db, s, layout, double_query=double_query))
        record("oracle_equivalence", oracle_equivalence_check(db, s, layout, double_query=double_query))

        solutions = multiplicity(db, s)
        if solutions and not corrupt:
            report = run_search(db, s, SearchOptions(iterations=3, shots=0))
            deviations = [
                abs(p - ideal_success_probability(db.size, solutions, r))
                for r, p in enumerate(report.success_probabilities)
            ]
            worst_r = int(np.argmax(deviations))
            record("grover_curve", deviations[worst_r], f"r={worst_r}")

        for result in results:
            logfire.info("qdbsearch.verify.check", check=result.check, error=result.error, passed=result.passed)
        return results


def sweep_small(seed: int = 0, random_cases: int = 30) -> Iterator[tuple[Database, int]]:
    """Every database with n in {1, 2}, m = 1 and every target, then seeded random cases (n <= 3, m <= 2)."""
    for n in (1, 2):
        for records in product((0, 1), repeat=1 << n):
            for s in (0, 1):
                yield Database(n, 1, records), s

    rng = np.random.default_rng(seed)
    for case in range(random_cases):
        n = int(rng.integers(1, 4))
        m = int(rng.integers(1, 3))
        s = int(rng.integers(0, 1 << m))
        yield random_database(n, m, rng, ensure=s if case % 2 == 0 else None), s


def planted_database(n: int, m: int, s: int, solutions: tuple[int, ...]) -> Database:
    """Database holding s exactly at `solutions` and non-matching records elsewhere."""
    other = (s + 1) % (1 << m)
    return Database(n, m, tuple(s if x in solutions else other for x in range(1 << n)))
