"""Numba kernels acting on amplitude arrays of shape (2**Q, columns).

A single statevector is passed as a (2**Q, 1) view; `to_unitary` passes a full matrix and
every column is transformed at once. Loops are partitioned by index arithmetic, so no two
iterations touch the same row and the result does not depend on the worker count.
"""

from __future__ import annotations

from functools import lru_cache

import numba
import numpy as np
from numba import njit, prange

from qdbsearch.config import get_settings
from qdbsearch.errors import QubitOutOfRange
from qdbsearch.gates import Gate, Hadamard, MultiControlledX, PauliX

_SQRT1_2 = 0.7071067811865476


@njit(nogil=True, cache=True)
def _insert_bits(index, positions, values):
    # positions ascending; each insertion shifts the higher bits up by one
    for k in range(positions.shape[0]):
        p = positions[k]
        low = index & ((np.int64(1) << p) - 1)
        index = ((index >> p) << (p + 1)) | low | (values[k] << p)
    return index


@njit(parallel=True, nogil=True, cache=True)
def _flip_rows(amps, positions, values, flip_mask, count):
    width = amps.shape[1]
    for g in prange(count):
        i = _insert_bits(np.int64(g), positions, values)
        j = i ^ flip_mask
        for c in range(width):
            t = amps[i, c]
            amps[i, c] = amps[j, c]
            amps[j, c] = t


@njit(parallel=True, nogil=True, cache=True)
def _hadamard_rows(amps, target, count):
    stride = np.int64(1) << target
    low_mask = stride - 1
    width = amps.shape[1]
    for g in prange(count):
        k = np.int64(g)
        i = ((k >> target) << (target + 1)) | (k & low_mask)
        j = i | stride
        for c in range(width):
            a = amps[i, c]
            b = amps[j, c]
            amps[i, c] = (a + b) * _SQRT1_2
            amps[j, c] = (a - b) * _SQRT1_2


@lru_cache(maxsize=1)
def _configure_threads() -> None:
    threads = get_settings().threads
    if threads is not None:
        numba.set_num_threads(min(threads, numba.config.NUMBA_NUM_THREADS))


@lru_cache(maxsize=8192)
def _flip_plan(gate: PauliX | MultiControlledX) -> tuple[np.ndarray, np.ndarray, np.int64]:
    """Pinned bit positions/values and the XOR mask of an X-type gate.

    The lowest target is pinned to 0 so every orbit {i, i ^ mask} is visited exactly once;
    the remaining targets stay free and are flipped through the mask.
    """
    if isinstance(gate, PauliX):
        pinned = [(gate.target, 0)]
        mask = 1 << gate.target
    else:
        pinned = [(c.qubit, int(c.positive)) for c in gate.controls] + [(gate.targets[0], 0)]
        mask = 0
        for t in gate.targets:
            mask |= 1 << t
    pinned.sort()
    positions = np.array([p for p, _ in pinned], dtype=np.int64)
    values = np.array([v for _, v in pinned], dtype=np.int64)
    return positions, values, np.int64(mask)


def apply_gate_rows(amps: np.ndarray, gate: Gate, qubit_count: int) -> None:
    """Apply `gate` in place to the rows of a (2**qubit_count, k) complex array."""
    for qubit in gate.qubits:
        if qubit >= qubit_count:
            raise QubitOutOfRange(f"gate {gate} touches qubit {qubit} of a {qubit_count}-qubit register")
    _configure_threads()
    if isinstance(gate, Hadamard):
        _hadamard_rows(amps, np.int64(gate.target), 1 << (qubit_count - 1))
        return
    positions, values, mask = _flip_plan(gate)
    _flip_rows(amps, positions, values, mask, 1 << (qubit_count - positions.shape[0]))
