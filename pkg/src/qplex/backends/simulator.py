"""Dense statevector simulator for CircuitIR.

Qubit q is bit q of the amplitude index (little endian), so the bitstring for
index k is ``"".join(str((k >> q) & 1) for q in range(n))``.
"""
from __future__ import annotations

import dataclasses
import math

import numpy as np

from ..circuits import CircuitIR
from ..errors import CapacityError, CircuitError
from .base import SampleSet, Solver
from .ggae import ggae_solve

MAX_QUBITS = 24

_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)


def _rx(t):
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)


def _ry(t):
    c, s = math.cos(t / 2), math.sin(t / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _apply_1q(state: np.ndarray, u: np.ndarray, q: int, n: int) -> np.ndarray:
    view = state.reshape(2 ** (n - 1 - q), 2, 2**q)
    return np.einsum("ij,ajb->aib", u, view).reshape(-1)


def _apply_cx(state: np.ndarray, control: int, target: int, n: int) -> np.ndarray:
    psi = state.reshape((2,) * n)
    c_ax, t_ax = n - 1 - control, n - 1 - target
    sel = [slice(None)] * n
    sel[c_ax] = 1
    sub = psi[tuple(sel)]
    psi[tuple(sel)] = np.flip(sub, axis=t_ax if t_ax < c_ax else t_ax - 1).copy()
    return psi.reshape(-1)


def _bit(n: int, q: int) -> np.ndarray:
    return (np.arange(2**n) >> q) & 1


def statevector(c: CircuitIR) -> np.ndarray:
    n = c.num_qubits
    if n > MAX_QUBITS:
        raise CapacityError(f"simulator is limited to {MAX_QUBITS} qubits, circuit has {n}")
    state = np.zeros(2**n, dtype=complex)
    state[0] = 1.0
    for g in c.gates:
        if g.angle is not None and not math.isfinite(g.angle):
            raise CircuitError(f"non-finite angle in {g.kind}")
        if g.kind == "H":
            state = _apply_1q(state, _H, g.qubits[0], n)
        elif g.kind == "RX":
            state = _apply_1q(state, _rx(g.angle), g.qubits[0], n)
        elif g.kind == "RY":
            state = _apply_1q(state, _ry(g.angle), g.qubits[0], n)
        elif g.kind == "RZ":
            z = 1 - 2 * _bit(n, g.qubits[0])
            state = state * np.exp(-0.5j * g.angle * z)
        elif g.kind == "RZZ":
            i, j = g.qubits
            zz = 1 - 2 * (_bit(n, i) ^ _bit(n, j))
            state = state * np.exp(-0.5j * g.angle * zz)
        elif g.kind == "CX":
            state = _apply_cx(state, g.qubits[0], g.qubits[1], n)
    return state


def probabilities(c: CircuitIR) -> np.ndarray:
    return np.abs(statevector(c)) ** 2


def index_to_bits(k: int, n: int) -> str:
    return "".join("1" if (k >> q) & 1 else "0" for q in range(n))


def sample(probs: np.ndarray, n: int, shots: int, seed=0) -> SampleSet:
    rng = np.random.default_rng(seed)
    p = np.clip(probs, 0.0, None)
    counts = rng.multinomial(shots, p / p.sum())
    nz = np.flatnonzero(counts)
    return SampleSet({index_to_bits(int(k), n): int(counts[k]) for k in nz}, shots)


def run_circuit(c: CircuitIR, shots: int, seed=0) -> SampleSet | dict[str, float]:
    """Sample ``shots`` measurements, or with ``shots == 0`` return the exact
    distribution as bitstring -> probability (zero-probability outcomes omitted)."""
    if shots < 0:
        raise ValueError("shots must be >= 0")
    probs = probabilities(c)
    n = c.num_qubits
    if shots == 0:
        return {index_to_bits(int(k), n): float(probs[k]) for k in np.flatnonzero(probs)}
    return sample(probs, n, shots, seed)


def local_executor(c: CircuitIR, shots: int, seed=0):
    probs = probabilities(c)
    return probs if shots == 0 else sample(probs, c.num_qubits, shots, seed)


class SimulatorSolver(Solver):
    name = "simulator"
    kind = "gate"
    algorithms = ("qaoa", "vqe")
    max_qubits = MAX_QUBITS

    def solve(self, problem):
        cr = self.convert(problem)
        self.check_width(cr.qubo.n)
        options = dataclasses.replace(self.options, algorithm=self.algorithm)
        return ggae_solve(cr, options, local_executor, self.name)
