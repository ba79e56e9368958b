"""Bound parameterized circuits (QAOA, hardware-efficient VQE) and an OpenQASM 3
emitter/parser for the gate subset they use.

Angle conventions: RZ(t) = exp(-i t Z/2), RX(t) = exp(-i t X/2), RY(t) = exp(-i t Y/2),
RZZ(t) = exp(-i t Z(x)Z/2). A QAOA layer applies exp(-i gamma H_C) then exp(-i beta sum X).
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Sequence

from .errors import CircuitError, QasmError
from .qubo import IsingModel

GATE_KINDS = ("H", "RX", "RY", "RZ", "CX", "RZZ")
_PARAMETRIC = {"RX", "RY", "RZ", "RZZ"}
_TWO_QUBIT = {"CX", "RZZ"}


@dataclass(frozen=True)
class Gate:
    kind: str
    qubits: tuple[int, ...]
    angle: float | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind in _TWO_QUBIT else 1
        if len(self.qubits) != arity or len(set(self.qubits)) != arity:
            raise CircuitError(f"{self.kind} needs {arity} distinct qubit(s), got {self.qubits}")
        if (self.angle is None) == (self.kind in _PARAMETRIC):
            raise CircuitError(f"{self.kind}: angle {'missing' if self.angle is None else 'not allowed'}")
        if self.angle is not None and not math.isfinite(self.angle):
            raise CircuitError(f"{self.kind}: non-finite angle {self.angle}")


@dataclass(frozen=True)
class CircuitIR:
    num_qubits: int
    gates: tuple[Gate, ...]
    measure_all: bool = True

    def __post_init__(self):
        if self.num_qubits < 1:
            raise CircuitError("circuit needs at least one qubit")
        for g in self.gates:
            if max(g.qubits) >= self.num_qubits or min(g.qubits) < 0:
                raise CircuitError(f"gate {g.kind}{g.qubits} outside a {self.num_qubits}-qubit register")


@dataclass(frozen=True)
class AnsatzSpec:
    kind: str
    layers: int
    num_qubits: int

    def __post_init__(self):
        if self.kind not in ("qaoa", "vqe"):
            raise CircuitError(f"unknown ansatz {self.kind!r}")
        if self.num_qubits < 1:
            raise CircuitError("num_qubits must be positive")
        if self.kind == "qaoa" and self.layers < 1:
            raise CircuitError("QAOA needs p >= 1")
        if self.kind == "vqe" and self.layers < 0:
            raise CircuitError("VQE depth must be nonnegative")


def param_count(spec: AnsatzSpec) -> int:
    if spec.kind == "qaoa":
        return 2 * spec.layers
    return spec.num_qubits * (spec.layers + 1)


def build_qaoa(m: IsingModel, p: int, gammas: Sequence[float], betas: Sequence[float]) -> CircuitIR:
    if p < 1:
        raise CircuitError("QAOA needs p >= 1")
    if len(gammas) != p or len(betas) != p:
        raise CircuitError(f"expected {p} gammas and {p} betas, got {len(gammas)} and {len(betas)}")
    gates = [Gate("H", (q,)) for q in range(m.n)]
    for gamma, beta in zip(gammas, betas):
        for (i, j), coupling in m.J.items():
            gates.append(Gate("RZZ", (i, j), 2.0 * gamma * coupling))
        for i, field in enumerate(m.h):
            if field != 0.0:
                gates.append(Gate("RZ", (i,), 2.0 * gamma * field))
        gates.extend(Gate("RX", (q,), 2.0 * beta) for q in range(m.n))
    return CircuitIR(m.n, tuple(gates), True)


def split_qaoa_params(params: Sequence[float], p: int) -> tuple[list[float], list[float]]:
    """Flat parameter vector [gamma_1..gamma_p, beta_1..beta_p] -> (gammas, betas)."""
    if len(params) != 2 * p:
        raise CircuitError(f"QAOA with p={p} takes {2 * p} parameters, got {len(params)}")
    return list(params[:p]), list(params[p:])


def build_vqe(n: int, depth: int, thetas: Sequence[float]) -> CircuitIR:
    if depth < 0:
        raise CircuitError("depth must be nonnegative")
    expected = n * (depth + 1)
    if len(thetas) != expected:
        raise CircuitError(f"VQE with n={n}, depth={depth} takes {expected} parameters, got {len(thetas)}")
    it = iter(thetas)
    gates: list[Gate] = []
    for _ in range(depth):
        gates.extend(Gate("RY", (q,), float(next(it))) for q in range(n))
        gates.extend(Gate("CX", (q, q + 1)) for q in range(n - 1))
    gates.extend(Gate("RY", (q,), float(next(it))) for q in range(n))
    return CircuitIR(n, tuple(gates), True)


def _fmt(angle: float) -> str:
    return format(angle, ".17g")


def emit_qasm3(c: CircuitIR) -> str:
    lines = [
        "OPENQASM 3.0;",
        'include "stdgates.inc";',
        f"qubit[{c.num_qubits}] q;",
        f"bit[{c.num_qubits}] c;",
    ]
    for g in c.gates:
        if g.kind == "RZZ":
            a, b = g.qubits
            lines.append(f"cx q[{a}], q[{b}];")
            lines.append(f"rz({_fmt(g.angle)}) q[{b}];")
            lines.append(f"cx q[{a}], q[{b}];")
            continue
        operands = ", ".join(f"q[{k}]" for k in g.qubits)
        if g.angle is None:
            lines.append(f"{g.kind.lower()} {operands};")
        else:
            lines.append(f"{g.kind.lower()}({_fmt(g.angle)}) {operands};")
    if c.measure_all:
        lines.append("c = measure q;")
    return "\n".join(lines) + "\n"


_GATE_RE = re.compile(r"^([a-z_][a-z0-9_]*)\s*(?:\(([^)]*)\))?\s+(.+)$", re.IGNORECASE)
_QUBIT_RE = re.compile(r"^([a-z_][a-z0-9_]*)\[(\d+)\]$", re.IGNORECASE)
_SUPPORTED = {"h": "H", "rx": "RX", "ry": "RY", "rz": "RZ", "cx": "CX"}


def parse_qasm3(text: str) -> CircuitIR:
    """Parse the OpenQASM 3 subset produced by :func:`emit_qasm3`."""
    num_qubits = None
    qreg = creg = None
    gates: list[Gate] = []
    measure = False
    saw_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        if not line.endswith(";"):
            raise QasmError(f"missing ';' in {line!r}", lineno)
        stmt = line[:-1].strip()
        if not saw_header:
            if not re.fullmatch(r"OPENQASM\s+3(\.0)?", stmt):
                raise QasmError("expected 'OPENQASM 3.0;' header", lineno)
            saw_header = True
            continue
        if re.fullmatch(r'include\s+"stdgates\.inc"', stmt):
            continue
        if measure:
            raise QasmError("statements after the final measurement are unsupported", lineno)
        m = re.fullmatch(r"qubit\[(\d+)\]\s+([a-z_][a-z0-9_]*)", stmt, re.IGNORECASE)
        if m:
            if qreg is not None:
                raise QasmError("only one qubit register is supported", lineno)
            num_qubits, qreg = int(m.group(1)), m.group(2)
            continue
        m = re.fullmatch(r"bit\[(\d+)\]\s+([a-z_][a-z0-9_]*)", stmt, re.IGNORECASE)
        if m:
            if creg is not None:
                raise QasmError("only one bit register is supported", lineno)
            creg = m.group(2)
            continue
        m = re.fullmatch(r"([a-z_][a-z0-9_]*)\s*=\s*measure\s+([a-z_][a-z0-9_]*)", stmt, re.IGNORECASE)
        if m:
            if m.group(1) != creg or m.group(2) != qreg:
                raise QasmError("measurement must map the declared qubit register to the bit register", lineno)
            measure = True
            continue
        m = _GATE_RE.match(stmt)
        if not m:
            raise QasmError(f"syntax error in {stmt!r}", lineno)
        name, arg, operands = m.group(1), m.group(2), m.group(3)
        kind = _SUPPORTED.get(name.lower())
        if kind is None:
            raise QasmError(f"unsupported gate {name!r}", lineno)
        if qreg is None:
            raise QasmError("gate before qubit declaration", lineno)
        qubits = []
        for op in operands.split(","):
            qm = _QUBIT_RE.match(op.strip())
            if not qm or qm.group(1) != qreg:
                raise QasmError(f"bad operand {op.strip()!r}", lineno)
            qubits.append(int(qm.group(2)))
        angle = None
        if kind in _PARAMETRIC:
            if arg is None:
                raise QasmError(f"{name} requires an angle", lineno)
            try:
                angle = float(arg.strip())
            except ValueError:
                raise QasmError(f"angle must be a numeric literal, got {arg.strip()!r}", lineno) from None
        elif arg is not None:
            raise QasmError(f"{name} takes no angle", lineno)
        try:
            gates.append(Gate(kind, tuple(qubits), angle))
        except CircuitError as exc:
            raise QasmError(str(exc), lineno) from None
    if not saw_header:
        raise QasmError("empty program")
    if num_qubits is None:
        raise QasmError("no qubit register declared")
    try:
        return CircuitIR(num_qubits, tuple(gates), measure)
    except CircuitError as exc:
        raise QasmError(str(exc)) from None
