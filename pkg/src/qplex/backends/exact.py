"""Brute-force enumeration solver used as the reference oracle."""
from __future__ import annotations

import time

import numpy as np

from ..errors import CapacityError, ConversionError
from ..model import FEASIBILITY_TOL, Model, Solution
from ..qubo import all_bitstrings, bits_to_str, range_coefficients
from .base import Solver

_CHUNK = 1 << 16


def encoded_bits(model: Model) -> int:
    return sum(len(range_coefficients(v.upper - v.lower)) for v in model.variables)


def _value_grid(model: Model):
    """Yield (rows, nvars) arrays of every assignment in lexicographic order."""
    ranges = [np.arange(int(v.lower), int(v.upper) + 1, dtype=float) for v in model.variables]
    sizes = [len(r) for r in ranges]
    total = int(np.prod(sizes))
    strides = [int(np.prod(sizes[i + 1:])) for i in range(len(sizes))]
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total))
        yield np.stack([r[(idx // s) % len(r)] for r, s in zip(ranges, strides)], axis=1)


def solve_exact(model: Model, limit: int = 22) -> Solution:
    """Enumerate every assignment; ties go to the lexicographically smallest one."""
    t0 = time.perf_counter()
    for v in model.variables:
        if not v.is_discrete:
            raise ConversionError(f"continuous variable {v.name!r} is not supported by the exact solver")
    bits = encoded_bits(model)
    if bits > limit:
        raise CapacityError(f"model needs {bits} encoded bits, exact solver limit is {limit}")

    expr = model.objective.expr
    sign = -1.0 if model.maximize else 1.0
    best_val, best_row, count = None, None, 0
    for X in _value_grid(model):
        count += len(X)
        obj = np.full(len(X), expr.constant)
        for i, c in expr.linear.items():
            obj += c * X[:, i]
        for (i, j), c in expr.quadratic.items():
            obj += c * X[:, i] * X[:, j]
        ok = np.ones(len(X), dtype=bool)
        for con in model.constraints:
            lhs = np.zeros(len(X))
            for i, a in con.lhs.linear.items():
                lhs += a * X[:, i]
            if con.sense == "<=":
                ok &= lhs <= con.rhs + FEASIBILITY_TOL
            elif con.sense == ">=":
                ok &= lhs >= con.rhs - FEASIBILITY_TOL
            else:
                ok &= np.abs(lhs - con.rhs) <= FEASIBILITY_TOL
        if not ok.any():
            continue
        scored = np.where(ok, sign * obj, np.inf)
        k = int(np.argmin(scored))  # first minimum = lexicographically smallest
        if best_val is None or scored[k] < best_val:
            best_val, best_row = float(scored[k]), X[k]

    meta = {"enumerated": count, "encoded_bits": bits, "wall_time_ms": (time.perf_counter() - t0) * 1e3}
    if best_row is None:
        return Solution("infeasible", {}, None, "exact", meta)
    assignment = {v.name: float(x) for v, x in zip(model.variables, best_row)}
    return Solution("optimal", assignment, sign * best_val, "exact", meta)


class ExactSolver(Solver):
    name = "exact"
    kind = "classical"
    algorithms = ("exact",)

    def solve(self, problem):
        model = problem.model if hasattr(problem, "model") else problem
        return solve_exact(model)


def brute_force_qubo(q) -> tuple[str, float]:
    """Minimum-energy bitstring of a small QUBO by enumeration (oracle helper)."""
    B = all_bitstrings(q.n)
    e = q.energies(B)
    k = int(np.argmin(e))
    return bits_to_str(B[k]), float(e[k])
