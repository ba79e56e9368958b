"""Gate-based variational loop: QUBO -> bound circuit -> execute -> classical
update -> rebuild, then a final sampling run at the best parameters."""
from __future__ import annotations

import dataclasses
import time
from typing import Callable

import numpy as np

from ..circuits import AnsatzSpec, CircuitIR, build_qaoa, build_vqe, param_count, split_qaoa_params
from ..errors import BackendError, OptimizationError
from ..model import Solution, check_feasible, evaluate
from ..optimize import initial_params, minimize
from ..qubo import ConversionResult, all_bitstrings, decode, qubo_energy, to_ising
from .base import SampleSet, SolveOptions

# execute(circuit, shots, seed) -> SampleSet, or a probability vector when shots == 0
Executor = Callable[[CircuitIR, int, int], "SampleSet | np.ndarray"]

FINAL_SHOTS = 1024
_FINAL_STREAM = 2**31 - 1


def derive_seed(seed: int, k: int) -> int:
    return int(np.random.SeedSequence([seed, k]).generate_state(1)[0])


def ansatz_for(cr: ConversionResult, options: SolveOptions):
    """(AnsatzSpec, params -> CircuitIR) for the requested algorithm."""
    n = cr.qubo.n
    if options.algorithm == "qaoa":
        ising = to_ising(cr.qubo)
        spec = AnsatzSpec("qaoa", options.p, n)
        return spec, lambda params: build_qaoa(ising, options.p, *split_qaoa_params(params, options.p))
    if options.algorithm == "vqe":
        spec = AnsatzSpec("vqe", options.depth, n)
        return spec, lambda params: build_vqe(n, options.depth, params)
    raise BackendError(f"algorithm/backend mismatch: {options.algorithm!r} is not a gate-based algorithm")


class _EnergyTable:
    def __init__(self, cr: ConversionResult):
        self.q = cr.qubo
        self._cache: dict[str, float] = {}
        self._dense = None

    def __call__(self, bits: str) -> float:
        if bits not in self._cache:
            self._cache[bits] = qubo_energy(self.q, bits)
        return self._cache[bits]

    def dense(self) -> np.ndarray:
        """Energies indexed like simulator amplitudes (bit q of the index = qubit q)."""
        if self._dense is None:
            self._dense = self.q.energies(all_bitstrings(self.q.n))
        return self._dense

    def expectation(self, result) -> float:
        if isinstance(result, SampleSet):
            return sum(c * self(b) for b, c in result.counts.items()) / result.shots
        return float(np.dot(np.asarray(result, dtype=float), self.dense()))


def ggae_solve(cr: ConversionResult, options: SolveOptions, execute: Executor, backend_name: str) -> Solution:
    t0 = time.perf_counter()
    spec, build = ansatz_for(cr, options)
    table = _EnergyTable(cr)
    init = (np.asarray(options.init_params, dtype=float) if options.init_params is not None
            else initial_params(spec, options.seed))
    if len(init) != param_count(spec):
        raise BackendError(f"{spec.kind} ansatz takes {param_count(spec)} parameters, got {len(init)}")

    evaluated: list[dict] = []

    def loss(params: np.ndarray) -> float:
        k = len(evaluated)
        result = execute(build(params), options.shots, derive_seed(options.seed, k))
        value = table.expectation(result)
        evaluated.append({"params": [float(p) for p in params], "loss": value})
        return value

    config = dataclasses.replace(options.optimizer, seed=options.seed)
    base_meta = {"algorithm": options.algorithm, "layers": spec.layers, "num_qubits": spec.num_qubits,
                 "optimizer": config.name, "shots": options.shots}
    try:
        trace = minimize(loss, init, config)
        best_params = np.asarray(trace.best_params)
        final_shots = max(options.shots, FINAL_SHOTS)
        final = execute(build(best_params), final_shots, derive_seed(options.seed, _FINAL_STREAM))
    except (BackendError, OptimizationError) as exc:
        meta = dict(base_meta, error=str(exc), partial_trace=evaluated,
                    wall_time_ms=(time.perf_counter() - t0) * 1e3)
        return Solution("error", {}, None, backend_name, meta)
    if not isinstance(final, SampleSet):
        raise BackendError("executor must return samples for shots > 0")

    best = min(final.counts, key=lambda b: (table(b), b))
    assignment = decode(cr, best)
    status = "feasible" if check_feasible(cr.model, assignment) else "infeasible"
    meta = dict(
        base_meta,
        iterations=trace.iterations,
        evaluations=trace.evaluations,
        best_loss=trace.best_loss,
        best_params=list(trace.best_params),
        termination_reason=trace.termination_reason,
        final_shots=final_shots,
        best_bitstring=best,
        best_energy=table(best),
        samples={"top": [[b, c] for b, c in final.most_common(10)], "distinct": len(final.counts)},
        wall_time_ms=(time.perf_counter() - t0) * 1e3,
    )
    return Solution(status, assignment, evaluate(cr.model, assignment), backend_name, meta)
