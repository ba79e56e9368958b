"""Classical Metropolis annealing over QUBO bits, standing in for an annealer QPU."""
from __future__ import annotations

import time

import numpy as np

from ..model import Solution, check_feasible, evaluate
from ..qubo import ConversionResult, Qubo, bits_to_str, decode
from .base import SampleSet, SolveOptions, Solver


def sample_qubo(q: Qubo, num_reads: int = 100, sweeps: int = 1000, beta_hot: float = 0.1,
                beta_cold: float = 10.0, seed=0) -> tuple[SampleSet, dict[str, float]]:
    """Run ``num_reads`` independent annealing chains, vectorized across reads.

    Returns the per-read best bitstrings as a SampleSet and their energies.
    """
    n = q.n
    rng = np.random.default_rng(seed)
    if n == 0:
        return SampleSet({"": num_reads}, num_reads), {"": q.offset}
    lin = np.asarray(q.linear, dtype=float)
    sym = np.zeros((n, n))
    for (i, j), c in q.quadratic.items():
        sym[i, j] = sym[j, i] = c

    x = rng.integers(0, 2, size=(num_reads, n)).astype(float)
    energy = q.energies(x)
    best_x, best_e = x.copy(), energy.copy()
    betas = np.geomspace(beta_hot, beta_cold, sweeps)
    for beta in betas:
        uniforms = rng.random((n, num_reads))
        for i in range(n):
            local = lin[i] + x @ sym[:, i]
            delta = (1.0 - 2.0 * x[:, i]) * local
            accept = (delta <= 0) | (uniforms[i] < np.exp(-beta * np.clip(delta, 0, None)))
            x[accept, i] = 1.0 - x[accept, i]
            energy = energy + np.where(accept, delta, 0.0)
        improved = energy < best_e
        best_x[improved] = x[improved]
        best_e[improved] = energy[improved]

    counts: dict[str, int] = {}
    energies: dict[str, float] = {}
    for row in best_x.astype(int):
        key = bits_to_str(row)
        counts[key] = counts.get(key, 0) + 1
    for key in counts:
        # recompute exactly to avoid drift from incremental updates
        energies[key] = float(q.energies(np.array([[int(ch) for ch in key]]))[0])
    return SampleSet(counts, num_reads), energies


def lowest_energy(energies: dict[str, float]) -> str:
    return min(energies, key=lambda b: (energies[b], b))


def solve_annealing(cr: ConversionResult, options=None) -> Solution:
    options = options or SolveOptions(backend="annealer-sim", algorithm="annealing")
    t0 = time.perf_counter()
    samples, energies = sample_qubo(cr.qubo, options.num_reads, options.sweeps,
                                    options.beta_hot, options.beta_cold, options.seed)
    return solution_from_samples(cr, samples, energies, "annealer-sim", {
        "num_reads": options.num_reads,
        "sweeps": options.sweeps,
        "beta_hot": options.beta_hot,
        "beta_cold": options.beta_cold,
        "wall_time_ms": (time.perf_counter() - t0) * 1e3,
    })


def solution_from_samples(cr: ConversionResult, samples: SampleSet, energies: dict[str, float],
                          backend: str, meta: dict) -> Solution:
    best = lowest_energy(energies)
    assignment = decode(cr, best)
    status = "feasible" if check_feasible(cr.model, assignment) else "infeasible"
    meta = dict(meta)
    meta.update({
        "best_bitstring": best,
        "best_energy": energies[best],
        "shots": samples.shots,
        "samples": samples.to_dict(),
    })
    return Solution(status, assignment, evaluate(cr.model, assignment), backend, meta)


class AnnealerSimSolver(Solver):
    name = "annealer-sim"
    kind = "annealer"
    algorithms = ("annealing",)

    def solve(self, problem):
        return solve_annealing(self.convert(problem), self.options)
