"""qplex: write an optimization model once, solve it exactly, by simulated
annealing, or with QAOA/VQE through an OpenQASM 3 pipeline."""
from .backends import SolveOptions, get_solver, solve
from .model import Model, ModelBuilder, Solution, check_feasible, evaluate, parse_model, serialize_model
from .optimize import OptimizerConfig
from .qubo import decode, to_ising, to_qubo

__version__ = "0.1.0"

__all__ = [
    "Model", "ModelBuilder", "OptimizerConfig", "Solution", "SolveOptions", "check_feasible", "decode",
    "evaluate", "get_solver", "parse_model", "serialize_model", "solve", "to_ising", "to_qubo",
]
