"""Solver factory: backend name -> configured solver instance."""
from __future__ import annotations

import dataclasses

from ..errors import UnknownBackendError
from ..model import Model, Solution
from ..qubo import ConversionResult
from .annealer import AnnealerSimSolver
from .base import SolveOptions, Solver
from .exact import ExactSolver
from .remote import MockRemoteSolver
from .simulator import SimulatorSolver

_REGISTRY: dict[str, type[Solver]] = {
    "exact": ExactSolver,
    "annealer-sim": AnnealerSimSolver,
    "simulator": SimulatorSolver,
    "mock-remote": MockRemoteSolver,
}


def register_solver(name: str, cls: type[Solver]) -> None:
    """Make a new backend available under ``name`` (e.g. a provider adapter)."""
    if not name:
        raise ValueError("backend name must be nonempty")
    _REGISTRY[name] = cls


def registered_backends() -> list[str]:
    return sorted(_REGISTRY)


def get_solver(name: str, options: SolveOptions | None = None) -> Solver:
    try:
        cls = _REGISTRY[name]
    except KeyError:
        raise UnknownBackendError(
            f"unknown backend {name!r}; registered backends: {', '.join(registered_backends())}"
        ) from None
    return cls(options if options is not None else SolveOptions(backend=name))


def solve(problem: Model | ConversionResult, options: SolveOptions | None = None, **overrides) -> Solution:
    """Solve ``problem`` on the backend named in ``options`` (keyword overrides allowed)."""
    options = options or SolveOptions()
    if overrides:
        options = dataclasses.replace(options, **overrides)
    return get_solver(options.backend, options).solve(problem)
