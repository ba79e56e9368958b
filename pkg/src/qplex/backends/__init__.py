from .annealer import AnnealerSimSolver, sample_qubo, solve_annealing
from .base import DeviceInfo, SampleSet, SolveOptions, Solver, select_device
from .exact import ExactSolver, solve_exact
from .factory import get_solver, register_solver, registered_backends, solve
from .ggae import ggae_solve
from .remote import MockRemoteSolver, RemoteClient, RemoteSolver, remote_run, remote_submit
from .simulator import MAX_QUBITS, SimulatorSolver, probabilities, run_circuit, statevector

__all__ = [
    "AnnealerSimSolver", "DeviceInfo", "ExactSolver", "MAX_QUBITS", "MockRemoteSolver", "RemoteClient",
    "RemoteSolver", "SampleSet", "SimulatorSolver", "SolveOptions", "Solver", "get_solver", "ggae_solve",
    "probabilities", "register_solver", "registered_backends", "remote_run", "remote_submit", "run_circuit",
    "sample_qubo", "select_device", "solve", "solve_annealing", "solve_exact", "statevector",
]
