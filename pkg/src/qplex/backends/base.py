from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from ..errors import BackendMismatchError, CapacityError, DeviceSelectionError
from ..model import Model
from ..optimize import OptimizerConfig
from ..qubo import ConversionResult, to_qubo

ALGORITHMS = ("annealing", "qaoa", "vqe", "exact")


@dataclass(frozen=True)
class SolveOptions:
    backend: str = "exact"
    algorithm: str | None = None  # None: the backend's default algorithm
    p: int = 1
    depth: int = 1
    shots: int = 1024
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    penalty: float | None = None
    seed: int = 0
    num_reads: int = 100
    sweeps: int = 1000
    beta_hot: float = 0.1
    beta_cold: float = 10.0
    init_params: tuple[float, ...] | None = None
    provider_url: str | None = None
    poll_interval: float = 0.0

    def __post_init__(self):
        if self.algorithm is not None and self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}; choose from {', '.join(ALGORITHMS)}")
        if self.shots < 0:
            raise ValueError("shots must be >= 0")
        if self.p < 1 or self.depth < 1:
            raise ValueError("p and depth must be >= 1")
        if self.num_reads < 1 or self.sweeps < 1:
            raise ValueError("num_reads and sweeps must be >= 1")
        if not 0 < self.beta_hot <= self.beta_cold:
            raise ValueError("need 0 < beta_hot <= beta_cold")


@dataclass(frozen=True)
class SampleSet:
    """Measured bitstring -> count. Character i of a key is bit/qubit i."""

    counts: dict[str, int]
    shots: int

    def __post_init__(self):
        if sum(self.counts.values()) != self.shots:
            raise ValueError(f"counts sum to {sum(self.counts.values())}, expected {self.shots} shots")
        if len({len(k) for k in self.counts}) > 1:
            raise ValueError("bitstrings of mixed length")

    def most_common(self, k: int | None = None) -> list[tuple[str, int]]:
        items = sorted(self.counts.items(), key=lambda kv: (-kv[1], kv[0]))
        return items if k is None else items[:k]

    def to_dict(self) -> dict[str, Any]:
        return {"counts": dict(sorted(self.counts.items())), "shots": self.shots}

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "SampleSet":
        return cls({str(k): int(v) for k, v in doc["counts"].items()}, int(doc["shots"]))


@dataclass(frozen=True)
class DeviceInfo:
    name: str
    num_qubits: int
    queue_length: int
    kind: str

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be >= 1")
        if self.queue_length < 0:
            raise ValueError("queue_length must be >= 0")
        if self.kind not in ("gate", "annealer"):
            raise ValueError(f"device kind must be 'gate' or 'annealer', got {self.kind!r}")

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "num_qubits": self.num_qubits,
                "queue_length": self.queue_length, "kind": self.kind}


def select_device(devices: Sequence[DeviceInfo], required_qubits: int) -> DeviceInfo:
    """Shortest queue among devices large enough; ties go to the smallest name."""
    if not devices:
        raise DeviceSelectionError("no devices available")
    fits = [d for d in devices if d.num_qubits >= required_qubits]
    if not fits:
        largest = max(devices, key=lambda d: (d.num_qubits, d.name))
        raise DeviceSelectionError(
            f"no device with ≥{required_qubits} qubits (largest is {largest.name} with {largest.num_qubits})"
        )
    return min(fits, key=lambda d: (d.queue_length, d.name))


class Solver:
    """One backend. Subclasses set ``name``, ``kind``, ``algorithms`` and implement ``solve``."""

    name = "solver"
    kind = "classical"  # gate | annealer | classical
    algorithms: tuple[str, ...] = ()
    max_qubits: int | None = None

    def __init__(self, options: SolveOptions | None = None):
        self.options = options or SolveOptions(backend=self.name)
        self.algorithm = self.options.algorithm or self.algorithms[0]
        if self.algorithm not in self.algorithms:
            raise BackendMismatchError(
                f"algorithm/backend mismatch: {self.name!r} runs {', '.join(self.algorithms)}, "
                f"not {self.algorithm!r}"
            )

    @property
    def capability(self) -> dict[str, Any]:
        return {"kind": self.kind, "max_qubits": self.max_qubits, "algorithms": list(self.algorithms)}

    def convert(self, problem: Model | ConversionResult) -> ConversionResult:
        if isinstance(problem, ConversionResult):
            return problem
        return to_qubo(problem, self.options.penalty)

    def check_width(self, n: int) -> None:
        if self.max_qubits is not None and n > self.max_qubits:
            raise CapacityError(f"{self.name} handles at most {self.max_qubits} qubits, problem needs {n}")

    def solve(self, problem: Model | ConversionResult):
        raise NotImplementedError
