from __future__ import annotations

from typing import Any, Literal, Optional, Union

from pydantic import BaseModel, Field


class Device(BaseModel):
    name: str
    num_qubits: int = Field(ge=1)
    queue_length: int = Field(ge=0)
    kind: Literal["gate", "annealer"]


class JobRequest(BaseModel):
    kind: Literal["gate", "annealer"]
    payload: Union[str, dict[str, Any]]
    shots: int = Field(ge=1)
    device: str
    seed: Optional[int] = Field(default=None, ge=0)


class JobCreated(BaseModel):
    job_id: str


class JobStatus(BaseModel):
    status: Literal["queued", "running", "done", "failed"]
    error: Optional[str] = None


class JobResult(BaseModel):
    counts: dict[str, int]
    shots: int


class OptimizerSettings(BaseModel):
    name: Literal["nelder-mead", "spsa", "adam", "cobyla"] = "nelder-mead"
    max_iter: int = Field(default=200, ge=1)
    tol: float = Field(default=1e-6, gt=0)
    patience: int = Field(default=10, ge=1)


class SolveSettings(BaseModel):
    backend: str = "exact"
    algorithm: Optional[Literal["exact", "annealing", "qaoa", "vqe"]] = None
    p: int = Field(default=1, ge=1)
    depth: int = Field(default=1, ge=1)
    shots: int = Field(default=1024, ge=0)
    optimizer: OptimizerSettings = OptimizerSettings()
    penalty: Optional[float] = None
    seed: int = Field(default=0, ge=0)
    num_reads: int = Field(default=100, ge=1)
    sweeps: int = Field(default=1000, ge=1)


class SolveRequest(BaseModel):
    model: dict[str, Any]
    options: SolveSettings = SolveSettings()


class SolutionOut(BaseModel):
    status: Literal["optimal", "feasible", "infeasible", "error"]
    assignment: dict[str, float]
    objective_value: Optional[float]
    backend: str
    metadata: dict[str, Any]


class ConvertRequest(BaseModel):
    model: dict[str, Any]
    penalty: Optional[float] = None
