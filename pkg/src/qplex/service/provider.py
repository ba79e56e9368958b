"""In-memory mock quantum provider: a device list, a job table, and job execution
on the bundled simulator / annealing sampler."""
from __future__ import annotations

import itertools
import json
import os
import threading
from dataclasses import dataclass, field
from typing import Any

from ..backends.annealer import sample_qubo
from ..backends.base import DeviceInfo, SampleSet
from ..backends.simulator import MAX_QUBITS, probabilities, sample
from ..circuits import parse_qasm3
from ..errors import QplexError
from ..qubo import qubo_from_dict

DEFAULT_TOKEN = "mock-token"
ACCEPTED_TOKENS_ENV = "QPLEX_MOCK_ACCEPTED_TOKENS"
DEVICES_ENV = "QPLEX_MOCK_DEVICES"  # inline JSON list or path to a JSON file

DEFAULT_DEVICES = (
    DeviceInfo("mock-gate-small", 8, 2, "gate"),
    DeviceInfo("mock-gate-large", 20, 5, "gate"),
    DeviceInfo("mock-annealer", 64, 0, "annealer"),
)

# each status poll advances a job one step along this path
_PROGRESSION = {"queued": "running", "running": "done"}


class UnknownJob(KeyError):
    pass


class PayloadMismatch(ValueError):
    pass


class UnknownDevice(ValueError):
    pass


@dataclass
class Job:
    id: str
    kind: str
    payload: Any
    shots: int
    device: DeviceInfo
    seed: int
    status: str = "queued"
    result: SampleSet | None = None
    error: str | None = None


def devices_from_env() -> list[DeviceInfo]:
    raw = os.environ.get(DEVICES_ENV)
    if not raw:
        return list(DEFAULT_DEVICES)
    if not raw.lstrip().startswith("["):
        with open(raw, "r", encoding="utf-8") as fh:
            raw = fh.read()
    return [DeviceInfo(d["name"], int(d["num_qubits"]), int(d["queue_length"]), d["kind"])
            for d in json.loads(raw)]


@dataclass
class MockProvider:
    devices: list[DeviceInfo] = field(default_factory=devices_from_env)
    tokens: frozenset[str] | None = None
    jobs: dict[str, Job] = field(default_factory=dict)

    def __post_init__(self):
        if self.tokens is None:
            env = os.environ.get(ACCEPTED_TOKENS_ENV)
            self.tokens = frozenset(t for t in (env or DEFAULT_TOKEN).split(",") if t)
        self._ids = itertools.count(1)
        self._lock = threading.Lock()

    def authorized(self, token: str | None) -> bool:
        return token is not None and token in self.tokens

    def device(self, name: str) -> DeviceInfo:
        for d in self.devices:
            if d.name == name:
                return d
        raise UnknownDevice(f"unknown device {name!r}")

    def submit(self, kind: str, payload: Any, shots: int, device: str, seed: int | None) -> Job:
        dev = self.device(device)
        if kind != dev.kind:
            raise PayloadMismatch(f"payload/device mismatch: {kind} job sent to {dev.kind} device {dev.name!r}")
        if kind == "gate" and not isinstance(payload, str):
            raise PayloadMismatch("payload/device mismatch: gate jobs carry OpenQASM 3 text")
        with self._lock:
            job = Job(f"job-{next(self._ids)}", kind, payload, shots, dev, 0 if seed is None else seed)
            self.jobs[job.id] = job
        return job

    def get(self, job_id: str) -> Job:
        try:
            return self.jobs[job_id]
        except KeyError:
            raise UnknownJob(job_id) from None

    def poll(self, job_id: str) -> str:
        job = self.get(job_id)
        with self._lock:
            nxt = _PROGRESSION.get(job.status)
            if nxt == "done":
                self._execute(job)
            elif nxt is not None:
                job.status = nxt
        return job.status

    def _execute(self, job: Job) -> None:
        try:
            if job.kind == "gate":
                circuit = parse_qasm3(job.payload)
                width = min(job.device.num_qubits, MAX_QUBITS)
                if circuit.num_qubits > width:
                    raise QplexError(f"circuit needs {circuit.num_qubits} qubits, device has {width}")
                job.result = sample(probabilities(circuit), circuit.num_qubits, job.shots, job.seed)
            else:
                doc = json.loads(job.payload) if isinstance(job.payload, str) else job.payload
                q = qubo_from_dict(doc)
                if q.n > job.device.num_qubits:
                    raise QplexError(f"QUBO needs {q.n} qubits, device has {job.device.num_qubits}")
                job.result, _ = sample_qubo(q, num_reads=job.shots, seed=job.seed)
            job.status = "done"
        except (QplexError, ValueError) as exc:
            job.status = "failed"
            job.error = str(exc)
