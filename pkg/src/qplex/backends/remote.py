"""Client for the generic JSON-over-HTTP provider protocol and the solver built on it.

Protocol::

    GET  /devices               -> [DeviceInfo, ...]
    POST /jobs                  {"kind", "payload", "shots", "device"[, "seed"]} -> {"job_id"}
    GET  /jobs/{id}             -> {"status": queued|running|done|failed}
    GET  /jobs/{id}/result      -> {"counts": {...}, "shots": N}
"""
from __future__ import annotations

import asyncio
import dataclasses
import os
import time
from typing import Any

import httpx

from ..circuits import emit_qasm3
from ..errors import (AuthError, BackendError, CredentialError, JobFailedError, PayloadMismatchError,
                      RemoteHTTPError)
from ..qubo import qubo_energy, qubo_to_dict
from .annealer import solution_from_samples
from .base import DeviceInfo, SampleSet, Solver, select_device
from .ggae import ggae_solve


def token_env_var(provider: str) -> str:
    return f"QPLEX_{provider.upper()}_TOKEN"


def read_token(provider: str) -> str:
    var = token_env_var(provider)
    token = os.environ.get(var)
    if not token:
        raise CredentialError(f"missing credential {var}")
    return token


class InProcessTransport(httpx.BaseTransport):
    """Synchronous transport that serves requests from an ASGI app in this process."""

    def __init__(self, app):
        self._asgi = httpx.ASGITransport(app=app)

    def handle_request(self, request: httpx.Request) -> httpx.Response:
        async def roundtrip():
            resp = await self._asgi.handle_async_request(request)
            content = await resp.aread()
            return httpx.Response(resp.status_code, headers=resp.headers, content=content)

        return asyncio.run(roundtrip())


def in_process_client(app=None) -> httpx.Client:
    """Client wired to a fresh mock provider app (or ``app``) without opening a socket."""
    if app is None:
        from ..service.app import create_app

        app = create_app()
    return httpx.Client(transport=InProcessTransport(app), base_url="http://mock-provider")


class RemoteClient:
    def __init__(self, token: str, base_url: str | None = None, *, http: httpx.Client | None = None,
                 poll_interval: float = 0.0, max_polls: int = 10_000, timeout: float = 30.0):
        if http is None:
            http = httpx.Client(base_url=base_url, timeout=timeout) if base_url else in_process_client()
        self.http = http
        self.token = token
        self.poll_interval = poll_interval
        self.max_polls = max_polls

    def close(self) -> None:
        self.http.close()

    def __enter__(self) -> "RemoteClient":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

    def _request(self, method: str, path: str, **kwargs) -> Any:
        headers = {"Authorization": f"Bearer {self.token}"}
        try:
            resp = self.http.request(method, path, headers=headers, **kwargs)
        except httpx.HTTPError as exc:
            raise RemoteHTTPError(f"{method} {path} failed: {exc}") from None
        if resp.status_code in (401, 403):
            raise AuthError(f"provider rejected the API token ({resp.status_code})")
        if resp.status_code >= 400:
            detail = _detail(resp)
            if resp.status_code == 422 and "payload/device mismatch" in detail:
                raise PayloadMismatchError(detail)
            raise RemoteHTTPError(f"{method} {path} -> HTTP {resp.status_code}: {detail}")
        try:
            return resp.json()
        except ValueError:
            raise RemoteHTTPError(f"{method} {path}: response is not JSON") from None

    def devices(self) -> list[DeviceInfo]:
        try:
            return [DeviceInfo(d["name"], int(d["num_qubits"]), int(d["queue_length"]), d["kind"])
                    for d in self._request("GET", "/devices")]
        except (KeyError, TypeError, ValueError) as exc:
            raise RemoteHTTPError(f"malformed device list: {exc}") from None

    def submit(self, kind: str, payload: Any, shots: int, device: str, seed: int | None = None) -> str:
        body = {"kind": kind, "payload": payload, "shots": shots, "device": device}
        if seed is not None:
            body["seed"] = seed
        return self._request("POST", "/jobs", json=body)["job_id"]

    def poll(self, job_id: str) -> str:
        return self._request("GET", f"/jobs/{job_id}")["status"]

    def fetch(self, job_id: str) -> SampleSet:
        try:
            return SampleSet.from_dict(self._request("GET", f"/jobs/{job_id}/result"))
        except (KeyError, TypeError, ValueError) as exc:
            raise RemoteHTTPError(f"malformed result for {job_id}: {exc}") from None

    def wait(self, job_id: str) -> SampleSet:
        for _ in range(self.max_polls):
            state = self.poll(job_id)
            if state == "done":
                return self.fetch(job_id)
            if state == "failed":
                raise JobFailedError(f"job {job_id} failed")
            if self.poll_interval:
                time.sleep(self.poll_interval)
        raise RemoteHTTPError(f"job {job_id} did not finish after {self.max_polls} polls")


def _detail(resp: httpx.Response) -> str:
    try:
        return str(resp.json().get("detail", resp.text))
    except ValueError:
        return resp.text


def remote_submit(client: RemoteClient, job: str | dict, shots: int, device: DeviceInfo,
                  seed: int | None = None) -> str:
    """Submit QASM3 text (gate) or a QUBO document (annealer); returns the job id."""
    kind = "gate" if isinstance(job, str) else "annealer"
    if kind != device.kind:
        raise PayloadMismatchError(
            f"payload/device mismatch: {kind} payload cannot run on {device.kind} device {device.name!r}"
        )
    return client.submit(kind, job, shots, device.name, seed)


def remote_run(client: RemoteClient, job: str | dict, shots: int, device: DeviceInfo,
               seed: int | None = None) -> SampleSet:
    sampleset = client.wait(remote_submit(client, job, shots, device, seed))
    if sampleset.shots != shots:
        raise RemoteHTTPError(f"provider returned {sampleset.shots} shots, requested {shots}")
    return sampleset


class RemoteSolver(Solver):
    """Solver for any provider speaking the generic protocol; the token is read from
    ``QPLEX_<PROVIDER>_TOKEN`` when the solver is created."""

    name = "remote"
    kind = "remote"
    algorithms = ("qaoa", "vqe", "annealing")

    def __init__(self, options=None, client: RemoteClient | None = None):
        super().__init__(options)
        self.token = read_token(self.name)
        self._client = client

    @property
    def client(self) -> RemoteClient:
        if self._client is None:
            self._client = RemoteClient(self.token, self.options.provider_url,
                                        poll_interval=self.options.poll_interval)
        return self._client

    def _device(self, kind: str, width: int) -> DeviceInfo:
        return select_device([d for d in self.client.devices() if d.kind == kind], width)

    def solve(self, problem):
        owned = self._client is None
        try:
            return self._solve(self.convert(problem))
        finally:
            if owned and self._client is not None:
                self._client.close()
                self._client = None

    def _solve(self, cr):
        n = cr.qubo.n
        if self.algorithm == "annealing":
            device = self._device("annealer", n)
            samples = remote_run(self.client, qubo_to_dict(cr.qubo), self.options.num_reads, device,
                                 self.options.seed)
            energies = {b: qubo_energy(cr.qubo, b) for b in samples.counts}
            return solution_from_samples(cr, samples, energies, self.name, {"device": device.name})
        if self.options.shots == 0:
            raise BackendError("exact-expectation mode (shots=0) is only available on the local simulator")
        device = self._device("gate", n)

        def execute(circuit, shots, seed):
            return remote_run(self.client, emit_qasm3(circuit), shots, device, seed)

        options = dataclasses.replace(self.options, algorithm=self.algorithm)
        solution = ggae_solve(cr, options, execute, self.name)
        solution.metadata["device"] = device.name
        return solution


class MockRemoteSolver(RemoteSolver):
    name = "mock-remote"
