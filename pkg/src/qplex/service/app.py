"""HTTP service: the generic remote-provider job protocol backed by
:class:`MockProvider`, plus solve/convert endpoints over the core library."""
from __future__ import annotations

import os
from typing import Optional

from fastapi import Depends, FastAPI, Header, HTTPException

from ..errors import BackendError, ConversionError, ModelError
from ..model import model_from_dict
from ..optimize import OptimizerConfig
from ..qubo import to_qubo
from . import schemas
from .provider import MockProvider, PayloadMismatch, UnknownDevice, UnknownJob


def create_app(provider: MockProvider | None = None) -> FastAPI:
    provider = provider if provider is not None else MockProvider()
    app = FastAPI(title="qplex mock provider")
    app.state.provider = provider

    def require_token(authorization: Optional[str] = Header(default=None)) -> str:
        token = None
        if authorization and authorization.lower().startswith("bearer "):
            token = authorization[7:].strip()
        if not provider.authorized(token):
            raise HTTPException(status_code=401, detail="invalid or missing API token")
        return token

    @app.get("/health")
    def health():
        return {"status": "ok"}

    @app.get("/devices", response_model=list[schemas.Device], dependencies=[Depends(require_token)])
    def devices():
        return [d.to_dict() for d in provider.devices]

    @app.post("/jobs", response_model=schemas.JobCreated, dependencies=[Depends(require_token)])
    def submit(req: schemas.JobRequest):
        try:
            job = provider.submit(req.kind, req.payload, req.shots, req.device, req.seed)
        except UnknownDevice as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except PayloadMismatch as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        return {"job_id": job.id}

    @app.get("/jobs/{job_id}", response_model=schemas.JobStatus, dependencies=[Depends(require_token)])
    def status(job_id: str):
        try:
            state = provider.poll(job_id)
        except UnknownJob:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        return {"status": state, "error": provider.get(job_id).error}

    @app.get("/jobs/{job_id}/result", response_model=schemas.JobResult, dependencies=[Depends(require_token)])
    def result(job_id: str):
        try:
            job = provider.get(job_id)
        except UnknownJob:
            raise HTTPException(status_code=404, detail=f"unknown job {job_id!r}")
        if job.status != "done":
            raise HTTPException(status_code=409, detail=f"job {job_id} is {job.status}")
        return job.result.to_dict()

    @app.post("/solve", response_model=schemas.SolutionOut)
    def solve(req: schemas.SolveRequest):
        from ..backends import SolveOptions, solve as run_solve

        opts = req.options
        try:
            model = model_from_dict(req.model)
            options = SolveOptions(
                backend=opts.backend, algorithm=opts.algorithm, p=opts.p, depth=opts.depth,
                shots=opts.shots, optimizer=OptimizerConfig(**opts.optimizer.model_dump(), seed=opts.seed),
                penalty=opts.penalty, seed=opts.seed, num_reads=opts.num_reads, sweeps=opts.sweeps,
            )
            return run_solve(model, options).to_dict()
        except (ModelError, ConversionError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        except BackendError as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.post("/convert")
    def convert(req: schemas.ConvertRequest):
        try:
            return to_qubo(model_from_dict(req.model), req.penalty).to_dict()
        except (ModelError, ConversionError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

    return app


def run() -> None:
    """Console entry point: serve the mock provider with uvicorn."""
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(prog="qplex-service")
    parser.add_argument("--host", default=os.environ.get("QPLEX_HOST", "127.0.0.1"))
    parser.add_argument("--port", type=int, default=int(os.environ.get("QPLEX_PORT", "8000")))
    args = parser.parse_args()
    uvicorn.run(create_app(), host=args.host, port=args.port)
