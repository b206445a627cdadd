"""HTTP/JSON job service: upload networks, run fits/GOF/simulations/selection
asynchronously, poll status, fetch result documents.

Single-process, in-memory stores with optional directory persistence of
result documents; one shared worker pool executes jobs.  Error mapping:
400 schema violation, 404 unknown id, 409 conflict (cancel of a finished job,
result of an unfinished one), 422 model validation failure.
"""

import os
import threading
import time
import uuid
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np
from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from . import __version__, ingest, results, selection, terms
from .terms import DEFAULT_TAU
from .errors import (
    ConvergenceError,
    DataError,
    DegeneracyError,
    ErgmError,
    JobCancelled,
    ModelValidationError,
)
from .estimation import EstimationControl, mcmc_mle, mple
from .gof import gof_run
from .graph import Graph
from .sampler import SamplerControl, sample
from .selection import CandidateSet, resolve_threads

JOB_KINDS = ("fit", "gof", "simulate", "select")


class NetworkUpload(BaseModel):
    format: str  # "adjacency-matrix" | "edge-list"
    content: str
    name: Optional[str] = None
    attributes_csv: Optional[str] = None


class ControlModel(BaseModel):
    burn_in: Optional[int] = None
    interval: Optional[int] = None
    sample_count: Optional[int] = None
    proposal: Optional[str] = None


class JobRequest(BaseModel):
    kind: str
    network_id: Optional[str] = None
    terms: Optional[str] = None
    tau: float = DEFAULT_TAU
    theta: Optional[list] = None
    control: Optional[ControlModel] = None
    seed: int = 0
    method: Optional[str] = None  # fit: mple|mcmc; select: pvalue|aic|graphical
    fit_job_id: Optional[str] = None
    nodes: Optional[int] = None
    alpha: float = 0.05
    strategy: str = "backward-stepwise"
    candidates: Optional[str] = None
    gof_samples: int = 100


class _Job:
    def __init__(self, kind, request):
        self.id = uuid.uuid4().hex[:12]
        self.kind = kind
        self.status = "queued"
        self.progress = 0.0
        self.submitted = time.time()
        self.finished = None
        self.request = request
        self.result = None
        self.error_class = None
        self.error_message = None
        self.cancel_event = threading.Event()

    def to_doc(self):
        return {
            "id": self.id,
            "kind": self.kind,
            "status": self.status,
            "progress": round(self.progress, 6),
            "submitted": self.submitted,
            "finished": self.finished,
            "request": self.request,
            "has_result": self.result is not None,
            "error_class": self.error_class,
            "error_message": self.error_message,
        }


class ServiceState:
    def __init__(self, threads=None, store_dir=None):
        self.lock = threading.Lock()
        self.networks = {}
        self.jobs = {}
        self.pool = ThreadPoolExecutor(max_workers=resolve_threads(threads))
        self.store_dir = store_dir
        if store_dir:
            os.makedirs(store_dir, exist_ok=True)

    def queue_depth(self):
        with self.lock:
            return sum(1 for j in self.jobs.values() if j.status in ("queued", "running"))


def _sampler_control(ctl, seed, defaults=None):
    base = defaults or SamplerControl()
    ctl = ctl or ControlModel()
    return SamplerControl(
        burn_in=ctl.burn_in if ctl.burn_in is not None else base.burn_in,
        interval=ctl.interval if ctl.interval is not None else base.interval,
        sample_count=(
            ctl.sample_count if ctl.sample_count is not None else base.sample_count
        ),
        proposal=ctl.proposal or base.proposal,
        seed=seed,
        initial=base.initial,
    ).validated()


def _error_response(status, error_class, message):
    return JSONResponse(
        status_code=status, content={"error": error_class, "detail": message}
    )


def create_app(threads=None, store_dir=None):
    app = FastAPI(title="ergmkit service", version=__version__)
    state = ServiceState(threads=threads, store_dir=store_dir)
    app.state.engine = state

    @app.exception_handler(RequestValidationError)
    async def bad_schema(request: Request, exc):
        return _error_response(400, "SchemaViolation", str(exc))

    @app.exception_handler(ModelValidationError)
    async def bad_model(request: Request, exc):
        return _error_response(422, "ModelValidationError", str(exc))

    @app.exception_handler(DataError)
    async def bad_data(request: Request, exc):
        return _error_response(400, type(exc).__name__, str(exc))

    @app.post("/v1/networks", status_code=201)
    def upload_network(body: NetworkUpload):
        import tempfile

        if body.format not in ("adjacency-matrix", "edge-list"):
            raise DataError(f"unknown network format {body.format!r}")
        with tempfile.NamedTemporaryFile("w", suffix=".txt", delete=False) as fh:
            fh.write(body.content)
            tmp = fh.name
        try:
            g = ingest.read_network(tmp, format=body.format)
        finally:
            os.unlink(tmp)
        attrs = None
        if body.attributes_csv:
            with tempfile.NamedTemporaryFile("w", suffix=".csv", delete=False) as fh:
                fh.write(body.attributes_csv)
                tmp = fh.name
            try:
                attrs = ingest.read_attributes(tmp, n=g.n)
            finally:
                os.unlink(tmp)
        net_id = uuid.uuid4().hex[:12]
        with state.lock:
            state.networks[net_id] = {
                "graph": g,
                "attrs": attrs,
                "name": body.name or net_id,
            }
        return {"id": net_id, "n": g.n, "m": g.m, "density": g.density}

    @app.get("/v1/networks")
    def list_networks():
        with state.lock:
            items = list(state.networks.items())
        return [
            {
                "id": net_id,
                "name": entry["name"],
                "n": entry["graph"].n,
                "m": entry["graph"].m,
                "density": entry["graph"].density,
                "has_attributes": entry["attrs"] is not None,
            }
            for net_id, entry in items
        ]

    def _network(net_id):
        with state.lock:
            entry = state.networks.get(net_id)
        if entry is None:
            raise KeyError(net_id)
        return entry

    def _run_job(job):
        with state.lock:
            if job.cancel_event.is_set():
                job.status = "failed"
                job.error_class = "JobCancelled"
                job.error_message = "cancelled while queued"
                job.finished = time.time()
                return
            job.status = "running"

        def progress(frac):
            job.progress = float(frac)
            if job.cancel_event.is_set():
                raise JobCancelled("cancelled")

        try:
            doc = _execute(job, progress)
            with state.lock:
                if job.status == "running":
                    job.result = doc
                    job.status = "done"
                    job.progress = 1.0
                    job.finished = time.time()
            if state.store_dir and job.result is not None:
                path = os.path.join(state.store_dir, f"{job.id}.json")
                with open(path, "w") as fh:
                    fh.write(results.dumps(job.result))
        except ErgmError as e:
            with state.lock:
                job.status = "failed"
                job.error_class = type(e).__name__
                job.error_message = str(e)
                job.finished = time.time()
        except Exception as e:  # pragma: no cover - defensive
            with state.lock:
                job.status = "failed"
                job.error_class = type(e).__name__
                job.error_message = str(e)
                job.finished = time.time()

    def _execute(job, progress):
        req = JobRequest(**job.request)
        seed = req.seed
        if req.kind == "fit":
            entry = _network(req.network_id)
            g, attrs = entry["graph"], entry["attrs"]
            model = terms.parse_terms(req.terms, default_tau=req.tau)
            if req.method == "mple":
                fit = mple(model, g, attrs)
                fit.seed = seed
            else:
                base = EstimationControl()
                ctl = EstimationControl(
                    mcmc=_sampler_control(req.control, seed, defaults=base.mcmc),
                    max_newton_iterations=base.max_newton_iterations,
                    newton_tolerance=base.newton_tolerance,
                    bridge_count=base.bridge_count,
                    samples_per_bridge=base.samples_per_bridge,
                )
                fit = mcmc_mle(model, g, attrs, control=ctl)
            progress(1.0)
            return results.fit_to_doc(fit)
        if req.kind == "simulate":
            model = terms.parse_terms(req.terms, default_tau=req.tau)
            theta = np.asarray(req.theta, dtype=np.float64)
            if req.nodes is not None:
                n, observed, attrs = req.nodes, None, None
            else:
                entry = _network(req.network_id)
                n, observed, attrs = entry["graph"].n, entry["graph"], entry["attrs"]
            ctl = _sampler_control(req.control, seed)
            batch = sample(
                model, theta, n, attrs=attrs, control=ctl, observed=observed,
                progress=progress,
            )
            return results.batch_to_doc(batch, model, theta, n, seed)
        if req.kind == "gof":
            entry = _network(req.network_id)
            g, attrs = entry["graph"], entry["attrs"]
            if req.fit_job_id:
                with state.lock:
                    src = state.jobs.get(req.fit_job_id)
                if src is None:
                    raise DataError(f"unknown fit job {req.fit_job_id!r}")
                if src.status != "done" or src.result.get("kind") != "fit_result":
                    raise DataError("fit_job_id must reference a finished fit job")
                fit = results.fit_from_doc(src.result)
            elif req.terms and req.theta is not None:
                model = terms.parse_terms(req.terms, default_tau=req.tau)
                fit = results.fit_from_doc(
                    results.fit_to_doc(
                        _pseudo_fit(model, np.asarray(req.theta), g.n, seed)
                    )
                )
            else:
                raise DataError("gof jobs need fit_job_id or terms+theta")
            ctl = _sampler_control(req.control, seed)
            report = gof_run(fit, g, attrs=attrs, control=ctl)
            progress(1.0)
            return results.gof_to_doc(report)
        if req.kind == "select":
            entry = _network(req.network_id)
            g, attrs = entry["graph"], entry["attrs"]
            if req.candidates:
                cand_model = terms.parse_terms(req.candidates, default_tau=req.tau)
            else:
                attribute = attrs.name if attrs is not None else None
                cand_model = terms.full_candidate(tau=req.tau, attribute=attribute)
                if attrs is None:
                    cand_model = terms.ModelSpec(
                        tuple(t for t in cand_model.terms if t.kind != "nodematch")
                    )
            cand = CandidateSet(
                terms=cand_model, alpha=req.alpha, strategy=req.strategy
            )
            base = EstimationControl()
            ctl = EstimationControl(
                mcmc=_sampler_control(req.control, seed, defaults=base.mcmc),
                max_newton_iterations=base.max_newton_iterations,
                newton_tolerance=base.newton_tolerance,
                bridge_count=base.bridge_count,
                samples_per_bridge=base.samples_per_bridge,
            )
            method = req.method or "graphical"
            if method == "pvalue":
                trace = selection.backward_pvalue_select(cand, g, attrs, ctl)
            elif method == "aic":
                trace = selection.aic_select(cand, g, attrs, ctl, threads=1)
            elif method == "graphical":
                trace = selection.graphical_rank(
                    cand, g, attrs, ctl,
                    gof_control=SamplerControl(sample_count=req.gof_samples),
                    threads=1,
                )
            else:
                raise DataError(f"unknown selection method {method!r}")
            progress(1.0)
            return results.trace_to_doc(trace)
        raise DataError(f"unknown job kind {req.kind!r}")

    @app.post("/v1/jobs", status_code=202)
    def submit_job(body: JobRequest):
        if body.kind not in JOB_KINDS:
            raise DataError(f"job kind must be one of {JOB_KINDS}")
        if body.kind in ("fit", "select") or (
            body.kind in ("gof", "simulate") and body.nodes is None
        ):
            if not body.network_id:
                raise DataError(f"{body.kind} jobs need network_id")
            if body.network_id not in state.networks:
                return _error_response(404, "UnknownId", f"network {body.network_id!r}")
        if body.kind in ("fit", "simulate") and body.terms:
            model = terms.parse_terms(body.terms, default_tau=body.tau)
            n = (
                body.nodes
                if body.nodes is not None
                else state.networks[body.network_id]["graph"].n
            )
            attrs = (
                state.networks[body.network_id]["attrs"]
                if body.network_id in state.networks
                else None
            )
            diags = terms.validate_model(model, n, attrs)
            if diags:
                raise ModelValidationError(diags)
        job = _Job(body.kind, body.model_dump())
        with state.lock:
            state.jobs[job.id] = job
        state.pool.submit(_run_job, job)
        return {"id": job.id, "status": job.status}

    @app.get("/v1/jobs/{job_id}")
    def get_job(job_id: str):
        with state.lock:
            job = state.jobs.get(job_id)
            if job is None:
                return _error_response(404, "UnknownId", f"job {job_id!r}")
            return job.to_doc()

    @app.get("/v1/jobs/{job_id}/result")
    def get_result(job_id: str):
        with state.lock:
            job = state.jobs.get(job_id)
            if job is None:
                return _error_response(404, "UnknownId", f"job {job_id!r}")
            if job.status != "done":
                return _error_response(
                    409, "NotFinished", f"job {job_id} is {job.status}"
                )
            return job.result

    @app.delete("/v1/jobs/{job_id}")
    def cancel_job(job_id: str):
        with state.lock:
            job = state.jobs.get(job_id)
            if job is None:
                return _error_response(404, "UnknownId", f"job {job_id!r}")
            if job.status in ("done", "failed"):
                return _error_response(
                    409, "AlreadyFinished", f"job {job_id} is {job.status}"
                )
            job.cancel_event.set()
            return {"id": job.id, "status": job.status, "cancelling": True}

    @app.get("/v1/health")
    def health():
        from .kernel import KERNEL_NAME

        return {
            "version": __version__,
            "queue_depth": state.queue_depth(),
            "kernel": KERNEL_NAME,
        }

    return app


def _pseudo_fit(model, theta, n, seed):
    """Wrap explicit parameters as a converged fit for ad-hoc GOF jobs."""
    from .estimation import FitResult

    p = model.p
    return FitResult(
        model=model,
        theta_hat=np.asarray(theta, dtype=np.float64),
        se=np.zeros(p),
        covariance=np.zeros((p, p)),
        loglik=float("nan"),
        aic=float("nan"),
        wald_p=np.ones(p),
        method="explicit",
        loglik_kind="bridge",
        converged=True,
        iterations=0,
        seed=int(seed),
        n=int(n),
        diagnostics={"source": "explicit-theta"},
    )
