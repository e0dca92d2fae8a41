"""FastAPI service wrapping the run pipeline.

Endpoints are synchronous: a run blocks until its matrices exist (the cache
makes repeats instant).  All numeric payloads are decimal strings.
"""

from __future__ import annotations

import time

from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import ConfigError, DomainError, ModGenError, SpectralMarginError
from ..acceptance import run_criteria
from ..pipeline import (RunConfig, default_cache_dir, emitted_artifacts,
                        run_scenario, sweep)
from ..precision import to_decimal
from ..reports import REPORT_DIGITS
from .schemas import (CriterionModel, DiagnosticsModel, HealthResponse,
                      ReportRowModel, RunRequest, RunResponse, SweepRequest,
                      SweepResponse, ValidateRequest, ValidateResponse)


def _to_config(req: RunRequest) -> RunConfig:
    return RunConfig(scenario=req.scenario, n=req.n, b=req.b, mass=req.mass,
                     ell=req.ell, digits=req.digits, sigma=req.sigma,
                     probes=req.probes, quad_order=req.quad_order)


def _dec(x):
    return to_decimal(x, REPORT_DIGITS)


def _to_response(outcome, emit, cache_dir, elapsed) -> RunResponse:
    rows = [ReportRowModel(
        mu=_dec(row.mu), value=_dec(row.value),
        references={k: _dec(v) for k, v in row.references.items()},
        rel_errors={k: _dec(v) for k, v in row.rel_errors.items()},
    ) for row in outcome.report.rows]
    d = outcome.diagnostics
    artifacts = emitted_artifacts(outcome, emit, cache_dir=cache_dir) if emit else {}
    return RunResponse(
        config={k: getattr(outcome.config, k) for k in
                ("scenario", "n", "b", "mass", "ell", "digits", "sigma",
                 "probes", "quad_order")},
        cache_key=outcome.cache_key,
        cache_hit=outcome.cache_hit,
        diagnostics=DiagnosticsModel(
            spectral_margin=_dec(d.spectral_margin),
            inverse_residual=_dec(d.inverse_residual),
            symmetry_residual=_dec(d.symmetry_residual)),
        rows=rows,
        artifacts=artifacts,
        elapsed_seconds=elapsed,
    )


def _http_error(exc: ModGenError) -> HTTPException:
    stage = getattr(exc, "stage", None)
    prefix = f"[{stage}] " if stage else ""
    if isinstance(exc, SpectralMarginError):
        return HTTPException(status_code=409, detail={
            "error": "spectral_margin",
            "message": prefix + str(exc),
            "margin": str(exc.margin),
            "violating": exc.violating,
            "hint": "increase digits or set retry_precision",
        })
    if isinstance(exc, (ConfigError, DomainError)):
        return HTTPException(status_code=422, detail=prefix + str(exc))
    return HTTPException(status_code=500, detail=prefix + str(exc))


def create_app(cache_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="modgen", version=__version__,
                  description="Discretized modular generators for the free "
                              "scalar field at arbitrary precision")
    app.state.cache_dir = cache_dir or default_cache_dir()

    @app.get("/health", response_model=HealthResponse)
    def health():
        return HealthResponse(status="ok", version=__version__)

    @app.post("/runs", response_model=RunResponse)
    def runs(req: RunRequest):
        start = time.time()
        try:
            outcome = run_scenario(_to_config(req), cache_dir=app.state.cache_dir,
                                   retry_precision=req.retry_precision)
        except ModGenError as exc:
            raise _http_error(exc)
        return _to_response(outcome, req.emit, app.state.cache_dir,
                            time.time() - start)

    @app.post("/sweeps", response_model=SweepResponse)
    def sweeps(req: SweepRequest):
        try:
            outcomes = sweep(_to_config(req), masses=req.masses, ells=req.ells,
                             cache_dir=app.state.cache_dir,
                             retry_precision=req.retry_precision)
        except ModGenError as exc:
            raise _http_error(exc)
        responses = [_to_response(o, req.emit, app.state.cache_dir, 0.0)
                     for o in outcomes]
        return SweepResponse(runs=responses)

    @app.post("/validate", response_model=ValidateResponse)
    def validate(req: ValidateRequest):
        results = run_criteria(numbers=req.criteria,
                               cache_dir=req.cache_dir or app.state.cache_dir)
        models = [CriterionModel(number=r.number, name=r.name, passed=r.passed,
                                 detail=r.detail, elapsed_seconds=r.elapsed_seconds)
                  for r in results]
        return ValidateResponse(criteria=models,
                                passed=all(r.passed for r in results))

    return app
