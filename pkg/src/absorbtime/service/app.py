"""FastAPI service wrapping the numerics core.

Every computation the CLI offers goes through these endpoints; the CLI is
a thin client (in-process ASGI transport by default, plain HTTP against a
running `absorbtime serve`). Config errors map to 422/400, numeric
failures to 500 with kind="numeric" so clients can distinguish exit codes.
"""

from __future__ import annotations

import numpy as np
from fastapi import FastAPI, Query
from fastapi.responses import JSONResponse

from .. import __version__, cache
from ..absorb import PruneBudgetError
from ..dist import AffineView, LatticeDist
from ..laws import NormalLaw
from ..limits import NumericError
from ..models import registry_info
from ..stable import stable_law
from ..wasserstein import (d1_discrete_vs_continuous, d2_discrete_vs_continuous,
                           dp_discrete)
from . import schemas as sc


def create_app() -> FastAPI:
    app = FastAPI(title="absorbtime", version=__version__,
                  description="Absorption-time laws of decreasing chains, "
                              "renewal approximations, Wasserstein diagnostics")

    @app.exception_handler(NumericError)
    async def _numeric_error(request, exc):
        return JSONResponse(status_code=500,
                            content={"detail": str(exc), "kind": "numeric"})

    @app.exception_handler(PruneBudgetError)
    async def _prune_error(request, exc):
        return JSONResponse(status_code=500,
                            content={"detail": str(exc), "kind": "numeric"})

    @app.exception_handler(ValueError)
    async def _value_error(request, exc):
        return JSONResponse(status_code=400,
                            content={"detail": str(exc), "kind": "config"})

    @app.get("/health", response_model=sc.HealthResponse)
    async def health():
        return sc.HealthResponse(status="ok", version=__version__)

    @app.get("/models", response_model=sc.ModelsResponse)
    async def models():
        return sc.ModelsResponse(models=[sc.ModelInfo(**m) for m in registry_info()])

    @app.post("/dist", response_model=sc.DistResponse)
    async def dist(req: sc.DistRequest):
        f = LatticeDist(np.array(req.f.atoms), np.array(req.f.masses),
                        req.f.pruned_mass, max(req.f.pruned_mass, 1e-12))
        if req.affine is not None:
            f = AffineView(f, req.affine.shift, req.affine.scale).as_lattice()
        if req.g is not None:
            g = LatticeDist(np.array(req.g.atoms), np.array(req.g.masses),
                            req.g.pruned_mass, max(req.g.pruned_mass, 1e-12))
            rep = dp_discrete(f, g, req.p)
        else:
            law = NormalLaw() if req.limit.kind == "normal" else stable_law(req.limit.alpha)
            if req.p == 2:
                rep = d2_discrete_vs_continuous(f, law)
            else:
                rep = d1_discrete_vs_continuous(f, law)
        return sc.DistResponse(**rep.to_json_obj())

    @app.post("/converge", response_model=sc.ConvergenceResult)
    async def converge(cfg: sc.ExperimentConfig):
        from ..experiment import run_convergence
        return run_convergence(cfg)

    @app.post("/mc", response_model=sc.McResult)
    async def mc(cfg: sc.McConfig):
        from ..experiment import run_mc
        return run_mc(cfg)

    @app.post("/bounds", response_model=sc.BoundsReportModel)
    async def bounds(cfg: sc.BoundsConfig):
        from ..experiment import run_bounds
        return run_bounds(cfg)

    @app.get("/cache", response_model=sc.CacheListResponse)
    async def cache_list(dir: str | None = Query(default=None)):
        d = cache.cache_dir(dir)
        return sc.CacheListResponse(
            directory=str(d),
            entries=[sc.CacheEntry(**{k: v for k, v in e.items()
                                      if k in sc.CacheEntry.model_fields})
                     for e in cache.list_entries(d)])

    @app.delete("/cache", response_model=sc.CacheCleanResponse)
    async def cache_clean(dir: str | None = Query(default=None)):
        d = cache.cache_dir(dir)
        return sc.CacheCleanResponse(directory=str(d), removed=cache.clean(d))

    return app


app = create_app()
