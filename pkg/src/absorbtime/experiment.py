"""Config-driven convergence experiments: the reproduction surface.

A run fixes a model, a grid of start states, a theorem clause and a method
(exact DP or Monte Carlo), then reports per-n the normalized distance to
the clause's limit law together with the approximation diagnostics
(coupling gap, c(n), exact d_p(T_n, N_n) in the additive case). The
summary carries the decreasing-trend verdicts; a negative control is
expected to raise the non-convergence flag, not to fail.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Literal

import numpy as np
from pydantic import BaseModel, Field, field_validator, model_validator
from scipy import stats as sstats

from . import absorb, cache
from .dist import AffineView, LatticeDist
from .limits import NumericError, clause_distance_p, clause_limit_law, theorem_normalization
from .models import DecrementModel, coupling_gap, make_model
from .renewal import RenewalWalk
from .wasserstein import (d1_discrete_vs_continuous, d2_discrete_vs_continuous,
                          dp_discrete, dp_empirical)


class ExperimentConfig(BaseModel):
    model: str
    params: dict = Field(default_factory=dict)
    grid: list[int]
    clause: Literal["A", "B", "C"] = "A"
    method: Literal["exact", "mc"] = "exact"
    mc_samples: int = 100_000
    seed: int | None = None
    prune_budget: float = 0.0
    cache_dir: str | None = None
    use_cache: bool = False
    with_renewal_distance: bool = True
    workers: int = 2

    @field_validator("grid")
    @classmethod
    def _grid_increasing(cls, v):
        if not v or any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("grid must be nonempty and strictly increasing")
        if v[0] < 1:
            raise ValueError("grid entries must be >= 1")
        return v

    @model_validator(mode="after")
    def _mc_contract(self):
        if self.method == "mc":
            if self.seed is None:
                raise ValueError("mc mode requires an explicit seed")
            if self.mc_samples < 1000:
                raise ValueError("mc mode requires mc_samples >= 1000")
        return self


class ConvergenceRow(BaseModel):
    n: int
    a_n: float
    b_n: float
    d_value: float
    d_error_bound: float
    coupling_gap: float
    c_of_n: float
    d_tn_nn: float | None = None
    runtime_ms: float = 0.0


class TrendSummary(BaseModel):
    p: int
    d_first: float
    d_last: float
    strictly_decreasing: bool
    halved: bool
    spearman: float
    converged: bool
    non_convergence_flag: bool
    notes: list[str] = Field(default_factory=list)


class ConvergenceResult(BaseModel):
    rows: list[ConvergenceRow]
    summary: TrendSummary


CSV_COLUMNS = ["n", "a_n", "b_n", "d_value", "d_error_bound",
               "coupling_gap", "c_of_n", "d_tn_nn", "runtime_ms"]


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def rows_to_csv(rows: list[ConvergenceRow], timings: bool = False) -> str:
    """Deterministic CSV: identical config + seed gives identical bytes.

    Wall-clock timings are not reproducible, so the runtime column is
    left empty unless explicitly requested.
    """
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        vals = [r.n, r.a_n, r.b_n, r.d_value, r.d_error_bound,
                r.coupling_gap, r.c_of_n, r.d_tn_nn,
                r.runtime_ms if timings else None]
        lines.append(",".join(_fmt(v) for v in vals))
    return "\n".join(lines) + "\n"


def rows_to_jsonl(result: ConvergenceResult) -> str:
    lines = [r.model_dump_json() for r in result.rows]
    lines.append(result.summary.model_dump_json())
    return "\n".join(lines) + "\n"


def _trend_summary(rows: list[ConvergenceRow], p: int, notes: list[str]) -> TrendSummary:
    d = [r.d_value for r in rows]
    strictly = all(b < a for a, b in zip(d, d[1:]))
    halved = d[-1] <= 0.5 * d[0]
    if len(d) >= 2 and len(set(d)) > 1:
        rho = float(sstats.spearmanr(np.arange(len(d)), d).statistic)
    else:
        rho = 0.0
    converged = strictly and rho <= -0.8
    return TrendSummary(p=p, d_first=d[0], d_last=d[-1],
                        strictly_decreasing=strictly, halved=halved,
                        spearman=rho, converged=converged,
                        non_convergence_flag=not converged, notes=notes)


class LimitStepRenewal(DecrementModel):
    """Renewal model driven by another model's limiting step law: N_n for its xi."""

    regime = "add"

    def __init__(self, base: DecrementModel):
        super().__init__(dict(base.params))
        self.name = f"renewal_of_{base.name}"
        self.dense_dp = base.dense_dp
        self._base_limits = base.limits

    @property
    def limits(self):
        return self._base_limits

    def decrement_pmf(self, n: int) -> LatticeDist:
        return self._base_limits.xi_truncated(n)


def _exact_laws(model: DecrementModel, cfg: ExperimentConfig) -> dict[int, LatticeDist]:
    laws: dict[int, LatticeDist] = {}
    missing = list(cfg.grid)
    cdir = cache.cache_dir(cfg.cache_dir) if cfg.use_cache else None
    if cdir is not None:
        for n in cfg.grid:
            hit = cache.load_law(cdir, model.key(), n, cfg.prune_budget)
            if hit is not None:
                laws[n] = hit
        missing = [n for n in cfg.grid if n not in laws]
    if missing:
        table = absorb.build_table(model, max(missing), cfg.prune_budget, keep=missing)
        for n in missing:
            laws[n] = table.law(n)
            if cdir is not None:
                cache.store_law(cdir, model.key(), n, cfg.prune_budget, laws[n])
    return laws


def _jackknife_se(samples: np.ndarray, law, p: int, blocks: int = 50) -> float:
    """Jackknife standard error of the empirical distance over sample splits."""
    m = len(samples)
    blocks = min(blocks, m // 100) or 1
    edges = np.linspace(0, m, blocks + 1).astype(int)
    thetas = []
    for i in range(blocks):
        mask = np.ones(m, dtype=bool)
        mask[edges[i]:edges[i + 1]] = False
        thetas.append(dp_empirical(samples[mask], law, p).value)
    thetas = np.array(thetas)
    return float(math.sqrt((blocks - 1) / blocks * np.sum((thetas - thetas.mean()) ** 2)))


def run_convergence(cfg: ExperimentConfig) -> ConvergenceResult:
    model = make_model(cfg.model, cfg.params)
    notes: list[str] = []
    if model.negative_control:
        notes.append("negative control: no theorem clause applies; "
                     "distances are measured against the normal law for diagnosis")
    p = clause_distance_p(model.regime, cfg.clause)
    try:
        law_w = clause_limit_law(model, cfg.clause)
    except NumericError:
        if not model.negative_control:
            raise
        from .laws import NormalLaw
        law_w = NormalLaw()

    rows: list[ConvergenceRow] = []
    t_laws: dict[int, LatticeDist] = {}
    n_laws: dict[int, LatticeDist] = {}
    if cfg.method == "exact":
        t_laws = _exact_laws(model, cfg)
        if (model.regime == "add" and not model.negative_control
                and cfg.with_renewal_distance):
            n_cfg = cfg.model_copy(update={"model": model.name})
            n_laws = _exact_laws(LimitStepRenewal(model), n_cfg)

    def one_row(i_n):
        i, n = i_n
        t0 = time.perf_counter()
        if model.negative_control:
            mu = model.limits.mu
            norm_a, norm_b, c_of = n / mu, math.sqrt(n), math.sqrt(n)
        else:
            nz = theorem_normalization(model, n, cfg.clause)
            norm_a, norm_b, c_of = nz.a_n, nz.b_n, nz.c_of_t
        if cfg.method == "exact":
            view = AffineView(t_laws[n], norm_a, norm_b)
            if p == 2:
                rep = d2_discrete_vs_continuous(view, law_w)
            else:
                rep = d1_discrete_vs_continuous(view, law_w)
            d_value, d_err = rep.value, rep.error_bound
            d_tn_nn = None
            if n in n_laws:
                d_tn_nn = dp_discrete(t_laws[n], n_laws[n], p).value
        else:
            ss = np.random.SeedSequence(entropy=cfg.seed, spawn_key=(i,))
            samples = absorb.simulate_absorption(model, n, cfg.mc_samples, ss)
            normalized = (samples - norm_a) / norm_b
            rep = dp_empirical(normalized, law_w, p)
            d_value = rep.value
            d_err = _jackknife_se(normalized, law_w, p)
            d_tn_nn = None
        gap = coupling_gap(model, n, p)
        ms = (time.perf_counter() - t0) * 1e3
        return ConvergenceRow(n=n, a_n=norm_a, b_n=norm_b, d_value=d_value,
                              d_error_bound=d_err, coupling_gap=gap,
                              c_of_n=c_of, d_tn_nn=d_tn_nn, runtime_ms=ms)

    jobs = list(enumerate(cfg.grid))
    if cfg.workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(one_row, jobs))
    else:
        rows = [one_row(j) for j in jobs]
    return ConvergenceResult(rows=rows, summary=_trend_summary(rows, p, notes))


# --------------------------------------------------------------------------
# bounds runner
# --------------------------------------------------------------------------

class BoundsConfig(BaseModel):
    kind: Literal["model", "explicit"] = "model"
    model: str | None = None
    params: dict = Field(default_factory=dict)
    n_max: int = 200
    psi: Literal["n", "1"] = "n"
    p_exponent: int = 1
    n0: int | None = None
    horizon: int | None = None
    # explicit problems
    a: int = 0
    init: list[float] = Field(default_factory=lambda: [0.0])
    r: list[float] | None = None
    pmf: Literal["delta_zero", "delta_prev", "model"] = "model"

    @model_validator(mode="after")
    def _shape(self):
        if self.kind == "model" and not self.model:
            raise ValueError("model-kind bounds run needs a model name")
        if self.kind == "explicit" and self.r is None:
            raise ValueError("explicit bounds run needs the r sequence")
        return self


class BoundsReportModel(BaseModel):
    n_max: int
    c1_value: float
    c1_window: tuple[int, int]
    sup_first_half: float
    sup_second_half: float
    bounded: bool
    rho_head: list[float]
    rho_tail: list[float]


def run_bounds(cfg: BoundsConfig) -> BoundsReportModel:
    from .bounds import RecursionProblem, bound_ratio

    psi = (lambda k: float(k)) if cfg.psi == "n" else (lambda k: 1.0)
    if cfg.kind == "model":
        model = make_model(cfg.model, cfg.params)
        gaps = {n: coupling_gap(model, n, cfg.p_exponent)
                for n in range(1, cfg.n_max + 1)}
        prob = RecursionProblem(
            a=0, init=[0.0],
            p=lambda n: model.newstate_weights(n),
            r=lambda n: max(gaps.get(n, gaps[cfg.n_max]), 1e-300),
            psi=psi)
    else:
        r_seq = list(cfg.r)

        def r_fn(k: int) -> float:
            return max(r_seq[min(k, len(r_seq)) - 1], 1e-300)

        if cfg.pmf == "delta_zero":
            p_fn = lambda n: np.eye(1, n, 0)[0]
        elif cfg.pmf == "delta_prev":
            p_fn = lambda n: np.eye(1, n, n - 1)[0]
        else:
            raise ValueError("explicit problems support delta_zero/delta_prev pmfs")
        prob = RecursionProblem(a=cfg.a, init=cfg.init, p=p_fn, r=r_fn, psi=psi)
    rep = bound_ratio(prob, cfg.n_max, horizon=cfg.horizon, n0=cfg.n0)
    rho = rep.rho[np.isfinite(rep.rho)]
    return BoundsReportModel(
        n_max=cfg.n_max, c1_value=rep.c1.value,
        c1_window=(rep.c1.n0, rep.c1.n_max),
        sup_first_half=rep.sup_first_half, sup_second_half=rep.sup_second_half,
        bounded=rep.bounded,
        rho_head=[float(v) for v in rho[:8]],
        rho_tail=[float(v) for v in rho[-8:]])


# --------------------------------------------------------------------------
# Monte Carlo utility runs
# --------------------------------------------------------------------------

class McConfig(BaseModel):
    target: Literal["absorption", "mult_count"] = "absorption"
    model: str | None = None
    params: dict = Field(default_factory=dict)
    n: int | None = None
    t: float | None = None
    samples: int = 10_000
    seed: int
    stationary: bool = False
    coupled: bool = False

    @model_validator(mode="after")
    def _shape(self):
        if self.target == "absorption" and (self.model is None or self.n is None):
            raise ValueError("absorption target needs model and n")
        if self.target == "mult_count" and (self.model is None or self.t is None):
            raise ValueError("mult_count target needs model and t")
        return self


class McResult(BaseModel):
    count: int
    mean: float
    std: float
    se: float
    quantiles: dict[str, float]
    coupled_violations: int | None = None
    stationary_mean: float | None = None


def run_mc(cfg: McConfig) -> McResult:
    if cfg.target == "absorption":
        model = make_model(cfg.model, cfg.params)
        samples = absorb.simulate_absorption(model, cfg.n, cfg.samples, cfg.seed)
        extra = {}
    else:
        from .renewal import mult_count_samples
        model = make_model(cfg.model, cfg.params)
        if model.regime != "mult":
            raise ValueError("mult_count needs a multiplicative model")
        if cfg.coupled:
            main, star = mult_count_samples(model.limits, cfg.t, cfg.samples,
                                            cfg.seed, coupled=True)
            samples = main
            extra = {"coupled_violations": int(np.sum(star > main)),
                     "stationary_mean": float(star.mean())}
        else:
            samples = mult_count_samples(model.limits, cfg.t, cfg.samples,
                                         cfg.seed, stationary=cfg.stationary)
            extra = {}
    qs = np.percentile(samples, [1, 5, 25, 50, 75, 95, 99])
    return McResult(
        count=len(samples), mean=float(samples.mean()), std=float(samples.std()),
        se=float(samples.std() / math.sqrt(len(samples))),
        quantiles={k: float(v) for k, v in zip(["p1", "p5", "p25", "p50", "p75", "p95", "p99"], qs)},
        **extra)
