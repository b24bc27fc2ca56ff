"""Decreasing-chain decrement models in canonical form.

Every model lives on states {0..n} with absorbing 0 and a decrement pmf
supported on {1..n}; chains whose natural absorbing state is not 0 (the
coalescent block count, barrier walks) are relabeled by shifting the state.
Each model carries the limit descriptor of its decrement law: an additive
one (decrement -> xi) or a multiplicative one (decrement/n -> 1 - eta).
"""

from __future__ import annotations

import json
import math
import threading
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy import special

from .dist import LatticeDist, truncate_at
from .laws import BetaLogLaw, ContinuousLaw
from .wasserstein import d1_discrete_vs_continuous, dp_discrete


@dataclass(frozen=True)
class TailSpec:
    """Regular-variation data for the heavy-tailed theorem clauses.

    ``ell`` is the slowly varying function of the clause: E[xi^2 1{xi<=t}]
    for the infinite-variance-normal clause, t^alpha P(xi >= t) for the
    stable clause.
    """
    alpha: float
    ell: Callable[[float], float]
    survival: Callable[[float], float] | None = None
    kind: str = "survival"


@dataclass(frozen=True)
class AddLimits:
    mu: float
    sigma2: float
    xi_truncated: Callable[[int], LatticeDist]
    arithmetic_span: int = 1
    degenerate: bool = False
    tail: TailSpec | None = None


@dataclass(frozen=True)
class MultLimits:
    mu0: float
    sigma02: float
    eta_sampler: Callable[[np.random.Generator, int], np.ndarray]
    log_eta_law: ContinuousLaw | None = None
    log_eta_point: float | None = None
    nonarithmetic: bool = True
    tail: TailSpec | None = None

    def log_abs_cdf(self, t):
        """CDF of |log eta|."""
        if self.log_eta_law is not None:
            return 1.0 - self.log_eta_law.cdf(-np.asarray(t, dtype=np.float64))
        return (np.asarray(t, dtype=np.float64) >= -self.log_eta_point).astype(float)


class DecrementModel:
    """Base class: immutable descriptor + pure decrement-law evaluations."""

    name: str = ""
    regime: str = "add"            # "add" | "mult"
    dense_dp: bool = False         # decrement support grows with the state
    negative_control: bool = False
    notes: str = ""

    def __init__(self, params: dict):
        self.params = params
        self._sampler_cache: dict[int, np.ndarray] = {}
        self._lock = threading.Lock()

    @property
    def limits(self):
        raise NotImplementedError

    def decrement_pmf(self, n: int) -> LatticeDist:
        """Law of the jump size from state n, supported on {1..n}."""
        raise NotImplementedError

    def newstate_weights(self, n: int) -> np.ndarray:
        """P(next state = k) for k = 0..n-1 (the dense-DP row)."""
        d = self.decrement_pmf(n)
        w = np.zeros(n)
        w[n - np.rint(d.atoms).astype(np.int64)] = d.masses
        return w

    def sample_decrements(self, states: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        """Vectorized decrement draws, one per entry of ``states``."""
        out = np.empty(len(states), dtype=np.int64)
        for s in np.unique(states):
            mask = states == s
            with self._lock:
                cum = self._sampler_cache.get(int(s))
            if cum is None:
                d = self.decrement_pmf(int(s))
                cum = (np.cumsum(d.masses), np.rint(d.atoms).astype(np.int64))
                with self._lock:
                    if len(self._sampler_cache) < 65536:
                        self._sampler_cache[int(s)] = cum
            cw, atoms = cum
            idx = np.searchsorted(cw, rng.random(int(mask.sum())) * cw[-1], side="right")
            out[mask] = atoms[np.minimum(idx, len(atoms) - 1)]
        return out

    def key(self) -> str:
        """Canonical cache key material."""
        return json.dumps({"model": self.name, "params": self.params}, sort_keys=True)


# --------------------------------------------------------------------------
# zeta specifications (integer step laws) shared by the barrier models
# --------------------------------------------------------------------------

class ZetaSpec:
    """An integer step law zeta >= 1: finite pmf or discrete Pareto tail."""

    def __init__(self, spec):
        if isinstance(spec, ZetaSpec):
            self.spec = spec.spec
            self.pareto_alpha = spec.pareto_alpha
            self.lattice = spec.lattice
            return
        self.spec = spec
        self.pareto_alpha = None
        self.lattice = None
        if isinstance(spec, LatticeDist):
            self.lattice = spec
            self.spec = {"pmf": {float(a): float(m) for a, m in zip(spec.atoms, spec.masses)}}
        elif "uniform" in spec:
            lo, hi = int(spec["uniform"][0]), int(spec["uniform"][1])
            self.lattice = LatticeDist.uniform(lo, hi)
        elif "pmf" in spec:
            self.lattice = LatticeDist.from_pairs(
                {float(k): float(v) for k, v in spec["pmf"].items()})
        elif "pareto" in spec:
            self.pareto_alpha = float(spec["pareto"]["alpha"])
            if self.pareto_alpha <= 0:
                raise ValueError("pareto tail index must be positive")
        else:
            raise ValueError(f"unrecognized step-law spec: {spec!r}")
        if self.lattice is not None:
            a = self.lattice.atoms
            if np.any(a < 1) or np.any(np.abs(a - np.rint(a)) > 1e-12):
                raise ValueError("step law must live on integers >= 1")

    def survival(self, k):
        """P(zeta >= k) for integer k >= 1."""
        k = np.asarray(k, dtype=np.float64)
        if self.pareto_alpha is not None:
            return np.where(k <= 1, 1.0, k ** -self.pareto_alpha)
        return 1.0 - self.lattice.cdf(k - 0.5)

    def pmf_upto(self, n: int) -> np.ndarray:
        """pmf[k] = P(zeta = k) for k = 0..n (unconditioned)."""
        out = np.zeros(n + 1)
        if self.pareto_alpha is not None:
            k = np.arange(1, n + 1, dtype=np.float64)
            out[1:] = k ** -self.pareto_alpha - (k + 1) ** -self.pareto_alpha
        else:
            a = np.rint(self.lattice.atoms).astype(np.int64)
            sel = a <= n
            out[a[sel]] = self.lattice.masses[sel]
        return out

    def mean(self) -> float:
        if self.pareto_alpha is not None:
            if self.pareto_alpha <= 1:
                return math.inf
            return float(special.zeta(self.pareto_alpha, 1))
        return self.lattice.mean()

    def var(self) -> float:
        if self.pareto_alpha is not None:
            return math.inf if self.pareto_alpha <= 2 else (
                2.0 * float(special.zeta(self.pareto_alpha - 1, 1))
                - self.mean() - self.mean() ** 2)
        return self.lattice.variance()

    def truncated(self, n: int) -> LatticeDist:
        """Law of min(zeta, n)."""
        if self.pareto_alpha is not None:
            pmf = self.pmf_upto(n)
            atoms = np.arange(1, n + 1, dtype=np.float64)
            masses = pmf[1:].copy()
            masses[-1] += float(self.survival(n + 1))
            return LatticeDist(atoms, masses)
        return truncate_at(self.lattice, n)

    def conditioned(self, n: int) -> LatticeDist:
        """Law of zeta given zeta <= n."""
        if self.pareto_alpha is not None:
            pmf = self.pmf_upto(n)[1:]
            total = math.fsum(pmf.tolist())
            return LatticeDist(np.arange(1, n + 1, dtype=np.float64), pmf / total)
        a = self.lattice.atoms
        sel = a <= n + 0.5
        if not np.any(sel):
            raise ValueError(f"step law has no mass at or below {n}")
        m = self.lattice.masses[sel]
        return LatticeDist(a[sel], m / math.fsum(m.tolist()))

    def sample(self, rng: np.random.Generator, size: int, at_most: int | None = None):
        if self.pareto_alpha is not None:
            lo = 0.0 if at_most is None else float((at_most + 1) ** -self.pareto_alpha)
            u = rng.uniform(lo, 1.0, size=size)
            # clip before the int cast: u^(-1/alpha) can exceed the int64 range
            vals = np.minimum(np.floor(u ** (-1.0 / self.pareto_alpha)), 2.0 ** 62)
            return vals.astype(np.int64)
        atoms = np.rint(self.lattice.atoms).astype(np.int64)
        cum = np.cumsum(self.lattice.masses)
        top = cum[-1] if at_most is None else float(self.lattice.cdf(at_most + 0.5))
        idx = np.searchsorted(cum, rng.uniform(0.0, top, size=size), side="right")
        return atoms[np.minimum(idx, len(atoms) - 1)]

    def arithmetic_span(self) -> int:
        if self.pareto_alpha is not None:
            return 1
        vals = np.rint(self.lattice.atoms).astype(np.int64)
        g = 0
        for v in np.diff(np.concatenate([[0], vals])):
            g = math.gcd(g, int(v))
        return max(g, 1)

    def tail_spec(self) -> TailSpec | None:
        if self.pareto_alpha is None or not (1.0 < self.pareto_alpha < 2.0):
            return None
        # survival extended continuously off the integers: ell is exactly 1
        a = self.pareto_alpha
        return TailSpec(alpha=a, ell=lambda t: 1.0,
                        survival=lambda t: float(max(t, 1.0) ** -a))


# --------------------------------------------------------------------------
# the models
# --------------------------------------------------------------------------

class SimpleChain(DecrementModel):
    """Jump to 0 with probability 1/n, else step down by one.

    The decrement converges to the degenerate xi = 1, yet the absorption
    time is exactly uniform on {1..n}: the model is the negative control
    showing convergence of decrements alone does not make the renewal
    approximation work. No theorem clause applies.
    """

    name = "simple_chain"
    regime = "add"
    negative_control = True
    notes = "degenerate limit step; renewal approximation provably fails"

    def __init__(self, params: dict | None = None):
        super().__init__(params or {})
        self._limits = AddLimits(
            mu=1.0, sigma2=0.0, degenerate=True,
            xi_truncated=lambda n: LatticeDist.delta(1.0))

    @property
    def limits(self):
        return self._limits

    def decrement_pmf(self, n: int) -> LatticeDist:
        if n == 1:
            return LatticeDist.delta(1.0)
        return LatticeDist.from_pairs({1.0: 1.0 - 1.0 / n, float(n): 1.0 / n})

    def sample_decrements(self, states, rng):
        jump = rng.random(len(states)) < 1.0 / states
        return np.where(jump, states, 1).astype(np.int64)


class BetaCoalescent(DecrementModel):
    """Block-counting jump chain of a beta(a, b) coalescent, a in (0, 1].

    Canonical state s = blocks - 1. From m = s + 1 blocks, k blocks merge
    with probability proportional to C(m,k) B(k-2+a, m-k+b)/B(a,b); the
    decrement is k - 1. The decrement law converges to the law with
    survival function P(I >= k) = Gamma(k+a-1) / (Gamma(a) Gamma(k+1)),
    mean 1/(1-a), tail index 2 - a.
    """

    name = "beta_coalescent"
    regime = "add"
    dense_dp = True

    def __init__(self, params: dict):
        super().__init__(params)
        a, b = float(params["a"]), float(params["b"])
        if not (0.0 < a <= 1.0):
            raise ValueError("a must lie in (0, 1]")
        if b <= 0:
            raise ValueError("b must be positive")
        self.a, self.b = a, b
        self._row_cache: dict[int, np.ndarray] = {}
        mu = 1.0 / (1.0 - a) if a < 1.0 else math.inf
        alpha = 2.0 - a
        tail = None
        if 1.0 < alpha < 2.0:
            tail = TailSpec(alpha=alpha,
                            ell=self._ell, survival=self._survival_real)
        self._limits = AddLimits(mu=mu, sigma2=math.inf,
                                 xi_truncated=self.limit_step_truncated, tail=tail)

    @property
    def limits(self):
        return self._limits

    def limit_step_survival(self, k):
        """P(I >= k) of the limiting decrement, exact in log-gamma space."""
        k = np.asarray(k, dtype=np.float64)
        return np.exp(special.gammaln(k + self.a - 1.0)
                      - special.gammaln(self.a) - special.gammaln(k + 1.0))

    def _survival_real(self, t: float) -> float:
        # smooth continuation of the survival function off the integers
        return float(self.limit_step_survival(max(t, 1.0)))

    def _ell(self, t: float) -> float:
        return float(max(t, 1.0) ** (2.0 - self.a)) * self._survival_real(t)

    def limit_step_truncated(self, n: int) -> LatticeDist:
        """Law of min(I, n): exact pmf below n, survival lumped at n."""
        surv = self.limit_step_survival(np.arange(1, n + 2))
        masses = surv[:-1] - surv[1:]
        masses[-1] += surv[-1]
        return LatticeDist(np.arange(1, n + 1, dtype=np.float64), masses)

    def merge_weights(self, m: int) -> np.ndarray:
        """First-collision law at m blocks: w[j] = P(k = j + 2), j = 0..m-2."""
        with self._lock:
            row = self._row_cache.get(m)
        if row is not None:
            return row
        k = np.arange(2, m + 1, dtype=np.float64)
        logw = (special.gammaln(m + 1.0) - special.gammaln(k + 1.0)
                - special.gammaln(m - k + 1.0)
                + special.betaln(k - 2.0 + self.a, m - k + self.b))
        logw -= logw.max()
        w = np.exp(logw)
        w /= math.fsum(w.tolist())
        with self._lock:
            if len(self._row_cache) < 4096:
                self._row_cache[m] = w
        return w

    def decrement_pmf(self, n: int) -> LatticeDist:
        w = self.merge_weights(n + 1)
        return LatticeDist(np.arange(1, n + 1, dtype=np.float64), w)

    def newstate_weights(self, n: int) -> np.ndarray:
        return self.merge_weights(n + 1)[::-1].copy()


class BernoulliSieve(DecrementModel):
    """Occupancy chain with stick-breaking frequencies from i.i.d. W.

    The decrement at n is the ball count of the first box conditioned
    positive; decrement/n converges to 1 - W (multiplicative regime).
    """

    name = "bernoulli_sieve"
    regime = "mult"
    dense_dp = True

    def __init__(self, params: dict):
        super().__init__(params)
        w = params["w"]
        if "beta" in w:
            self.wa, self.wb = float(w["beta"][0]), float(w["beta"][1])
            if self.wa <= 0 or self.wb <= 0:
                raise ValueError("Beta parameters must be positive")
            self.point_w = None
            law = BetaLogLaw(self.wa, self.wb)
            self._limits = MultLimits(
                mu0=law.mu0, sigma02=law.sigma02, log_eta_law=law,
                eta_sampler=lambda rng, size: rng.beta(self.wa, self.wb, size=size))
        elif "point" in w:
            pw = float(w["point"])
            if not (0.0 < pw < 1.0):
                raise ValueError("point frequency must lie in (0, 1)")
            self.point_w = pw
            self.wa = self.wb = None
            self._limits = MultLimits(
                mu0=-math.log(pw), sigma02=0.0, log_eta_point=math.log(pw),
                eta_sampler=lambda rng, size: np.full(size, pw),
                nonarithmetic=False)
        else:
            raise ValueError(f"unrecognized frequency spec: {w!r}")

    @property
    def limits(self):
        return self._limits

    def _log_ball_weights(self, n: int) -> np.ndarray:
        """log E[(1-W)^k W^(n-k)] + log C(n,k) for k = 1..n."""
        k = np.arange(1, n + 1, dtype=np.float64)
        logc = (special.gammaln(n + 1.0) - special.gammaln(k + 1.0)
                - special.gammaln(n - k + 1.0))
        if self.point_w is not None:
            return logc + k * math.log1p(-self.point_w) + (n - k) * math.log(self.point_w)
        return logc + (special.betaln(self.wa + n - k, self.wb + k)
                       - special.betaln(self.wa, self.wb))

    def decrement_pmf(self, n: int) -> LatticeDist:
        logw = self._log_ball_weights(n)
        logw -= logw.max()
        w = np.exp(logw)
        w /= math.fsum(w.tolist())
        return LatticeDist(np.arange(1, n + 1, dtype=np.float64), w)

    def newstate_weights(self, n: int) -> np.ndarray:
        return self.decrement_pmf(n).masses[::-1].copy()

    def sample_decrements(self, states, rng):
        # J ~ Binomial(n, 1 - W) conditioned >= 1, W redrawn on rejection
        out = np.zeros(len(states), dtype=np.int64)
        pending = np.ones(len(states), dtype=bool)
        while np.any(pending):
            idx = np.flatnonzero(pending)
            if self.point_w is not None:
                w = np.full(len(idx), self.point_w)
            else:
                w = rng.beta(self.wa, self.wb, size=len(idx))
            j = rng.binomial(states[idx], 1.0 - w)
            ok = j >= 1
            out[idx[ok]] = j[ok]
            pending[idx[ok]] = False
        return out


class BarrierWalk(DecrementModel):
    """Random walk with a barrier: jump count chain on the gap to the barrier.

    Canonical state s = gap - 1; the decrement at s is zeta conditioned on
    zeta <= s. Additive regime with xi = zeta.
    """

    name = "barrier_walk"
    regime = "add"

    def __init__(self, params: dict):
        super().__init__(params)
        self.zeta = ZetaSpec(params["zeta"])
        if float(self.zeta.survival(1) - self.zeta.survival(2)) <= 0.0:
            raise ValueError("P(zeta = 1) must be positive (absorption is not guaranteed)")
        self.dense_dp = self.zeta.pareto_alpha is not None
        self._limits = AddLimits(
            mu=self.zeta.mean(), sigma2=self.zeta.var(),
            xi_truncated=self.zeta.truncated,
            arithmetic_span=self.zeta.arithmetic_span(),
            tail=self.zeta.tail_spec())

    @property
    def limits(self):
        return self._limits

    def decrement_pmf(self, n: int) -> LatticeDist:
        return self.zeta.conditioned(n)

    def sample_decrements(self, states, rng):
        if self.zeta.pareto_alpha is not None:
            out = np.empty(len(states), dtype=np.int64)
            for s in np.unique(states):
                mask = states == s
                out[mask] = self.zeta.sample(rng, int(mask.sum()), at_most=int(s))
            return out
        # finite support: single rejection round is usually enough
        out = self.zeta.sample(rng, len(states))
        bad = out > states
        while np.any(bad):
            out[bad] = self.zeta.sample(rng, int(bad.sum()))
            bad = out > states
        return out


class BarrierZeroJumps(DecrementModel):
    """Zero-jump (overshoot) chain of a heavy-tailed random walk with a barrier.

    Canonical state s corresponds to barrier gap g = s + 1. The next gap is
    the walk's undershoot at g; the law here conditions on actual progress
    (undershoot < g), dropping the P(zeta >= g) self-loop atom so the chain
    is strictly decreasing (the dropped mass vanishes as g grows and is
    what the canonical DP form requires). Multiplicative regime with
    eta ~ Beta(1 - alpha, alpha).
    """

    name = "barrier_zero_jumps"
    regime = "mult"
    dense_dp = True
    notes = "undershoot chain conditioned on progress; self-loop atom P(zeta>=gap) dropped"

    def __init__(self, params: dict):
        super().__init__(params)
        self.alpha = float(params["alpha"])
        if not (0.0 < self.alpha < 1.0):
            raise ValueError("alpha must lie in (0, 1)")
        self.zeta = ZetaSpec(params.get("zeta", {"pareto": {"alpha": self.alpha}}))
        a = self.alpha
        law = BetaLogLaw(1.0 - a, a)
        self._limits = MultLimits(
            mu0=law.mu0, sigma02=law.sigma02, log_eta_law=law,
            eta_sampler=lambda rng, size: rng.beta(1.0 - a, a, size=size))
        self._u = np.array([1.0])
        self._zpmf = np.array([0.0, 0.0])

    @property
    def limits(self):
        return self._limits

    def _renewal_mass(self, upto: int) -> np.ndarray:
        """u[m] = P(the walk ever sits at m), by the renewal recursion."""
        with self._lock:
            u = self._u
            if len(u) > upto:
                return u
            zp = self.zeta.pmf_upto(upto + 1)
            new = np.zeros(upto + 1)
            new[:len(u)] = u
            for m in range(len(u), upto + 1):
                new[m] = float(np.dot(zp[1:m + 1], new[m - 1::-1]))
            self._u = new
            return new

    def undershoot_law(self, g: int) -> LatticeDist:
        """Law of the undershoot at level g of the unrestricted walk.

        P(Y = j) = u(g - j) P(zeta >= j) for j = 1..g; the j = g atom is the
        first-jump-clears-the-barrier event.
        """
        u = self._renewal_mass(g)
        j = np.arange(1, g + 1)
        w = u[g - j] * self.zeta.survival(j)
        keep = w > 0
        w = w[keep] / math.fsum(w[keep].tolist())
        return LatticeDist(j[keep].astype(np.float64), w)

    def decrement_pmf(self, n: int) -> LatticeDist:
        g = n + 1
        u = self._renewal_mass(g)
        j = np.arange(1, g)                       # progress events only
        w = u[g - j] * self.zeta.survival(j)
        keep = w > 0
        j, w = j[keep], w[keep]
        w = w / math.fsum(w.tolist())
        # decrement d = g - j, increasing in reversed j
        return LatticeDist((g - j)[::-1].astype(np.float64), w[::-1].copy())

    def sample_decrements(self, states, rng):
        out = np.empty(len(states), dtype=np.int64)
        for s in np.unique(states):
            g = int(s) + 1
            mask = states == s
            cnt = int(mask.sum())
            # first step conditioned below g, then run the walk to the crossing
            pos = self.zeta.sample(rng, cnt, at_most=g - 1).astype(np.int64)
            active = np.ones(cnt, dtype=bool)
            while np.any(active):
                step = self.zeta.sample(rng, int(active.sum()))
                nxt = pos[active] + step
                crossed = nxt >= g
                idx = np.flatnonzero(active)
                pos[idx[~crossed]] = nxt[~crossed]
                active[idx[crossed]] = False
            # undershoot Y = g - pos, new state Y - 1, so the decrement is pos
            out[mask] = pos
        return out


# --------------------------------------------------------------------------
# coupling gaps
# --------------------------------------------------------------------------

def coupling_gap(model: DecrementModel, n: int, p: int = 1) -> float:
    """d_p between the decrement law at n and its limit, per the rate conditions.

    Additive: d_p(I_n, min(xi, n)). Multiplicative: d_1 of log(1 - I_n/n)
    against log eta, with the full-absorption atom I_n = n mapped to
    -log n (bounded convention; the chain cannot overshoot below 0).
    """
    d = model.decrement_pmf(n)
    if model.regime == "add":
        return dp_discrete(d, model.limits.xi_truncated(n), p).value
    with np.errstate(divide="ignore"):
        vals = np.where(d.atoms >= n, -math.log(n), np.log1p(-np.minimum(d.atoms, n - 1) / n))
    f_log = LatticeDist.from_pairs(zip(vals.tolist(), d.masses.tolist()))
    lim = model.limits
    if lim.log_eta_law is None:
        return dp_discrete(f_log, LatticeDist.delta(lim.log_eta_point), 1).value
    return d1_discrete_vs_continuous(f_log, lim.log_eta_law).value


# --------------------------------------------------------------------------
# registry
# --------------------------------------------------------------------------

def beta_coalescent_limit(a: float, mass_tol: float = 1e-12,
                          max_atoms: int = 10_000_000) -> LatticeDist:
    """Tabulated limiting decrement law of the beta(a, b) coalescent.

    Tabulates until the closed-form survival drops below ``mass_tol`` or
    ``max_atoms`` is reached; the un-tabulated tail is recorded as pruned
    mass with a matching declared budget.
    """
    model = BetaCoalescent({"a": a, "b": 1.0})
    hi = 2
    while hi < max_atoms and float(model.limit_step_survival(hi + 1)) > mass_tol:
        hi *= 2
    hi = min(hi, max_atoms)
    surv = model.limit_step_survival(np.arange(1, hi + 2))
    below = np.flatnonzero(surv[1:] <= mass_tol)
    cut = int(below[0]) + 1 if len(below) else hi
    surv = surv[:cut + 1]
    masses = surv[:-1] - surv[1:]
    pruned = float(surv[-1])
    keep = masses > 0
    return LatticeDist(np.arange(1, cut + 1, dtype=np.float64)[keep], masses[keep],
                       pruned_mass=pruned, prune_budget=max(pruned, mass_tol))


_SCHEMAS = {
    "simple_chain": {},
    "beta_coalescent": {"a": "float in (0,1]", "b": "float > 0"},
    "bernoulli_sieve": {"w": "{'beta': [a, b]} or {'point': w}"},
    "barrier_walk": {"zeta": "{'uniform': [lo, hi]} | {'pmf': {k: p}} | {'pareto': {'alpha': a}}"},
    "barrier_zero_jumps": {"alpha": "float in (0,1)",
                           "zeta": "optional step law, default pareto(alpha)"},
    "renewal_walk": {"xi": "step-law spec as for barrier_walk zeta"},
}

_FACTORIES = {
    "simple_chain": SimpleChain,
    "beta_coalescent": BetaCoalescent,
    "bernoulli_sieve": BernoulliSieve,
    "barrier_walk": BarrierWalk,
    "barrier_zero_jumps": BarrierZeroJumps,
}


def make_model(name: str, params: dict | None = None) -> DecrementModel:
    params = params or {}
    if name == "renewal_walk":
        from .renewal import RenewalWalk
        return RenewalWalk(params)
    if name not in _FACTORIES:
        raise KeyError(f"unknown model {name!r}; known: {sorted(_SCHEMAS)}")
    return _FACTORIES[name](params)


def registry_info() -> list[dict]:
    out = []
    for name in sorted(_SCHEMAS):
        entry = {"name": name, "params": _SCHEMAS[name]}
        if name == "renewal_walk":
            entry["description"] = "renewal counting process N_n of a walk with step xi"
        else:
            cls = _FACTORIES[name]
            entry["description"] = (cls.__doc__ or "").strip().splitlines()[0]
            if cls.negative_control:
                entry["negative_control"] = True
        out.append(entry)
    return out
