"""Renewal counting processes: exact additive laws, multiplicative samplers.

The additive count N_n = inf{k : S_k >= n} obeys the same recursion as an
absorption time with step law min(xi, n), so the exact law reuses the DP
engine; an independent forward route convolves the walk laws directly and
serves as a cross-check. Multiplicative counts are sampled (eta is
continuous in every in-scope model), including the stationary version
whose delay has the integrated-tail law r(t) = (1/mu0) int_0^t P(|log eta| > s) ds;
coupled stationary/zero-delayed pairs share one walk so the pathwise
domination is exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import PchipInterpolator

from . import absorb
from .dist import LatticeDist, convolve
from .models import AddLimits, DecrementModel, MultLimits, ZetaSpec

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W


class RenewalWalk(DecrementModel):
    """Pseudo-model whose absorption time is the renewal count N_n.

    The decrement at state s is min(xi, s): exactly the recursion
    N_n = 1 + N'_{n - min(xi, n)}. The boundary convention counts walk
    points strictly below n.
    """

    name = "renewal_walk"
    regime = "add"

    def __init__(self, params: dict):
        self.xi = ZetaSpec(params["xi"])
        super().__init__({"xi": self.xi.spec})
        self.dense_dp = self.xi.pareto_alpha is not None
        self._limits = AddLimits(
            mu=self.xi.mean(), sigma2=self.xi.var(),
            xi_truncated=self.xi.truncated,
            arithmetic_span=self.xi.arithmetic_span(),
            tail=self.xi.tail_spec())

    @property
    def limits(self):
        return self._limits

    def decrement_pmf(self, n: int) -> LatticeDist:
        return self.xi.truncated(n)

    def sample_decrements(self, states, rng):
        d = self.xi.sample(rng, len(states))
        return np.minimum(d, states)

    def simulate_batch(self, n: int, size: int, rng: np.random.Generator) -> np.ndarray:
        # the count is the crossing index of the raw walk: block-draw per chunk
        return walk_crossing_counts(self.xi, n, size, rng)


def walk_crossing_counts(spec: ZetaSpec, level: int, size: int,
                         rng: np.random.Generator,
                         chunk: int = 4096) -> np.ndarray:
    """N = inf{k : S_k >= level} for ``size`` independent walks, block-drawn.

    Steps are drawn in per-replicate blocks sized from the expected
    remaining count, so the total work is O(total steps) with large
    vectorized draws instead of one lock-step pass per step.
    """
    mu = spec.mean()
    if not math.isfinite(mu):
        mu = 1.0
    counts = np.zeros(size, dtype=np.int64)
    for lo in range(0, size, chunk):
        m = min(chunk, size - lo)
        done = np.zeros(m, dtype=np.int64)
        carry = np.zeros(m)
        alive = np.arange(m)
        while len(alive):
            need = level - carry[alive]
            block = int(min(max(np.max(need) / mu * 1.05 + 16, 32), 2_000_000 // max(len(alive), 1) + 32))
            draws = spec.sample(rng, (len(alive)) * block).reshape(len(alive), block).astype(np.float64)
            sums = np.cumsum(draws, axis=1) + carry[alive, None]
            hit = sums >= level
            crossed = hit.any(axis=1)
            first = np.argmax(hit, axis=1)
            done[alive[crossed]] += first[crossed] + 1
            done[alive[~crossed]] += block
            carry[alive[~crossed]] = sums[~crossed, -1]
            alive = alive[~crossed]
        counts[lo:lo + m] = done
    return counts


def additive_count_law(xi, n: int, prune: float = 0.0, route: str = "dp") -> LatticeDist:
    """Exact law of N_n = inf{k : S_k >= n} for an integer step law xi >= 1.

    ``route='dp'`` runs the absorption DP on the min(xi, s) decrement model;
    ``route='forward'`` convolves the walk laws S_k directly and reads off
    P(N_n = k) = P(S_{k-1} < n) - P(S_k < n). Both are exact; the forward
    route is the small-n cross-check.
    """
    if n == 0:
        return LatticeDist.delta(0.0)
    spec = ZetaSpec(xi)
    if route == "dp":
        return absorb.absorption_law(RenewalWalk({"xi": spec}), n, prune_budget=prune)
    if route != "forward":
        raise ValueError("route must be 'dp' or 'forward'")
    walk = spec.truncated(n)        # steps beyond n act like n: same count
    sk = LatticeDist.delta(0.0)
    below_prev = 1.0                # P(S_0 < n)
    atoms, masses = [], []
    k = 1
    while below_prev > 1e-15 and k <= n + 1:
        sk = convolve(sk, walk, prune=prune)
        below = float(sk.cdf(n - 0.5))
        mass = below_prev - below
        if mass > 1e-14:          # subtraction dust below float resolution is dropped
            atoms.append(float(k))
            masses.append(mass)
        below_prev = below
        k += 1
    total = math.fsum(masses)
    pruned = max(0.0, 1.0 - total)
    return LatticeDist(np.array(atoms), np.array(masses),
                       pruned_mass=pruned, prune_budget=max(pruned, 1e-12))


# --------------------------------------------------------------------------
# multiplicative side
# --------------------------------------------------------------------------

class StationaryDelay:
    """Inverse-transform sampler of the stationary delay |log eta_0*|.

    r(t) = (1/mu0) int_0^t P(|log eta| > s) ds, built on a quadrature grid
    with monotone interpolation and per-query bracketed refinement to 1e-10.
    """

    def __init__(self, limits: MultLimits, knots: int = 10_000):
        self.limits = limits
        self.mu0 = limits.mu0
        t_max = 1.0
        while self._tail_integral_step(t_max) > 1e-14 * self.mu0 and t_max < 1e6:
            t_max *= 2.0
        grid = np.linspace(0.0, t_max, knots)
        nodes = grid[:-1, None] + np.diff(grid)[:, None] * _GL_X[None, :]
        vals = self._survival(nodes.ravel()).reshape(nodes.shape)
        panel_w = np.diff(grid)[:, None] * _GL_W[None, :]
        increments = (vals * panel_w).sum(axis=1)
        r = np.concatenate([[0.0], np.cumsum(increments)]) / self.mu0
        keep = np.concatenate([[True], np.diff(r) > 0])
        self._grid = grid[keep]
        self._r = np.minimum(r[keep], 1.0)
        self._quant = PchipInterpolator(self._r, self._grid)
        self._r_interp = PchipInterpolator(self._grid, self._r)

    def _survival(self, s):
        return 1.0 - np.asarray(self.limits.log_abs_cdf(s), dtype=np.float64)

    def _tail_integral_step(self, t: float) -> float:
        # crude bound on int_t^(2t) P(|log eta| > s) ds
        return float(self._survival(np.array([t]))[0]) * t

    def r(self, t):
        """CDF of the stationary delay."""
        t = np.asarray(t, dtype=np.float64)
        out = np.where(t >= self._grid[-1], 1.0, self._r_interp(np.clip(t, 0.0, self._grid[-1])))
        return float(out) if out.ndim == 0 else out

    def quantile(self, u, refine: bool = True):
        u_arr = np.atleast_1d(np.asarray(u, dtype=np.float64))
        if np.any((u_arr <= 0.0) | (u_arr >= 1.0)):
            raise ValueError("quantile argument must lie strictly inside (0,1)")
        out = self._quant(np.minimum(u_arr, self._r[-1]))
        if refine:
            small = u_arr.size <= 4096
            idx = range(len(out)) if small else []
            for i in idx:
                lo, hi = max(out[i] - 2e-2, 0.0), out[i] + 2e-2
                for _ in range(60):
                    mid = 0.5 * (lo + hi)
                    if self._r_exact(mid) < u_arr[i]:
                        lo = mid
                    else:
                        hi = mid
                    if hi - lo < 1e-11 * max(1.0, hi):
                        break
                out[i] = 0.5 * (lo + hi)
        return float(out[0]) if np.isscalar(u) else out

    def _r_exact(self, t: float) -> float:
        j = int(np.searchsorted(self._grid, t, side="right")) - 1
        j = min(max(j, 0), len(self._grid) - 2)
        t0 = self._grid[j]
        nodes = t0 + (t - t0) * _GL_X
        inc = float(((self._survival(nodes)) * _GL_W).sum() * (t - t0))
        return float(self._r[j] + inc / self.mu0)

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        return np.asarray(self.quantile(rng.uniform(1e-15, 1.0 - 1e-15, size=size),
                                        refine=False))


def stationary_delay_quantile(u, limits: MultLimits) -> float:
    """Quantile of the stationary-delay law r for one u in (0,1)."""
    return float(StationaryDelay(limits).quantile(u))


def mult_count_samples(limits: MultLimits, t: float, size: int, seed,
                       stationary: bool = False, coupled: bool = False):
    """Sample the multiplicative counting process L_t = Lambda_{log t}.

    Zero-delayed by default; ``stationary`` draws the delay from the
    integrated-tail law. ``coupled=True`` returns (L_t, L*_t) built on the
    same walk, so L*_t <= L_t holds pathwise and exactly.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    rng = np.random.default_rng(seed)
    s = math.log(t)
    want_star = stationary or coupled
    delay = StationaryDelay(limits).sample(rng, size) if want_star else None

    counts = np.zeros(size, dtype=np.int64)
    counts_star = np.zeros(size, dtype=np.int64) if want_star else None
    if s >= 0:
        level = np.full(size, s)
        level_star = s - delay if want_star else None
        sums = np.zeros(size)
        alive = np.ones(size, dtype=bool)
        while np.any(alive):
            counts[alive] += (sums[alive] <= level[alive])
            if want_star:
                counts_star[alive] += (sums[alive] <= level_star[alive])
            eta = limits.eta_sampler(rng, int(alive.sum()))
            sums[alive] += -np.log(eta)
            alive[alive] = sums[alive] <= level[alive]
    if coupled:
        return counts, counts_star
    if stationary:
        return counts_star
    return counts


def mult_count_sample(limits: MultLimits, t: float, stationary: bool, seed) -> int:
    """Single draw of L_t (or the stationary L*_t)."""
    out = mult_count_samples(limits, t, 1, seed, stationary=stationary)
    return int(out[0])
