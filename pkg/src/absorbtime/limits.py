"""Limit laws and the centering/scaling constants of the convergence results.

The normalizer c(t) solves t ell(c) / c^alpha = 1 for the clause's slowly
varying ell (alpha = 2 in the finite-variance and slowly-varying-variance
clauses); when ell is not monotone enough to bracket, the generalized
inverse c(t) = (1/P(xi > .))^{<-}(t) is used instead and the route is
recorded.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .laws import ContinuousLaw, NormalLaw, normal_cdf, normal_quantile  # noqa: F401
from .models import DecrementModel, TailSpec
from .stable import StableLaw, stable_cdf, stable_law, stable_quantile  # noqa: F401


class NumericError(RuntimeError):
    """A numeric routine failed to reach its contract (no root, no convergence)."""


@dataclass(frozen=True)
class Normalization:
    a_n: float
    b_n: float
    clause: str          # 'A' | 'B' | 'C'
    regime: str          # 'add' | 'mult'
    c_of_t: float        # the c value used (sigma*sqrt(t) in clause A)
    c_route: str         # 'closed-form' | 'equation' | 'inverse'

    def __post_init__(self):
        if self.b_n <= 0:
            raise NumericError(f"nonpositive scaling b_n = {self.b_n}")


def normalizer_c(tail: TailSpec, t: float, tol: float = 1e-8) -> tuple[float, str]:
    """Solve t * ell(c) / c^alpha = 1 for c.

    Monotone bisection in log c on an expanding bracket; falls back to the
    generalized inverse of 1/survival when the equation route cannot
    bracket a root. Returns (c, route).
    """
    if t <= 0:
        raise ValueError("t must be positive")
    alpha = tail.alpha

    def g(c: float) -> float:
        return t * tail.ell(c) / c ** alpha

    hi = max(4.0, t ** (2.0 / alpha) + t)
    for _ in range(80):
        if g(hi) <= 1.0:
            break
        hi *= 2.0
    # the wanted root sits on the decreasing branch (g may rise through 1
    # first); a unique downward crossing on the bracket [1, hi] is required,
    # otherwise ell is too wiggly for the equation route
    probes = np.geomspace(1.0, hi, 384)
    gv = np.array([g(c) for c in probes])
    above = gv >= 1.0
    downs = np.flatnonzero(above[:-1] & ~above[1:])
    if len(downs) == 1:
        i = int(downs[0])
        llo, lhi = math.log(probes[i]), math.log(probes[i + 1])
        for _ in range(200):
            mid = 0.5 * (llo + lhi)
            if g(math.exp(mid)) >= 1.0:
                llo = mid
            else:
                lhi = mid
            if lhi - llo <= tol * 0.25:
                break
        c = math.exp(0.5 * (llo + lhi))
        return c, "equation"
    if tail.survival is None:
        raise NumericError("no root for the normalizer equation and no survival fallback")
    # generalized inverse: c = inf{s : P(xi > s) <= 1/t}
    target = 1.0 / t
    lo, hi = 1.0, 2.0
    for _ in range(200):
        if tail.survival(hi) <= target:
            break
        hi *= 2.0
    else:
        raise NumericError("survival route found no crossing")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if tail.survival(mid) <= target:
            hi = mid
        else:
            lo = mid
        if hi - lo <= tol * max(1.0, hi):
            break
    return hi, "inverse"


def clause_distance_p(regime: str, clause: str) -> int:
    """The theorem's d_p exponent: d_2 only in the additive finite-variance clause."""
    return 2 if (regime == "add" and clause == "A") else 1


def clause_limit_law(model: DecrementModel, clause: str) -> ContinuousLaw:
    if clause in ("A", "B"):
        return NormalLaw()
    tail = model.limits.tail
    if tail is None:
        raise NumericError(f"model {model.name} carries no tail data for clause C")
    return stable_law(tail.alpha)


def theorem_normalization(model: DecrementModel, n: int, clause: str) -> Normalization:
    """Centering a_n and scaling b_n for the requested clause.

    Additive regime: a_n = n/mu and b_n = sigma mu^-3/2 sqrt(n) (A),
    mu^-3/2 c(n) (B), mu^-(alpha+1)/alpha c(n) (C). Multiplicative regime:
    the same formulas with mu0, sigma0 and t = log n.
    """
    if clause not in ("A", "B", "C"):
        raise ValueError("clause must be one of 'A', 'B', 'C'")
    lim = model.limits
    if model.regime == "add":
        mu, sigma2 = lim.mu, lim.sigma2
        if getattr(lim, "degenerate", False):
            raise NumericError(f"model {model.name} has a degenerate limit step; "
                               "no theorem clause applies (negative control)")
        t = float(n)
    else:
        mu, sigma2 = lim.mu0, lim.sigma02
        if not lim.nonarithmetic:
            raise NumericError(f"model {model.name} has an arithmetic |log eta|; "
                               "the multiplicative clauses require nonarithmetic")
        t = math.log(n)
    if not math.isfinite(mu) or mu <= 0:
        raise NumericError(f"mean {mu} outside (0, inf); clause {clause} unavailable")
    a_n = t / mu
    if clause == "A":
        if not (math.isfinite(sigma2) and sigma2 > 0):
            raise NumericError("clause A needs a finite positive variance")
        c = math.sqrt(sigma2) * math.sqrt(t)
        return Normalization(a_n, math.sqrt(sigma2) * mu ** -1.5 * math.sqrt(t),
                             clause, model.regime, c, "closed-form")
    tail = lim.tail
    if tail is None:
        raise NumericError(f"clause {clause} needs tail data on the model limits")
    if clause == "B":
        if tail.kind != "variance":
            raise NumericError("clause B needs the truncated-second-moment ell")
        c, route = normalizer_c(TailSpec(2.0, tail.ell, tail.survival, "variance"), t)
        return Normalization(a_n, mu ** -1.5 * c, clause, model.regime, c, route)
    if math.isfinite(sigma2):
        raise NumericError("clause C applies to infinite-variance steps")
    c, route = normalizer_c(tail, t)
    b = mu ** (-(tail.alpha + 1.0) / tail.alpha) * c
    return Normalization(a_n, b, clause, model.regime, c, route)
