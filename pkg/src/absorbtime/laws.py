"""Continuous reference laws used on the far side of discrete-vs-continuous distances.

A continuous law exposes, besides cdf/quantile, the integrated CDF
H(x) = E(x - X)^+ which is what exact d_1 computations against a step CDF
reduce to, and partial first/second moments for the closed-form d_2 route.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy import integrate, special


class ContinuousLaw:
    """Interface for an absolutely continuous law with finite mean."""

    #: claimed absolute accuracy of cdf / integrated_cdf evaluations
    eval_error: float = 1e-12

    def cdf(self, x):
        raise NotImplementedError

    def quantile(self, u):
        raise NotImplementedError

    def integrated_cdf(self, x):
        """H(x) = integral of the CDF over (-inf, x] = E(x - X)^+."""
        raise NotImplementedError

    def mean(self) -> float:
        raise NotImplementedError

    def second_moment(self) -> float:
        """E X^2; may be inf."""
        raise NotImplementedError

    def partial_mean(self, x):
        """integral of t dF(t) over (-inf, x]; needs a finite mean."""
        raise NotImplementedError

    def partial_second_moment(self, x):
        """integral of t^2 dF(t) over (-inf, x]; needs a finite second moment."""
        raise NotImplementedError

    def tail_abs_quantile_integral(self, eps: float) -> float:
        """Bound on int_0^eps |q(u)| du + int_{1-eps}^1 |q(u)| du (clipping budget)."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError


class NormalLaw(ContinuousLaw):
    """Standard normal law, all pieces in closed form."""

    kind = "normal"
    eval_error = 1e-14

    def cdf(self, x):
        return special.ndtr(x)

    def quantile(self, u):
        u = np.asarray(u, dtype=np.float64)
        if np.any((u <= 0) | (u >= 1)):
            raise ValueError("quantile argument must lie strictly inside (0,1)")
        out = special.ndtri(u)
        return float(out) if out.ndim == 0 else out

    @staticmethod
    def pdf(x):
        return np.exp(-0.5 * np.square(x)) / math.sqrt(2.0 * math.pi)

    def integrated_cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        out = x * special.ndtr(x) + self.pdf(x)
        return float(out) if out.ndim == 0 else out

    def mean(self) -> float:
        return 0.0

    def second_moment(self) -> float:
        return 1.0

    def partial_mean(self, x):
        return -self.pdf(x)

    def partial_second_moment(self, x):
        x = np.asarray(x, dtype=np.float64)
        return special.ndtr(x) - x * self.pdf(x)

    def tail_abs_quantile_integral(self, eps: float) -> float:
        # int_0^eps |ndtri(u)| du = pdf(ndtri(eps)); symmetric on the right
        if eps <= 0:
            return 0.0
        return 2.0 * float(self.pdf(special.ndtri(eps)))

    def sample(self, rng, size):
        return rng.standard_normal(size)


class BetaLogLaw(ContinuousLaw):
    """Law of log W for W ~ Beta(a, b): the continuous step of multiplicative models.

    Supported on (-inf, 0]. CDF and quantile go through the regularized
    incomplete beta function; partial integrals by adaptive quadrature in
    log space (smooth, exponentially decaying integrands).
    """

    kind = "beta_log"
    eval_error = 1e-10

    def __init__(self, a: float, b: float):
        if a <= 0 or b <= 0:
            raise ValueError("Beta parameters must be positive")
        self.a = float(a)
        self.b = float(b)
        # mean of -log W and Var(log W) via di/trigamma
        self.mu0 = float(special.digamma(a + b) - special.digamma(a))
        self.sigma02 = float(special.polygamma(1, a) - special.polygamma(1, a + b))
        # left cut where the CDF drops below ~1e-300 in exact arithmetic
        self._t_floor = -(700.0 + abs(math.log(max(a, 1e-12)))) / max(a, 1e-3)

    def cdf(self, x):
        x = np.asarray(x, dtype=np.float64)
        z = np.exp(np.minimum(x, 0.0))
        out = np.where(x >= 0.0, 1.0, special.betainc(self.a, self.b, z))
        return float(out) if out.ndim == 0 else out

    def quantile(self, u):
        u = np.asarray(u, dtype=np.float64)
        if np.any((u <= 0) | (u >= 1)):
            raise ValueError("quantile argument must lie strictly inside (0,1)")
        out = np.log(special.betaincinv(self.a, self.b, u))
        return float(out) if out.ndim == 0 else out

    def _h_scalar(self, x: float) -> float:
        if x >= 0.0:
            return self.mu0 + x
        lo = self._t_floor
        if x <= lo:
            return 0.0
        val, _ = integrate.quad(
            lambda s: special.betainc(self.a, self.b, math.exp(s)), lo, x,
            epsabs=1e-12, epsrel=1e-11, limit=200)
        return val

    def integrated_cdf(self, x):
        if np.isscalar(x):
            return self._h_scalar(float(x))
        return np.array([self._h_scalar(float(v)) for v in np.asarray(x).ravel()]).reshape(np.shape(x))

    def mean(self) -> float:
        return -self.mu0

    def second_moment(self) -> float:
        return self.sigma02 + self.mu0 ** 2

    def partial_mean(self, x):
        def scalar(v):
            if v >= 0.0:
                return -self.mu0
            # int t dF = x F(x) - H(x)
            return v * self.cdf(v) - self._h_scalar(v)
        if np.isscalar(x):
            return scalar(float(x))
        return np.array([scalar(float(v)) for v in np.asarray(x).ravel()]).reshape(np.shape(x))

    def tail_abs_quantile_integral(self, eps: float) -> float:
        if eps <= 0:
            return 0.0
        q = float(self.quantile(eps))
        # int_0^eps |q(u)| du = eps|q| + H(q); right side is 0 (support <= 0)
        return eps * abs(q) + self._h_scalar(q)

    def sample(self, rng, size):
        return np.log(rng.beta(self.a, self.b, size=size))


@lru_cache(maxsize=32)
def normal_law() -> NormalLaw:
    return NormalLaw()


def normal_cdf(x):
    """Standard normal CDF (abs error well below 1e-9)."""
    out = special.ndtr(np.asarray(x, dtype=np.float64))
    return float(out) if out.ndim == 0 else out


def normal_quantile(u):
    """Standard normal quantile, rejects u outside (0,1)."""
    return normal_law().quantile(u)
