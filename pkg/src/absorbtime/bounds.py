"""Linear-recursion bound machinery: s_n = r_n + sum_k p_{n,k} s_k.

Provides the forward solver, the suffix-supremum transform r* that turns a
bounded sequence (r_k psi_k / k) into a nonincreasing one, the drift
condition check, and the bound ratio rho_n = s_n / sum_{k<=n} r*_k psi_k / k
whose boundedness is the lemma's conclusion.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


@dataclass
class RecursionProblem:
    """The (p_{n,k}, r_n, psi_n, initial values) bundle.

    ``p(n)`` returns the pmf over k = 0..n-1 of the recursion at index n;
    ``r`` and ``psi`` are positive sequences given as callables.
    """

    a: int
    init: Sequence[float]
    p: Callable[[int], np.ndarray]
    r: Callable[[int], float]
    psi: Callable[[int], float]

    def __post_init__(self):
        if len(self.init) != self.a + 1:
            raise ValueError("init must supply s_0..s_a")

    def pmf(self, n: int) -> np.ndarray:
        w = np.asarray(self.p(n), dtype=np.float64)
        if len(w) != n:
            raise ValueError(f"p({n}) must have length {n}")
        if abs(math.fsum(w.tolist()) - 1.0) > 1e-12:
            raise ValueError(f"p({n}) does not sum to 1")
        return w


def solve_recursion(prob: RecursionProblem, n_max: int) -> np.ndarray:
    """Forward evaluation of s_0..s_{n_max}."""
    if n_max < prob.a:
        raise ValueError("n_max must be at least the threshold index a")
    s = np.zeros(n_max + 1)
    s[:prob.a + 1] = np.asarray(prob.init, dtype=np.float64)
    for n in range(prob.a + 1, n_max + 1):
        s[n] = prob.r(n) + float(np.dot(prob.pmf(n), s[:n]))
    return s


def rstar_transform(r: Callable[[int], float], psi: Callable[[int], float],
                    n_max: int, horizon: int | None = None) -> np.ndarray:
    """r*_k = (k / psi_k) sup_{j >= k} r_j psi_j / j for k = 1..n_max.

    The supremum is truncated at ``horizon`` (default 4 n_max), which the
    caller asserts covers the bounded tail; horizon < n_max is rejected.
    """
    if horizon is None:
        horizon = 4 * n_max
    if horizon < n_max:
        raise ValueError("horizon must be at least n_max")
    ks = np.arange(1, horizon + 1)
    seq = np.array([r(int(k)) * psi(int(k)) / k for k in ks])
    suffix = np.maximum.accumulate(seq[::-1])[::-1]
    out = suffix[:n_max] * ks[:n_max] / np.array([psi(int(k)) for k in ks[:n_max]])
    return out


@dataclass(frozen=True)
class C1Report:
    value: float
    n0: int
    n_max: int


def check_C1(prob: RecursionProblem, n_max: int, n0: int | None = None) -> C1Report:
    """Empirical inf over n in (n0, n_max] of n^-1 psi_n sum_k (n-1-k) p_{n,k}.

    A finite-window stand-in for the liminf condition; positivity is the
    caller's acceptance test, the window is reported alongside.
    """
    if n0 is None:
        n0 = max(prob.a, n_max // 10)
    vals = []
    for n in range(max(n0 + 1, prob.a + 1), n_max + 1):
        w = prob.pmf(n)
        drift = float(np.dot(w, (n - 1) - np.arange(n)))
        vals.append(prob.psi(n) * drift / n)
    if not vals:
        raise ValueError("empty check window")
    return C1Report(min(vals), n0, n_max)


@dataclass
class BoundReport:
    rho: np.ndarray
    c1: C1Report
    sup_first_half: float
    sup_second_half: float
    bounded: bool


def bound_ratio(prob: RecursionProblem, n_max: int, horizon: int | None = None,
                n0: int | None = None, s: np.ndarray | None = None) -> BoundReport:
    """rho_n = s_n / sum_{k<=n} r*_k psi_k / k, with the boundedness verdict.

    The verdict compares the sup of rho over (n_max/2, n_max] against the
    sup over the first half times 1.05 (a trend proxy for O(1)).
    """
    if s is None:
        s = solve_recursion(prob, n_max)
    rstar = rstar_transform(prob.r, prob.psi, n_max, horizon)
    ks = np.arange(1, n_max + 1)
    terms = rstar * np.array([prob.psi(int(k)) for k in ks]) / ks
    denom = np.cumsum(terms)
    with np.errstate(divide="ignore", invalid="ignore"):
        rho = np.where(denom > 0, s[1:] / denom, np.inf)
    c1 = check_C1(prob, n_max, n0)
    half = n_max // 2
    sup1 = float(np.max(rho[:half])) if half >= 1 else math.inf
    sup2 = float(np.max(rho[half:]))
    return BoundReport(rho, c1, sup1, sup2, bounded=sup2 <= sup1 * 1.05)
