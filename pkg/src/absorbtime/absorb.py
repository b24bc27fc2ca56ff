"""Exact absorption-time laws by bottom-up dynamic programming.

The recursion is T_n = 1 + T_{n - I_n} in law with T_0 = 0; states are
processed bottom-up so every lower law is available when needed. Two
execution strategies sit behind one API: a banded accumulation over the
(offset, dense-window) representation when the decrement support is small,
and a packed triangular matrix driven by BLAS matvecs when the support
grows with the state (coalescent, sieve: the laws are dense on {1..n}
anyway). The default build is unpruned and therefore exact to float
round-off; an optional prune budget trades support width for a tracked,
reported pruned mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .dist import LatticeDist
from .models import DecrementModel

_BAND_SUPPORT_LIMIT = 64


class PruneBudgetError(RuntimeError):
    """Cumulative pruned mass exceeded the declared budget."""

    def __init__(self, state: int, pruned: float, budget: float):
        super().__init__(
            f"prune budget exceeded at state {state}: pruned {pruned:.3e} > budget {budget:.3e}")
        self.state = state
        self.pruned = pruned
        self.budget = budget


@dataclass
class AbsorptionTable:
    """Absorption-time laws of one model for all states up to n_max.

    ``laws`` holds LatticeDists for the retained states (all states for
    banded builds; a requested subset for dense builds, where keeping every
    row would pin the full triangular matrix). Means come from the exact
    first-moment recursion, independent of any pruning.
    """

    model_key: str
    n_max: int
    prune_budget: float
    laws: dict[int, LatticeDist] = field(default_factory=dict)
    means: np.ndarray | None = None
    pruned: np.ndarray | None = None

    def law(self, n: int) -> LatticeDist:
        if n not in self.laws:
            raise KeyError(f"law for state {n} was not retained in this table")
        return self.laws[n]

    def mean(self, n: int) -> float:
        return float(self.means[n])


def _window_to_lattice(offset: int, probs: np.ndarray, pruned: float,
                       budget: float) -> LatticeDist:
    keep = probs > 0.0
    atoms = (offset + np.flatnonzero(keep)).astype(np.float64)
    return LatticeDist(atoms, probs[keep], pruned, max(budget, pruned, 1e-12))


def _int_decrements(model: DecrementModel, s: int):
    d = model.decrement_pmf(s)
    return np.rint(d.atoms).astype(np.int64), d.masses


def _build_banded(model, n_max, threshold, budget, keep):
    offs = np.zeros(n_max + 1, dtype=np.int64)
    laws: list[np.ndarray] = [np.array([1.0])]
    pruned = np.zeros(n_max + 1)
    means = np.zeros(n_max + 1)
    out = AbsorptionTable(model.key(), n_max, budget)
    for s in range(1, n_max + 1):
        datoms, dmass = _int_decrements(model, s)
        kids = s - datoms
        means[s] = 1.0 + float(np.dot(dmass, means[kids]))
        t_lo = int(min(offs[k] for k in kids)) + 1
        t_hi = int(max(offs[k] + len(laws[k]) - 1 for k in kids)) + 1
        acc = np.zeros(t_hi - t_lo + 1)
        for k, w in zip(kids, dmass):
            base = offs[k] + 1 - t_lo
            acc[base:base + len(laws[k])] += w * laws[k]
        p_inherit = float(np.dot(dmass, pruned[kids]))
        if threshold > 0.0:
            small = (acc > 0.0) & (acc < threshold)
            p_new = math.fsum(acc[small].tolist())
            acc[small] = 0.0
        else:
            p_new = 0.0
        pruned[s] = p_inherit + p_new
        if budget > 0.0 and pruned[s] > budget:
            raise PruneBudgetError(s, pruned[s], budget)
        nz = np.flatnonzero(acc > 0.0)
        lo, hi = int(nz[0]), int(nz[-1])
        offs[s] = t_lo + lo
        laws.append(acc[lo:hi + 1].copy())
    for s in (keep if keep is not None else range(n_max + 1)):
        out.laws[s] = _window_to_lattice(int(offs[s]), laws[s], float(pruned[s]), budget)
    out.pruned = pruned
    out.means = means
    return out


def _build_dense(model, n_max, threshold, budget, keep):
    q = np.zeros((n_max + 1, n_max + 1))
    q[0, 0] = 1.0
    pruned = np.zeros(n_max + 1)
    means = np.zeros(n_max + 1)
    out = AbsorptionTable(model.key(), n_max, budget)
    for s in range(1, n_max + 1):
        v = model.newstate_weights(s)
        means[s] = 1.0 + float(np.dot(v, means[:s]))
        row = v @ q[:s, :s]
        p_inherit = float(np.dot(v, pruned[:s]))
        if threshold > 0.0:
            small = (row > 0.0) & (row < threshold)
            p_new = math.fsum(row[small].tolist())
            row[small] = 0.0
        else:
            p_new = 0.0
        pruned[s] = p_inherit + p_new
        if budget > 0.0 and pruned[s] > budget:
            raise PruneBudgetError(s, pruned[s], budget)
        q[s, 1:s + 1] = row
    wanted = sorted(set(keep) if keep is not None else {n_max})
    for s in wanted:
        out.laws[s] = _window_to_lattice(0, q[s], float(pruned[s]), budget)
    out.pruned = pruned
    out.means = means
    return out


def _is_dense(model: DecrementModel, n_max: int) -> bool:
    if model.dense_dp:
        return True
    probe = min(n_max, 64)
    return len(model.decrement_pmf(probe).atoms) > _BAND_SUPPORT_LIMIT


def build_table(model: DecrementModel, n_max: int, prune_budget: float = 0.0,
                keep=None) -> AbsorptionTable:
    """Bottom-up DP for all states 0..n_max.

    ``prune_budget`` > 0 activates per-state pruning at threshold
    budget/(n_max + 1); exceeding the budget raises PruneBudgetError with
    the offending state. ``keep`` restricts which laws are materialized
    (dense builds default to n_max only).
    """
    if n_max < 0:
        raise ValueError("n_max must be nonnegative")
    threshold = prune_budget / (n_max + 1) if prune_budget > 0 else 0.0
    if keep is not None:
        keep = sorted({int(k) for k in keep} | {n_max})
    if n_max == 0:
        table = AbsorptionTable(model.key(), 0, prune_budget)
        table.laws[0] = LatticeDist.delta(0.0)
        table.pruned = np.zeros(1)
        table.means = np.zeros(1)
        return table
    if _is_dense(model, n_max):
        table = _build_dense(model, n_max, threshold, prune_budget, keep)
    else:
        table = _build_banded(model, n_max, threshold, prune_budget, keep)
    table.laws.setdefault(0, LatticeDist.delta(0.0))
    return table


def absorption_law(model: DecrementModel, n: int, prune_budget: float = 0.0,
                   table: AbsorptionTable | None = None) -> LatticeDist:
    """Exact law of the absorption time from state n."""
    if n == 0:
        return LatticeDist.delta(0.0)
    if table is not None and n in table.laws:
        return table.laws[n]
    return build_table(model, n, prune_budget, keep=[n]).laws[n]


def mean_sequence(model: DecrementModel, n_max: int) -> np.ndarray:
    """E T_s for s = 0..n_max by the first-moment recursion (no pmf storage)."""
    m = np.zeros(n_max + 1)
    dense = _is_dense(model, n_max) if n_max > 0 else False
    for s in range(1, n_max + 1):
        if dense:
            m[s] = 1.0 + float(np.dot(model.newstate_weights(s), m[:s]))
        else:
            datoms, dmass = _int_decrements(model, s)
            m[s] = 1.0 + float(np.dot(dmass, m[s - datoms]))
    return m


def absorption_mean(model: DecrementModel, n: int) -> float:
    return float(mean_sequence(model, n)[n])


def simulate_absorption(model: DecrementModel, n: int, size: int,
                        seed) -> np.ndarray:
    """Monte Carlo absorption times: ``size`` independent chains from state n.

    Deterministic given (seed, n, size); ``seed`` may be an int or a
    numpy SeedSequence (for substream discipline).
    """
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    rng = np.random.default_rng(seed)
    if hasattr(model, "simulate_batch"):
        return model.simulate_batch(n, size, rng)
    states = np.full(size, n, dtype=np.int64)
    steps = np.zeros(size, dtype=np.int64)
    while True:
        alive = states > 0
        if not alive.any():
            break
        idx = np.flatnonzero(alive)
        d = model.sample_decrements(states[idx], rng)
        states[idx] -= d
        steps[idx] += 1
    return steps


def brute_force_law(model: DecrementModel, n: int) -> dict[int, float]:
    """Oracle: probability-weighted enumeration of all decreasing paths (n small)."""
    out: dict[int, float] = {}

    def walk(state: int, steps: int, prob: float):
        if state == 0:
            out[steps] = out.get(steps, 0.0) + prob
            return
        d = model.decrement_pmf(state)
        for a, m in zip(d.atoms, d.masses):
            walk(state - int(round(a)), steps + 1, prob * float(m))

    walk(n, 0, 1.0)
    return out
