"""Finite discrete distributions with exact pmf arithmetic.

The core value type is :class:`LatticeDist`, an immutable finite law on a
strictly increasing grid of real atoms. All operations are pure; truncation
never renormalizes silently, removed mass is carried in ``pruned_mass`` so
every downstream consumer can account for it.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

ATOM_MERGE_TOL = 1e-12
MASS_TOL = 1e-12
DEFAULT_PRUNE_BUDGET = 1e-12


class DistributionError(ValueError):
    """Invalid distribution construction or out-of-domain query."""


def _merge_atoms(atoms: np.ndarray, masses: np.ndarray, tol: float = ATOM_MERGE_TOL):
    """Sort atoms and merge values that coincide within ``tol``."""
    order = np.argsort(atoms, kind="stable")
    a = atoms[order]
    m = masses[order]
    if len(a) == 0:
        return a, m
    starts = np.empty(len(a), dtype=bool)
    starts[0] = True
    np.greater(np.diff(a), tol, out=starts[1:])
    idx = np.flatnonzero(starts)
    return a[idx], np.add.reduceat(m, idx)


@dataclass(frozen=True)
class LatticeDist:
    """Finite discrete law: strictly increasing atoms, positive masses.

    ``pruned_mass`` is mass removed by truncation operations. For CDF
    purposes it is treated as sitting beyond all retained atoms, so
    ``cdf`` sums retained mass only and never reaches 1 when mass was
    pruned. ``sum(masses) + pruned_mass`` must be 1 within 1e-12 and
    ``pruned_mass`` may not exceed the budget declared at construction.
    """

    atoms: np.ndarray
    masses: np.ndarray
    pruned_mass: float = 0.0
    prune_budget: float = DEFAULT_PRUNE_BUDGET
    _cum: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        atoms = np.ascontiguousarray(self.atoms, dtype=np.float64)
        masses = np.ascontiguousarray(self.masses, dtype=np.float64)
        if atoms.ndim != 1 or atoms.shape != masses.shape:
            raise DistributionError("atoms and masses must be 1-D arrays of equal length")
        if len(atoms) == 0:
            raise DistributionError("a distribution needs at least one atom")
        if not np.all(np.diff(atoms) > 0):
            raise DistributionError("atoms must be strictly increasing")
        if np.any(masses <= 0):
            raise DistributionError("all masses must be strictly positive")
        if not (0 <= self.pruned_mass <= self.prune_budget + 1e-15):
            raise DistributionError(
                f"pruned_mass {self.pruned_mass:g} outside declared budget {self.prune_budget:g}"
            )
        total = math.fsum(masses) + self.pruned_mass
        if abs(total - 1.0) > MASS_TOL:
            raise DistributionError(f"total mass {total!r} is not 1 within {MASS_TOL:g}")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "masses", masses)
        object.__setattr__(self, "_cum", np.cumsum(masses))
        self.atoms.setflags(write=False)
        self.masses.setflags(write=False)

    # -- constructors ------------------------------------------------------

    @classmethod
    def from_pairs(cls, pairs, pruned_mass: float = 0.0,
                   prune_budget: float = DEFAULT_PRUNE_BUDGET) -> "LatticeDist":
        """Build from (atom, mass) pairs or a dict; merges equal atoms, drops zeros."""
        if isinstance(pairs, dict):
            pairs = pairs.items()
        items = list(pairs)
        atoms = np.array([a for a, _ in items], dtype=np.float64)
        masses = np.array([m for _, m in items], dtype=np.float64)
        atoms, masses = _merge_atoms(atoms, masses)
        keep = masses > 0
        return cls(atoms[keep], masses[keep], pruned_mass, prune_budget)

    @classmethod
    def delta(cls, x: float) -> "LatticeDist":
        return cls(np.array([float(x)]), np.array([1.0]))

    @classmethod
    def uniform(cls, lo: int, hi: int) -> "LatticeDist":
        """Uniform law on the integers lo..hi inclusive."""
        n = hi - lo + 1
        if n < 1:
            raise DistributionError("empty support")
        return cls(np.arange(lo, hi + 1, dtype=np.float64), np.full(n, 1.0 / n))

    # -- basic queries -----------------------------------------------------

    @property
    def total_mass(self) -> float:
        return float(self._cum[-1])

    @property
    def min_atom(self) -> float:
        return float(self.atoms[0])

    @property
    def max_atom(self) -> float:
        return float(self.atoms[-1])

    def cdf(self, x):
        """Right-continuous CDF of the retained mass (pruned mass counts as +inf)."""
        idx = np.searchsorted(self.atoms, x, side="right")
        out = np.where(idx > 0, self._cum[np.maximum(idx - 1, 0)], 0.0)
        return float(out) if np.isscalar(x) else out

    def quantile(self, u):
        """Generalized inverse inf{y : F(y) >= u}, left-continuous, u in (0,1).

        Within the (budget-sized) sliver above the retained total mass the
        result is clamped to the maximal atom.
        """
        u_arr = np.asarray(u, dtype=np.float64)
        if np.any((u_arr <= 0.0) | (u_arr >= 1.0)):
            raise DistributionError("quantile argument must lie strictly inside (0,1)")
        idx = np.searchsorted(self._cum, u_arr, side="left")
        idx = np.minimum(idx, len(self.atoms) - 1)
        out = self.atoms[idx]
        return float(out) if np.isscalar(u) else out

    def moment(self, p: float) -> float:
        """Absolute p-th moment of the retained mass."""
        return float(np.dot(self.masses, np.abs(self.atoms) ** p))

    def mean(self) -> float:
        return float(np.dot(self.masses, self.atoms))

    def variance(self) -> float:
        m = self.mean() / self.total_mass
        return float(np.dot(self.masses, (self.atoms - m) ** 2)) / self.total_mass

    # -- transforms --------------------------------------------------------

    def map_affine(self, shift: float, scale: float) -> "LatticeDist":
        """Law of (X - shift)/scale with scale > 0 (atom order preserved)."""
        if scale <= 0:
            raise DistributionError("scale must be positive")
        return LatticeDist((self.atoms - shift) / scale, self.masses,
                           self.pruned_mass, self.prune_budget)

    def convolve(self, other: "LatticeDist", prune: float = 0.0) -> "LatticeDist":
        return convolve(self, other, prune)

    def truncate_at(self, bound: float) -> "LatticeDist":
        return truncate_at(self, bound)

    def prune(self, threshold: float, budget: float | None = None) -> "LatticeDist":
        """Drop atoms with mass < threshold, accounting them in pruned_mass."""
        keep = self.masses >= threshold
        removed = math.fsum(self.masses[~keep])
        if not np.any(keep):
            raise DistributionError("pruning would remove the entire distribution")
        if budget is None:
            budget = max(self.prune_budget, self.pruned_mass + removed)
        return LatticeDist(self.atoms[keep], self.masses[keep],
                           self.pruned_mass + removed, budget)

    # -- serialization -----------------------------------------------------

    def to_json_obj(self) -> dict:
        return {
            "atoms": self.atoms.tolist(),
            "masses": self.masses.tolist(),
            "pruned_mass": self.pruned_mass,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj())

    @classmethod
    def from_json_obj(cls, obj: dict) -> "LatticeDist":
        pruned = float(obj.get("pruned_mass", 0.0))
        return cls(np.array(obj["atoms"], dtype=np.float64),
                   np.array(obj["masses"], dtype=np.float64),
                   pruned, max(DEFAULT_PRUNE_BUDGET, pruned))

    @classmethod
    def from_json(cls, text: str) -> "LatticeDist":
        return cls.from_json_obj(json.loads(text))


@dataclass(frozen=True)
class AffineView:
    """The law of (X - shift)/scale for X ~ base, scale > 0.

    Quantiles transform exactly: q_view(u) = (q_base(u) - shift)/scale.
    Distances treat the view by transforming atoms analytically, never by
    resampling.
    """

    base: LatticeDist
    shift: float
    scale: float

    def __post_init__(self):
        if self.scale <= 0:
            raise DistributionError("scale must be positive")

    def as_lattice(self) -> LatticeDist:
        return self.base.map_affine(self.shift, self.scale)

    def cdf(self, x):
        return self.base.cdf(np.asarray(x) * self.scale + self.shift)

    def quantile(self, u):
        return (self.base.quantile(u) - self.shift) / self.scale

    def mean(self) -> float:
        return (self.base.mean() - self.shift * self.base.total_mass) / self.scale


def as_lattice(dist) -> LatticeDist:
    """Materialize a LatticeDist from a LatticeDist or AffineView."""
    if isinstance(dist, AffineView):
        return dist.as_lattice()
    if isinstance(dist, LatticeDist):
        return dist
    raise TypeError(f"not a discrete law: {type(dist)!r}")


def cdf(dist, x):
    return dist.cdf(x)


def quantile(dist, u):
    return dist.quantile(u)


def _is_integer_lattice(d: LatticeDist) -> bool:
    r = np.rint(d.atoms)
    return bool(np.all(np.abs(d.atoms - r) <= ATOM_MERGE_TOL))


_DENSE_CONV_LIMIT = 8_000_000


def convolve(f: LatticeDist, g: LatticeDist, prune: float = 0.0) -> LatticeDist:
    """Law of the independent sum X + Y.

    Uses a dense FFT-free integer-grid convolution when both supports are
    integer lattices of manageable range, otherwise the exact outer-sum.
    Atoms with mass < ``prune`` are removed and accounted in pruned_mass.
    """
    pruned = f.pruned_mass + g.pruned_mass
    if _is_integer_lattice(f) and _is_integer_lattice(g):
        lo_f, hi_f = int(round(f.min_atom)), int(round(f.max_atom))
        lo_g, hi_g = int(round(g.min_atom)), int(round(g.max_atom))
        span = (hi_f - lo_f + 1) + (hi_g - lo_g + 1)
        if span <= _DENSE_CONV_LIMIT:
            vf = np.zeros(hi_f - lo_f + 1)
            vf[np.rint(f.atoms).astype(np.int64) - lo_f] = f.masses
            vg = np.zeros(hi_g - lo_g + 1)
            vg[np.rint(g.atoms).astype(np.int64) - lo_g] = g.masses
            vs = np.convolve(vf, vg)
            atoms = np.arange(lo_f + lo_g, lo_f + lo_g + len(vs), dtype=np.float64)
            keep = vs > 0
            atoms, masses = atoms[keep], vs[keep]
            return _finish_convolve(atoms, masses, pruned, prune, f, g)
    sums = np.add.outer(f.atoms, g.atoms).ravel()
    masses = np.multiply.outer(f.masses, g.masses).ravel()
    atoms, masses = _merge_atoms(sums, masses)
    return _finish_convolve(atoms, masses, pruned, prune, f, g)


def _finish_convolve(atoms, masses, pruned, prune, f, g):
    if prune > 0:
        keep = masses >= prune
        pruned += math.fsum(masses[~keep])
        atoms, masses = atoms[keep], masses[keep]
    budget = max(f.prune_budget + g.prune_budget, pruned)
    return LatticeDist(atoms, masses, pruned, budget)


def truncate_at(f: LatticeDist, bound: float) -> LatticeDist:
    """Lump all atoms above ``bound`` onto the atom at ``bound`` (mass preserved)."""
    k = int(np.searchsorted(f.atoms, bound, side="right"))
    if k == len(f.atoms):
        return f
    tail = math.fsum(f.masses[k:])
    atoms = f.atoms[:k]
    masses = f.masses[:k]
    if k > 0 and abs(atoms[-1] - bound) <= ATOM_MERGE_TOL:
        masses = masses.copy()
        masses[-1] += tail
    else:
        atoms = np.append(atoms, bound)
        masses = np.append(masses, tail)
    return LatticeDist(atoms, masses, f.pruned_mass, f.prune_budget)


def moment(dist, p: float) -> float:
    return as_lattice(dist).moment(p)


def mean(dist) -> float:
    return as_lattice(dist).mean()


def variance(dist) -> float:
    return as_lattice(dist).variance()
