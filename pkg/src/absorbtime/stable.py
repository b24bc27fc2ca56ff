"""Skewed alpha-stable limit law for 1 < alpha < 2.

The law is pinned by its characteristic function

    cf(t) = exp(-|t|^alpha * G1ma * (cos(pi alpha/2) + i sin(pi alpha/2) sign t)),

with G1ma = Gamma(1 - alpha) computed by reflection. Writing
g_c = G1ma cos(pi alpha/2) > 0 and g_s = -G1ma sin(pi alpha/2) > 0 this is
exp(-g_c |t|^alpha + i g_s |t|^alpha sign t): a totally left-skewed stable
law (S1 parameterization: beta = -1, scale g_c^(1/alpha), location 0) with
heavy left tail P(X <= -s) ~ s^-alpha (exactly coefficient 1) and a thin
right tail.

CDF / density / integrated CDF are computed from the CF by inversion
integrals, split at the phase zeros of theta(t) = g_s t^alpha - x t and
summed segment-by-segment with Gauss-Legendre panels; an analytic head
handles the t -> 0 power singularities with explicit remainder bounds.
Beyond a crossover the left tail switches to the expansion
P(X <= -s) = s^-alpha (1 + b2 s^-alpha + b3 s^-2alpha) whose coefficients
are probed once per alpha from the inversion machinery itself.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.interpolate import PchipInterpolator

from .laws import ContinuousLaw

# Gauss-Legendre panel on [0, 1]
_GL_X, _GL_W = np.polynomial.legendre.leggauss(16)
_GL_X = 0.5 * (_GL_X + 1.0)
_GL_W = 0.5 * _GL_W

_ENVELOPE_LOG = 42.0          # e^-42 ~ 5.7e-19: CF envelope cut
_HEAD_TOL = 2.5e-15
_LEFT_SWITCH = 200.0          # |x| beyond which the left-tail expansion is used
_PROBE_S = (240.0, 360.0, 540.0)


def gamma_one_minus(alpha: float) -> float:
    """Gamma(1 - alpha) for alpha in (1,2) via reflection (no negative-argument gamma)."""
    return math.pi / (math.sin(math.pi * (1.0 - alpha)) * math.gamma(alpha))


@dataclass(frozen=True)
class _TailFit:
    b2: float
    b3: float
    residual: float


class StableLaw(ContinuousLaw):
    kind = "stable"

    def __init__(self, alpha: float):
        if not (1.0 < alpha < 2.0):
            raise ValueError("alpha must lie strictly inside (1, 2)")
        self.alpha = float(alpha)
        g1ma = gamma_one_minus(alpha)
        self.g_c = g1ma * math.cos(math.pi * alpha / 2.0)
        self.g_s = -g1ma * math.sin(math.pi * alpha / 2.0)
        if self.g_c <= 0 or self.g_s <= 0:
            raise AssertionError("CF constants must be positive for alpha in (1,2)")
        #: S1 scale of the equivalent textbook parameterization (beta = -1)
        self.s1_scale = self.g_c ** (1.0 / alpha)
        self._t_env = (_ENVELOPE_LOG / self.g_c) ** (1.0 / alpha)
        self._tail: _TailFit | None = None
        self._tables = None
        self.eval_error = 1e-11

    # ------------------------------------------------------------------ CF

    def cf(self, t):
        """Characteristic function at real t (vectorized)."""
        t = np.asarray(t, dtype=np.float64)
        mag = np.abs(t) ** self.alpha
        out = np.exp(-self.g_c * mag + 1j * self.g_s * mag * np.sign(t))
        return complex(out) if out.ndim == 0 else out

    # --------------------------------------------------- inversion integrals

    def _theta(self, t, x):
        return self.g_s * t ** self.alpha - x * t

    def _phase_zero_grid(self, x: float, t_lo: float, t_hi: float) -> np.ndarray:
        """All t in (t_lo, t_hi) with theta(t) in pi*Z, sorted ascending."""
        a = self.alpha
        zeros = []
        branches = []
        if x <= 0:
            branches.append((t_lo, t_hi))
        else:
            t_c = (x / (a * self.g_s)) ** (1.0 / (a - 1.0))
            if t_c <= t_lo or t_c >= t_hi:
                branches.append((t_lo, t_hi))
            else:
                branches.append((t_lo, t_c))
                branches.append((t_c, t_hi))
        for lo, hi in branches:
            th_lo = self._theta(lo, x)
            th_hi = self._theta(hi, x)
            lo_v, hi_v = min(th_lo, th_hi), max(th_lo, th_hi)
            k_first = math.floor(lo_v / math.pi) + 1
            k_last = math.floor(hi_v / math.pi)
            if k_last < k_first:
                continue
            targets = math.pi * np.arange(k_first, k_last + 1, dtype=np.float64)
            L = np.full(targets.shape, lo)
            R = np.full(targets.shape, hi)
            increasing = th_hi >= th_lo
            for _ in range(78):
                mid = 0.5 * (L + R)
                val = self._theta(mid, x)
                go_right = (val < targets) if increasing else (val > targets)
                L = np.where(go_right, mid, L)
                R = np.where(go_right, R, mid)
            zeros.append(0.5 * (L + R))
        if not zeros:
            return np.empty(0)
        return np.sort(np.concatenate(zeros))

    def _edges(self, x: float, t0: float) -> np.ndarray:
        """Panel edges on [t0, t_env]: one panel per phase half-period,
        geometrically subdivided so no panel spans more than a factor 2 in t
        (the 1/t^kappa envelopes need bounded variation per panel)."""
        t_hi = self._t_env
        zeros = self._phase_zero_grid(x, t0, t_hi)
        base = np.unique(np.concatenate([[t0], zeros, [t_hi]]))
        pieces = [np.array([t0])]
        for a_e, b_e in zip(base[:-1], base[1:]):
            ratio = b_e / a_e
            if ratio > 2.0:
                k = int(math.ceil(math.log2(ratio)))
                pieces.append(a_e * (b_e / a_e) ** (np.arange(1, k + 1) / k))
            else:
                pieces.append(np.array([b_e]))
        return np.unique(np.concatenate(pieces))

    def _panels(self, x: float, edges: np.ndarray, kappa: int) -> float:
        a_e = edges[:-1]
        width = np.diff(edges)
        T = a_e[:, None] + width[:, None] * _GL_X[None, :]
        A = self.g_c * T ** self.alpha
        TH = self.g_s * T ** self.alpha - x * T
        if kappa == 0:
            F = np.exp(-A) * np.cos(TH)
        elif kappa == 1:
            F = np.exp(-A) * np.sin(TH) / T
        else:
            F = (1.0 - np.exp(-A) * np.cos(TH)) / (T * T)
        vals = (F * (width[:, None] * _GL_W[None, :])).sum(axis=1)
        return math.fsum(vals.tolist())

    def _head_cut(self, x: float, kappa: int) -> float:
        """t0 such that the analytic head's remainder bound is below _HEAD_TOL."""
        t0 = min(0.05, 0.5 * self._t_env)
        for _ in range(220):
            th = self.g_s * t0 ** self.alpha + abs(x) * t0
            am = self.g_c * t0 ** self.alpha
            if kappa == 0:
                bound = t0 * (am + 0.5 * th * th)
            elif kappa == 1:
                bound = th ** 3 / 6.0 + am * th
            else:
                bound = (th ** 4 / 24.0 + 0.5 * am * am + 0.5 * am * th * th) / t0
            if bound <= _HEAD_TOL or t0 <= 1e-280:
                return t0
            t0 *= 0.5
        return t0

    def _inversion(self, x: float, kappa: int) -> float:
        """Integral over (0, inf) of the kappa-kernel at x.

        kappa=0: e^-A cos(theta)            (density kernel)
        kappa=1: e^-A sin(theta) / t        (Gil-Pelaez CDF kernel)
        kappa=2: (1 - e^-A cos(theta))/t^2  (mean-absolute kernel)
        """
        a = self.alpha
        t0 = self._head_cut(x, kappa)
        if kappa == 0:
            head = t0
        elif kappa == 1:
            head = self.g_s * t0 ** a / a - x * t0
        else:
            head = (self.g_c * t0 ** (a - 1.0) / (a - 1.0)
                    + self.g_s ** 2 * t0 ** (2 * a - 1.0) / (2.0 * (2 * a - 1.0))
                    - x * self.g_s * t0 ** a / a
                    + 0.5 * x * x * t0)
        body = self._panels(x, self._edges(x, t0), kappa)
        if kappa == 2:
            tail = 1.0 / self._t_env     # int_{t_env}^inf dt/t^2, CF part < e^-42
        else:
            tail = 0.0
        return head + body + tail

    def _cdf_direct(self, x: float) -> float:
        return min(1.0, max(0.0, 0.5 - self._inversion(x, 1) / math.pi))

    def _pdf_direct(self, x: float) -> float:
        return max(0.0, self._inversion(x, 0) / math.pi)

    def _eabs_direct(self, x: float) -> float:
        """E|X - x| from the CF."""
        return 2.0 * self._inversion(x, 2) / math.pi

    def _icdf_direct(self, x: float) -> float:
        """H(x) = E(x - X)^+ (the mean is 0)."""
        return 0.5 * (self._eabs_direct(x) + x)

    # ------------------------------------------------------------ left tail

    def _tail_fit(self) -> _TailFit:
        if self._tail is None:
            a = self.alpha
            s = np.array(_PROBE_S)
            u = np.array([self._cdf_direct(-v) for v in s])
            y = u * s ** a - 1.0
            m = np.column_stack([s ** -a, s ** (-2 * a)])
            b2, b3 = np.linalg.solve(m[:2], y[:2])
            resid = abs(y[2] - b2 * m[2, 0] - b3 * m[2, 1])
            self._tail = _TailFit(float(b2), float(b3), float(resid))
        return self._tail

    def _tail_cdf(self, s):
        """P(X <= -s) for s >= _LEFT_SWITCH."""
        fit = self._tail_fit()
        a = self.alpha
        return s ** -a * (1.0 + fit.b2 * s ** -a + fit.b3 * s ** (-2 * a))

    def _tail_icdf(self, s):
        """H(-s) = int_s^inf P(X <= -v) dv for s >= _LEFT_SWITCH."""
        fit = self._tail_fit()
        a = self.alpha
        return (s ** (1 - a) / (a - 1.0)
                + fit.b2 * s ** (1 - 2 * a) / (2 * a - 1.0)
                + fit.b3 * s ** (1 - 3 * a) / (3 * a - 1.0))

    def _tail_quantile(self, u):
        """quantile(u) for u below the left switch level."""
        fit = self._tail_fit()
        a = self.alpha
        s = u ** (-1.0 / a)
        for _ in range(4):
            s = u ** (-1.0 / a) * (1.0 + fit.b2 * s ** -a + fit.b3 * s ** (-2 * a)) ** (1.0 / a)
        return -s

    # --------------------------------------------------------------- tables

    def _build_tables(self):
        if self._tables is not None:
            return self._tables
        # right endpoint: walk out until the upper tail is below 1e-11
        x_hi = 4.0
        while 1.0 - self._cdf_direct(x_hi) > 1e-11 and x_hi < 64.0:
            x_hi += 1.0
        core = np.arange(-32.0, min(10.0, x_hi) + 1e-9, 0.01)
        left = -np.geomspace(_LEFT_SWITCH, 32.0, 140)[:-1]
        right = np.linspace(min(10.0, x_hi), x_hi, 48)[1:] if x_hi > 10.0 else np.empty(0)
        xs = np.unique(np.concatenate([left, core, right]))
        fs = np.array([self._cdf_direct(v) for v in xs])
        if np.any(np.diff(fs) <= 0):
            keep = np.concatenate([[True], np.diff(fs) > 0])
            xs, fs = xs[keep], fs[keep]
        lmask = xs <= -32.0
        cmask = (xs >= -32.0) & (xs <= 10.0)
        rmask = xs >= 10.0 if x_hi > 10.0 else np.zeros(len(xs), bool)
        tabs = {
            "xs": xs, "fs": fs,
            "f_left_end": fs[np.searchsorted(xs, -32.0)],
            "f_right_end": fs[-1], "x_hi": xs[-1],
            # left wing in log-log coordinates: log F vs -log(-x), both increasing in x
            "wing_cdf": PchipInterpolator(-np.log(-xs[lmask]), np.log(fs[lmask])),
            "wing_q": PchipInterpolator(np.log(fs[lmask]), -np.log(-xs[lmask])),
            "core_cdf": PchipInterpolator(xs[cmask], fs[cmask]),
            "core_q": PchipInterpolator(fs[cmask], xs[cmask]),
        }
        if rmask.sum() > 3:
            # -log(1 - F) is increasing in x on the thin right tail
            tabs["right_cdf"] = PchipInterpolator(xs[rmask], np.log(1.0 - fs[rmask]))
            tabs["right_q"] = PchipInterpolator(-np.log(1.0 - fs[rmask]), xs[rmask])
        self._tables = tabs
        return tabs

    # ------------------------------------------------------------ public API

    def cdf(self, x):
        """CDF; table-backed in the bulk, expansion in the far left tail."""
        scalar = np.isscalar(x)
        xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
        t = self._build_tables()
        out = np.empty_like(xv)
        far = xv <= -_LEFT_SWITCH
        out[far] = self._tail_cdf(-xv[far])
        wing = (~far) & (xv <= -32.0)
        out[wing] = np.exp(t["wing_cdf"](-np.log(-xv[wing])))
        core = (xv > -32.0) & (xv <= 10.0)
        out[core] = t["core_cdf"](xv[core])
        hi = xv > 10.0
        if np.any(hi):
            if "right_cdf" in t:
                xh = np.minimum(xv[hi], t["x_hi"])
                out[hi] = 1.0 - np.exp(t["right_cdf"](xh))
            else:
                out[hi] = 1.0
            out[hi & (xv > t["x_hi"])] = 1.0
        np.clip(out, 0.0, 1.0, out=out)
        return float(out[0]) if scalar else out.reshape(np.shape(x))

    def cdf_exact(self, x):
        if np.isscalar(x):
            return self._cdf_direct(float(x))
        return np.array([self._cdf_direct(float(v)) for v in np.asarray(x).ravel()]).reshape(np.shape(x))

    def pdf(self, x):
        if np.isscalar(x):
            return self._pdf_direct(float(x))
        return np.array([self._pdf_direct(float(v)) for v in np.asarray(x).ravel()]).reshape(np.shape(x))

    def quantile(self, u, polish: bool | None = None):
        """Generalized inverse of the CDF.

        For small query batches two Newton steps with the exact density
        polish the table inverse; large batches stay on the tables.
        """
        scalar = np.isscalar(u)
        uv = np.atleast_1d(np.asarray(u, dtype=np.float64))
        if np.any((uv <= 0.0) | (uv >= 1.0)):
            raise ValueError("quantile argument must lie strictly inside (0,1)")
        t = self._build_tables()
        out = np.empty_like(uv)
        far = uv <= self._tail_cdf(_LEFT_SWITCH)
        out[far] = self._tail_quantile(uv[far])
        wing = (~far) & (uv <= t["f_left_end"])
        out[wing] = -np.exp(-t["wing_q"](np.log(uv[wing])))
        hi_lvl = t["f_right_end"] if "right_q" not in t else 1.0 - math.exp(t["right_cdf"](10.0))
        core = (~far) & (~wing) & (uv <= hi_lvl)
        out[core] = t["core_q"](np.clip(uv[core], t["fs"][0], t["fs"][-1]))
        hi = (~far) & (~wing) & (~core)
        if np.any(hi):
            if "right_q" in t:
                lg = -np.log(np.maximum(1.0 - uv[hi], 1.0 - t["f_right_end"]))
                out[hi] = t["right_q"](lg)
            else:
                out[hi] = t["x_hi"]
        if polish is None:
            polish = uv.size <= 512
        if polish:
            sel = (~far) & (out > -_LEFT_SWITCH)
            xs = out[sel]
            target = uv[sel]
            for _ in range(2):
                fx = np.array([self._cdf_direct(float(v)) for v in xs])
                dx = np.array([self._pdf_direct(float(v)) for v in xs])
                step = np.where(dx > 1e-300, (fx - target) / np.maximum(dx, 1e-300), 0.0)
                xs = xs - np.clip(step, -1.0, 1.0)
            out[sel] = xs
        return float(out[0]) if scalar else out.reshape(np.shape(u))

    def integrated_cdf(self, x):
        """H(x) = E(x - X)^+ by direct inversion (bulk) / tail expansion (far left)."""
        scalar = np.isscalar(x)
        xv = np.atleast_1d(np.asarray(x, dtype=np.float64))
        out = np.empty_like(xv)
        for i, v in enumerate(xv):
            if v <= -_LEFT_SWITCH:
                out[i] = self._tail_icdf(-v)
            else:
                out[i] = self._icdf_direct(float(v))
        return float(out[0]) if scalar else out.reshape(np.shape(x))

    def mean(self) -> float:
        return 0.0

    def second_moment(self) -> float:
        return math.inf

    def partial_mean(self, x):
        if np.isscalar(x):
            # int_(-inf,x] t dF = x F(x) - H(x)
            return x * self._cdf_direct(float(x)) - self.integrated_cdf(float(x))
        return np.array([self.partial_mean(float(v)) for v in np.asarray(x).ravel()]).reshape(np.shape(x))

    def partial_second_moment(self, x):
        raise NotImplementedError("the stable limit has an infinite second moment")

    def tail_abs_quantile_integral(self, eps: float) -> float:
        if eps <= 0:
            return 0.0
        a = self.alpha
        ql = self.quantile(eps) if eps > 1e-300 else -math.inf
        left = eps * abs(ql) + (self._tail_icdf(-ql) if ql <= -_LEFT_SWITCH
                                else self.integrated_cdf(ql))
        t = self._build_tables()
        right = eps * t["x_hi"]
        return float(left + right)

    # ------------------------------------------------------------- sampling

    def sample(self, rng: np.random.Generator, size) -> np.ndarray:
        """Chambers-Mallows-Stuck draw matched to this CF (S1, beta = -1)."""
        a = self.alpha
        beta = -1.0
        tan_term = math.tan(math.pi * a / 2.0)
        b0 = math.atan(beta * tan_term) / a
        s0 = (1.0 + beta * beta * tan_term * tan_term) ** (1.0 / (2.0 * a))
        v = rng.uniform(-math.pi / 2.0, math.pi / 2.0, size=size)
        w = rng.standard_exponential(size=size)
        num = np.sin(a * (v + b0))
        den = np.cos(v) ** (1.0 / a)
        rest = (np.cos(v - a * (v + b0)) / w) ** ((1.0 - a) / a)
        return self.s1_scale * s0 * (num / den) * rest


@lru_cache(maxsize=8)
def stable_law(alpha: float) -> StableLaw:
    """Shared per-alpha instance (tables and tail fit are reused)."""
    return StableLaw(alpha)


def stable_cdf(alpha: float, x):
    return stable_law(alpha).cdf(x)


def stable_quantile(alpha: float, u):
    return stable_law(alpha).quantile(u)
