import math

import numpy as np
import pytest
from scipy import integrate
from scipy.stats import beta as beta_dist

from absorbtime.dist import LatticeDist
from absorbtime.models import (BarrierWalk, BarrierZeroJumps, BernoulliSieve,
                               BetaCoalescent, SimpleChain, ZetaSpec,
                               beta_coalescent_limit, coupling_gap, make_model,
                               registry_info)

ALL_MODELS = [
    ("simple_chain", {}),
    ("beta_coalescent", {"a": 0.5, "b": 1.0}),
    ("beta_coalescent", {"a": 1.0, "b": 1.0}),
    ("bernoulli_sieve", {"w": {"beta": [1.0, 1.0]}}),
    ("bernoulli_sieve", {"w": {"beta": [2.0, 3.0]}}),
    ("bernoulli_sieve", {"w": {"point": 0.5}}),
    ("barrier_walk", {"zeta": {"uniform": [1, 3]}}),
    ("barrier_walk", {"zeta": {"pareto": {"alpha": 1.5}}}),
    ("barrier_zero_jumps", {"alpha": 0.5}),
    ("renewal_walk", {"xi": {"uniform": [1, 3]}}),
    ("renewal_walk", {"xi": {"pareto": {"alpha": 1.5}}}),
]


class TestDecrementInvariant:
    @pytest.mark.parametrize("name,params", ALL_MODELS)
    def test_pmf_normalized_and_supported(self, name, params, rng):
        model = make_model(name, params)
        ns = sorted({1, 2, 3, 7, 64, 333, 1000} | set(rng.integers(1, 1000, 12).tolist()))
        for n in ns:
            d = model.decrement_pmf(int(n))
            assert math.fsum(d.masses.tolist()) == pytest.approx(1.0, abs=1e-12)
            assert d.min_atom >= 1.0
            assert d.max_atom <= n
            assert np.all(np.abs(d.atoms - np.rint(d.atoms)) < 1e-12)


class TestSimpleChain:
    def test_pmf_values(self):
        m = SimpleChain()
        d = m.decrement_pmf(5)
        assert dict(zip(d.atoms, d.masses)) == {1.0: 0.8, 5.0: pytest.approx(0.2)}
        assert m.decrement_pmf(1).atoms.tolist() == [1.0]
        d2 = m.decrement_pmf(2)
        assert np.allclose(d2.masses, [0.5, 0.5])

    def test_negative_control_flag(self):
        assert SimpleChain().negative_control
        info = {m["name"]: m for m in registry_info()}
        assert info["simple_chain"].get("negative_control")

    def test_gap_grows_to_one(self):
        m = SimpleChain()
        gaps = [coupling_gap(m, n, 1) for n in (10, 100, 1000)]
        assert gaps == pytest.approx([(n - 1) / n for n in (10, 100, 1000)], abs=1e-12)


class TestBetaCoalescent:
    def test_rates_unit_measure(self):
        # Lambda = Unif(0,1): lambda_{2,2} = 1, lambda_{3,2} = 1/2
        assert integrate.quad(lambda x: 1.0, 0, 1)[0] == pytest.approx(1.0)
        assert integrate.quad(lambda x: 1 - x, 0, 1)[0] == pytest.approx(0.5)
        m = BetaCoalescent({"a": 1.0, "b": 1.0})
        w = m.merge_weights(3)
        assert np.allclose(w, [0.75, 0.25], atol=1e-14)

    @pytest.mark.parametrize("a,b", [(1.0, 1.0), (0.5, 1.0), (0.3, 2.5)])
    @pytest.mark.parametrize("m_blocks", [2, 3, 10, 50])
    def test_merge_weights_against_quadrature(self, a, b, m_blocks):
        model = BetaCoalescent({"a": a, "b": b})
        dens = lambda x: beta_dist.pdf(x, a, b)
        lam = []
        for k in range(2, m_blocks + 1):
            comb = math.comb(m_blocks, k)
            v, _ = integrate.quad(
                lambda x: comb * x ** (k - 2) * (1 - x) ** (m_blocks - k) * dens(x),
                0, 1, limit=200, epsabs=1e-13, epsrel=1e-12)
            lam.append(v)
        lam = np.array(lam)
        assert np.max(np.abs(model.merge_weights(m_blocks) - lam / lam.sum())) < 1e-10

    def test_limit_pmf_values(self):
        lim = beta_coalescent_limit(1.0, mass_tol=1e-8)
        # (2-a)Gamma(k+a-1)/(Gamma(a)(k+1)!) = 1/(k(k+1)) at a=1
        assert lim.masses[0] == pytest.approx(0.5, abs=1e-14)
        assert lim.masses[2] == pytest.approx(1.0 / 12.0, abs=1e-14)

    def test_limit_tabulation_mass(self):
        lim = beta_coalescent_limit(0.5, mass_tol=1e-10)
        assert math.fsum(lim.masses.tolist()) + lim.pruned_mass == pytest.approx(1.0, abs=1e-12)
        assert lim.pruned_mass <= 1e-10

    def test_limit_mean_closed_form_vs_sum(self):
        m = BetaCoalescent({"a": 0.5, "b": 1.0})
        assert m.limits.mu == pytest.approx(2.0)
        surv = m.limit_step_survival(np.arange(1, 3_000_001))
        partial = math.fsum(surv.tolist())
        # tail sum ~ integral of k^(a-2)/Gamma(a)
        k0 = 3_000_000
        tail = k0 ** -0.5 / (0.5 * math.gamma(0.5))
        assert partial + tail == pytest.approx(2.0, abs=1e-5)

    def test_survival_telescopes_pmf(self):
        m = BetaCoalescent({"a": 0.5, "b": 1.0})
        k = np.arange(1, 50)
        pmf = (1.5 * np.exp(
            np.vectorize(math.lgamma)(k + 0.5 - 1.0)
            - math.lgamma(0.5) - np.vectorize(math.lgamma)(k + 2.0)))
        surv = m.limit_step_survival(k)
        assert np.max(np.abs((surv[:-1] - surv[1:]) - pmf[:-1])) < 1e-14

    def test_domain(self):
        with pytest.raises(ValueError):
            BetaCoalescent({"a": 1.5, "b": 1.0})
        with pytest.raises(ValueError):
            BetaCoalescent({"a": 0.5, "b": 0.0})


class TestBernoulliSieve:
    def test_uniform_w_gives_uniform_decrement(self):
        m = BernoulliSieve({"w": {"beta": [1.0, 1.0]}})
        for n in (1, 2, 3, 17, 128, 1000):
            d = m.decrement_pmf(n)
            assert len(d.atoms) == n
            assert np.max(np.abs(d.masses - 1.0 / n)) <= 1e-12

    def test_uniform_w_moments(self):
        m = BernoulliSieve({"w": {"beta": [1.0, 1.0]}})
        assert m.limits.mu0 == pytest.approx(1.0, abs=1e-12)
        assert m.limits.sigma02 == pytest.approx(1.0, abs=1e-12)

    def test_point_half_single_ball(self):
        m = BernoulliSieve({"w": {"point": 0.5}})
        d = m.decrement_pmf(1)
        assert d.atoms.tolist() == [1.0] and d.masses.tolist() == [1.0]
        assert not m.limits.nonarithmetic

    def test_ball_law_against_direct_binomial(self):
        # point W: P(J = k) = C(n,k)(1-w)^k w^(n-k)/(1 - w^n)
        w, n = 0.3, 9
        m = BernoulliSieve({"w": {"point": w}})
        d = m.decrement_pmf(n)
        direct = np.array([math.comb(n, k) * (1 - w) ** k * w ** (n - k)
                           for k in range(1, n + 1)]) / (1 - w ** n)
        assert np.max(np.abs(d.masses - direct)) < 1e-14

    def test_beta_ball_law_against_quadrature(self):
        a, b, n = 2.0, 3.0, 7
        m = BernoulliSieve({"w": {"beta": [a, b]}})
        d = m.decrement_pmf(n)
        vals = []
        for k in range(1, n + 1):
            v, _ = integrate.quad(lambda w: (1 - w) ** k * w ** (n - k) * beta_dist.pdf(w, a, b), 0, 1)
            vals.append(math.comb(n, k) * v)
        vals = np.array(vals)
        assert np.max(np.abs(d.masses - vals / vals.sum())) < 1e-10


class TestBarrierWalk:
    def test_conditioning_example(self):
        m = BarrierWalk({"zeta": {"pmf": {1: 0.5, 2: 0.3, 7: 0.2}}})
        d = m.decrement_pmf(4)      # paper state 5 <-> canonical 4: zeta | zeta < 5
        assert dict(zip(d.atoms, d.masses)) == {
            1.0: pytest.approx(0.625), 2.0: pytest.approx(0.375)}

    def test_unit_steps(self):
        m = BarrierWalk({"zeta": {"pmf": {1: 1.0}}})
        for n in (1, 5, 40):
            d = m.decrement_pmf(n)
            assert d.atoms.tolist() == [1.0]

    def test_uniform_moments(self):
        m = BarrierWalk({"zeta": {"uniform": [1, 3]}})
        assert m.limits.mu == pytest.approx(2.0)
        assert m.limits.sigma2 == pytest.approx(2.0 / 3.0)

    def test_requires_mass_at_one(self):
        with pytest.raises(ValueError):
            BarrierWalk({"zeta": {"pmf": {2: 1.0}}})

    def test_gap_zero_beyond_support(self):
        m = BarrierWalk({"zeta": {"uniform": [1, 3]}})
        for n in (4, 10, 250):
            for p in (1, 2):
                assert coupling_gap(m, n, p) == 0.0


class TestBarrierZeroJumps:
    def test_undershoot_unit_steps(self):
        m = BarrierZeroJumps({"alpha": 0.5, "zeta": {"pmf": {1: 1.0}}})
        for g in (1, 5, 12):
            law = m.undershoot_law(g)
            assert law.atoms.tolist() == [1.0]

    def test_undershoot_against_path_enumeration(self):
        zeta = {1: 0.5, 2: 0.5}
        m = BarrierZeroJumps({"alpha": 0.5, "zeta": {"pmf": zeta}})

        def enumerate_undershoot(level):
            out = {}

            def walk(pos, prob):
                for step, ps in zeta.items():
                    nxt = pos + step
                    if nxt >= level:
                        y = level - pos
                        out[y] = out.get(y, 0.0) + prob * ps
                    else:
                        walk(nxt, prob * ps)

            walk(0, 1.0)
            return out

        for g in (2, 3, 6):
            ref = enumerate_undershoot(g)
            law = m.undershoot_law(g)
            for a, mass in zip(law.atoms, law.masses):
                assert mass == pytest.approx(ref[int(a)], abs=1e-12)
        assert enumerate_undershoot(2) == {1: pytest.approx(0.5), 2: pytest.approx(0.5)}

    def test_renewal_mass_vs_convolution_powers(self):
        from absorbtime.dist import LatticeDist, convolve
        m = BarrierZeroJumps({"alpha": 0.5})
        u = m._renewal_mass(30)
        zeta = m.zeta.truncated(40)
        walk = LatticeDist.delta(0.0)
        u_ref = np.zeros(31)
        u_ref[0] = 1.0
        for _ in range(30):
            walk = convolve(walk, zeta)
            for a, mass in zip(walk.atoms, walk.masses):
                if a <= 30:
                    u_ref[int(a)] += mass
        assert np.max(np.abs(u[:31] - u_ref)) < 1e-12

    def test_eta_limit_beta_mean(self):
        alpha = 0.35
        m = BarrierZeroJumps({"alpha": alpha})
        ref, _ = integrate.quad(lambda x: x * beta_dist.pdf(x, 1 - alpha, alpha), 0, 1)
        assert ref == pytest.approx(1 - alpha, abs=1e-9)
        mu0_quad, _ = integrate.quad(
            lambda x: -math.log(x) * beta_dist.pdf(x, 1 - alpha, alpha), 0, 1)
        assert m.limits.mu0 == pytest.approx(mu0_quad, abs=1e-8)

    def test_alpha_domain(self):
        for bad in (0.0, 1.0, 1.5):
            with pytest.raises(ValueError):
                BarrierZeroJumps({"alpha": bad})


class TestCouplingGapMult:
    def test_sieve_gap_against_quadrature(self):
        m = BernoulliSieve({"w": {"beta": [1.0, 1.0]}})
        n = 3
        # f: atoms log(1 - k/n) for k=1,2 and -log n for k=n, each mass 1/3
        atoms = sorted([math.log(1 - 1 / 3), math.log(1 - 2 / 3), -math.log(3)])
        f = LatticeDist.from_pairs({a: 1 / 3 for a in atoms})

        def f_cdf(x):
            return sum(mass for a, mass in zip(f.atoms, f.masses) if a <= x)

        ref, _ = integrate.quad(lambda x: abs(f_cdf(x) - math.exp(x)), -30, 0,
                                points=atoms, limit=300)
        assert coupling_gap(m, n, 1) == pytest.approx(ref, abs=1e-8)

    def test_mult_mean_trend(self):
        # E[-log(1 - I_n/n)] -> mu0 (atom at I_n = n mapped to -log n)
        m = BernoulliSieve({"w": {"beta": [1.0, 1.0]}})
        errs = []
        for n in (100, 1000, 10000):
            d = m.decrement_pmf(n)
            with np.errstate(divide="ignore"):
                vals = np.where(d.atoms >= n, -math.log(n),
                                np.log1p(-np.minimum(d.atoms, n - 1) / n))
            errs.append(abs(-float(np.dot(d.masses, vals)) - m.limits.mu0))
        assert errs[2] < errs[0]
        assert errs[2] < 0.05

    def test_point_w_gap_via_delta(self):
        m = BernoulliSieve({"w": {"point": 0.5}})
        g = coupling_gap(m, 50, 1)
        assert g >= 0


class TestZetaSpec:
    def test_pareto_survival_and_mean(self):
        z = ZetaSpec({"pareto": {"alpha": 1.5}})
        assert z.survival(np.array([1, 2, 10])).tolist() == [1.0, 2 ** -1.5, 10 ** -1.5]
        from scipy.special import zeta as zf
        assert z.mean() == pytest.approx(float(zf(1.5, 1)))
        assert z.var() == math.inf

    def test_sampler_matches_pmf(self, rng):
        z = ZetaSpec({"pareto": {"alpha": 1.5}})
        s = z.sample(rng, 200_000)
        emp = np.mean(s >= 3)
        assert emp == pytest.approx(3 ** -1.5, abs=0.005)
        capped = z.sample(rng, 50_000, at_most=4)
        assert capped.max() <= 4

    def test_arithmetic_span(self):
        assert ZetaSpec({"pmf": {2: 0.5, 4: 0.5}}).arithmetic_span() == 2
        assert ZetaSpec({"uniform": [1, 3]}).arithmetic_span() == 1
