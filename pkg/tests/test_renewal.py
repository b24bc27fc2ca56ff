import math

import numpy as np
import pytest

from absorbtime.models import MultLimits, make_model
from absorbtime.renewal import (StationaryDelay, additive_count_law,
                                mult_count_sample, mult_count_samples,
                                stationary_delay_quantile, walk_crossing_counts)


def pmf_sup_diff(a, b):
    atoms = np.union1d(a.atoms, b.atoms)
    pa = np.zeros(len(atoms))
    pb = np.zeros(len(atoms))
    pa[np.searchsorted(atoms, a.atoms)] = a.masses
    pb[np.searchsorted(atoms, b.atoms)] = b.masses
    return float(np.max(np.abs(pa - pb)))


UNIF_ETA = make_model("bernoulli_sieve", {"w": {"beta": [1.0, 1.0]}}).limits
POINT_ETA = MultLimits(mu0=1.0, sigma02=0.0,
                       eta_sampler=lambda rng, size: np.full(size, math.exp(-1.0)),
                       log_eta_point=-1.0, nonarithmetic=False)


class TestAdditiveCount:
    def test_unit_steps(self):
        law = additive_count_law({"pmf": {1: 1.0}}, 9)
        assert law.atoms.tolist() == [9.0] and law.masses.tolist() == [1.0]

    def test_two_step_enumeration(self):
        law = additive_count_law({"uniform": [1, 2]}, 2)
        assert dict(zip(law.atoms, law.masses)) == {
            1.0: pytest.approx(0.5), 2.0: pytest.approx(0.5)}

    @pytest.mark.parametrize("n", [10, 100, 1000])
    def test_dp_and_forward_routes_agree(self, n):
        a = additive_count_law({"uniform": [1, 3]}, n, route="dp")
        b = additive_count_law({"uniform": [1, 3]}, n, route="forward")
        assert pmf_sup_diff(a, b) <= 1e-11

    def test_elementary_renewal_trend(self):
        mu = 2.0
        errs = []
        for n in (100, 1000, 10000):
            law = additive_count_law({"uniform": [1, 3]}, n)
            errs.append(abs(law.mean() * mu / n - 1.0))
        assert errs[0] <= 0.02
        assert errs[1] <= 0.002
        assert errs[2] <= 0.0002

    def test_mean_drift_bounded_finite_variance(self):
        # E N_n - n/mu stays within a bound fitted on the first decade
        from absorbtime import absorb
        model = make_model("renewal_walk", {"xi": {"uniform": [1, 3]}})
        table = absorb.build_table(model, 10_000)
        drift = table.means[1:] - np.arange(1, 10_001) / 2.0
        fitted = np.max(np.abs(drift[:1000])) + 0.05
        assert np.max(np.abs(drift)) <= fitted

    def test_crossing_counts_match_exact_law(self, rng):
        from absorbtime.models import ZetaSpec
        sims = walk_crossing_counts(ZetaSpec({"uniform": [1, 3]}), 50, 100_000, rng)
        law = additive_count_law({"uniform": [1, 3]}, 50)
        top = int(law.max_atom)
        emp = np.bincount(sims, minlength=top + 1) / len(sims)
        exact = np.zeros(top + 1)
        for a, m in zip(law.atoms, law.masses):
            exact[int(a)] = m
        assert np.max(np.abs(np.cumsum(emp) - np.cumsum(exact))) < 0.01


class TestStationaryDelay:
    def test_uniform_eta_closed_form(self):
        sd = StationaryDelay(UNIF_ETA)
        assert sd.r(1.0) == pytest.approx(1 - math.exp(-1), abs=1e-8)
        assert sd.quantile(0.5) == pytest.approx(math.log(2), abs=1e-10)
        assert stationary_delay_quantile(0.5, UNIF_ETA) == pytest.approx(math.log(2), abs=1e-10)

    def test_point_eta_uniform_delay(self):
        sd = StationaryDelay(POINT_ETA)
        # r(t) = min(t, 1)
        assert sd.r(0.3) == pytest.approx(0.3, abs=1e-9)
        assert sd.quantile(0.5) == pytest.approx(0.5, abs=1e-9)

    def test_quantile_monotone(self):
        sd = StationaryDelay(UNIF_ETA)
        us = np.linspace(0.02, 0.98, 33)
        qs = np.asarray(sd.quantile(us))
        assert np.all(np.diff(qs) > 0)

    def test_domain(self):
        sd = StationaryDelay(UNIF_ETA)
        with pytest.raises(ValueError):
            sd.quantile(1.0)


class TestMultCount:
    def test_zero_below_one(self):
        assert mult_count_sample(UNIF_ETA, 0.5, False, 0) == 0

    def test_point_eta_deterministic(self):
        # eta = e^-1: L_t = floor(log t) + 1 off the lattice
        for s, expect in ((2.5, 3), (0.2, 1), (4.9, 5)):
            out = mult_count_samples(POINT_ETA, math.exp(s), 6, 1)
            assert out.tolist() == [expect] * 6

    def test_stationary_mean_identity(self):
        # E Lambda*_s = s / mu0 with mu0 = 1
        for s in (5.0, 12.0):
            out = mult_count_samples(UNIF_ETA, math.exp(s), 60_000, 9, stationary=True)
            se = out.std() / math.sqrt(len(out))
            assert abs(out.mean() - s) <= 3 * se

    def test_coupled_domination_exact(self):
        main, star = mult_count_samples(UNIF_ETA, math.exp(8.0), 50_000, 3, coupled=True)
        assert int(np.sum(star > main)) == 0

    def test_subadditivity_in_distribution(self):
        # law of Lambda_{u+v} - Lambda_u stochastically below law of Lambda_v
        u, v, m = 2.0, 3.0, 120_000
        rng = np.random.default_rng(np.random.SeedSequence(21))
        count_uv = np.zeros(m, dtype=np.int64)
        count_u = np.zeros(m, dtype=np.int64)
        sums = np.zeros(m)
        alive = np.ones(m, dtype=bool)
        while np.any(alive):          # one shared walk per replicate, both levels
            count_uv[alive] += sums[alive] <= u + v
            count_u[alive] += sums[alive] <= u
            eta = UNIF_ETA.eta_sampler(rng, int(alive.sum()))
            sums[alive] += -np.log(eta)
            alive[alive] = sums[alive] <= u + v
        inc = count_uv - count_u
        solo = mult_count_samples(UNIF_ETA, math.exp(v), m, 22)
        for x in range(0, 12):
            p_inc = float(np.mean(inc > x))
            p_solo = float(np.mean(solo > x))
            band = 3 * math.sqrt(p_solo * (1 - p_solo) / m + p_inc * (1 - p_inc) / m)
            assert p_inc <= p_solo + band
