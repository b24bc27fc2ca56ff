import numpy as np
import pytest

from absorbtime.experiment import (BoundsConfig, ExperimentConfig, McConfig,
                                   rows_to_csv, rows_to_jsonl, run_bounds,
                                   run_convergence, run_mc)


BARRIER = {"model": "barrier_walk", "params": {"zeta": {"uniform": [1, 3]}}}


class TestConfigValidation:
    def test_grid_must_increase(self):
        with pytest.raises(ValueError):
            ExperimentConfig(model="simple_chain", grid=[100, 100])
        with pytest.raises(ValueError):
            ExperimentConfig(model="simple_chain", grid=[])

    def test_mc_needs_seed_and_samples(self):
        with pytest.raises(ValueError):
            ExperimentConfig(model="simple_chain", grid=[10], method="mc")
        with pytest.raises(ValueError):
            ExperimentConfig(model="simple_chain", grid=[10], method="mc",
                             seed=1, mc_samples=10)


class TestExactRun:
    def test_barrier_clause_a_converges(self):
        cfg = ExperimentConfig(**BARRIER, grid=[100, 250, 500], clause="A")
        res = run_convergence(cfg)
        s = res.summary
        assert s.p == 2
        assert s.strictly_decreasing and s.converged
        for row in res.rows:
            assert row.d_value >= 0
            assert np.isfinite(row.d_error_bound)
            assert row.coupling_gap == 0.0
            assert row.d_tn_nn is not None and row.d_tn_nn >= 0

    def test_negative_control_flag(self):
        cfg = ExperimentConfig(model="simple_chain", grid=[50, 200, 800])
        res = run_convergence(cfg)
        assert res.summary.non_convergence_flag
        assert not res.summary.converged
        assert any("negative control" in n for n in res.summary.notes)

    def test_renewal_only_mode(self):
        cfg = ExperimentConfig(model="renewal_walk",
                               params={"xi": {"uniform": [1, 3]}},
                               grid=[100, 400], clause="A")
        res = run_convergence(cfg)
        assert res.summary.strictly_decreasing
        assert all(r.d_tn_nn == 0.0 for r in res.rows)

    def test_skip_renewal_distance(self):
        cfg = ExperimentConfig(**BARRIER, grid=[50, 100], clause="A",
                               with_renewal_distance=False)
        res = run_convergence(cfg)
        assert all(r.d_tn_nn is None for r in res.rows)

    def test_workers_match_serial(self):
        cfg1 = ExperimentConfig(**BARRIER, grid=[50, 120, 260], clause="A", workers=1)
        cfg3 = ExperimentConfig(**BARRIER, grid=[50, 120, 260], clause="A", workers=3)
        r1, r3 = run_convergence(cfg1), run_convergence(cfg3)
        for a, b in zip(r1.rows, r3.rows):
            assert a.d_value == b.d_value


class TestMcRun:
    def test_deterministic_csv_bytes(self):
        cfg = ExperimentConfig(**BARRIER, grid=[60, 150], clause="A",
                               method="mc", mc_samples=4000, seed=99)
        a = rows_to_csv(run_convergence(cfg).rows)
        b = rows_to_csv(run_convergence(cfg).rows)
        assert a == b
        assert "runtime" in a.splitlines()[0]
        assert a.splitlines()[1].endswith(",")   # runtime column empty by default

    def test_seed_changes_values(self):
        base = dict(**BARRIER, grid=[60], clause="A", method="mc", mc_samples=4000)
        a = run_convergence(ExperimentConfig(**base, seed=1)).rows[0].d_value
        b = run_convergence(ExperimentConfig(**base, seed=2)).rows[0].d_value
        assert a != b

    def test_cross_method_consistency(self):
        n = 1000
        exact = run_convergence(ExperimentConfig(
            **BARRIER, grid=[n], clause="A", with_renewal_distance=False))
        mc = run_convergence(ExperimentConfig(
            **BARRIER, grid=[n], clause="A", method="mc",
            mc_samples=100_000, seed=7, with_renewal_distance=False))
        gap = abs(exact.rows[0].d_value - mc.rows[0].d_value)
        assert gap <= 3 * mc.rows[0].d_error_bound + exact.rows[0].d_error_bound

    def test_jsonl_shape(self):
        cfg = ExperimentConfig(**BARRIER, grid=[60], clause="A",
                               method="mc", mc_samples=2000, seed=5)
        res = run_convergence(cfg)
        text = rows_to_jsonl(res)
        assert len(text.strip().splitlines()) == 2


class TestCaching:
    def test_cache_hit_identical_rows(self, tmp_path):
        cfg = ExperimentConfig(**BARRIER, grid=[80, 160], clause="A",
                               use_cache=True, cache_dir=str(tmp_path))
        first = rows_to_csv(run_convergence(cfg).rows)
        assert len(list(tmp_path.glob("law_*.npz"))) > 0
        second = rows_to_csv(run_convergence(cfg).rows)
        assert first == second


class TestBoundsRun:
    def test_model_kind(self):
        rep = run_bounds(BoundsConfig(kind="model", **BARRIER, n_max=150))
        assert rep.c1_value > 0
        assert rep.bounded

    def test_explicit_kind_delta_zero(self):
        rep = run_bounds(BoundsConfig(kind="explicit", r=[1.0] * 200,
                                      pmf="delta_zero", psi="1", n_max=200))
        assert rep.bounded

    def test_explicit_kind_failing(self):
        rep = run_bounds(BoundsConfig(kind="explicit", r=[1.0] * 200,
                                      pmf="delta_prev", psi="1", n_max=200))
        assert rep.c1_value == 0.0
        assert not rep.bounded


class TestMc:
    def test_absorption_summary(self):
        out = run_mc(McConfig(target="absorption", model="simple_chain",
                              n=100, samples=2000, seed=3))
        assert out.count == 2000
        assert 0 < out.mean < 100

    def test_mult_count_coupled(self):
        out = run_mc(McConfig(target="mult_count", model="bernoulli_sieve",
                              params={"w": {"beta": [1.0, 1.0]}},
                              t=float(np.exp(6.0)), samples=5000, seed=4,
                              coupled=True))
        assert out.coupled_violations == 0
        assert out.stationary_mean == pytest.approx(6.0, abs=0.2)

    def test_shape_validation(self):
        with pytest.raises(ValueError):
            McConfig(target="absorption", model="simple_chain", samples=100, seed=1)
