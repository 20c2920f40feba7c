import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sykteleport import analysis, protocol


def tiny_spec(**overrides):
    base = protocol.ProtocolConfig(seed=0)
    spec = analysis.SweepSpec(base=base, g_grid=(0.5,), t_grid=(1.0,),
                              beta_grid=(0.0,), seeds=(0,))
    return replace(spec, **overrides)


def synth_records(values, **common):
    fields = dict(seed=0, beta=0.0, g=0.0, t=0.0, metric="basis_z",
                  variant="delta01")
    fields.update(common)
    out = []
    for key, value in values:
        f = dict(fields)
        f.update(key)
        out.append(analysis.FidelityRecord(value=value, **f))
    return out


class TestRunSweep:
    def test_single_point(self):
        records = analysis.run_sweep(tiny_spec())
        assert len(records) == 1
        rec = records[0]
        assert (rec.seed, rec.beta, rec.g, rec.t) == (0, 0.0, 0.5, 1.0)
        want = protocol.run_single_qubit(
            protocol.ProtocolConfig(seed=0, beta=0.0, g=0.5, t=1.0))
        assert rec.value == want

    def test_grid_cross_product(self):
        spec = tiny_spec(g_grid=(0.0, 1.0, 2.0), beta_grid=(0.0, 5.0), seeds=(0, 1))
        records = analysis.run_sweep(spec)
        assert len(records) == 3 * 2 * 2

    def test_worker_count_invariance(self):
        spec = tiny_spec(g_grid=(0.0, 1.5), seeds=(0, 1, 2))
        serial = analysis.run_sweep(spec, workers=1)
        parallel = analysis.run_sweep(spec, workers=2)
        assert serial == parallel

    def test_validation(self):
        with pytest.raises(analysis.SweepError):
            tiny_spec(g_grid=()).validate()
        with pytest.raises(analysis.SweepError):
            tiny_spec(g_grid=(1.0, 0.5)).validate()
        with pytest.raises(analysis.SweepError):
            tiny_spec(metric="nope").validate()
        with pytest.raises(analysis.SweepError):
            tiny_spec(metric="bell_stabilizer").validate()

    def test_arbitrary_avg_metric(self):
        spec = tiny_spec(metric="arbitrary_avg")
        spec = replace(spec, n_samples=5)
        (rec,) = analysis.run_sweep(spec)
        mean, _ = protocol.run_arbitrary_avg(
            replace(spec.base, message="arbitrary", beta=0.0, g=0.5, t=1.0),
            5, 0)
        assert rec.value == mean


class TestEnsembleMean:
    def test_single_record_convention(self):
        recs = synth_records([({}, 0.7)])
        ((mean, stderr, n),) = analysis.ensemble_mean(recs).values()
        assert (mean, stderr, n) == (0.7, 0.0, 1)

    def test_constant_records(self):
        recs = synth_records([({"seed": s}, 0.4) for s in range(5)])
        ((mean, stderr, n),) = analysis.ensemble_mean(recs).values()
        assert mean == pytest.approx(0.4)
        assert stderr == 0.0
        assert n == 5

    def test_gaussian_recovery(self):
        rng = np.random.default_rng(0)
        truth = 0.3
        vals = truth + 0.05 * rng.normal(size=400)
        recs = synth_records([({"seed": s}, float(v)) for s, v in enumerate(vals)])
        ((mean, stderr, _),) = analysis.ensemble_mean(recs).values()
        assert abs(mean - truth) <= 3.0 * stderr


class TestRecoveryTime:
    def test_unimodal(self):
        recs = synth_records([({"t": t}, -((t - 3.0) ** 2)) for t in range(7)])
        assert analysis.recovery_time(recs) == 3.0

    def test_plateau_tie_break(self):
        recs = synth_records([({"t": float(t)}, v)
                              for t, v in ((0, 0.1), (1, 0.9), (2, 0.9), (3, 0.2))])
        assert analysis.recovery_time(recs) == 1.0

    def test_rejects_mixed_axes(self):
        recs = synth_records([({"t": 0.0}, 0.1), ({"t": 1.0, "seed": 1}, 0.2)])
        with pytest.raises(analysis.SweepError):
            analysis.recovery_time(recs)

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.floats(-1, 1), min_size=2, max_size=12, unique=True),
           st.floats(0.01, 5.0), st.floats(-2.0, 2.0))
    def test_affine_invariance(self, values, scale, shift):
        recs = synth_records([({"t": float(t)}, v) for t, v in enumerate(values)])
        scaled = synth_records([({"t": float(t)}, scale * v + shift)
                                for t, v in enumerate(values)])
        assert analysis.recovery_time(recs) == analysis.recovery_time(scaled)


class TestFitBetaC:
    def test_noiseless_round_trip(self):
        betas = np.array([0.0, 1.0, 5.0, 10.0, 20.0, 50.0, 80.0, 100.0])
        values = 0.2 + 0.6 * np.exp(-betas / 25.0)
        fit = analysis.fit_beta_c(list(zip(betas, values)))
        assert abs(fit.beta_c - 25.0) <= 1e-6
        assert abs(fit.a - 0.2) <= 1e-8
        assert abs(fit.b - 0.6) <= 1e-8
        assert fit.residual <= 1e-9

    def test_noisy_recovery(self):
        rng = np.random.default_rng(1)
        betas = np.array([0.0, 1.0, 5.0, 10.0, 20.0, 35.0, 50.0, 80.0, 100.0])
        values = 0.2 + 0.6 * np.exp(-betas / 25.0) + 0.01 * rng.normal(size=len(betas))
        fit = analysis.fit_beta_c(list(zip(betas, values)))
        assert abs(fit.beta_c - 25.0) <= 0.15 * 25.0

    def test_constant_data_flagged(self):
        with pytest.raises(analysis.FitError):
            analysis.fit_beta_c([(0.0, 0.5), (10.0, 0.5), (20.0, 0.5)])

    def test_too_few_points(self):
        with pytest.raises(analysis.FitError):
            analysis.fit_beta_c([(0.0, 1.0), (10.0, 0.5)])

    def test_objective_trace_monotone(self):
        betas = np.array([0.0, 2.0, 7.0, 15.0, 40.0, 90.0])
        values = 0.1 + 0.5 * np.exp(-betas / 12.0) + 0.02 * np.sin(betas)
        fit = analysis.fit_beta_c(list(zip(betas, values)))
        trace = np.array(fit.trace)
        assert np.all(np.diff(trace) <= 1e-15)


class TestHeatmap:
    def test_synthetic_grid(self):
        recs = []
        for b in (0.0, 1.0):
            for g in (0.0, 2.0):
                recs.extend(synth_records([({"seed": s, "beta": b, "g": g},
                                            b + 10 * g + 0.0 * s)
                                           for s in range(2)]))
        xs, ys, grid = analysis.heatmap(recs, "g", "beta")
        assert list(xs) == [0.0, 2.0]
        assert list(ys) == [0.0, 1.0]
        assert np.allclose(grid, [[0.0, 20.0], [1.0, 21.0]])

    def test_missing_cell(self):
        recs = synth_records([({"beta": 0.0, "g": 0.0}, 0.1),
                              ({"beta": 1.0, "g": 1.0}, 0.2)])
        with pytest.raises(analysis.SweepError):
            analysis.heatmap(recs, "g", "beta")

    def test_heatmap_row_matches_sweep(self):
        spec = tiny_spec(g_grid=(0.0, 1.0, 2.0), beta_grid=(0.0, 5.0))
        records = analysis.run_sweep(spec)
        xs, ys, grid = analysis.heatmap(records, "g", "beta")
        row0 = [r.value for r in records if r.beta == 0.0]
        assert np.allclose(grid[0], row0)


class TestCompareModels:
    def test_grid_mismatch(self):
        a = tiny_spec()
        b = tiny_spec(g_grid=(0.0, 1.0))
        with pytest.raises(analysis.SweepError):
            analysis.compare_models(a, b)

    def test_small_comparison(self):
        gs = tuple(np.linspace(0, 2 * math.pi, 21))
        spec_syk = tiny_spec(g_grid=gs, seeds=(0, 1, 2))
        spec_tfim = replace(spec_syk,
                            base=replace(spec_syk.base, model="tfim", t=1.0),
                            t_grid=(1.0,))
        out = analysis.compare_models(spec_syk, spec_tfim)
        assert out["syk"]["peak_mean"] > out["tfim"]["peak_mean"]
        assert out["difference"] > 0


class TestFixedPointCurve:
    def test_traces_one_setting(self):
        recs = []
        for b, scale in ((0.0, 1.0), (5.0, 0.5)):
            for g in (0.0, 1.0, 2.0):
                recs.extend(synth_records(
                    [({"seed": s, "beta": b, "g": g}, scale * (2.0 - abs(g - 1.0)))
                     for s in range(2)]))
        points, g_star, t_star = analysis.fixed_point_temperature_curve(recs)
        assert g_star == 1.0
        assert points == [(0.0, 2.0), (5.0, 1.0)]
