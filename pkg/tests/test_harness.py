"""Experiment harness: grids, minimizers, the vectorized engine, CSV io."""

import math

import numpy as np
import pytest

import oracles
from sgsplit.core import RngStream, generate_simdata
from sgsplit.objectives import (
    GaussianMeanObjective,
    LogRegObjective,
    Objective,
    logreg_constants,
)
from sgsplit.optimizers import Constant, InverseDecay, OptimizerKind, stepsize_at
from sgsplit import harness
from sgsplit.harness import (
    ConfigError,
    DivergenceError,
    ExperimentConfig,
    SweepResult,
    SweepRow,
    bias_sweep,
    compute_minimizer,
    convexity_constants,
    curvature_scale,
    default_epoch_count,
    default_h_grid,
    fit_order,
    model_problem_table,
    ramp_gaussian_objective,
    read_result_csv,
    run_realization,
    schedule_run,
    simulate_model_sgd,
    stability_ceiling,
    standard_gaussian_objective,
    write_csv,
)

from checks import assert_close


def tiny_logreg(N=17, d=3, seed=5):
    ds = generate_simdata(N, d, RngStream(seed))
    _, lam = logreg_constants(ds)
    return LogRegObjective(ds, lam)


def reference_rmse(config, h):
    """Single-chain loop aggregated by hand; the engine must reproduce it."""
    x_star, _ = config.minimizer()
    err2 = []
    for r in range(config.realizations):
        st = run_realization(config, h, RngStream(config.seed, r))
        err2.append(float(np.sum((st.x - x_star) ** 2)))
    return math.sqrt(np.mean(err2))


class TestConstantsAndGrids:
    def test_curvature_scale_gaussian(self):
        obj = GaussianMeanObjective(np.array([0.0, 1.0, 2.0]), np.array([1.0, 3.0, 0.5]))
        assert curvature_scale(obj) == pytest.approx(3.0 / 0.5, rel=1e-14)

    def test_curvature_scale_logreg(self):
        obj = tiny_logreg()
        assert curvature_scale(obj) == obj.gram_smoothness

    def test_curvature_scale_rejects_unknown(self):
        with pytest.raises(ConfigError):
            curvature_scale(Objective())

    def test_convexity_constants_gaussian_collapse(self):
        # all component curvatures equal the mean for this construction
        obj = ramp_gaussian_objective(12)
        L, mu = convexity_constants(obj)
        assert L == mu == pytest.approx(1.0, rel=1e-14)

    def test_convexity_constants_logreg(self):
        obj = tiny_logreg()
        L, mu = convexity_constants(obj)
        assert mu == obj.lam
        assert L == pytest.approx(obj.gram_smoothness + obj.lam, rel=1e-14)

    def test_convexity_constants_need_regularizer(self):
        ds = generate_simdata(8, 2, RngStream(1))
        with pytest.raises(ConfigError):
            convexity_constants(LogRegObjective(ds, 0.0))

    def test_stability_ceiling_formula(self):
        obj = ramp_gaussian_objective(8)
        assert stability_ceiling(obj, 4) == pytest.approx(1.0 / 8.0, rel=1e-14)
        # large friction tightens the ceiling
        assert stability_ceiling(obj, 4, gamma=10.0) == pytest.approx(
            1.0 / 80.0, rel=1e-14
        )
        assert stability_ceiling(obj, 4, gamma=0.5) == pytest.approx(
            1.0 / 8.0, rel=1e-14
        )

    def test_default_grid_shape(self):
        obj = ramp_gaussian_objective(8)
        grid = default_h_grid(obj, 4)
        h_max = stability_ceiling(obj, 4)
        assert grid.shape == (21,)
        assert grid[-1] == pytest.approx(h_max, rel=1e-14)
        assert grid[0] == pytest.approx(h_max / 256.0, rel=1e-14)
        ratios = grid[1:] / grid[:-1]
        assert np.allclose(ratios, ratios[0], rtol=1e-12)

    def test_default_epoch_count(self):
        assert default_epoch_count(1.0) == 500
        assert default_epoch_count(0.01) == 500
        assert default_epoch_count(0.004) == 1250
        assert default_epoch_count(5.0 / 999.0) == 1000
        for h in (0.3, 0.011, 0.0043, 0.00077):
            n_e = default_epoch_count(h)
            assert n_e % 2 == 0
            assert n_e >= max(5.0 / h, 500.0)


class TestComputeMinimizer:
    def test_gaussian_weighted_mean(self):
        y = np.array([1.0, 4.0, -2.0, 0.5])
        s2 = np.array([0.5, 2.0, 1.0, 4.0])
        obj = GaussianMeanObjective(y, s2)
        x_star, f_star = compute_minimizer(obj)
        expected = np.average(y, weights=1.0 / s2)
        assert_close(x_star[0], expected, 1e-10, "weighted mean")
        assert f_star == pytest.approx(obj.value(np.array([expected])), abs=1e-12)

    def test_logreg_matches_plain_gradient_descent(self, small_logreg):
        x_star, f_star = compute_minimizer(small_logreg)
        L, _ = convexity_constants(small_logreg)
        # independent route: fixed-step descent on the full gradient
        x = np.zeros(small_logreg.d)
        for _ in range(200_000):
            g = small_logreg.full_gradient(x)
            if np.linalg.norm(g) <= 1e-12:
                break
            x -= g / L
        assert np.linalg.norm(x - x_star) <= 1e-8
        assert abs(small_logreg.value(x) - f_star) <= 1e-14

    def test_gradient_norm_at_solution(self, small_logreg):
        x_star, _ = compute_minimizer(small_logreg)
        assert np.linalg.norm(small_logreg.full_gradient(x_star)) <= 1e-10


class TestFitOrder:
    def test_recovers_exact_power_law(self):
        h = np.geomspace(1e-4, 1e-1, 9)
        slope, intercept = fit_order(zip(h, 3.0 * h**2.5))
        assert_close(slope, 2.5, 1e-12, "slope")
        assert_close(intercept, math.log(3.0), 1e-10, "intercept")

    def test_needs_three_points(self):
        with pytest.raises(ValueError):
            fit_order([(0.1, 0.2), (0.2, 0.4)])

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            fit_order([(0.1, 0.0), (0.2, 0.4), (0.3, 0.6)])
        with pytest.raises(ValueError):
            fit_order([(-0.1, 0.2), (0.2, 0.4), (0.3, 0.6)])

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            fit_order([(0.1, float("nan")), (0.2, 0.4), (0.3, 0.6)])


class TestExperimentConfig:
    def make(self, **kw):
        base = dict(
            objective=ramp_gaussian_objective(8),
            optimizer=OptimizerKind("sgd"),
            strategy="rm",
            n=2,
        )
        base.update(kw)
        return ExperimentConfig(**base)

    def test_strategy_normalized(self):
        assert self.make(strategy="SMS").strategy == "sms"

    def test_unknown_strategy(self):
        with pytest.raises(ConfigError):
            self.make(strategy="cyclic")

    def test_batch_size_bounds(self):
        with pytest.raises(ConfigError):
            self.make(n=0)
        with pytest.raises(ConfigError):
            self.make(n=9)
        assert self.make(n=8).R == 1

    def test_realizations_positive(self):
        with pytest.raises(ConfigError):
            self.make(realizations=0)

    def test_grid_validation(self):
        with pytest.raises(ConfigError):
            self.make(h_grid=[0.1, -0.2])
        with pytest.raises(ConfigError):
            self.make(h_grid=[0.1, float("nan")])
        with pytest.raises(ConfigError):
            self.make(h_grid=[])
        cfg = self.make(h_grid=[0.3, 0.1, 0.2])
        assert list(cfg.grid()) == [0.1, 0.2, 0.3]

    def test_epoch_validation(self):
        with pytest.raises(ConfigError):
            self.make(epochs=0)
        with pytest.raises(ConfigError):
            self.make(strategy="sms", epochs=5)
        assert self.make(epochs=6).epoch_count(0.001) == 6
        assert self.make().epoch_count(0.001) == default_epoch_count(0.001)

    def test_x0_shape(self):
        with pytest.raises(ConfigError):
            self.make(x0=np.zeros(3))
        assert self.make(x0=[1.5]).x0.shape == (1,)

    def test_ragged_block_count(self):
        cfg = ExperimentConfig(
            tiny_logreg(), OptimizerKind("hb", 1.0), "rr", n=4
        )
        assert cfg.R == 5
        assert cfg.gamma == 1.0

    def test_default_grid_uses_friction(self):
        cfg = self.make(optimizer=OptimizerKind("hb", 40.0), strategy="rr", n=2)
        # gamma-bound ceiling: 1/(2*4*40)
        assert cfg.grid()[-1] == pytest.approx(1.0 / 320.0, rel=1e-12)


class TestRunRealization:
    def test_bias_mode_needs_stepsize(self):
        cfg = ExperimentConfig(
            ramp_gaussian_objective(8), OptimizerKind("sgd"), "rm", n=2
        )
        with pytest.raises(ConfigError):
            run_realization(cfg, None, RngStream(0))

    def test_deterministic_given_stream(self):
        cfg = ExperimentConfig(
            ramp_gaussian_objective(8),
            OptimizerKind("hb", 1.0),
            "rr",
            n=2,
            epochs=4,
        )
        a = run_realization(cfg, 0.05, RngStream(3, 1))
        b = run_realization(cfg, 0.05, RngStream(3, 1))
        c = run_realization(cfg, 0.05, RngStream(3, 2))
        assert np.array_equal(a.x, b.x) and np.array_equal(a.v, b.v)
        assert not np.array_equal(a.x, c.x)

    def test_step_count(self):
        cfg = ExperimentConfig(
            tiny_logreg(), OptimizerKind("strang", 0.7), "sms", n=4, epochs=4
        )
        st = run_realization(cfg, 0.05, RngStream(0))
        assert st.k == 4 * cfg.R

    def test_divergence_raises_with_context(self):
        cfg = ExperimentConfig(
            ramp_gaussian_objective(8), OptimizerKind("sgd"), "rm", n=2
        )
        with pytest.raises(DivergenceError) as info:
            run_realization(cfg, 3.5, RngStream(0))
        assert info.value.h == 3.5
        assert info.value.iteration >= 1


class TestEngineMatchesReference:
    """The block engine and the single-chain loop share the RNG contract."""

    @pytest.mark.parametrize("kind_name", ["sgd", "hb", "nag", "strang", "euler"])
    @pytest.mark.parametrize("strategy", ["rm", "rr", "sms", "ig", "so"])
    def test_ragged_logreg(self, kind_name, strategy, tiny17):
        gamma = 0.0 if kind_name == "sgd" else 0.8
        kind = OptimizerKind(kind_name, gamma)
        cfg = ExperimentConfig(
            tiny17, kind, strategy, n=4, seed=3, realizations=3, epochs=4
        )
        h = 0.75 * stability_ceiling(tiny17, cfg.R, gamma)
        cfg.h_grid = np.array([h])
        engine = bias_sweep(cfg).rows[0].rmse
        assert_close(engine, reference_rmse(cfg, h), 1e-9, f"{kind_name}/{strategy}")

    @pytest.mark.parametrize(
        "kind_name,strategy",
        [("sgd", "rm"), ("hb", "sms"), ("strang", "so")],
    )
    def test_gaussian_spot_checks(self, kind_name, strategy):
        obj = ramp_gaussian_objective(17)
        gamma = 0.0 if kind_name == "sgd" else 1.3
        cfg = ExperimentConfig(
            obj,
            OptimizerKind(kind_name, gamma),
            strategy,
            n=4,
            seed=9,
            realizations=4,
            epochs=4,
            h_grid=np.array([0.06]),
        )
        engine = bias_sweep(cfg).rows[0].rmse
        assert_close(engine, reference_rmse(cfg, 0.06), 1e-9, f"{kind_name}/{strategy}")

    def test_schedule_mode(self, tiny17):
        sched = InverseDecay(2.0, 0.5, 5)
        cfg = ExperimentConfig(
            tiny17,
            OptimizerKind("hb", 0.9),
            "sms",
            n=4,
            seed=4,
            realizations=2,
            schedule=sched,
            epochs=4,
        )
        res = schedule_run(cfg)
        x_star, _ = cfg.minimizer()
        err2 = []
        for r in range(2):
            st = run_realization(cfg, None, RngStream(4, r))
            err2.append(float(np.sum((st.x - x_star) ** 2)))
        assert_close(res.rows[-1].rmse, math.sqrt(np.mean(err2)), 1e-9, "schedule")


@pytest.fixture(scope="module")
def tiny17():
    return tiny_logreg()


class TestBiasSweep:
    def test_deterministic_and_seed_sensitive(self):
        obj = standard_gaussian_objective(4, 1)
        grid = np.geomspace(0.02, 0.1, 3)

        def run(seed):
            cfg = ExperimentConfig(
                obj,
                OptimizerKind("sgd"),
                "rm",
                n=1,
                seed=seed,
                realizations=25,
                h_grid=grid,
                epochs=120,
            )
            return bias_sweep(cfg)

        a, b, c = run(0), run(0), run(1)
        assert [(r.h, r.rmse, r.stderr) for r in a.rows] == [
            (r.h, r.rmse, r.stderr) for r in b.rows
        ]
        assert any(x.rmse != y.rmse for x, y in zip(a.rows, c.rows))

    def test_rejects_schedule(self):
        cfg = ExperimentConfig(
            standard_gaussian_objective(4, 1),
            OptimizerKind("sgd"),
            "rm",
            n=1,
            schedule=Constant(0.01),
        )
        with pytest.raises(ConfigError):
            bias_sweep(cfg)

    def test_divergent_rows_flagged_not_fatal(self):
        cfg = ExperimentConfig(
            standard_gaussian_objective(4, 1),
            OptimizerKind("sgd"),
            "rm",
            n=1,
            realizations=10,
            h_grid=np.array([0.02, 0.05, 0.1, 5.0]),
            epochs=600,
        )
        res = bias_sweep(cfg)
        flags = [r.diverged for r in res.rows]
        assert flags == [False, False, False, True]
        assert math.isnan(res.rows[-1].rmse)
        assert math.isfinite(res.fitted_slope)

    def test_all_divergent_gives_nan_fit(self):
        cfg = ExperimentConfig(
            standard_gaussian_objective(4, 1),
            OptimizerKind("sgd"),
            "rm",
            n=1,
            realizations=5,
            h_grid=np.array([4.0, 5.0, 6.0]),
            epochs=600,
        )
        res = bias_sweep(cfg)
        assert all(r.diverged for r in res.rows)
        assert math.isnan(res.fitted_slope)

    def test_rmse_grows_with_stepsize_and_sqrt_law(self):
        obj = standard_gaussian_objective(8, 1)
        cfg = ExperimentConfig(
            obj,
            OptimizerKind("sgd"),
            "rm",
            n=1,
            seed=2,
            realizations=150,
            h_grid=np.geomspace(0.004, 0.06, 5),
        )
        res = bias_sweep(cfg)
        rmses = [r.rmse for r in res.rows]
        assert all(a < b for a, b in zip(rmses, rmses[1:]))
        assert 0.35 <= res.fitted_slope <= 0.65

    def test_metadata_fields(self):
        cfg = ExperimentConfig(
            standard_gaussian_objective(4, 1),
            OptimizerKind("hb", 2.0),
            "rr",
            n=1,
            realizations=4,
            h_grid=np.array([0.02, 0.04, 0.06]),
            epochs=20,
        )
        md = bias_sweep(cfg).metadata
        assert md["mode"] == "bias"
        assert md["strategy"] == "rr"
        assert md["R"] == 4
        assert md["optimizer"] == "hb"
        assert "version" in md


class TestScheduleRun:
    def test_needs_schedule(self):
        cfg = ExperimentConfig(
            standard_gaussian_objective(4, 1), OptimizerKind("sgd"), "rm", n=1
        )
        with pytest.raises(ConfigError):
            schedule_run(cfg)

    def test_constant_schedule_equals_bias_trajectory(self):
        obj = ramp_gaussian_objective(8)
        h = 0.02
        bias_cfg = ExperimentConfig(
            obj,
            OptimizerKind("hb", 1.0),
            "rr",
            n=2,
            seed=6,
            realizations=8,
            h_grid=np.array([h]),
            epochs=6,
        )
        x_star, _ = bias_cfg.minimizer()
        sched_cfg = ExperimentConfig(
            obj,
            OptimizerKind("hb", 1.0),
            "rr",
            n=2,
            seed=6,
            realizations=8,
            schedule=Constant(h),
            epochs=6,
            x0=x_star,
        )
        bias_rmse = bias_sweep(bias_cfg).rows[0].rmse
        traj = schedule_run(sched_cfg)
        assert len(traj.rows) == 7
        assert traj.rows[0].rmse == 0.0
        assert_close(traj.rows[-1].rmse, bias_rmse, 1e-12, "trajectory end")

    def test_stepsize_column_tracks_schedule(self):
        obj = ramp_gaussian_objective(6)
        sched = InverseDecay(2.0, 0.5, 3)
        cfg = ExperimentConfig(
            obj,
            OptimizerKind("sgd"),
            "rr",
            n=2,
            realizations=5,
            schedule=sched,
            epochs=25,
        )
        res = schedule_run(cfg)
        for e, row in enumerate(res.rows):
            assert row.epochs == e
            assert row.h == stepsize_at(sched, e * cfg.R)
        warm = [row.h for row in res.rows[:21]]
        assert all(v == 0.5 for v in warm)
        assert res.rows[21].h < 0.5
        assert res.metadata["mode"] == "schedule"

    def test_sms_needs_even_epochs(self):
        with pytest.raises(ConfigError):
            ExperimentConfig(
                ramp_gaussian_objective(6),
                OptimizerKind("sgd"),
                "sms",
                n=2,
                schedule=Constant(0.01),
                epochs=7,
            )


class TestRaggedWeighting:
    def test_dropping_the_short_batch_weight_leaves_a_bias_floor(self):
        obj = ramp_gaussian_objective(17)

        def rmse(mis):
            cfg = ExperimentConfig(
                obj,
                OptimizerKind("hb", 1.0),
                "sms",
                n=4,
                seed=1,
                realizations=60,
                h_grid=np.array([0.01]),
                misweighted=mis,
            )
            res = bias_sweep(cfg)
            return res.rows[0].rmse, res.metadata

        clean, md_clean = rmse(False)
        skewed, md_skewed = rmse(True)
        assert skewed > 5.0 * clean
        assert "misweighted" not in md_clean
        assert md_skewed["misweighted"] is True


class CountingGaussian(GaussianMeanObjective):
    def __init__(self, y, sigma_sq):
        super().__init__(y, sigma_sq)
        self.evals = 0

    def batch_mean_gradient(self, indices, x):
        self.evals += len(indices)
        return super().batch_mean_gradient(indices, x)


class TestCostParity:
    def test_component_evaluations_match_across_strategies(self):
        base = ramp_gaussian_objective(16)
        counts = {}
        for strategy in ("rm", "rr", "sms", "ig", "so"):
            for kind in (OptimizerKind("sgd"), OptimizerKind("nag", 1.0)):
                obj = CountingGaussian(base.y, base.sigma_sq)
                cfg = ExperimentConfig(obj, kind, strategy, n=4, epochs=2)
                run_realization(cfg, 0.02, RngStream(0))
                counts[(strategy, kind.name)] = obj.evals
        assert set(counts.values()) == {2 * 16}


class TestModelProblem:
    def test_closed_forms_within_monte_carlo_error(self):
        rows = model_problem_table(reps=20_000, seed=0, gamma=1.0)
        assert len(rows) == 6
        for row in rows:
            assert row["R"] == (4 if row["strategy"] == "sms" else 8)
            assert row["analytic"] > 0
            assert abs(row["zscore"]) < 4.0, row

    def test_unknown_strategy_rejected(self):
        with pytest.raises(ValueError):
            simulate_model_sgd("ig", 0.02, 8, 10, 0)


class TestFigure1:
    @pytest.mark.parametrize("constant_sigma", [False, True])
    def test_single_stepsize_matches_exact_enumeration(self, constant_sigma):
        h = 0.005
        res = harness.figure1_experiment(
            strategy="sms",
            constant_sigma=constant_sigma,
            realizations=400,
            seed=2,
            h_grid=[h],
        )
        row = res.rows[0]
        sigma_sq = (
            np.ones(5) if constant_sigma else np.array(harness.FIGURE1_SIGMA_SQ)
        )
        obj = GaussianMeanObjective(np.array(harness.FIGURE1_Y), sigma_sq)
        gamma = math.sqrt(curvature_scale(obj))
        exact = oracles.euler_sms_stationary_rmse(
            np.array(harness.FIGURE1_Y), sigma_sq, h, gamma
        )
        assert row.stderr > 0
        assert abs(row.rmse - exact) <= 4.0 * row.stderr


class TestCsvRoundTrip:
    def sample_result(self):
        rows = (
            SweepRow(0.01, 0.123456789012345, 0.001, 500, 0.25),
            SweepRow(0.02, float("nan"), float("nan"), 500, 0.1, True),
        )
        md = {"mode": "bias", "strategy": "rr", "n": 4}
        return SweepResult(rows, 1.5, -2.25, md)

    def test_roundtrip_exact(self, tmp_path):
        path = tmp_path / "sweep.csv"
        write_csv(self.sample_result(), path)
        rows, meta = read_result_csv(path)
        assert meta["mode"] == "bias" and meta["n"] == "4"
        assert rows[0].h == 0.01
        assert rows[0].rmse == 0.123456789012345
        assert rows[0].epochs == 500
        assert not rows[0].diverged
        assert math.isnan(rows[1].rmse)
        assert rows[1].diverged

    def test_header_line_present(self, tmp_path):
        path = tmp_path / "sweep.csv"
        write_csv(self.sample_result(), path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# meta:")
        assert "h,rmse,stderr,epochs,wallclock_s" in lines

    def test_bad_header_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("a,b,c,d,e\n1,2,3,4,5\n")
        with pytest.raises(ValueError):
            read_result_csv(path)

    def test_bad_field_count_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("h,rmse,stderr,epochs,wallclock_s\n1,2,3\n")
        with pytest.raises(ValueError):
            read_result_csv(path)

    def test_non_numeric_rejected(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("h,rmse,stderr,epochs,wallclock_s\n1,2,x,4,5\n")
        with pytest.raises(ValueError):
            read_result_csv(path)

    def test_empty_file_rejected(self, tmp_path):
        path = tmp_path / "empty.csv"
        path.write_text("")
        with pytest.raises(ValueError):
            read_result_csv(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(OSError):
            read_result_csv(tmp_path / "absent.csv")

    def test_unwritable_path(self, tmp_path):
        with pytest.raises(OSError):
            write_csv(self.sample_result(), tmp_path / "no_dir" / "x.csv")
