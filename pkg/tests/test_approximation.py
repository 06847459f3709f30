import math

import numpy as np
import pytest

from contractlab import (
    DomainExitError,
    NoiseModel,
    NonexpansiveProfile,
    RootProblem,
    Schedule,
    center_path,
    check_linear_envelope,
    check_norm_envelope,
    check_ratio_sandwich,
    check_regularity,
    check_truncated_contractive,
    check_truncated_zero_mean_bound,
    contraction_factor,
    derive_truncated,
    rm_solve,
    rm_solve_nd,
    truncated_nonexpansive_verdict,
)
from contractlab.approximation import signed_log_grid, sphere_grid
from contractlab.process import ProcessPath


def sqrt_sign(x):
    return math.copysign(math.sqrt(abs(x)), x)


class TestSchedule:
    def test_inverse_n(self):
        s = Schedule.inverse_n(2.0)
        assert s.alphas(4).tolist() == [2.0, 1.0, 2 / 3, 0.5]
        assert s.summable is False

    def test_power_summability(self):
        assert Schedule.inverse_n_power(1.0, 1.5).summable is True
        assert Schedule.inverse_n_power(1.0, 0.7).summable is False

    def test_explicit(self):
        s = Schedule.explicit([0.5, 0.25])
        assert s.summable is None
        with pytest.raises(ValueError, match="covers"):
            s.alphas(3)
        with pytest.raises(ValueError):
            Schedule.explicit([0.1, -0.2])

    def test_sums(self):
        s = Schedule.inverse_n(1.0)
        assert s.sum_at(4) == pytest.approx(1 + 0.5 + 1 / 3 + 0.25)
        assert s.sum_sq_at(2) == pytest.approx(1.25)


class TestNoiseModel:
    def test_gaussian_is_conditionally_unbiased(self):
        noise = NoiseModel.gaussian(0.3)
        rng = np.random.default_rng(0)
        draws = noise.draw(rng, (20_000,))
        assert abs(draws.mean()) <= 5 * 0.3 / math.sqrt(20_000)
        assert draws.var() <= noise.cond_var_bound * 1.1

    def test_uniform_variance_bound(self):
        noise = NoiseModel.uniform(0.6)
        rng = np.random.default_rng(1)
        draws = noise.draw(rng, (20_000,))
        assert draws.var() <= noise.cond_var_bound * 1.1
        assert np.all(np.abs(draws) <= 0.6)

    def test_noiseless(self):
        rng = np.random.default_rng(2)
        assert np.all(NoiseModel.noiseless().draw(rng, (5,)) == 0)


class TestRootProblem:
    def test_root_must_be_root(self):
        with pytest.raises(ValueError, match="not a root"):
            RootProblem(lambda x: x + 1.0, x_star=0.0)

    def test_default_root_is_origin(self):
        assert RootProblem(lambda x: x).root == 0.0
        assert np.array_equal(RootProblem(lambda x: x, dimension=3).root, np.zeros(3))


class TestRmSolve:
    def test_noiseless_telescoping(self):
        horizon = 1000
        schedule = Schedule.explicit(1.0 / np.arange(2.0, horizon + 2.0))
        path = rm_solve(
            RootProblem(lambda x: x), NoiseModel.noiseless(), schedule, 1.0, horizon, 0
        )
        n = np.arange(1, horizon + 1)
        assert np.max(np.abs(path.xs[1:] * (n + 1) - 1.0)) <= 1e-12
        assert np.all(path.eps == 0.0)

    def test_noiseless_matches_running_product(self):
        horizon = 500
        lam = 0.7
        schedule = Schedule.inverse_n(1.0)
        path = rm_solve(
            RootProblem(lambda x: lam * x), NoiseModel.noiseless(), schedule, 2.0, horizon, 0
        )
        prod = 2.0 * np.cumprod(1.0 - lam * schedule.alphas(horizon))
        scale = np.maximum(np.abs(prod), 1e-300)
        assert np.max(np.abs(path.xs[1:] - prod) / scale) <= 1e-12

    def test_gaussian_ensemble_converges(self):
        hits = 0
        for seed in range(20):
            path = rm_solve(
                RootProblem(lambda x: x),
                NoiseModel.gaussian(0.1),
                Schedule.inverse_n(1.0),
                1.0,
                20_000,
                seed,
            )
            hits += abs(path.xs[-1]) < 0.05
        assert hits >= 19

    def test_stored_means_are_exact(self):
        # the update applies drift then shock, so m is the exact conditional mean
        path = rm_solve(
            RootProblem(lambda x: 2.0 * x),
            NoiseModel.gaussian(0.5),
            Schedule.inverse_n(0.3),
            1.5,
            200,
            42,
        )
        ratios = path.ms / path.xs[:-1]
        expected = 1.0 - 0.6 / np.arange(1, 201)
        assert np.allclose(ratios, expected, rtol=0, atol=1e-13)

    def test_envelope_ratio_bound(self):
        # envelope (1, 2): every ratio lies in [1 - 2a, 1 - a]
        g = lambda x: x * (1.5 + 0.5 * math.sin(7.0 * x))
        path = rm_solve(
            RootProblem(g), NoiseModel.gaussian(0.05), Schedule.inverse_n(0.4), 3.0, 5000, 7
        )
        verdict = check_ratio_sandwich(path, Schedule.inverse_n(0.4), 1.0, 2.0)
        assert verdict.holds

    def test_sandwich_with_shifted_root(self):
        # centering the ratio at a nonzero root amplifies rounding once the
        # path sits near it, so declare a nondegenerate envelope
        problem = RootProblem(lambda x: x - 2.0, x_star=2.0)
        path = rm_solve(problem, NoiseModel.gaussian(0.1), Schedule.inverse_n(1.0), 5.0, 2000, 3)
        verdict = check_ratio_sandwich(path, Schedule.inverse_n(1.0), 0.9, 1.1, x_star=2.0)
        assert verdict.holds

    def test_sandwich_catches_violation(self):
        # declaring too narrow an envelope must fail
        g = lambda x: 2.0 * x
        path = rm_solve(RootProblem(g), NoiseModel.noiseless(), Schedule.inverse_n(0.4), 1.0, 50, 0)
        verdict = check_ratio_sandwich(path, Schedule.inverse_n(0.4), 1.0, 1.0)
        assert not verdict.holds

    def test_seed_determinism(self):
        kwargs = dict(
            problem=RootProblem(lambda x: x),
            noise=NoiseModel.gaussian(0.2),
            schedule=Schedule.inverse_n(1.0),
            x0=1.0,
            horizon=500,
            seed=123,
        )
        a = rm_solve(**kwargs)
        b = rm_solve(**kwargs)
        assert np.array_equal(a.xs, b.xs) and np.array_equal(a.ms, b.ms)

    def test_reject_policy_raises_with_step(self):
        with pytest.raises(DomainExitError) as err:
            rm_solve(
                RootProblem(lambda x: -x, domain=(-2.0, 2.0)),
                NoiseModel.noiseless(),
                Schedule.explicit([1.5] * 10),
                1.0,
                10,
                0,
                domain_policy="reject",
            )
        assert err.value.step >= 1

    def test_project_policy_clips(self):
        path = rm_solve(
            RootProblem(lambda x: -x, domain=(-2.0, 2.0)),
            NoiseModel.noiseless(),
            Schedule.explicit([1.5] * 10),
            1.0,
            10,
            0,
            domain_policy="project",
        )
        assert np.all(path.xs <= 2.0) and np.all(path.xs >= -2.0)

    def test_x0_outside_domain(self):
        with pytest.raises(ValueError, match="domain"):
            rm_solve(
                RootProblem(lambda x: x, domain=(0.0, 1.0)),
                NoiseModel.noiseless(),
                Schedule.inverse_n(1.0),
                5.0,
                10,
                0,
            )

    def test_center_path_shifts_root(self):
        problem = RootProblem(lambda x: x - 2.0, x_star=2.0)
        path = rm_solve(problem, NoiseModel.gaussian(0.1), Schedule.inverse_n(1.0), 5.0, 100, 9)
        centered = center_path(path, 2.0)
        assert centered.x0 == pytest.approx(3.0)
        assert np.array_equal(centered.eps, path.eps)


class TestLinearEnvelope:
    def test_linear_map(self):
        report = check_linear_envelope(RootProblem(lambda x: 2.0 * x), [-2.0, -1.0, 1.0, 3.0])
        assert report.m_hat == pytest.approx(2.0)
        assert report.M_hat == pytest.approx(2.0)
        assert report.holds

    def test_sqrt_blows_up_near_zero(self):
        grid = np.array([-1.0, -0.01, 1e-6, 0.5, 2.0])
        report = check_linear_envelope(RootProblem(sqrt_sign), grid)
        assert report.M_hat == pytest.approx(1000.0)
        capped = check_linear_envelope(RootProblem(sqrt_sign), grid, ratio_cap=100.0)
        assert not capped.holds
        assert 1e-6 in capped.violations

    def test_discontinuous_map_inside_envelope_passes(self):
        def g(x):
            return (1.0 if math.sin(5.0 * x) > 0 else 2.0) * x

        report = check_linear_envelope(RootProblem(g), signed_log_grid(1e-3, 10.0, 200))
        assert report.holds
        assert report.covers(1.0, 2.0)
        assert not report.covers(1.5, 2.0)

    def test_grid_containing_root_rejected(self):
        with pytest.raises(ValueError, match="root"):
            check_linear_envelope(RootProblem(lambda x: x), [0.0, 1.0])
        with pytest.raises(ValueError, match="root"):
            check_linear_envelope(RootProblem(lambda x: x - 2.0, x_star=2.0), [2.0, 3.0])


class TestNormEnvelope:
    def test_rotation_scaling_matrix(self):
        A = np.array([[1.0, 1.0], [-1.0, 1.0]])
        problem = RootProblem(lambda x: A @ x, dimension=2)
        grid = sphere_grid(2, directions=32, radii=[0.1, 1.0, 10.0])
        report = check_norm_envelope(problem, grid)
        assert report.m_hat == pytest.approx(1.0, abs=1e-12)
        assert report.M_hat == pytest.approx(math.sqrt(2.0), abs=1e-12)
        assert report.holds

    def test_pure_scaling(self):
        problem = RootProblem(lambda x: 2.0 * x, dimension=3)
        report = check_norm_envelope(problem, sphere_grid(3, 16, [1.0, 5.0]))
        assert report.m_hat == pytest.approx(2.0)
        assert report.M_hat == pytest.approx(2.0)

    def test_repelling_map_fails(self):
        problem = RootProblem(lambda x: -x, dimension=2)
        report = check_norm_envelope(problem, sphere_grid(2, 8, [1.0]))
        assert report.m_hat == pytest.approx(-1.0)
        assert not report.holds

    def test_origin_rejected(self):
        problem = RootProblem(lambda x: x, dimension=2)
        with pytest.raises(ValueError, match="origin"):
            check_norm_envelope(problem, np.array([[0.0, 0.0], [1.0, 0.0]]))


class TestRegularity:
    def test_sqrt_case(self):
        grid = np.concatenate([-np.linspace(0.25, 4.0, 1000), np.linspace(0.25, 4.0, 1000)])
        verdict = check_regularity(
            RootProblem(sqrt_sign), grid, c=1.0, d=1.0, delta_pairs=[(0.25, 4.0)]
        )
        assert verdict.holds
        assert verdict.annulus_infima[0][1] == pytest.approx(0.5)

    def test_oscillating_map_fails_straddling_pair(self):
        def g(x):
            return x * math.sin(1.0 / x) ** 2 if x != 0 else 0.0

        grid = np.concatenate([np.linspace(0.05, 0.8, 2000), [1.0 / math.pi]])
        bad = check_regularity(RootProblem(g), grid, c=1.0, d=1.0, delta_pairs=[(0.1, 0.5)])
        assert not bad.holds
        ok = check_regularity(RootProblem(g), grid, c=1.0, d=1.0, delta_pairs=[(0.5, 0.6)])
        assert ok.holds

    def test_identity_map(self):
        grid = np.concatenate([-np.linspace(0.1, 5.0, 500), np.linspace(0.1, 5.0, 500)])
        verdict = check_regularity(
            RootProblem(lambda x: x), grid, c=0.0, d=1.0, delta_pairs=[(0.1, 5.0)]
        )
        assert verdict.holds
        assert verdict.annulus_infima[0][1] == pytest.approx(0.1)

    def test_growth_violation(self):
        verdict = check_regularity(
            RootProblem(lambda x: 10.0 * x), [1.0, 2.0], c=1.0, d=1.0, delta_pairs=[]
        )
        assert not verdict.holds

    def test_invalid_pair(self):
        with pytest.raises(ValueError, match="annulus"):
            check_regularity(RootProblem(lambda x: x), [1.0], c=1.0, d=1.0, delta_pairs=[(2.0, 1.0)])


class TestTruncation:
    def make_base(self, xs, ms):
        return ProcessPath(np.asarray(xs, float), np.asarray(ms, float))

    def test_noiseless_large_means_identity(self):
        xs = [3.0, 2.7, 2.43, 2.187]
        ms = [0.9 * v for v in xs[:-1]]
        base = self.make_base(xs, ms)
        trunc = derive_truncated(base, delta=1.0, tau=0.5)
        assert trunc.n0 == 1
        assert np.array_equal(trunc.path.xs, base.xs)
        assert np.array_equal(trunc.path.ms, base.ms)

    def test_small_means_zero_out(self):
        xs = [0.5, 0.4, 0.3]
        ms = [0.45, 0.35]
        base = self.make_base(xs, ms)
        trunc = derive_truncated(base, delta=1.0, tau=0.5)
        assert np.all(trunc.path.xs[1:] == 0.0)
        assert np.all(trunc.path.ms == 0.0)

    def test_unsettled_residuals_error(self):
        xs = [1.0, 1.5, 3.0]
        ms = [1.0, 1.0]
        with pytest.raises(ValueError, match="settle"):
            derive_truncated(self.make_base(xs, ms), delta=1.0, tau=0.5)

    def test_tau_above_delta_warns(self):
        base = self.make_base([3.0, 2.7], [2.7])
        with pytest.warns(UserWarning, match="tau"):
            derive_truncated(base, delta=0.5, tau=0.6)

    def test_residual_domination(self):
        rng = np.random.default_rng(8)
        xs = np.cumsum(rng.normal(size=101)) + 5.0
        ms = xs[:-1] * 0.95
        base = ProcessPath(xs, ms)
        trunc = derive_truncated(base, delta=0.5, tau=0.4, settle_tol=np.inf)
        assert trunc.residual_domination

    @pytest.mark.parametrize("seed", range(20))
    def test_sa_truncation_nonexpansive_beyond_settling(self, seed):
        path = rm_solve(
            RootProblem(sqrt_sign),
            NoiseModel.gaussian(0.1),
            Schedule.inverse_n(1.0),
            2.0,
            2000,
            seed,
        )
        trunc = derive_truncated(path, delta=0.25, tau=0.1)
        verdict = truncated_nonexpansive_verdict(trunc)
        assert verdict.holds, f"seed {seed}: step {verdict.first_violation}"

    @pytest.mark.parametrize("seed", range(20))
    def test_sa_truncated_zero_mean_bound(self, seed):
        path = rm_solve(
            RootProblem(sqrt_sign),
            NoiseModel.gaussian(0.1),
            Schedule.inverse_n(1.0),
            2.0,
            2000,
            seed,
        )
        delta = 0.25
        trunc = derive_truncated(path, delta=delta, tau=0.1)
        verdict = check_truncated_zero_mean_bound(trunc, kappa=delta)
        assert verdict.holds

    def test_zero_mean_bound_constructed_violation(self):
        # x jumps from a truncated-zero state to a mean far above the allowance
        base = self.make_base([1.0, 0.05, 0.52], [0.04, 0.5])
        trunc = derive_truncated(base, delta=0.1, tau=0.05)
        verdict = check_truncated_zero_mean_bound(trunc, kappa=0.1)
        assert not verdict.holds
        assert verdict.first_violation == 2

    def test_zero_mean_bound_trivial_on_zero_path(self):
        xs = [0.5, 0.4, 0.3]
        ms = [0.45, 0.35]
        trunc = derive_truncated(self.make_base(xs, ms), delta=1.0, tau=0.5)
        verdict = check_truncated_zero_mean_bound(trunc, kappa=0.0)
        assert verdict.holds

    def test_truncated_contractive_with_coverage(self):
        path = rm_solve(
            RootProblem(sqrt_sign),
            NoiseModel.gaussian(0.1),
            Schedule.inverse_n(1.0),
            2.0,
            2000,
            31,
        )
        delta, delta2 = 0.25, 3.0
        trunc = derive_truncated(path, delta=delta, tau=0.1)
        n = np.arange(1, 2001)
        ks = np.clip(1.0 - (1.0 / n) / math.sqrt(delta2), 0.0, 1.0)
        verdict = check_truncated_contractive(trunc, ks, delta2)
        assert verdict.holds
        assert 0.0 <= verdict.coverage <= 1.0


class TestMultivariateSolve:
    def test_identity_telescoping(self):
        horizon = 500
        schedule = Schedule.explicit(1.0 / np.arange(2.0, horizon + 2.0))
        problem = RootProblem(lambda x: x, dimension=3)
        path = rm_solve_nd(problem, NoiseModel.noiseless(), schedule, [3.0, -1.0, 2.0], horizon, 0)
        norms = path.norms()
        n = np.arange(0, horizon + 1)
        assert np.allclose(norms, norms[0] / (n + 1), rtol=1e-12)

    def test_rotation_scaling_converges(self):
        A = np.array([[1.0, 1.0], [-1.0, 1.0]])
        problem = RootProblem(lambda x: A @ x, dimension=2)
        hits = 0
        for seed in range(20):
            path = rm_solve_nd(
                problem, NoiseModel.gaussian(0.1), Schedule.inverse_n(1.0), [2.0, 1.0], 10_000, seed
            )
            hits += np.linalg.norm(path.xs[-1]) < 0.1
        assert hits >= 19

    def test_box_domain_projection(self):
        lo = np.array([-1.0, -2.0])
        hi = np.array([1.0, 2.0])
        problem = RootProblem(lambda x: -x, domain=(lo, hi), dimension=2)
        path = rm_solve_nd(
            problem,
            NoiseModel.noiseless(),
            Schedule.explicit([1.5] * 20),
            [0.5, 0.5],
            20,
            0,
            domain_policy="project",
        )
        assert np.all(path.xs <= hi) and np.all(path.xs >= lo)
        with pytest.raises(ValueError):
            RootProblem(lambda x: x, domain=(np.array([0.0, 3.0]), np.array([1.0, 2.0])))

    def test_dimension_one_matches_scalar(self):
        scalar = rm_solve(
            RootProblem(lambda x: x),
            NoiseModel.gaussian(0.2),
            Schedule.inverse_n(1.0),
            1.0,
            300,
            99,
        )
        vector = rm_solve_nd(
            RootProblem(lambda x: x, dimension=1),
            NoiseModel.gaussian(0.2),
            Schedule.inverse_n(1.0),
            [1.0],
            300,
            99,
        )
        assert np.array_equal(vector.xs[:, 0], scalar.xs)
        assert np.array_equal(vector.ms[:, 0], scalar.ms)

    def test_contraction_factor_bounds_mean_norms(self):
        A = np.array([[1.0, 1.0], [-1.0, 1.0]])
        problem = RootProblem(lambda x: A @ x, dimension=2)
        path = rm_solve_nd(
            problem, NoiseModel.gaussian(0.1), Schedule.inverse_n(1.0), [2.0, 1.0], 5000, 5
        )
        alphas = Schedule.inverse_n(1.0).alphas(5000)
        ks = np.array([contraction_factor(a, 1.0, math.sqrt(2.0)) for a in alphas])
        prev = np.linalg.norm(path.xs[:-1], axis=1)
        ratios = path.mean_norms() / prev
        assert np.all(ratios <= ks + 1e-12)


class TestContractionFactor:
    def test_reference_value(self):
        assert contraction_factor(0.1, 1.0, 2.0) == pytest.approx(math.sqrt(0.84))
        assert contraction_factor(0.1, 1.0, 2.0) == pytest.approx(0.91652, abs=5e-6)

    def test_zero_step(self):
        assert contraction_factor(0.0, 1.0, 2.0) == 1.0

    def test_one_step_kill(self):
        assert contraction_factor(1.0, 1.0, 1.0) == 0.0

    def test_validation(self):
        with pytest.raises(ValueError):
            contraction_factor(0.1, 2.0, 1.0)
        with pytest.raises(ValueError):
            contraction_factor(-0.1, 1.0, 2.0)
        with pytest.raises(ValueError):
            contraction_factor(0.1, 0.0, 1.0)
