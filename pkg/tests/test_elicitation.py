import pytest

from mmbayes.distributions import BetaParams
from mmbayes.elicitation import (
    NonConvergentFit,
    fit_beta_from_mean_ess,
    fit_beta_from_quantiles,
    preview,
)
from mmbayes.special import regularized_incomplete_beta


class TestMeanEss:
    def test_class_prior(self):
        p = fit_beta_from_mean_ess(2 / 11, 11)
        assert p.alpha == pytest.approx(2.0, abs=1e-12)
        assert p.beta == pytest.approx(9.0, abs=1e-12)

    def test_uniform(self):
        p = fit_beta_from_mean_ess(0.5, 2)
        assert (p.alpha, p.beta) == (1.0, 1.0)

    def test_seminar_prior(self):
        p = fit_beta_from_mean_ess(0.3, 10)
        assert p.alpha == pytest.approx(3.0, abs=1e-12)
        assert p.beta == pytest.approx(7.0, abs=1e-12)

    def test_boundary_mean_rejected(self):
        for mean in (0.0, 1.0):
            with pytest.raises(ValueError):
                fit_beta_from_mean_ess(mean, 5)

    def test_round_trip_identity(self):
        for mean, ess in ((0.18, 11), (0.5, 2), (0.73, 40.5)):
            p = fit_beta_from_mean_ess(mean, ess)
            assert p.alpha / (p.alpha + p.beta) == pytest.approx(mean, abs=1e-12)
            assert p.alpha + p.beta == pytest.approx(ess, abs=1e-12)


class TestQuantileFit:
    def test_round_trip_from_exact_cdf(self):
        # targets generated from the package's own Beta(2,9) CDF
        truth = BetaParams(2, 9)
        pairs = [
            (regularized_incomplete_beta(0.1, 2, 9), 0.1),
            (regularized_incomplete_beta(0.35, 2, 9), 0.35),
        ]
        fitted = fit_beta_from_quantiles(pairs)
        assert fitted.alpha == pytest.approx(truth.alpha, rel=1e-4)
        assert fitted.beta == pytest.approx(truth.beta, rel=1e-4)

    def test_symmetric_pairs_force_equal_shapes(self):
        fitted = fit_beta_from_quantiles([(0.25, 0.25), (0.75, 0.75)])
        assert fitted.alpha == pytest.approx(fitted.beta, rel=1e-5)

    def test_decreasing_pairs_rejected(self):
        with pytest.raises(ValueError):
            fit_beta_from_quantiles([(0.8, 0.2), (0.3, 0.6)])

    def test_boundary_pairs_rejected(self):
        with pytest.raises(ValueError):
            fit_beta_from_quantiles([(0.0, 0.2), (0.9, 0.6)])

    def test_deterministic(self):
        pairs = [(0.2, 0.12), (0.9, 0.4)]
        a = fit_beta_from_quantiles(pairs)
        b = fit_beta_from_quantiles(pairs)
        assert (a.alpha, a.beta) == (b.alpha, b.beta)

    def test_infeasible_pairs_raise_with_best(self):
        # nearly-coincident thresholds with a huge probability jump and then
        # an immediate plateau cannot be matched by any beta CDF
        pairs = [(0.5 - 1e-9, 0.5 - 1e-9), (0.5 + 1e-9, 0.999999)]
        with pytest.raises(NonConvergentFit) as exc_info:
            fit_beta_from_quantiles(pairs)
        err = exc_info.value
        assert isinstance(err.best_params, BetaParams)
        assert err.residual > 1e-6

    def test_fitted_params_always_valid(self):
        fitted = fit_beta_from_quantiles([(0.05, 0.01), (0.95, 0.08)])
        assert fitted.alpha > 0 and fitted.beta > 0
        lo = regularized_incomplete_beta(0.01, fitted.alpha, fitted.beta)
        hi = regularized_incomplete_beta(0.08, fitted.alpha, fitted.beta)
        assert lo == pytest.approx(0.05, abs=1e-6)
        assert hi == pytest.approx(0.95, abs=1e-6)


class TestPreview:
    def test_delegates_to_density_grid(self):
        from mmbayes.conjugate import density_grid
        assert preview(BetaParams(2, 9), 32) == density_grid(BetaParams(2, 9), 32)

    def test_uniform_preview_flat(self):
        grid = preview(BetaParams(1, 1), 16)
        assert all(d == pytest.approx(1.0, abs=1e-12) for _, d in grid)
