import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from mubrelation.estimators import AffineRelationFit, MubMeasurement, MubTomography
from mubrelation.exceptions import DimMismatch, NotInRelationImage
from mubrelation.measure import sample_measurements
from mubrelation.mub import generate_mub
from mubrelation.qmat import random_density
from mubrelation.relation import DirectionTriple, nonorthogonal_post_state, predict_post, trial_states


def test_params_and_clone():
    est = MubMeasurement(weights=[0.5, 0.25, 0.25], tol=1e-6)
    assert est.get_params() == {"bases": None, "weights": [0.5, 0.25, 0.25], "tol": 1e-6}
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    assert AffineRelationFit().set_params(family="lambda").family == "lambda"


class TestMubMeasurement:
    def test_transform_matches_relation(self):
        X = trial_states(5, 12, seed=0)
        est = MubMeasurement().fit(X)
        assert est.relation_holds_
        assert est.dim_ == 5
        out = est.transform(X)
        np.testing.assert_allclose(out, np.stack([predict_post(r) for r in X]), atol=1e-12)
        np.testing.assert_allclose(est.inverse_transform(out), X, atol=1e-12)

    def test_fit_transform_single_matrix(self):
        rho = random_density(2, "pure", 3)
        out = MubMeasurement().fit_transform(rho)
        assert out.shape == (1, 2, 2)

    def test_biased_has_no_inverse(self):
        X = trial_states(2, 4, seed=1)
        est = MubMeasurement(weights=[0.6, 0.2, 0.2]).fit(X)
        assert not est.relation_holds_
        with pytest.raises(NotInRelationImage):
            est.inverse_transform(est.transform(X))

    def test_not_fitted(self):
        with pytest.raises(NotFittedError):
            MubMeasurement().transform(np.eye(2) / 2)

    def test_dim_mismatch(self):
        est = MubMeasurement().fit(np.eye(2) / 2)
        with pytest.raises(DimMismatch):
            est.transform(np.eye(3) / 3)
        with pytest.raises(DimMismatch):
            MubMeasurement(bases=generate_mub(3)).fit(np.eye(2) / 2)


class TestAffineRelationFit:
    def test_lambda_family(self):
        X = trial_states(3, 20, seed=2)
        y = MubMeasurement().fit_transform(X)
        fit = AffineRelationFit(family="lambda").fit(X, y)
        assert fit.lambda_ == pytest.approx(3 / 4, abs=1e-12)
        assert fit.score(X, y) >= -1e-12
        np.testing.assert_allclose(fit.predict(X), y, atol=1e-12)

    def test_affine_family_on_counterexample(self):
        rng = np.random.default_rng(0)
        X = np.stack([random_density(2, "pure", rng) for _ in range(30)])
        dirs = DirectionTriple.from_vectors([[0, 0, 1], [1, 0, 0], [1, 1, 1]])
        y = np.stack([nonorthogonal_post_state(r, dirs, [1 / 3] * 3) for r in X])
        fit = AffineRelationFit().fit(X, y)
        assert fit.lambda_ is None
        assert fit.worst_residual_ > 1e-3
        assert fit.score(X, y) == pytest.approx(-fit.worst_residual_)

    def test_bad_family(self):
        with pytest.raises(ValueError):
            AffineRelationFit(family="quadratic").fit(np.eye(2) / 2, np.eye(2) / 2)

    def test_shape_mismatch(self):
        with pytest.raises(DimMismatch):
            AffineRelationFit().fit(trial_states(2, 3, seed=0), np.eye(2) / 2)


class TestMubTomography:
    def test_from_record(self):
        rho = random_density(3, "pure", 4)
        rec = sample_measurements(rho, generate_mub(3), 10**5, seed=4)
        tomo = MubTomography().fit(rec)
        assert tomo.score(rho) > -0.05
        np.testing.assert_allclose(np.trace(tomo.density_matrix_), 1, atol=1e-12)

    def test_from_counts_flags_non_positive(self):
        tomo = MubTomography().fit(np.array([[10, 0], [10, 0], [10, 0]]))
        assert not tomo.is_positive_
        np.testing.assert_allclose(tomo.post_state_.trace(), 1, atol=1e-15)

    def test_bad_counts(self):
        with pytest.raises(DimMismatch):
            MubTomography().fit(np.array([1, 2, 3]))
