import numpy as np
import pytest

from eivgibbs.diagnostics import (
    autocorrelation,
    batch_means_cov,
    diagnose,
    mess,
    se_eigen_extremes,
)
from eivgibbs.errors import RankDeficiencyError
from eivgibbs.rng import RngStream


def ar1(phi, T, rng, d=1):
    eps = rng.standard_normal((T, d))
    x = np.empty((T, d))
    x[0] = eps[0] / np.sqrt(1 - phi**2)
    for t in range(1, T):
        x[t] = phi * x[t - 1] + eps[t]
    return x


class TestBatchMeans:
    def test_iid_matches_sample_cov(self):
        rng = RngStream(0)
        chain = rng.standard_normal((100_000, 2)) @ np.array([[1.0, 0.0],
                                                              [0.5, 0.8]])
        cov, b = batch_means_cov(chain)
        assert b == int(np.floor(np.sqrt(chain.shape[0])))
        # ~316 batches -> ~8% relative SE on the long-run covariance
        np.testing.assert_allclose(cov, np.cov(chain.T), rtol=0.3, atol=0.05)

    def test_ar1_long_run_variance(self):
        # long-run variance of AR(1): 1/[(1-phi)^2 (1-phi^2)] * (1-phi^2)
        # = sigma^2_stat * (1+phi)/(1-phi) = 19 * 1/(1-phi^2)... computed
        # directly: innovations var 1 -> lrv = 1/(1-phi)^2
        phi = 0.9
        chain = ar1(phi, 1_000_000, RngStream(7))
        cov, _ = batch_means_cov(chain)
        assert cov[0, 0] == pytest.approx(1.0 / (1 - phi) ** 2, rel=0.15)

    def test_1d_input_accepted(self):
        vec = RngStream(1).standard_normal(1000)
        cov, _ = batch_means_cov(vec)
        assert cov.shape == (1, 1)


class TestMess:
    def test_iid_near_T(self):
        T = 100_000
        chain = RngStream(3).standard_normal((T, 2))
        assert 0.9 * T <= mess(chain) <= 1.1 * T

    def test_ar1_matches_theory(self):
        phi = 0.9
        T = 1_000_000
        chain = ar1(phi, T, RngStream(5))
        # ESS = T (1-phi)/(1+phi) = T/19
        assert mess(chain) == pytest.approx(T / 19.0, rel=0.15)

    def test_affine_invariance(self):
        chain = ar1(0.5, 20_000, RngStream(9), d=3)
        G = np.array([[2.0, 0.1, 0.0], [0.0, 1.0, -0.3], [0.5, 0.0, 1.0]])
        assert mess(chain @ G.T) == pytest.approx(mess(chain), rel=1e-8)

    def test_constant_coordinate_raises_named_error(self):
        chain = np.column_stack([
            RngStream(2).standard_normal(5000),
            np.full(5000, 3.14),
        ])
        with pytest.raises(RankDeficiencyError, match="const"):
            mess(chain, labels=["x", "const"])


class TestAutocorrelation:
    def test_lag_zero_is_one(self):
        chain = RngStream(4).standard_normal((5000, 3))
        acf = autocorrelation(chain, max_lag=10)
        np.testing.assert_allclose(acf[:, 0], 1.0)

    def test_ar1_decay(self):
        phi = 0.8
        chain = ar1(phi, 200_000, RngStream(6))
        acf = autocorrelation(chain, max_lag=5)[0]
        for lag in range(1, 6):
            assert acf[lag] == pytest.approx(phi**lag, abs=0.03)

    def test_zero_variance_is_nan(self):
        chain = np.ones((100, 1))
        acf = autocorrelation(chain, max_lag=3)
        assert np.isnan(acf[0, 1])


class TestDiagnose:
    def test_report_fields(self):
        chain = ar1(0.5, 20_000, RngStream(8), d=2)
        report = diagnose(chain, max_lag=7, labels=["a", "b"])
        assert report.d == 2 and report.T == 20_000
        assert report.acf.shape == (2, 8)
        assert report.se_sqrt_eig_max >= report.se_sqrt_eig_min > 0
        assert report.mess > 0 and not report.mess_exceeds_T
        d = report.to_dict()
        assert d["labels"] == ["a", "b"]
        import json
        json.dumps(d)  # fully serializable

    def test_se_extremes_match_eigvals(self):
        cov = np.array([[4.0, 1.0], [1.0, 9.0]])
        lo, hi = se_eigen_extremes(cov)
        w = np.linalg.eigvalsh(cov)
        assert lo == pytest.approx(np.sqrt(w[0]))
        assert hi == pytest.approx(np.sqrt(w[1]))
