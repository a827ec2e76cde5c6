import numpy as np
import pytest

from eivgibbs.distributions import logpdf_inv_wishart, logpdf_mvn
from eivgibbs.errors import DimensionError
from eivgibbs.model import (
    ChainState,
    ModelConfig,
    build_general,
    canonical_to_paper_indices,
    coef_conditional,
    coef_matrix_to_canonical,
    coef_to_canonical,
    coupling_norm,
    drift_bound,
    drift_value,
    latent_conditional,
    log_unnormalized_density,
    paper_to_canonical_indices,
    proof_identities_check,
    sigma_conditional,
)
from eivgibbs.rng import RngStream


def random_spd(d, rng, jitter=0.5):
    F = rng.standard_normal((d, d + 3))
    return F @ F.T / (d + 3) + jitter * np.eye(d)


def make_config(variant, n=6, m=2, p=2, q=1, seed=0):
    rng = RngStream(seed)
    Y = rng.standard_normal((n, m))
    X = rng.standard_normal((n, p))
    Z = np.hstack([np.ones((n, 1)), rng.standard_normal((n, q - 1))]) \
        if q > 1 else np.ones((n, 1))
    V = np.array([random_spd(p, rng) for _ in range(n)])
    kwargs = dict(
        variant=variant, Y=Y, X=X, Z=Z, V=V,
        a0=float(m + 1), B0=random_spd(m, rng),
        j0=rng.standard_normal(m * (q + p)),
        J0=random_spd(m * (q + p), rng),
    )
    if variant.endswith("xy"):
        kwargs["U"] = np.array([random_spd(m, rng) for _ in range(n)])
    if variant.startswith("classical"):
        kwargs["k"] = rng.standard_normal((n, p))
        kwargs["K"] = np.array([random_spd(p, rng) for _ in range(n)])
    return ModelConfig(**kwargs)


def random_state(g, rng):
    Sigma = random_spd(g.m, rng)
    return ChainState(
        A=rng.standard_normal((g.n, g.p)),
        gamma=rng.standard_normal(g.coef_dim),
        Sigma=Sigma,
    )


class TestCoefOrdering:
    def test_permutation_roundtrip(self):
        m, q, p = 3, 2, 4
        perm = paper_to_canonical_indices(m, q, p)
        inv = canonical_to_paper_indices(m, q, p)
        x = np.arange(m * (q + p), dtype=float)
        np.testing.assert_array_equal(x[perm][inv], x)

    def test_small_case_by_hand(self):
        # m=2, q=1, p=1: paper order (th11, th12, b11, b12),
        # canonical vec([Theta; B]) columns: (th11, b11, th12, b12)
        paper = np.array([10.0, 20.0, 30.0, 40.0])
        np.testing.assert_array_equal(
            coef_to_canonical(paper, 2, 1, 1), [10.0, 30.0, 20.0, 40.0]
        )

    def test_matrix_conversion_is_congruence(self):
        m, q, p = 2, 1, 3
        rng = RngStream(8)
        J = random_spd(m * (q + p), rng)
        Jc = coef_matrix_to_canonical(J, m, q, p)
        perm = paper_to_canonical_indices(m, q, p)
        np.testing.assert_allclose(Jc, J[np.ix_(perm, perm)])


class TestBuildGeneral:
    def test_berkson_x_fields(self):
        config = make_config("berkson-x")
        g = build_general(config)
        np.testing.assert_array_equal(g.R, config.Y)
        np.testing.assert_array_equal(g.M, config.Z)
        np.testing.assert_array_equal(g.d, config.X)
        np.testing.assert_array_equal(g.D, config.V)
        assert g.nu_rows == 0

    def test_classical_x_fusion(self):
        config = make_config("classical-x")
        g = build_general(config)
        i = 2
        Vinv = np.linalg.inv(config.V[i])
        Kinv = np.linalg.inv(config.K[i])
        D_ref = np.linalg.inv(Vinv + Kinv)
        d_ref = D_ref @ (Vinv @ config.X[i] + Kinv @ config.k[i])
        np.testing.assert_allclose(g.D[i], D_ref, rtol=1e-10)
        np.testing.assert_allclose(g.d[i], d_ref, rtol=1e-10)

    def test_xy_augmentation(self):
        config = make_config("berkson-xy", n=4, m=2, p=2, q=1)
        n, m, p, q = config.dims
        g = build_general(config)
        assert g.q == n + q and g.nu_rows == n
        # latent-response prior rows carry Y and U
        k_tot = g.k
        for i in range(n):
            rows = i + k_tot * np.arange(m)
            np.testing.assert_array_equal(g.c0[rows], config.Y[i])
            np.testing.assert_array_equal(
                g.C0[np.ix_(rows, rows)], config.U[i])
        # design has -I in front of Z
        np.testing.assert_array_equal(g.M[:, :n], -np.eye(n))
        np.testing.assert_array_equal(g.M[:, n:], config.Z)
        np.testing.assert_array_equal(g.R, np.zeros((n, m)))

    def test_labels(self):
        g = build_general(make_config("classical-xy", n=3, m=2, p=2, q=1))
        labels = g.coef_labels()
        assert len(labels) == g.coef_dim
        assert sum(lab.startswith("gamma.nu.") for lab in labels) == 3 * 2
        assert sum(lab.startswith("gamma.theta.") for lab in labels) == 1 * 2
        assert sum(lab.startswith("gamma.beta.") for lab in labels) == 2 * 2
        assert labels[0] == "gamma.nu.1.1"

    def test_missing_classical_priors_rejected(self):
        with pytest.raises(DimensionError):
            make_config("classical-x").__class__(
                variant="classical-x",
                Y=np.ones((3, 1)), X=np.ones((3, 1)), Z=np.ones((3, 1)),
                V=np.broadcast_to(np.eye(1), (3, 1, 1)).copy(),
                a0=2.0, B0=np.eye(1), j0=np.zeros(2), J0=np.eye(2),
            )


class TestConditionals:
    """The conditional parameters must agree with the joint density:
    density ratios along one-coordinate moves equal the corresponding
    conditional-lpdf ratios."""

    @pytest.mark.parametrize("variant", [
        "berkson-x", "classical-x", "berkson-xy", "classical-xy"])
    def test_coef_conditional_consistent_with_density(self, variant):
        rng = RngStream(17)
        g = build_general(make_config(variant, n=4, m=2, p=2, q=1))
        state = random_state(g, rng)
        cond = coef_conditional(state.A, state.Sigma, g)
        for _ in range(5):
            gamma2 = rng.standard_normal(g.coef_dim)
            state2 = ChainState(A=state.A, gamma=gamma2, Sigma=state.Sigma)
            lhs = log_unnormalized_density(state2, g) - \
                log_unnormalized_density(state, g)
            rhs = logpdf_mvn(gamma2, cond.mean, cond.cov) - \
                logpdf_mvn(state.gamma, cond.mean, cond.cov)
            assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-8)

    def test_latent_conditional_consistent_with_density(self):
        rng = RngStream(23)
        g = build_general(make_config("berkson-x", n=5, m=2, p=3, q=1))
        state = random_state(g, rng)
        i = 3
        cond = latent_conditional(i, state.gamma, state.Sigma, g)
        for _ in range(5):
            A2 = state.A.copy()
            A2[i] = rng.standard_normal(g.p)
            state2 = ChainState(A=A2, gamma=state.gamma, Sigma=state.Sigma)
            lhs = log_unnormalized_density(state2, g) - \
                log_unnormalized_density(state, g)
            rhs = logpdf_mvn(A2[i], cond.mean, cond.cov) - \
                logpdf_mvn(state.A[i], cond.mean, cond.cov)
            assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-8)

    def test_sigma_conditional_consistent_with_density(self):
        rng = RngStream(29)
        g = build_general(make_config("classical-x", n=5, m=2, p=2, q=1))
        state = random_state(g, rng)
        cond = sigma_conditional(state, g)
        Theta, B = g.split_coef(state.gamma)
        E = g.R - g.M @ Theta - state.A @ B
        np.testing.assert_allclose(cond.scale, E.T @ E + g.B0, rtol=1e-12)
        assert cond.df == g.n + g.a0
        for _ in range(5):
            Sigma2 = random_spd(g.m, rng)
            state2 = ChainState(A=state.A, gamma=state.gamma, Sigma=Sigma2)
            lhs = log_unnormalized_density(state2, g) - \
                log_unnormalized_density(state, g)
            rhs = logpdf_inv_wishart(Sigma2, cond.df, cond.scale) - \
                logpdf_inv_wishart(state.Sigma, cond.df, cond.scale)
            assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-8)

    def test_latent_index_range(self):
        g = build_general(make_config("berkson-x", n=3))
        state = random_state(g, RngStream(0))
        with pytest.raises(DimensionError):
            latent_conditional(5, state.gamma, state.Sigma, g)


class TestDrift:
    def test_drift_value_formula(self):
        rng = RngStream(31)
        g = build_general(make_config("berkson-x", n=4, m=1, p=2, q=1))
        state = random_state(g, rng)
        manual = 0.0
        for i in range(g.n):
            dA = state.A[i] - g.d[i]
            manual += 0.5 * dA @ np.linalg.inv(g.D[i]) @ dA
        manual += 0.5 * state.gamma @ np.linalg.inv(g.C0) @ state.gamma
        assert drift_value(state, g) == pytest.approx(manual, rel=1e-10)

    def test_coupling_norm_m1_matches_direct(self):
        g = build_general(make_config("berkson-x", n=5, m=1, p=2, q=1))
        G = np.hstack([g.M, g.d])
        w, V = np.linalg.eigh(g.C0)
        root = V @ np.diag(np.sqrt(w)) @ V.T
        ref = np.linalg.norm(G @ root, 2)
        assert coupling_norm(g) == pytest.approx(ref, rel=1e-10)

    def test_bound_dominates_one_sweep_expectation(self):
        # Monte Carlo: from an extreme start, the expected drift value
        # after one sweep stays below the explicit bound.
        from eivgibbs.sampler import gibbs_step

        rng = RngStream(37)
        g = build_general(make_config("berkson-x", n=5, m=1, p=1, q=1))
        L = drift_bound(g)
        assert np.isfinite(L) and L > 0
        state0 = ChainState(
            A=g.d + 50.0, gamma=np.full(g.coef_dim, 80.0),
            Sigma=np.eye(g.m) * 1e-4,
        )
        vals = []
        for r in range(200):
            nxt = gibbs_step(state0, g, RngStream(1000 + r))
            vals.append(drift_value(nxt, g))
        vals = np.asarray(vals)
        se = vals.std(ddof=1) / np.sqrt(len(vals))
        assert vals.mean() < L + 5 * se

    def test_proof_identities_pass(self):
        report = proof_identities_check(RngStream(41), trials=50)
        assert report.passed, report.summary()
        kinds = {c.kind for c in report.checks}
        assert kinds == {"identity", "bound"}
