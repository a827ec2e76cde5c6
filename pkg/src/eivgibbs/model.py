"""General error-in-variables regression target and its exact conditionals.

The target density over (A, gamma, Sigma) is parameterized by
hyperparameters (a0, B0, c0, C0, {d_i, D_i}, R, M):

    pi(A, gamma, Sigma) proportional to
        det(Sigma)^-((n + a0 + 1 + m)/2) * exp(-tr(Sigma^-1 B0)/2)
        * exp(-sum_i (R_i - Theta^T M_i - B^T A_i)^T Sigma^-1 (...)/2)
        * exp(-sum_i (A_i - d_i)^T D_i^-1 (A_i - d_i)/2)
        * exp(-(gamma - c0)^T C0^-1 (gamma - c0)/2)

Four measurement-error regression posteriors reduce to this form
(berkson-x, classical-x, berkson-xy, classical-xy; see build_general).

Coefficient ordering convention: gamma = vec(W) with W = [Theta; B]
stacked row-blocks of shape (q + p, m), vec stacking columns. This
matches the Kronecker algebra of the coefficient update
(Sigma^-1 (x) [M A]^T [M A]). Priors given in (vec Theta, vec B)
concatenated order are converted with paper_to_canonical_indices.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg as sla

from .errors import DimensionError, SpdError
from .linalg import (
    as_spd,
    chol_inverse,
    chol_solve,
    cholesky_spd,
    logdet_spd,
    symmetric_sqrt,
)
from .rng import RngStream

VARIANTS = ("berkson-x", "classical-x", "berkson-xy", "classical-xy", "general")


# ---------------------------------------------------------------------------
# coefficient ordering


def paper_to_canonical_indices(m: int, q: int, p: int) -> np.ndarray:
    """Index map from (vec Theta, vec B) concatenation to vec([Theta; B]).

    Returns idx such that gamma_canonical = gamma_concat[idx]. The two
    orderings coincide for m = 1 and differ otherwise.
    """
    k = q + p
    idx = np.empty(m * k, dtype=int)
    for j in range(m):
        for r in range(k):
            idx[j * k + r] = j * q + r if r < q else m * q + j * p + (r - q)
    return idx


def coef_to_canonical(vec, m: int, q: int, p: int) -> np.ndarray:
    """Reorder a coefficient vector from concatenated to canonical order."""
    idx = paper_to_canonical_indices(m, q, p)
    return np.asarray(vec, dtype=float)[idx]


def coef_matrix_to_canonical(mat, m: int, q: int, p: int) -> np.ndarray:
    """Reorder a coefficient covariance from concatenated to canonical order."""
    idx = paper_to_canonical_indices(m, q, p)
    return np.asarray(mat, dtype=float)[np.ix_(idx, idx)]


def canonical_to_paper_indices(m: int, q: int, p: int) -> np.ndarray:
    idx = paper_to_canonical_indices(m, q, p)
    inv = np.empty_like(idx)
    inv[idx] = np.arange(idx.size)
    return inv


# ---------------------------------------------------------------------------
# types


@dataclass(eq=False)
class GeneralDensity:
    """Hyperparameters and dimensions of the general target density.

    Immutable after construction (treat as read-only); cached Cholesky
    factors and inverses of the fixed matrices hang off properties.
    """

    n: int
    m: int
    p: int
    q: int
    a0: float
    B0: np.ndarray  # (m, m) SPD
    c0: np.ndarray  # (m (q + p),) canonical ordering
    C0: np.ndarray  # (m (q + p), m (q + p)) SPD
    d: np.ndarray  # (n, p)
    D: np.ndarray  # (n, p, p) SPD each
    R: np.ndarray  # (n, m)
    M: np.ndarray  # (n, q)
    nu_rows: int = 0  # leading coefficient rows holding latent responses

    def __post_init__(self):
        self.B0 = as_spd(self.B0, "B0")
        self.c0 = np.asarray(self.c0, dtype=float).ravel()
        self.C0 = as_spd(self.C0, "C0")
        self.d = np.asarray(self.d, dtype=float).reshape(self.n, self.p)
        self.D = np.asarray(self.D, dtype=float).reshape(self.n, self.p, self.p)
        self.R = np.asarray(self.R, dtype=float).reshape(self.n, self.m)
        self.M = np.asarray(self.M, dtype=float).reshape(self.n, self.q)
        if self.n < 1 or self.p < 1 or self.q < 1 or self.m < 1:
            raise DimensionError("n, m, p, q must all be positive")
        if self.n + self.a0 < self.m:
            raise DimensionError(
                f"n + a0 = {self.n + self.a0} below dimension m = {self.m}; "
                "inverse-Wishart degrees of freedom invalid"
            )
        if self.c0.size != self.coef_dim or self.C0.shape[0] != self.coef_dim:
            raise DimensionError(
                f"c0/C0 sized for {self.c0.size} coefficients, "
                f"expected m(q+p) = {self.coef_dim}"
            )
        for i in range(self.n):
            as_spd(self.D[i], f"D[{i}]")

    @property
    def k(self) -> int:
        """Coefficient rows q + p."""
        return self.q + self.p

    @property
    def coef_dim(self) -> int:
        return self.m * self.k

    @cached_property
    def C0_chol(self) -> np.ndarray:
        return cholesky_spd(self.C0, "C0")

    @cached_property
    def C0_inv(self) -> np.ndarray:
        return chol_inverse(self.C0_chol)

    @cached_property
    def C0_inv_c0(self) -> np.ndarray:
        return chol_solve(self.C0_chol, self.c0)

    @cached_property
    def D_chol(self) -> np.ndarray:
        return np.array([cholesky_spd(Di, "D_i") for Di in self.D])

    @cached_property
    def D_inv(self) -> np.ndarray:
        return np.array([chol_inverse(L) for L in self.D_chol])

    @cached_property
    def D_inv_d(self) -> np.ndarray:
        return np.einsum("ijk,ik->ij", self.D_inv, self.d)

    @cached_property
    def D_all_equal(self) -> bool:
        return bool(np.all(np.abs(self.D - self.D[0]) <= 1e-14 * max(1.0, np.abs(self.D[0]).max())))

    @cached_property
    def B0_chol(self) -> np.ndarray:
        return cholesky_spd(self.B0, "B0")

    def coef_labels(self) -> list[str]:
        """Names for gamma coordinates in canonical (storage) order."""
        labels = []
        q_reg = self.q - self.nu_rows
        for j in range(self.m):
            for r in range(self.k):
                if r < self.nu_rows:
                    labels.append(f"gamma.nu.{r + 1}.{j + 1}")
                elif r < self.q:
                    labels.append(f"gamma.theta.{r - self.nu_rows + 1}.{j + 1}")
                else:
                    labels.append(f"gamma.beta.{r - self.q + 1}.{j + 1}")
        assert q_reg >= 1
        return labels

    def coef_matrix(self, gamma) -> np.ndarray:
        """Reshape gamma to the (q + p, m) coefficient matrix [Theta; B]."""
        return np.asarray(gamma, dtype=float).reshape(self.k, self.m, order="F")

    def split_coef(self, gamma) -> tuple[np.ndarray, np.ndarray]:
        """(Theta, B) blocks of shape (q, m) and (p, m)."""
        W = self.coef_matrix(gamma)
        return W[: self.q], W[self.q :]


@dataclass
class ChainState:
    """One Gibbs state: latents A (n x p), coefficients gamma, covariance Sigma."""

    A: np.ndarray
    gamma: np.ndarray
    Sigma: np.ndarray

    def __post_init__(self):
        self.A = np.asarray(self.A, dtype=float)
        self.gamma = np.asarray(self.gamma, dtype=float).ravel()
        self.Sigma = np.asarray(self.Sigma, dtype=float)

    def check_matches(self, g: GeneralDensity):
        if self.A.shape != (g.n, g.p):
            raise DimensionError(f"A shape {self.A.shape}, expected {(g.n, g.p)}")
        if self.gamma.size != g.coef_dim:
            raise DimensionError(
                f"gamma length {self.gamma.size}, expected {g.coef_dim}"
            )
        if self.Sigma.shape != (g.m, g.m):
            raise DimensionError(f"Sigma shape {self.Sigma.shape}, expected {(g.m, g.m)}")


@dataclass
class ModelConfig:
    """Observed data, known error covariances, and priors for one variant.

    Priors j0, J0 are given in the concatenated (vec Theta, vec B)
    ordering; builders convert to the canonical ordering internally.
    Error covariances are per-observation stacks: V is (n, p, p) and,
    for the -xy variants, U is (n, m, m).
    """

    variant: str
    Y: np.ndarray
    X: np.ndarray
    Z: np.ndarray
    V: np.ndarray
    a0: float
    B0: np.ndarray
    j0: np.ndarray
    J0: np.ndarray
    U: np.ndarray | None = None
    k: np.ndarray | None = None  # classical prior means (n, p)
    K: np.ndarray | None = None  # classical prior covariances (n, p, p)

    def __post_init__(self):
        if self.variant not in VARIANTS:
            raise DimensionError(f"unknown variant {self.variant!r}; choose from {VARIANTS}")
        self.Y = np.atleast_2d(np.asarray(self.Y, dtype=float))
        self.X = np.atleast_2d(np.asarray(self.X, dtype=float))
        self.Z = np.atleast_2d(np.asarray(self.Z, dtype=float))
        n, m = self.Y.shape
        p, q = self.X.shape[1], self.Z.shape[1]
        if self.X.shape[0] != n or self.Z.shape[0] != n:
            raise DimensionError("Y, X, Z row counts disagree")
        self.V = np.asarray(self.V, dtype=float).reshape(n, p, p)
        self.j0 = np.asarray(self.j0, dtype=float).ravel()
        if self.j0.size != m * (q + p):
            raise DimensionError(
                f"j0 length {self.j0.size}, expected m(q+p) = {m * (q + p)}"
            )
        self.J0 = as_spd(self.J0, "J0")
        self.B0 = as_spd(np.atleast_2d(np.asarray(self.B0, dtype=float)), "B0")
        if self.variant.endswith("xy"):
            if self.U is None:
                raise DimensionError(f"variant {self.variant} requires U")
            self.U = np.asarray(self.U, dtype=float).reshape(n, m, m)
        if self.variant.startswith("classical"):
            if self.k is None or self.K is None:
                raise DimensionError(f"variant {self.variant} requires k and K")
            self.k = np.asarray(self.k, dtype=float).reshape(n, p)
            self.K = np.asarray(self.K, dtype=float).reshape(n, p, p)

    @property
    def dims(self) -> tuple[int, int, int, int]:
        n, m = self.Y.shape
        return n, m, self.X.shape[1], self.Z.shape[1]


@dataclass
class ConditionalParams:
    """Parameters of one exact conditional: Gaussian (mean, cov) or
    inverse-Wishart (df, scale)."""

    mean: np.ndarray | None = None
    cov: np.ndarray | None = None
    df: float | None = None
    scale: np.ndarray | None = None


# ---------------------------------------------------------------------------
# variant builders


def _classical_shrinkage(config: ModelConfig) -> tuple[np.ndarray, np.ndarray]:
    """Posterior-of-prior fusion d_i = (V_i^-1 + K_i^-1)^-1 (V_i^-1 x_i + K_i^-1 k_i)."""
    n, _, p, _ = config.dims
    d = np.empty((n, p))
    D = np.empty((n, p, p))
    for i in range(n):
        Vinv = chol_inverse(cholesky_spd(config.V[i], f"V[{i}]"))
        Kinv = chol_inverse(cholesky_spd(config.K[i], f"K[{i}]"))
        prec = Vinv + Kinv
        L = cholesky_spd(prec, f"V[{i}]^-1 + K[{i}]^-1")
        D[i] = chol_inverse(L)
        d[i] = chol_solve(L, Vinv @ config.X[i] + Kinv @ config.k[i])
    return d, D


def build_general(config: ModelConfig) -> GeneralDensity:
    """Reduce a variant-specific model to the general density.

    berkson-x:   M=Z, R=Y, c0/C0 from (j0, J0), d_i=x_i, D_i=V_i
    classical-x: same with d_i, D_i the precision-weighted fusion of
                 (x_i, V_i) and (k_i, K_i)
    -xy:         coefficient block augmented with the latent responses:
                 M=[-I Z], R=0, c0=(vec Y, j0), C0=blockdiag(U_i, J0),
                 all in canonical ordering; effective q becomes n + q.
    """
    n, m, p, q = config.dims
    if config.variant == "berkson-x" or config.variant == "classical-x":
        if config.variant == "berkson-x":
            d, D = config.X, config.V
        else:
            d, D = _classical_shrinkage(config)
        return GeneralDensity(
            n=n, m=m, p=p, q=q,
            a0=config.a0, B0=config.B0,
            c0=coef_to_canonical(config.j0, m, q, p),
            C0=coef_matrix_to_canonical(config.J0, m, q, p),
            d=d, D=D, R=config.Y, M=config.Z,
        )
    if config.variant in ("berkson-xy", "classical-xy"):
        if config.variant == "berkson-xy":
            d, D = config.X, config.V
        else:
            d, D = _classical_shrinkage(config)
        q_eff = n + q
        k_tot = q_eff + p
        dim = m * k_tot
        c0 = np.zeros(dim)
        C0 = np.zeros((dim, dim))
        for i in range(n):
            rows = i + k_tot * np.arange(m)
            c0[rows] = config.Y[i]
            C0[np.ix_(rows, rows)] = config.U[i]
        # regression block, converted from concatenated to canonical order
        sub = np.array(
            [j * k_tot + n + r for j in range(m) for r in range(q + p)]
        )
        c0[sub] = coef_to_canonical(config.j0, m, q, p)
        C0[np.ix_(sub, sub)] = coef_matrix_to_canonical(config.J0, m, q, p)
        M = np.hstack([-np.eye(n), config.Z])
        return GeneralDensity(
            n=n, m=m, p=p, q=q_eff,
            a0=config.a0, B0=config.B0,
            c0=c0, C0=C0, d=d, D=D,
            R=np.zeros((n, m)), M=M, nu_rows=n,
        )
    raise DimensionError(
        "variant 'general' carries its own GeneralDensity; nothing to build"
    )


# ---------------------------------------------------------------------------
# exact conditionals


def sigma_conditional(state: ChainState, g: GeneralDensity) -> ConditionalParams:
    """Inverse-Wishart(n + a0, E^T E + B0) with E = R - M Theta - A B."""
    state.check_matches(g)
    Theta, B = g.split_coef(state.gamma)
    E = g.R - g.M @ Theta - state.A @ B
    scale = E.T @ E + g.B0
    return ConditionalParams(df=g.n + g.a0, scale=0.5 * (scale + scale.T))


def coef_precision_mean(
    A: np.ndarray, Sigma: np.ndarray, g: GeneralDensity
) -> tuple[np.ndarray, np.ndarray]:
    """Conditional mean of gamma and the lower Cholesky factor of its precision.

    Precision = Sigma^-1 (x) [M A]^T [M A] + C0^-1. The mean solves the
    precision system against [Sigma^-1 (x) [M A]^T] vec(R) + C0^-1 c0;
    no dense covariance inverse is formed.
    """
    G = np.hstack([g.M, np.asarray(A, dtype=float).reshape(g.n, g.p)])
    Sig_chol = cholesky_spd(np.asarray(Sigma, dtype=float), "Sigma")
    Sig_inv = chol_inverse(Sig_chol)
    prec = np.kron(Sig_inv, G.T @ G) + g.C0_inv
    try:
        L = cholesky_spd(0.5 * (prec + prec.T), "coefficient precision")
    except SpdError as exc:
        raise SpdError(f"coefficient precision assembly failed: {exc}") from exc
    # [Sigma^-1 (x) G^T] vec(R) = vec(G^T R Sigma^-1)
    rhs = (G.T @ g.R @ Sig_inv).reshape(-1, order="F") + g.C0_inv_c0
    mean = chol_solve(L, rhs)
    return mean, L


def coef_conditional(A, Sigma, g: GeneralDensity) -> ConditionalParams:
    """Gaussian conditional of gamma given (A, Sigma), canonical ordering."""
    mean, L = coef_precision_mean(A, Sigma, g)
    return ConditionalParams(mean=mean, cov=chol_inverse(L))


def latent_conditional(i: int, gamma, Sigma, g: GeneralDensity) -> ConditionalParams:
    """Gaussian conditional of A_i given (gamma, Sigma).

    cov  = (B Sigma^-1 B^T + D_i^-1)^-1
    mean = cov [D_i^-1 d_i + B Sigma^-1 (R_i - Theta^T M_i)]
    """
    if not 0 <= i < g.n:
        raise DimensionError(f"latent index {i} out of range [0, {g.n})")
    Theta, B = g.split_coef(gamma)
    Sig_chol = cholesky_spd(np.asarray(Sigma, dtype=float), "Sigma")
    BSinv = chol_solve(Sig_chol, B.T).T  # B Sigma^-1, (p, m)
    prec = BSinv @ B.T + g.D_inv[i]
    L = cholesky_spd(0.5 * (prec + prec.T), "latent precision")
    resid = g.R[i] - Theta.T @ g.M[i]
    mean = chol_solve(L, g.D_inv_d[i] + BSinv @ resid)
    return ConditionalParams(mean=mean, cov=chol_inverse(L))


# ---------------------------------------------------------------------------
# density, drift, and proof numerics


def log_unnormalized_density(state: ChainState, g: GeneralDensity) -> float:
    """Log of the target density, up to a state-independent constant."""
    state.check_matches(g)
    Sigma = as_spd(state.Sigma, "Sigma")
    Sig_chol = cholesky_spd(Sigma, "Sigma")
    Theta, B = g.split_coef(state.gamma)
    E = g.R - g.M @ Theta - state.A @ B
    alpha = sla.solve_triangular(Sig_chol, E.T, lower=True, check_finite=False)
    quad_lik = float(np.sum(alpha * alpha))
    trace_term = float(np.trace(chol_solve(Sig_chol, g.B0)))
    dA = state.A - g.d
    quad_A = float(np.einsum("ij,ijk,ik->", dA, g.D_inv, dA))
    dg = state.gamma - g.c0
    quad_g = float(dg @ chol_solve(g.C0_chol, dg))
    logdet = 2.0 * float(np.sum(np.log(np.diag(Sig_chol))))
    return (
        -0.5 * (g.n + g.a0 + 1 + g.m) * logdet
        - 0.5 * trace_term
        - 0.5 * quad_lik
        - 0.5 * quad_A
        - 0.5 * quad_g
    )


def drift_value(state: ChainState, g: GeneralDensity) -> float:
    """Lyapunov function: latent and coefficient quadratic forms (not centered
    at c0)."""
    state.check_matches(g)
    dA = state.A - g.d
    quad_A = float(np.einsum("ij,ijk,ik->", dA, g.D_inv, dA))
    quad_g = float(state.gamma @ chol_solve(g.C0_chol, state.gamma))
    return 0.5 * quad_A + 0.5 * quad_g


def coupling_norm(g: GeneralDensity) -> float:
    """Spectral norm of (I_m (x) [M Xtilde]) C0^(1/2), Xtilde = (d_1..d_n)^T.

    The Kronecker lift makes the design-prior coupling norm well defined
    for m > 1; for m = 1 it equals the 2-norm of [M Xtilde] C0^(1/2).
    """
    G = np.hstack([g.M, g.d])
    big = np.kron(np.eye(g.m), G) @ symmetric_sqrt(g.C0, "C0")
    return float(np.linalg.svd(big, compute_uv=False)[0])


def drift_bound(g: GeneralDensity) -> float:
    """Explicit one-sweep bound L with E[V(next) | any state] <= L."""
    nu = g.n + g.a0
    tB = float(np.trace(chol_inverse(g.B0_chol)))
    r2 = float(np.sum(g.R * g.R))
    cQc = float(g.c0 @ g.C0_inv_c0)
    s2 = coupling_norm(g) ** 2
    mk = g.coef_dim
    return (
        nu * tB * (r2 / 2.0 + s2 * mk / 4.0 + s2 * cQc / 2.0)
        + nu * (nu + 1.0) * tB**2 * s2 * r2 / 8.0
        + g.p * g.n / 2.0
        + cQc
        + mk / 2.0
    )


@dataclass
class ProofCheck:
    name: str
    kind: str  # "identity" or "bound"
    worst: float  # max relative error (identity) or min slack (bound)
    passed: bool


@dataclass
class ProofIdentityReport:
    checks: list[ProofCheck] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def summary(self) -> str:
        lines = []
        for c in self.checks:
            tag = "ok " if c.passed else "FAIL"
            what = "max rel err" if c.kind == "identity" else "min slack"
            lines.append(f"[{tag}] {c.name}: {what} = {c.worst:.3e}")
        return "\n".join(lines)


def _random_spd(dim: int, rng: RngStream) -> np.ndarray:
    F = rng.standard_normal((dim, dim + 2))
    return F @ F.T / (dim + 2) + 0.1 * np.eye(dim)


def proof_identities_check(
    rng: RngStream,
    trials: int = 100,
    p: int = 3,
    m: int = 2,
    n: int = 4,
    q: int = 2,
    tol: float = 1e-8,
) -> ProofIdentityReport:
    """Numerically exercise the algebra behind the one-sweep drift bound.

    Checks, on randomized SPD/arbitrary inputs: the latent and
    coefficient resolvent identities through singular value
    decompositions, the conditional mean-shift identity, the scalar
    inequality x/(x^2 + a) <= 1/(2 sqrt(a)), and the two trace bounds.
    Failures are reported, not raised.
    """
    err_latent = err_coef = err_shift = 0.0
    slack_scalar = slack_tr1 = slack_tr2 = np.inf
    mk = m * (q + p)
    for _ in range(trials):
        D = _random_spd(p, rng)
        Sigma = _random_spd(m, rng)
        B = rng.standard_normal((p, m))
        Dh = symmetric_sqrt(D)
        Sig_inv = chol_inverse(cholesky_spd(Sigma))
        Sih = symmetric_sqrt(Sig_inv)

        lhs = np.linalg.inv(B @ Sig_inv @ B.T + np.linalg.inv(D))
        U, sv, _ = np.linalg.svd(Dh @ B @ Sih)
        svfull = np.zeros(p)
        svfull[: sv.size] = sv
        rhs = Dh @ U @ np.diag(1.0 / (svfull**2 + 1.0)) @ U.T @ Dh
        err_latent = max(err_latent, np.abs(lhs - rhs).max() / np.abs(lhs).max())

        tr1 = 0.5 * np.trace(
            np.linalg.inv(Dh) @ lhs @ np.linalg.inv(Dh)
        )
        slack_tr1 = min(slack_tr1, p / 2.0 - tr1)

        # mean-shift identity for the latent conditional mean
        d_i = rng.standard_normal(p)
        r_i = rng.standard_normal(m)  # plays R_i - Theta^T M_i
        Dinv = np.linalg.inv(D)
        direct = lhs @ (Dinv @ d_i + B @ Sig_inv @ r_i)
        shifted = d_i + lhs @ (B @ Sig_inv @ (r_i - B.T @ d_i))
        err_shift = max(
            err_shift, np.abs(direct - shifted).max() / max(np.abs(direct).max(), 1.0)
        )

        # coefficient resolvent identity
        C0 = _random_spd(mk, rng)
        G = rng.standard_normal((n, q + p))
        C0h = symmetric_sqrt(C0)
        C0inv = np.linalg.inv(C0)
        lhs_c = np.linalg.inv(np.kron(Sig_inv, G.T @ G) + C0inv)
        Kmat = np.kron(Sih, G) @ C0h
        _, sv_c, Vt = np.linalg.svd(Kmat)
        svfull_c = np.zeros(mk)
        svfull_c[: sv_c.size] = sv_c
        rhs_c = C0h @ Vt.T @ np.diag(1.0 / (svfull_c**2 + 1.0)) @ Vt @ C0h
        err_coef = max(err_coef, np.abs(lhs_c - rhs_c).max() / np.abs(lhs_c).max())

        tr2 = 0.5 * np.trace(np.linalg.inv(C0h) @ lhs_c @ np.linalg.inv(C0h))
        slack_tr2 = min(slack_tr2, mk / 2.0 - tr2)

        x = float(rng.generator.uniform(0.0, 10.0))
        a = float(rng.generator.uniform(1e-3, 10.0))
        slack_scalar = min(slack_scalar, 1.0 / (2.0 * np.sqrt(a)) - x / (x**2 + a))

    report = ProofIdentityReport()
    report.checks.append(
        ProofCheck("latent resolvent identity", "identity", err_latent, err_latent <= tol)
    )
    report.checks.append(
        ProofCheck("coefficient resolvent identity", "identity", err_coef, err_coef <= tol)
    )
    report.checks.append(
        ProofCheck("conditional mean-shift identity", "identity", err_shift, err_shift <= 1e-10)
    )
    report.checks.append(
        ProofCheck("scalar inequality x/(x^2+a) <= 1/(2 sqrt a)", "bound",
                   slack_scalar, slack_scalar >= 0.0)
    )
    report.checks.append(
        ProofCheck("latent trace bound <= p/2", "bound", slack_tr1, slack_tr1 >= 0.0)
    )
    report.checks.append(
        ProofCheck("coefficient trace bound <= m(p+q)/2", "bound", slack_tr2, slack_tr2 >= 0.0)
    )
    return report
