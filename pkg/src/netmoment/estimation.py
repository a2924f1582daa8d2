"""Moment estimation of degree and homophily parameters.

The estimating equations match observed degrees and covariate-weighted edge
sums to their expectations under the edge-marginal family.  They are solved
by alternation: an inner diagonally preconditioned quasi-Newton pass drives
the degree residuals to zero at fixed homophily coefficients, and an outer
Newton step on the profiled covariate residuals updates the coefficients.
The profile Jacobian doubles as the curvature matrix for the analytic
incidental-parameter bias correction and for sandwich standard errors.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DataError, DegenerateDegreeError, NonConvergenceError, SingularDesignError
from .families import get_family, initial_degree_params
from .network import check_diagonally_balanced, covariate_magnitude


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances and iteration caps for the alternating solver.

    ``damping`` scales the inner degree-parameter update.  The default is
    0.5: the all-ones vector is an exact eigenvector of the preconditioned
    update with eigenvalue 2, so an undamped step oscillates along it and
    never converges; halving the step makes the iteration a contraction.
    """

    tol_f: float = 1e-8
    tol_q: float = 1e-8
    max_outer: int = 200
    max_inner_beta: int = 500
    damping: float = 0.5

    def __post_init__(self):
        if self.tol_f <= 0 or self.tol_q <= 0:
            raise DataError("tolerances must be positive")
        if self.max_outer < 1 or self.max_inner_beta < 1:
            raise DataError("iteration caps must be at least 1")
        if not 0 < self.damping <= 1:
            raise DataError("damping must lie in (0, 1]")


@dataclass(frozen=True)
class Params:
    """Degree parameters (one per node) and homophily coefficients."""

    beta: np.ndarray
    gamma: np.ndarray


@dataclass
class FitResult:
    """Converged estimates with bias correction, errors, and diagnostics."""

    beta: np.ndarray
    gamma: np.ndarray
    gamma_bc: np.ndarray
    se_beta: np.ndarray
    se_gamma: np.ndarray
    bias: np.ndarray
    profile_hessian: np.ndarray
    converged: bool
    iterations: int
    residual_degree: float
    residual_covariate: float
    diagnostics: dict = field(default_factory=dict)
    trace: list = field(default_factory=list)

    @property
    def params(self):
        return Params(self.beta, self.gamma)


def _pair_index(data, beta, gamma):
    """Index value beta_i + beta_j + z_ij . gamma for every pair."""
    return beta[data.rows] + beta[data.cols] + data.covariates @ gamma


def degree_residuals(data, family, beta, gamma):
    """Observed minus expected degrees, one entry per node."""
    family = get_family(family)
    mu = family.mean(_pair_index(data, beta, gamma))
    return data.degrees - data.node_pair_sums(mu)


def covariate_residuals(data, family, beta, gamma):
    """Covariate-weighted sum of edge residuals over unordered pairs."""
    family = get_family(family)
    mu = family.mean(_pair_index(data, beta, gamma))
    return data.covariates.T @ (data.pair_weights - mu)


def degree_jacobian(data, family, beta, gamma):
    """Jacobian of the degree residuals in the degree parameters.

    Dense (n, n) matrix with entries -mu'(pi_ij) off the diagonal and
    -sum_{j != i} mu'(pi_ij) on it; its negation is diagonally balanced
    with positive entries.
    """
    family = get_family(family)
    slope = family.mean_slope(_pair_index(data, beta, gamma))
    n = data.n
    v = np.zeros((n, n))
    v[data.rows, data.cols] = -slope
    v[data.cols, data.rows] = -slope
    v[np.diag_indices(n)] = -data.node_pair_sums(slope)
    return v


def check_interior_degrees(data, family):
    """Raise unless every degree admits a finite degree parameter.

    Binary families need 0 < d_i < n - 1; count families need d_i > 0.
    """
    family = get_family(family)
    d = data.degrees
    if family.support == "binary":
        bad = np.nonzero((d <= 0.0) | (d >= data.n - 1))[0]
    else:
        bad = np.nonzero(d <= 0.0)[0]
    if bad.size:
        raise DegenerateDegreeError(
            "degrees of nodes {} are on the boundary of their achievable "
            "range; no finite degree parameters exist".format(bad.tolist()),
            nodes=bad,
        )


def solve_degree_params(data, family, gamma, config=None, beta_init=None, method="preconditioned"):
    """Solve the degree equations at fixed homophily coefficients.

    ``method="preconditioned"`` (any family) takes damped quasi-Newton steps
    beta += damping * F / v, where v holds the per-node sums of the mean
    slopes, i.e. the diagonal-inverse approximation to the Jacobian.
    ``method="log_ratio"`` (logistic only) is the classical log-ratio fixed
    point for degree-parameter models; both land on the same root.

    Returns (beta, iterations, residual_norm) with the residual in the
    infinity norm at or below ``config.tol_f``.
    """
    family = get_family(family)
    config = config or SolverConfig()
    check_interior_degrees(data, family)

    gamma = np.asarray(gamma, dtype=float)
    zg = data.covariates @ gamma
    d = data.degrees
    if beta_init is None:
        beta = initial_degree_params(family, d, data.n)
    else:
        beta = np.array(beta_init, dtype=float)

    if method == "log_ratio" and family.name != "logistic":
        raise DataError("the log-ratio update applies to the logistic family only")
    if method not in ("preconditioned", "log_ratio"):
        raise DataError(f"unknown degree solver method {method!r}")

    residual = np.inf
    for it in range(1, config.max_inner_beta + 1):
        pi = beta[data.rows] + beta[data.cols] + zg
        mu = family.mean(pi)
        f = d - data.node_pair_sums(mu)
        residual = float(np.abs(f).max())
        if residual <= config.tol_f:
            return beta, it, residual
        if method == "preconditioned":
            v = data.node_pair_sums(family.mean_slope(pi))
            if not np.all(v > 0.0):
                raise NonConvergenceError(
                    "degree solver diverged: mean-slope row sums underflowed "
                    f"to zero (last residual {residual:.3e})",
                    residual=residual,
                )
            beta = beta + config.damping * f / v
        else:
            # beta_i <- log d_i - log sum_{j != i} exp(beta_j + zg_ij - log(1 + e^pi))
            log_term = -np.logaddexp(0.0, pi)
            contrib_rows = np.exp(beta[data.cols] + zg + log_term)
            contrib_cols = np.exp(beta[data.rows] + zg + log_term)
            totals = np.bincount(data.rows, weights=contrib_rows, minlength=data.n)
            totals += np.bincount(data.cols, weights=contrib_cols, minlength=data.n)
            beta = np.log(d) - np.log(totals)
        if not np.all(np.isfinite(beta)):
            raise NonConvergenceError(
                f"degree solver diverged to non-finite values "
                f"(last residual {residual:.3e})",
                residual=residual,
            )

    raise NonConvergenceError(
        f"degree solver did not reach tol_f={config.tol_f} within "
        f"{config.max_inner_beta} iterations (last residual {residual:.3e})",
        residual=residual,
    )


def profile_residuals(data, family, gamma, config=None, beta_init=None):
    """Covariate residuals with the degree parameters concentrated out."""
    beta, _, _ = solve_degree_params(data, family, gamma, config, beta_init)
    return covariate_residuals(data, family, beta, gamma)


def _profile_jacobian_scaled(data, family, beta, gamma):
    """Profile Jacobian plus the magnitude of its unprofiled first block.

    The scale is used to recognize designs that the degree effects absorb
    completely: there the two blocks cancel and H collapses to rounding
    noise, which a raw solve would not flag as singular.
    """
    family = get_family(family)
    z = data.covariates
    slope = family.mean_slope(_pair_index(data, beta, gamma))
    dq_dgamma = -(z * slope[:, None]).T @ z
    df_dgamma = -data.node_pair_sums(z * slope[:, None])
    v = degree_jacobian(data, family, beta, gamma)
    try:
        solved = np.linalg.solve(v, df_dgamma)
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError(f"degree Jacobian is singular: {exc}") from exc
    h = dq_dgamma - df_dgamma.T @ solved
    return h, float(np.abs(dq_dgamma).max())


def profile_jacobian(data, family, beta, gamma):
    """Derivative of the profiled covariate residuals in the coefficients.

    Assembled from the analytic blocks of the joint system; the inner solve
    against the degree Jacobian uses a dense factorization, not the diagonal
    approximation, because this matrix feeds bias correction and standard
    errors.
    """
    return _profile_jacobian_scaled(data, family, beta, gamma)[0]


def _assert_profile_invertible(h, scale):
    """Raise unless H is usable for Newton steps and inference.

    Collinearity with the degree effects shows up as H tiny relative to
    the unprofiled curvature (scale), or as a degenerate eigenvalue ratio.
    """
    if not np.all(np.isfinite(h)):
        raise SingularDesignError("profile Jacobian has non-finite entries")
    magnitude = np.abs(h).max()
    if magnitude <= 1e-10 * max(scale, np.finfo(float).tiny):
        raise SingularDesignError(
            "profile Jacobian vanishes: the covariate design is collinear "
            "with the degree effects"
        )
    eigvals = np.abs(np.linalg.eigvalsh(0.5 * (h + h.T)))
    if eigvals.min() <= 1e-12 * eigvals.max():
        raise SingularDesignError(
            "profile Jacobian is rank deficient: collinear covariate columns"
        )


def homophily_bias(data, family, beta, gamma):
    """Leading incidental-parameter bias of the homophily coefficients.

    Averages, over nodes, the ratio of covariate-weighted second mean
    derivatives to summed first derivatives, scaled by 1 / (2 sqrt(N)) with
    N = n (n - 1) ordered pairs.
    """
    family = get_family(family)
    z = data.covariates
    _, m2, _ = family.mean_derivs(_pair_index(data, beta, gamma))
    slope_sums = data.node_pair_sums(family.mean_slope(_pair_index(data, beta, gamma)))
    if np.any(slope_sums <= 0.0):
        raise DataError("mean-slope row sums must be strictly positive")
    weighted = data.node_pair_sums(z * m2[:, None])
    n_ordered = data.n * (data.n - 1)
    return (weighted / slope_sums[:, None]).sum(axis=0) / (2.0 * np.sqrt(n_ordered))


def bias_correct(gamma, profile_hessian, bias, n):
    """Analytic bias correction: subtract sqrt(N) H^{-1} B from the estimate."""
    n_ordered = n * (n - 1)
    try:
        step = np.linalg.solve(profile_hessian, bias)
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError(f"profile Jacobian is singular: {exc}") from exc
    return np.asarray(gamma, dtype=float) - np.sqrt(n_ordered) * step


def standard_errors(data, family, beta, gamma):
    """Plug-in standard errors at the fitted parameters.

    Degree parameters: sqrt of the summed edge variances divided by the
    summed mean slopes for each node.  Homophily coefficients: sandwich of
    the profile Jacobian around the outer products of the concentrated
    per-pair scores.  Valid under independent dyads.
    """
    family = get_family(family)
    pi = _pair_index(data, beta, gamma)
    slope = family.mean_slope(pi)
    var = family.variance(pi)
    v_ii = data.node_pair_sums(slope)
    se_beta = np.sqrt(data.node_pair_sums(var)) / v_ii

    z = data.covariates
    resid = data.pair_weights - family.mean(pi)
    v = degree_jacobian(data, family, beta, gamma)
    df_dgamma = -data.node_pair_sums(z * slope[:, None])
    try:
        # V^{-1} (dQ/dbeta)^T, using dQ/dbeta = (dF/dgamma)^T and V = V^T
        proj = np.linalg.solve(v, df_dgamma)
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError(f"degree Jacobian is singular: {exc}") from exc
    # concentrated score per pair: z r - (dQ/dbeta) V^{-1} (r T_ij)
    score = z * resid[:, None] - resid[:, None] * (proj[data.rows] + proj[data.cols])
    omega_sum = score.T @ score
    h, scale = _profile_jacobian_scaled(data, family, beta, gamma)
    _assert_profile_invertible(h, scale)
    try:
        cov_gamma = np.linalg.solve(h, np.linalg.solve(h, omega_sum).T)
    except np.linalg.LinAlgError as exc:
        raise SingularDesignError(f"profile Jacobian is singular: {exc}") from exc
    se_gamma = np.sqrt(np.diag(cov_gamma))
    return se_beta, se_gamma


def _diagnostics(data, family, beta, gamma, profile_hessian):
    neg_v = -degree_jacobian(data, family, beta, gamma)
    balance = check_diagonally_balanced(neg_v)
    n_ordered = data.n * (data.n - 1)
    hbar = profile_hessian / n_ordered
    eigvals = np.linalg.eigvalsh(0.5 * (hbar + hbar.T))
    return {
        "m_n": balance.min_offdiag,
        "M_n": balance.max_offdiag,
        "kappa_n": covariate_magnitude(data),
        # invertibility margin: magnitude of the eigenvalue closest to zero
        "lambda_min_Hbar": float(np.abs(eigvals).min()),
    }


def fit(data, family, config=None, init=None):
    """Fit degree and homophily parameters by alternating moment matching.

    Each outer pass re-solves the degree equations at the current
    coefficients (warm-started), then applies one Newton step on the
    profiled covariate residuals.  Convergence means both residual norms
    are at or below their tolerances; the returned result carries the
    bias-corrected coefficients, standard errors, and solver diagnostics.

    Raises ``DegenerateDegreeError`` for boundary degrees,
    ``SingularDesignError`` for collinear covariate designs, and
    ``NonConvergenceError`` (with the iteration trace attached) when the
    outer cap is reached.
    """
    family = get_family(family)
    config = config or SolverConfig()
    check_interior_degrees(data, family)

    if init is not None:
        beta = np.array(init.beta, dtype=float)
        gamma = np.array(init.gamma, dtype=float)
    else:
        beta = initial_degree_params(family, data.degrees, data.n)
        gamma = np.zeros(data.n_covariates)

    trace = []
    converged = False
    f_norm = q_norm = np.inf
    outer = 0
    for outer in range(1, config.max_outer + 1):
        beta, _, f_norm = solve_degree_params(
            data, family, gamma, config, beta_init=beta
        )
        qc = covariate_residuals(data, family, beta, gamma)
        q_norm = float(np.abs(qc).max())
        trace.append(
            {
                "outer": outer,
                "residual_degree": f_norm,
                "residual_covariate": q_norm,
                "gamma": gamma.tolist(),
            }
        )
        if q_norm <= config.tol_q:
            converged = True
            break
        h, scale = _profile_jacobian_scaled(data, family, beta, gamma)
        _assert_profile_invertible(h, scale)
        try:
            step = np.linalg.solve(h, qc)
        except np.linalg.LinAlgError as exc:
            raise SingularDesignError(
                "profile Jacobian is singular; covariate design is collinear "
                f"with the degree effects ({exc})"
            ) from exc
        if not np.all(np.isfinite(step)):
            raise SingularDesignError("profile Newton step is not finite")
        gamma = gamma - step

    if not converged:
        raise NonConvergenceError(
            f"no convergence within {config.max_outer} outer iterations "
            f"(residuals: degree {f_norm:.3e}, covariate {q_norm:.3e})",
            residual=q_norm,
            trace=trace,
        )

    h_hat, scale = _profile_jacobian_scaled(data, family, beta, gamma)
    _assert_profile_invertible(h_hat, scale)
    bias = homophily_bias(data, family, beta, gamma)
    gamma_bc = bias_correct(gamma, h_hat, bias, data.n)
    se_beta, se_gamma = standard_errors(data, family, beta, gamma)
    return FitResult(
        beta=beta,
        gamma=gamma,
        gamma_bc=gamma_bc,
        se_beta=se_beta,
        se_gamma=se_gamma,
        bias=bias,
        profile_hessian=h_hat,
        converged=True,
        iterations=outer,
        residual_degree=f_norm,
        residual_covariate=q_norm,
        diagnostics=_diagnostics(data, family, beta, gamma, h_hat),
        trace=trace,
    )
