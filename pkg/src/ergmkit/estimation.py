"""Parameter estimation: maximum pseudo-likelihood and Monte-Carlo MLE.

MPLE is the logistic regression of edge indicators on dyad change scores.
The Monte-Carlo MLE iterates: sample networks at the current parameters,
approximate the likelihood ratio

    l(t') - l(t) = (t' - t) . g_obs - log( mean_m exp{(t' - t) . g_m} ),

take one damped Newton step per sample refresh (clipped to max-norm 1), and
stop when the update is below tolerance or statistically indistinguishable
from zero at the Monte-Carlo noise level.  The log-likelihood itself is
estimated along a geometric path of bridges from an edges-only reference
model whose constant is analytic.
"""

import math
from dataclasses import dataclass, field, replace

import numpy as np
from scipy.optimize import linprog
from scipy.special import expit, logsumexp
from scipy.stats import norm as _norm

from . import rng, terms
from .errors import (
    BridgeVarianceError,
    ConvergenceError,
    ConvexHullError,
    DataError,
    SeparationError,
)
from .sampler import SamplerControl, sample
from .terms import ModelSpec, dyad_change_matrix, dyad_indicators, evaluate_statistics


@dataclass(eq=False)
class FitResult:
    model: ModelSpec
    theta_hat: np.ndarray
    se: np.ndarray
    covariance: np.ndarray
    loglik: float
    aic: float
    wald_p: np.ndarray
    method: str  # "mple" | "mcmc"
    loglik_kind: str  # "pseudo" | "bridge" | "exact"
    converged: bool
    iterations: int
    seed: int
    n: int
    diagnostics: dict = field(default_factory=dict)

    @property
    def p(self):
        return self.model.p

    def __eq__(self, other):
        if not isinstance(other, FitResult):
            return NotImplemented
        return (
            self.model == other.model
            and np.array_equal(self.theta_hat, other.theta_hat)
            and np.array_equal(self.se, other.se)
            and np.array_equal(self.covariance, other.covariance)
            and self.loglik == other.loglik
            and self.aic == other.aic
            and np.array_equal(self.wald_p, other.wald_p)
            and (self.method, self.loglik_kind) == (other.method, other.loglik_kind)
            and (self.converged, self.iterations) == (other.converged, other.iterations)
            and (self.seed, self.n) == (other.seed, other.n)
            and self.diagnostics == other.diagnostics
        )


@dataclass(frozen=True)
class EstimationControl:
    mcmc: SamplerControl = field(
        default_factory=lambda: SamplerControl(
            burn_in=20_000, interval=1_000, sample_count=1_000
        )
    )
    max_newton_iterations: int = 20
    newton_tolerance: float = 1e-3
    bridge_count: int = 16
    samples_per_bridge: int = 500


def _wald_p(theta, se):
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(se > 0, np.abs(theta) / se, np.inf)
    return 2.0 * _norm.sf(z)


def _check_separation(model, X, y):
    """Flag any single change-score column that strictly separates the classes."""
    edge = y > 0.5
    if not edge.any() or edge.all():
        return
    for c in range(X.shape[1]):
        col = X[:, c]
        lo1, hi1 = col[edge].min(), col[edge].max()
        lo0, hi0 = col[~edge].min(), col[~edge].max()
        if lo1 > hi0 or hi1 < lo0:
            raise SeparationError(model.terms[c].label())


def mple(model, g, attrs=None):
    """Maximum pseudo-likelihood fit by Newton-iterated logistic regression.

    Standard errors come from the inverse observed information, which is
    naive under dyad dependence; the reported likelihood is the
    pseudo-likelihood and is flagged as such.
    """
    terms.require_valid(model, g.n, attrs)
    nd = g.n_dyads
    if g.m == 0:
        raise DataError("graph is empty: edge log-odds are -infinity")
    if g.m == nd:
        raise DataError("graph is complete (density 1): edge log-odds are +infinity")
    X = dyad_change_matrix(model, g, attrs)
    y = dyad_indicators(g)
    _check_separation(model, X, y)

    p = model.p
    beta = np.zeros(p)

    def pseudo_ll(b):
        eta = X @ b
        # log sigma(eta)*y + log(1-sigma(eta))*(1-y), stably
        return float(-(np.logaddexp(0.0, -eta) * y + np.logaddexp(0.0, eta) * (1 - y)).sum())

    ll = pseudo_ll(beta)
    converged = False
    iterations = 0
    for iterations in range(1, 101):
        mu = expit(X @ beta)
        w = mu * (1.0 - mu)
        grad = X.T @ (y - mu)
        info = (X * w[:, None]).T @ X
        try:
            step = np.linalg.solve(info, grad)
        except np.linalg.LinAlgError:
            raise ConvergenceError(
                "singular information matrix in pseudo-likelihood fit"
            )
        # step halving keeps the pseudo-likelihood monotone
        scale = 1.0
        for _ in range(40):
            cand = beta + scale * step
            if pseudo_ll(cand) >= ll - 1e-12:
                break
            scale *= 0.5
        beta = beta + scale * step
        ll = pseudo_ll(beta)
        if np.abs(scale * step).max() < 1e-10:
            converged = True
            break
    if not converged:
        raise ConvergenceError("pseudo-likelihood Newton iteration did not converge")

    mu = expit(X @ beta)
    w = mu * (1.0 - mu)
    info = (X * w[:, None]).T @ X
    cov = np.linalg.inv(info)
    se = np.sqrt(np.diag(cov))
    return FitResult(
        model=model,
        theta_hat=beta,
        se=se,
        covariance=cov,
        loglik=ll,
        aic=2.0 * p - 2.0 * ll,
        wald_p=_wald_p(beta, se),
        method="mple",
        loglik_kind="pseudo",
        converged=True,
        iterations=iterations,
        seed=0,
        n=g.n,
        diagnostics={"dyads": int(nd)},
    )


def _in_convex_hull(points, x, tol=1e-7):
    """LP feasibility: is x a convex combination of the rows of points?"""
    m = points.shape[0]
    a_eq = np.vstack([points.T, np.ones((1, m))])
    b_eq = np.concatenate([x, [1.0]])
    res = linprog(
        c=np.zeros(m), A_eq=a_eq, b_eq=b_eq, bounds=(0, None), method="highs"
    )
    return res.status == 0


def mcmc_mle(model, g, attrs=None, control=None, theta0=None):
    """Monte-Carlo maximum-likelihood fit.

    Starts from the pseudo-likelihood estimate unless theta0 is given.
    Raises ConvexHullError when the observed statistics are not a convex
    combination of the sampled ones (more samples or another start needed),
    DegeneracyError when the sampler collapses, and ConvergenceError when the
    Newton iteration exhausts its budget.
    """
    control = control or EstimationControl()
    terms.require_valid(model, g.n, attrs)
    nd = g.n_dyads
    if g.m == 0 or g.m == nd:
        raise DataError("observed graph must be neither empty nor complete")
    master = control.mcmc.seed
    if theta0 is None:
        theta = mple(model, g, attrs).theta_hat.copy()
    else:
        theta = np.asarray(theta0, dtype=np.float64).copy()
        if theta.shape != (model.p,):
            raise DataError("theta0 length does not match the model")

    g_obs = evaluate_statistics(model, g, attrs)
    M = control.mcmc.sample_count
    converged = False
    G = None
    acceptance = []
    for it in range(1, control.max_newton_iterations + 1):
        ctl = replace(control.mcmc, seed=rng.derive_seeds(master, 1, salt=100 + it)[0])
        batch = sample(
            model, theta, g.n, attrs=attrs, control=ctl, observed=g,
            keep_graphs=False,
        )
        G = batch.stat_trace
        acceptance.append(batch.acceptance_rate)
        if not _in_convex_hull(G, g_obs):
            raise ConvexHullError(
                "observed statistics outside the convex hull of sampled "
                f"statistics at iteration {it}; increase sample_count or "
                "start from different parameters"
            )
        gbar = G.mean(axis=0)
        cov_g = np.cov(G, rowvar=False, ddof=1).reshape(model.p, model.p)
        grad = g_obs - gbar
        try:
            step = np.linalg.solve(cov_g, grad)
        except np.linalg.LinAlgError:
            raise ConvergenceError(
                "sampled-statistic covariance is singular; a term may be "
                "constant under the model"
            )
        norm = np.abs(step).max()
        if norm > 1.0:
            step = step / norm

        def ratio_obj(delta):
            return float(delta @ g_obs - (logsumexp(G @ delta) - math.log(M)))

        scale = 1.0
        for _ in range(30):
            if ratio_obj(scale * step) >= 0.0:
                break
            scale *= 0.5
        step = scale * step
        theta = theta + step

        # Monte-Carlo floor: updates statistically indistinguishable from zero
        try:
            step_var = np.diag(np.linalg.inv(cov_g)) / M
        except np.linalg.LinAlgError:
            step_var = np.full(model.p, np.inf)
        noise = 2.0 * np.sqrt(np.maximum(step_var, 0.0))
        if np.abs(step).max() < control.newton_tolerance or np.all(
            np.abs(step) <= noise
        ):
            converged = True
            break
    if not converged:
        raise ConvergenceError(
            f"Monte-Carlo MLE did not converge in "
            f"{control.max_newton_iterations} iterations"
        )

    # Reweight the final sample (drawn at theta - step) to theta-hat for the
    # information estimate.
    lw = G @ step
    lw -= lw.max()
    w = np.exp(lw)
    w /= w.sum()
    mean_w = w @ G
    centered = G - mean_w
    info = (centered * w[:, None]).T @ centered
    try:
        cov_theta = np.linalg.inv(info)
    except np.linalg.LinAlgError:
        raise ConvergenceError("information matrix singular at the estimate")
    se = np.sqrt(np.maximum(np.diag(cov_theta), 0.0))

    ll = log_likelihood(
        model, g, theta, control, attrs=attrs,
        seed=rng.derive_seeds(master, 1, salt=999)[0],
    )
    p = model.p
    return FitResult(
        model=model,
        theta_hat=theta,
        se=se,
        covariance=cov_theta,
        loglik=ll,
        aic=2.0 * p - 2.0 * ll,
        wald_p=_wald_p(theta, se),
        method="mcmc",
        loglik_kind="bridge",
        converged=True,
        iterations=it,
        seed=int(master),
        n=g.n,
        diagnostics={
            "acceptance_rates": [float(a) for a in acceptance],
            "samples_per_iteration": int(M),
        },
    )


def log_likelihood(model, g, theta_hat, control=None, attrs=None, seed=None):
    """Bridge estimate of the log-likelihood at theta_hat.

    The normalizing constant is carried from an edges-only reference model at
    the observed density (whose constant is analytic) along `bridge_count`
    geometric bridges, each estimated by importance sampling with
    `samples_per_bridge` networks.
    """
    control = control or EstimationControl()
    nd = g.n_dyads
    d = g.m / nd
    if not (0.0 < d < 1.0):
        raise DataError("log-likelihood needs a graph that is neither empty nor complete")
    theta_hat = np.asarray(theta_hat, dtype=np.float64)
    if seed is None:
        seed = rng.derive_seeds(control.mcmc.seed, 1, salt=999)[0]

    edges_idx = model.index_of("edges")
    if edges_idx is None:
        path_model = ModelSpec((terms.edges(),) + model.terms)
        theta1 = np.concatenate([[0.0], theta_hat])
        edges_idx = 0
    else:
        path_model = model
        theta1 = theta_hat.copy()
    theta_ref = np.zeros(path_model.p)
    theta_ref[edges_idx] = math.log(d / (1.0 - d))

    g_obs = evaluate_statistics(path_model, g, attrs)
    log_kappa_ref = nd * math.log1p(math.exp(theta_ref[edges_idx]))

    B = control.bridge_count
    S = control.samples_per_bridge
    delta = (theta1 - theta_ref) / B
    bridge_ctl = SamplerControl(
        burn_in=min(control.mcmc.burn_in, 20_000),
        interval=max(100, control.mcmc.interval // 10),
        sample_count=S,
        proposal=control.mcmc.proposal,
        initial="observed",
    )
    seeds = rng.derive_seeds(seed, B, salt=7)
    total = 0.0
    for b in range(B):
        theta_b = theta_ref + b * delta
        ctl = replace(bridge_ctl, seed=seeds[b])
        batch = sample(
            path_model, theta_b, g.n, attrs=attrs, control=ctl, observed=g,
            keep_graphs=False,
        )
        x = batch.stat_trace @ delta
        shifted = x - x.max()
        w = np.exp(shifted)
        ess = float(w.sum() ** 2 / (w ** 2).sum())
        if ess < max(10.0, S / 50.0):
            raise BridgeVarianceError(b, ess)
        total += float(logsumexp(x) - math.log(S))
    log_kappa = log_kappa_ref + total
    return float(theta1 @ g_obs - log_kappa)
