"""Exhaustive enumeration over all graphs on a few nodes.

Feasible up to n = 6 (32768 graphs); used to validate the sampler, the
Monte-Carlo maximum-likelihood fit, and the bridge estimate of the
normalizing constant against exact values.
"""

import numpy as np
from scipy.special import logsumexp

from .errors import ConvergenceError, DataError
from .graph import Graph
from .terms import evaluate_statistics


def dyads(n):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def all_graphs_stat_matrix(model, n, attrs=None):
    """Statistics of every graph on n nodes, one row per edge-set bitmask."""
    if n > 6:
        raise DataError(f"exhaustive enumeration is limited to n <= 6, got {n}")
    ds = dyads(n)
    nd = len(ds)
    out = np.empty((1 << nd, model.p), dtype=np.float64)
    for mask in range(1 << nd):
        g = Graph(n)
        for b in range(nd):
            if mask >> b & 1:
                g.toggle(*ds[b])
        out[mask] = evaluate_statistics(model, g, attrs)
    return out


def exact_logkappa(stat_matrix, theta):
    """log of the normalizing constant at theta."""
    return float(logsumexp(stat_matrix @ np.asarray(theta, dtype=np.float64)))


def exact_loglik(stat_matrix, g_obs, theta):
    theta = np.asarray(theta, dtype=np.float64)
    return float(theta @ g_obs - exact_logkappa(stat_matrix, theta))


def exact_probabilities(stat_matrix, theta):
    logits = stat_matrix @ np.asarray(theta, dtype=np.float64)
    logits -= logits.max()
    w = np.exp(logits)
    return w / w.sum()


def exact_mle(stat_matrix, g_obs, theta0=None, tol=1e-10, max_iter=200):
    """Newton maximizer of the exact likelihood; returns (theta, covariance)."""
    p = stat_matrix.shape[1]
    theta = np.zeros(p) if theta0 is None else np.asarray(theta0, dtype=np.float64).copy()
    for _ in range(max_iter):
        w = exact_probabilities(stat_matrix, theta)
        mean = w @ stat_matrix
        centered = stat_matrix - mean
        info = (centered * w[:, None]).T @ centered
        grad = g_obs - mean
        try:
            step = np.linalg.solve(info, grad)
        except np.linalg.LinAlgError as e:
            raise ConvergenceError(f"exact MLE information matrix singular: {e}")
        norm = np.abs(step).max()
        if norm > 1.0:
            step = step / norm
        theta = theta + step
        if np.abs(step).max() < tol:
            cov = np.linalg.inv(info)
            return theta, cov
    raise ConvergenceError("exact MLE Newton iteration did not converge")
