"""Plug-in estimation path: mode tree, tau_hat, and mcp at tau_hat."""

from dataclasses import dataclass

import numpy as np

from spantree.distribution import marginal_connecting_probabilities
from spantree.mode import prim_mode, tau_hat
from spantree.tree import SpanningTree
from spantree.weights import (
    PairwiseDistances,
    TreePrior,
    empirical_tau_prior_mean,
    gdp_log_marginal,
)


@dataclass
class ModeFit:
    tree: SpanningTree
    tau: float
    q: np.ndarray  # log weights at the plug-in tau


def _log_weights(dist, n, alpha, tau, prior):
    q = gdp_log_marginal(dist, n, alpha, tau) + prior.log_eta(dist.shape[0])
    np.fill_diagonal(q, -np.inf)
    return q


def mode_fit(data, alpha=5.0, prior=None, tau_init=None):
    """Mode tree at the initialization scale, then the plug-in tau_hat."""
    prior = prior if prior is not None else TreePrior()
    dist = PairwiseDistances.from_data(data).dist
    tau0 = tau_init if tau_init else empirical_tau_prior_mean(data)
    tree = prim_mode(_log_weights(dist, data.n, alpha, tau0, prior))
    tau = tau_hat(tree, data, alpha)
    q = _log_weights(dist, data.n, alpha, tau, prior)
    return ModeFit(tree=tree, tau=tau, q=q)


def mode_mcp(data, alpha=5.0, prior=None, tau_init=None):
    """ModeFit plus the exact mcp evaluated at the plug-in tau_hat."""
    fit = mode_fit(data, alpha=alpha, prior=prior, tau_init=tau_init)
    summary = marginal_connecting_probabilities(fit.q)
    return fit, summary
