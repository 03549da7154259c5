"""Exact distributional computations over the tree space.

The partition function z_q = det(L_q + J/p^2) and the marginal connecting
probabilities are evaluated with shifted weights q - max(q): the shift is
compensated exactly in log z and cancels inside the probability formula.
"""

import logging
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy.linalg import cho_factor, cho_solve

from spantree.errors import DisconnectedSupportError
from spantree.tree import SpanningTree, prufer_to_edges

log = logging.getLogger(__name__)

CLAMP_WARN_TOL = 1e-6


@dataclass(frozen=True)
class TreePosteriorSummary:
    logZ: float
    mcp: np.ndarray
    shift: float


def _shifted_laplacian(q):
    p = q.shape[0]
    off = q[~np.eye(p, dtype=bool)]
    finite = off[np.isfinite(off)]
    if finite.size == 0:
        raise DisconnectedSupportError("no finite edge weights")
    c = float(finite.max())
    with np.errstate(over="ignore"):
        a = np.exp(q - c)
    a[~np.isfinite(q)] = 0.0
    np.fill_diagonal(a, 0.0)
    lap = np.diag(a.sum(axis=1)) - a
    return lap + 1.0 / p**2, c


def _logdet_psd(k):
    """Log-determinant of the augmented Laplacian.

    Cholesky first; with extreme weight ranges (shifted weights spanning
    hundreds of log units) roundoff can push a leading minor slightly
    negative, so fall back to an LU-based slogdet before giving up.
    """
    try:
        factor, _ = cho_factor(k, lower=True)
        return 2.0 * np.sum(np.log(np.diag(factor)))
    except np.linalg.LinAlgError:
        sign, logdet = np.linalg.slogdet(k)
        if sign <= 0 or not np.isfinite(logdet):
            raise DisconnectedSupportError(
                "Laplacian is numerically singular; support graph disconnected"
            )
        return logdet


def log_partition(q):
    """log z_q via det(L_q + J/p^2) computed on shifted weights."""
    p = q.shape[0]
    k, c = _shifted_laplacian(q)
    return _logdet_psd(k) + (p - 1) * c


def marginal_connecting_probabilities(q):
    """Closed-form pr[T contains (j,k) | y] for every pair, plus log z_q."""
    p = q.shape[0]
    k, c = _shifted_laplacian(q)
    try:
        factor = cho_factor(k, lower=True)
        logz = 2.0 * np.sum(np.log(np.diag(factor[0]))) + (p - 1) * c
        omega = cho_solve(factor, np.eye(p))
    except np.linalg.LinAlgError:
        logz = _logdet_psd(k) + (p - 1) * c
        omega = np.linalg.solve(k, np.eye(p))
    d = np.diag(omega)
    with np.errstate(over="ignore"):
        a = np.exp(q - c)
    a[~np.isfinite(q)] = 0.0
    np.fill_diagonal(a, 0.0)
    mcp = (d[:, None] + d[None, :] - 2.0 * omega) * a
    np.fill_diagonal(mcp, 0.0)
    worst = max(float(-mcp.min(initial=0.0)), float((mcp - 1.0).max(initial=0.0)))
    if worst > CLAMP_WARN_TOL:
        log.warning("mcp clamped by %.3e; Laplacian poorly conditioned", worst)
    np.clip(mcp, 0.0, 1.0, out=mcp)
    mcp = 0.5 * (mcp + mcp.T)
    return TreePosteriorSummary(logZ=float(logz), mcp=mcp, shift=c)


def enumerate_trees(p):
    """All labeled spanning trees on p nodes via Prufer sequences (p <= 8)."""
    if p > 8:
        raise ValueError("tree enumeration limited to p <= 8")
    if p == 1:
        return [SpanningTree.from_edges(1, [])]
    if p == 2:
        return [SpanningTree.from_edges(2, [(0, 1)])]
    return [
        SpanningTree.from_edges(p, prufer_to_edges(seq, p))
        for seq in product(range(p), repeat=p - 2)
    ]


def tree_log_posterior_unnormalized(tree, q):
    """Sum of q over the tree's edges; -inf (zero mass) if any edge is blocked."""
    total = 0.0
    for j, k in tree.edges:
        total += q[j, k]
    return float(total)
