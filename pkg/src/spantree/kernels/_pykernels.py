"""Pure-NumPy backend for the per-edge tree-update kernels.

All kernels operate on the edge-endpoint arrays ``ej``/``ek`` (canonical
j < k, 0-based) and the cached Gram inverse ``minv`` = (B^T B)^{-1} of the
incidence matrix.  The incidence matrix itself is never materialized here:
every column has exactly two nonzeros, so all products with B reduce to
indexed adds.
"""

import numpy as np

from spantree.errors import DisconnectedSupportError, GramDriftError

BACKEND = "python"

# Relative spread (w.r.t. the gap between the two cluster values) above which
# the projected cut vector is declared corrupted.
_CLUSTER_RTOL = 1e-2
# Threshold on b*^T P b* below which a replacement edge does not cross the cut.
_CROSSING_TOL = 1e-8


def reduced_gram_inverse(minv, s):
    """(B_[-s]^T B_[-s])^{-1} extracted from minv by block reads and one division."""
    m22 = minv[s, s]
    if m22 <= 0.0:
        raise GramDriftError("non-positive pivot in cached Gram inverse")
    m12 = np.delete(minv[:, s], s)
    m11 = np.delete(np.delete(minv, s, axis=0), s, axis=1)
    return m11 - np.outer(m12, m12) / m22


def _column_dots(ej, ek, s, a, b):
    """Dots of every incidence column except s with the +/-1 column of edge (a, b)."""
    p = ej.shape[0] + 1
    col = np.zeros(p)
    col[a] = 1.0
    col[b] = -1.0
    u = col[ej] - col[ek]
    return np.delete(u, s)


def cut_vector(minv, ej, ek, s):
    """Projection of column s onto the nullspace of the remaining columns."""
    p = ej.shape[0] + 1
    g = reduced_gram_inverse(minv, s)
    j, k = ej[s], ek[s]
    u = _column_dots(ej, ek, s, j, k)
    w = g @ u
    ejm = np.delete(ej, s)
    ekm = np.delete(ek, s)
    beta = np.zeros(p)
    beta[j] = 1.0
    beta[k] = -1.0
    beta -= np.bincount(ejm, weights=w, minlength=p)
    beta += np.bincount(ekm, weights=w, minlength=p)
    return beta


def partition_from_cut_vector(beta, j, k):
    """Assign nodes to the endpoint whose cut value is nearer; validate 2 clusters."""
    dj = np.abs(beta - beta[j])
    dk = np.abs(beta - beta[k])
    in_v1 = dj < dk
    gap = abs(beta[j] - beta[k])
    spread = max(np.max(dj[in_v1], initial=0.0), np.max(dk[~in_v1], initial=0.0))
    if gap <= 0.0 or spread > _CLUSTER_RTOL * gap:
        raise GramDriftError("cut vector does not split into two value clusters")
    return np.flatnonzero(in_v1), np.flatnonzero(~in_v1)


def swap_gram_inverse(minv, ej, ek, s, jn, kn):
    """Update minv in place for replacing edge s by (jn, kn); then record the edge."""
    m = ej.shape[0]
    g = reduced_gram_inverse(minv, s)
    u = _column_dots(ej, ek, s, jn, kn)
    w = g @ u
    denom = 2.0 - u @ w
    if denom <= _CROSSING_TOL:
        raise GramDriftError(
            "replacement edge (%d, %d) does not cross the cut of edge %d" % (jn, kn, s)
        )
    m22 = 1.0 / denom
    m12 = -w * m22
    keep = np.arange(m) != s
    minv[np.ix_(keep, keep)] = g + np.outer(w, w) * m22
    minv[keep, s] = m12
    minv[s, keep] = m12
    minv[s, s] = m22
    ej[s] = jn
    ek[s] = kn


def gibbs_edge_update(minv, ej, ek, s, q, u):
    """One cut-and-reconnect move for edge s, driven by a single uniform draw.

    Samples the replacement from the multinomial over all V1 x V2 pairs with
    probability proportional to exp(q), via inverse-CDF after a max shift.
    Mutates minv/ej/ek in place when the edge changes.  Returns (j', k',
    swapped).
    """
    p = ej.shape[0] + 1
    j, k = ej[s], ek[s]
    g = reduced_gram_inverse(minv, s)
    u1 = _column_dots(ej, ek, s, j, k)
    w1 = g @ u1
    ejm = np.delete(ej, s)
    ekm = np.delete(ek, s)
    beta = np.zeros(p)
    beta[j] = 1.0
    beta[k] = -1.0
    beta -= np.bincount(ejm, weights=w1, minlength=p)
    beta += np.bincount(ekm, weights=w1, minlength=p)
    v1, v2 = partition_from_cut_vector(beta, j, k)

    logw = q[np.ix_(v1, v2)].ravel()
    qmax = np.max(logw)
    if not np.isfinite(qmax):
        raise DisconnectedSupportError(
            "all candidate edges across the cut of edge %d have zero weight" % s
        )
    wts = np.exp(logw - qmax)
    cs = np.cumsum(wts)
    idx = int(np.searchsorted(cs, u * cs[-1], side="right"))
    idx = min(idx, wts.shape[0] - 1)
    a = int(v1[idx // v2.shape[0]])
    b = int(v2[idx % v2.shape[0]])
    jn, kn = (a, b) if a < b else (b, a)
    if jn == j and kn == k:
        return jn, kn, False

    u2 = _column_dots(ej, ek, s, jn, kn)
    w2 = g @ u2
    denom = 2.0 - u2 @ w2
    if denom <= _CROSSING_TOL:
        raise GramDriftError("sampled replacement edge failed the crossing check")
    m22 = 1.0 / denom
    m12 = -w2 * m22
    keep = np.arange(ej.shape[0]) != s
    minv[np.ix_(keep, keep)] = g + np.outer(w2, w2) * m22
    minv[keep, s] = m12
    minv[s, keep] = m12
    minv[s, s] = m22
    ej[s] = jn
    ek[s] = kn
    return jn, kn, True
