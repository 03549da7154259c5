"""Conditional posterior-mode tree, plug-in global-scale estimate, the oracle
tree of a covariance matrix, and the separability diagnostic."""

import warnings
from dataclasses import dataclass

import numpy as np

from spantree.distribution import enumerate_trees
from spantree.errors import DisconnectedSupportError
from spantree.tree import SpanningTree
from spantree.weights import PairwiseDistances


def prim_mode(q):
    """Maximum-total-q spanning tree by Prim's greedy growth from node 0.

    The minimum-spanning-tree problem is M-convex, so the greedy optimum is
    global.  Ties are broken toward the lexicographically smallest (l, l')
    pair for determinism.
    """
    p = q.shape[0]
    in_tree = np.zeros(p, dtype=bool)
    in_tree[0] = True
    best_val = q[0].copy()
    best_from = np.zeros(p, dtype=np.intp)
    best_val[0] = -np.inf
    edges = []
    for _ in range(p - 1):
        masked = np.where(in_tree, -np.inf, best_val)
        top = masked.max()
        if not np.isfinite(top):
            unreachable = int(np.flatnonzero(~in_tree & ~np.isfinite(best_val))[0])
            raise DisconnectedSupportError(
                "node %d unreachable through finite weights" % unreachable
            )
        ties = np.flatnonzero(masked == top)
        nxt = int(ties[np.lexsort((ties, best_from[ties]))[0]])
        edges.append((int(best_from[nxt]), nxt))
        in_tree[nxt] = True
        row = q[nxt]
        better = ~in_tree & (
            (row > best_val) | ((row == best_val) & (nxt < best_from))
        )
        best_val[better] = row[better]
        best_from[better] = nxt
    return SpanningTree.from_edges(p, edges)


def kruskal_mode(q):
    """Kruskal cross-check for prim_mode: maximum spanning tree of q."""
    p = q.shape[0]
    pairs = [(j, k) for j in range(p) for k in range(j + 1, p) if np.isfinite(q[j, k])]
    pairs.sort(key=lambda e: (-q[e[0], e[1]], e))
    parent = list(range(p))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    edges = []
    for j, k in pairs:
        rj, rk = find(j), find(k)
        if rj != rk:
            parent[rj] = rk
            edges.append((j, k))
            if len(edges) == p - 1:
                break
    if len(edges) != p - 1:
        raise DisconnectedSupportError("support graph of finite weights disconnected")
    return SpanningTree.from_edges(p, edges)


def tau_hat(tree, data, alpha):
    """Plug-in global scale: alpha * sum of tree-edge distances / [n (p-1)]."""
    dist = PairwiseDistances.from_data(data).dist
    total = sum(dist[j, k] for j, k in tree.edges)
    return alpha * total / (data.n * (tree.p - 1))


def dissimilarity_from_covariance(sigma):
    """W[j,k] = sigma_jj + sigma_kk - 2 sigma_jk (squared contrast variance)."""
    d = np.diag(sigma)
    return d[:, None] + d[None, :] - 2.0 * sigma


def oracle_tree(sigma):
    """Minimum spanning tree of the dissimilarity derived from a SPD covariance."""
    sigma = np.asarray(sigma, dtype=float)
    if not np.allclose(sigma, sigma.T):
        raise ValueError("covariance must be symmetric")
    if np.linalg.eigvalsh(sigma).min() <= 0:
        raise ValueError("covariance must be positive-definite")
    return prim_mode(-dissimilarity_from_covariance(sigma))


def minimum_spanning_trees(w):
    """All MSTs of the complete graph with weights w (enumeration, p <= 8)."""
    p = w.shape[0]
    trees = enumerate_trees(p)
    totals = [sum(w[j, k] for j, k in t.edges) for t in trees]
    best = min(totals)
    tol = 1e-12 * max(1.0, abs(best))
    return [t for t, tot in zip(trees, totals) if tot <= best + tol]


def _tree_path(tree, h, l):
    """Edge sequence of the unique tree path between h and l."""
    adj = {i: [] for i in range(tree.p)}
    for j, k in tree.edges:
        adj[j].append(k)
        adj[k].append(j)
    prev = {h: None}
    stack = [h]
    while stack:
        x = stack.pop()
        if x == l:
            break
        for y in adj[x]:
            if y not in prev:
                prev[y] = x
                stack.append(y)
    path = []
    x = l
    while prev[x] is not None:
        path.append((min(x, prev[x]), max(x, prev[x])))
        x = prev[x]
    return path


@dataclass(frozen=True)
class SeparabilityReport:
    delta: float
    off_edge: tuple
    path_edge: tuple
    trees: list


def separability_delta(w):
    """Smallest gap between an off-MST edge and the edges on its tree path.

    For p <= 8 all minimum spanning trees are enumerated; for larger p the
    single Kruskal MST is used and a warning is issued if the input may admit
    ties.
    """
    w = np.asarray(w, dtype=float)
    p = w.shape[0]
    if p <= 8:
        msts = minimum_spanning_trees(w)
    else:
        iu = np.triu_indices(p, 1)
        if np.unique(w[iu]).size < iu[0].size:
            warnings.warn(
                "tied weights at p > 8: delta computed against a single MST",
                stacklevel=2,
            )
        msts = [kruskal_mode(-w)]
    union = set()
    for t in msts:
        union |= t.edge_set()
    delta = np.inf
    arg = (None, None)
    for h in range(p):
        for l in range(h + 1, p):
            if (h, l) in union:
                continue
            for t in msts:
                for j, k in _tree_path(t, h, l):
                    gap = w[h, l] - w[j, k]
                    if gap < delta:
                        delta = gap
                        arg = ((h, l), (j, k))
    return SeparabilityReport(
        delta=float(delta), off_edge=arg[0], path_edge=arg[1], trees=msts
    )
