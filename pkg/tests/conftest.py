import numpy as np
import pytest

from spantree.distribution import enumerate_trees
from spantree.weights import standardize


def random_symmetric_q(p, rng, lo=-3.0, hi=3.0):
    q = rng.uniform(lo, hi, size=(p, p))
    q = np.triu(q, 1)
    q = q + q.T
    np.fill_diagonal(q, -np.inf)
    return q


def brute_force_log_partition(q):
    """Sum over all Prufer-enumerated trees; exact oracle for small p."""
    from scipy.special import logsumexp

    totals = [
        sum(q[j, k] for j, k in t.edges) for t in enumerate_trees(q.shape[0])
    ]
    return float(logsumexp(totals))


def brute_force_mcp(q):
    from scipy.special import logsumexp

    p = q.shape[0]
    trees = enumerate_trees(p)
    totals = np.array([sum(q[j, k] for j, k in t.edges) for t in trees])
    logz = logsumexp(totals)
    prob = np.exp(totals - logz)
    mcp = np.zeros((p, p))
    for t, pr in zip(trees, prob):
        for j, k in t.edges:
            mcp[j, k] += pr
            mcp[k, j] += pr
    return mcp


def bfs_partition(edges, p, cut):
    """Connected components of the tree minus one edge, by breadth-first search."""
    adj = {i: [] for i in range(p)}
    for j, k in edges:
        if (j, k) != cut:
            adj[j].append(k)
            adj[k].append(j)
    seen = {cut[0]}
    queue = [cut[0]]
    while queue:
        x = queue.pop()
        for y in adj[x]:
            if y not in seen:
                seen.add(y)
                queue.append(y)
    v1 = np.array(sorted(seen), dtype=np.intp)
    v2 = np.array(sorted(set(range(p)) - seen), dtype=np.intp)
    return v1, v2


@pytest.fixture
def small_data():
    rng = np.random.default_rng(7)
    return standardize(rng.normal(size=(20, 5)))
