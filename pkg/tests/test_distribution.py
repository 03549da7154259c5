import numpy as np
import pytest

from spantree.distribution import (
    enumerate_trees,
    log_partition,
    marginal_connecting_probabilities,
    tree_log_posterior_unnormalized,
)
from spantree.errors import DisconnectedSupportError
from conftest import brute_force_log_partition, brute_force_mcp, random_symmetric_q


def test_log_partition_matches_enumeration():
    rng = np.random.default_rng(0)
    for p in (3, 4, 5, 6):
        for _ in range(10):
            q = random_symmetric_q(p, rng)
            got = log_partition(q)
            want = brute_force_log_partition(q)
            assert abs(got - want) / abs(want) < 1e-10


def test_cayley_counts():
    for p in range(3, 9):
        q = np.zeros((p, p))
        np.fill_diagonal(q, -np.inf)
        want = (p - 2) * np.log(p)
        got = log_partition(q)
        assert abs(got - want) <= 1e-9 * max(1.0, abs(want))


def test_mcp_matches_enumeration():
    rng = np.random.default_rng(1)
    for p in (3, 4, 5, 6):
        q = random_symmetric_q(p, rng)
        got = marginal_connecting_probabilities(q).mcp
        want = brute_force_mcp(q)
        assert np.abs(got - want).max() <= 1e-10


def test_mcp_uniform_weights():
    for p in (3, 5, 8, 20):
        q = np.zeros((p, p))
        np.fill_diagonal(q, -np.inf)
        mcp = marginal_connecting_probabilities(q).mcp
        off = mcp[~np.eye(p, dtype=bool)]
        np.testing.assert_allclose(off, 2.0 / p, atol=1e-10)


def test_mcp_row_sum_identity_large_p():
    rng = np.random.default_rng(2)
    for p in (100, 500):
        q = random_symmetric_q(p, rng, lo=-2.0, hi=2.0)
        mcp = marginal_connecting_probabilities(q).mcp
        total = np.triu(mcp, 1).sum()
        assert abs(total - (p - 1)) < 1e-8 * p


def test_mcp_blocked_edge_is_zero():
    p = 5
    q = random_symmetric_q(p, np.random.default_rng(3))
    q[0, 4] = q[4, 0] = -np.inf
    mcp = marginal_connecting_probabilities(q).mcp
    assert mcp[0, 4] == 0.0


def test_shift_invariance():
    q = random_symmetric_q(5, np.random.default_rng(4))
    c = 7.3
    base = log_partition(q)
    shifted = log_partition(q + c)
    assert abs(shifted - (base + 4 * c)) < 1e-8
    np.testing.assert_allclose(
        marginal_connecting_probabilities(q).mcp,
        marginal_connecting_probabilities(q + c).mcp,
        atol=1e-10,
    )


def test_disconnected_support_raises():
    p = 4
    q = np.full((p, p), -np.inf)
    q[0, 1] = q[1, 0] = 0.0  # nodes 2, 3 unreachable
    with pytest.raises(DisconnectedSupportError):
        log_partition(q)


def test_enumerate_tree_counts():
    assert len(enumerate_trees(2)) == 1
    for p in (3, 4, 5, 6):
        trees = enumerate_trees(p)
        assert len(trees) == p ** (p - 2)
        assert len({t.edge_set() for t in trees}) == len(trees)
    with pytest.raises(ValueError):
        enumerate_trees(9)


def test_posterior_normalization():
    q = random_symmetric_q(5, np.random.default_rng(5))
    logz = log_partition(q)
    total = sum(
        np.exp(tree_log_posterior_unnormalized(t, q) - logz)
        for t in enumerate_trees(5)
    )
    assert abs(total - 1.0) < 1e-10


def test_zero_weights_uniform_posterior():
    p = 5
    q = np.zeros((p, p))
    np.fill_diagonal(q, -np.inf)
    logz = log_partition(q)
    for t in enumerate_trees(p)[:10]:
        assert tree_log_posterior_unnormalized(t, q) == 0.0
        assert abs(np.exp(-logz) - p ** -(p - 2)) < 1e-12
