import numpy as np
import pytest

from spantree.hmm import (
    SeriesData,
    TreeHmmModel,
    TreeHmmSampler,
    brute_force_log_marginal,
    classify_condition,
    emission_log_density,
    ffbs_states,
    forward_log_marginal,
    sample_hmm_series,
    sample_tree_gaussian,
    series_emissions,
)
from spantree.tree import SpanningTree, random_tree


def _toy_model(K=2, p=4, seed=0, tau=0.5):
    rng = np.random.default_rng(seed)
    trees = [random_tree(p, rng) for _ in range(K)]
    q0 = rng.dirichlet(np.ones(K))
    trans = {
        "a": rng.dirichlet(np.ones(K), size=K),
        "b": rng.dirichlet(np.ones(K), size=K),
    }
    return TreeHmmModel(K=K, p=p, trees=trees, q0=q0, trans=trans, tau=tau)


def test_identical_trees_identical_emission():
    rng = np.random.default_rng(1)
    tree = random_tree(5, rng)
    y = rng.normal(size=5)
    assert emission_log_density(y, tree, 0.5, 5.0) == emission_log_density(
        y, tree, 0.5, 5.0
    )
    em = series_emissions(y[None, :], [tree, tree], 0.5, 5.0)
    assert em[0, 0] == em[0, 1]


def test_emission_ordering_matches_edge_distance_sums():
    # Path 1-2-3 vs star at 1 on y = (0, 1, 2): path distances sum to 2,
    # star distances to 3, so the path density is larger.
    y = np.array([0.0, 1.0, 2.0])
    path = SpanningTree.from_edges(3, [(0, 1), (1, 2)])
    star = SpanningTree.from_edges(3, [(0, 1), (0, 2)])
    assert emission_log_density(y, path, 0.5, 5.0) > emission_log_density(
        y, star, 0.5, 5.0
    )


def test_emission_gap_vanishes_for_large_tau():
    rng = np.random.default_rng(2)
    t1, t2 = random_tree(6, rng), random_tree(6, rng)
    y = rng.normal(size=6)
    gaps = []
    for tau in (1.0, 10.0, 1e6):
        a = emission_log_density(y, t1, tau, 5.0)
        b = emission_log_density(y, t2, tau, 5.0)
        gaps.append(abs(a - b))
    assert gaps[2] < gaps[1] < gaps[0]
    assert gaps[2] < 1e-4


def test_forward_matches_brute_force():
    rng = np.random.default_rng(3)
    for K, T in [(2, 6), (3, 8)]:
        em = rng.normal(size=(T, K))
        q0 = rng.dirichlet(np.ones(K))
        trans = rng.dirichlet(np.ones(K), size=K)
        got = forward_log_marginal(em, q0, trans)
        want = brute_force_log_marginal(em, q0, trans)
        assert abs(got - want) / abs(want) < 1e-10


def test_ffbs_single_state_constant():
    rng = np.random.default_rng(4)
    em = rng.normal(size=(10, 1))
    z = ffbs_states(em, np.ones(1), np.ones((1, 1)), rng)
    assert np.all(z == 0)


def test_ffbs_identical_emissions_recovers_prior_chain():
    rng = np.random.default_rng(5)
    K, T = 2, 50
    em = np.zeros((T, K))  # uninformative emissions
    q0 = np.array([0.5, 0.5])
    trans = np.array([[0.9, 0.1], [0.2, 0.8]])
    counts = np.zeros((K, K))
    for _ in range(600):
        z = ffbs_states(em, q0, trans, rng)
        np.add.at(counts, (z[:-1], z[1:]), 1.0)
    emp = counts / counts.sum(axis=1, keepdims=True)
    assert np.abs(emp - trans).max() < 0.03


def test_ffbs_degenerate_emissions_error():
    em = np.full((4, 2), -np.inf)
    with pytest.raises(ValueError):
        ffbs_states(em, np.array([0.5, 0.5]), np.full((2, 2), 0.5),
                    np.random.default_rng(0))


def test_ffbs_state_recovery_separated_trees():
    # Two well-separated trees: chain/star with a small emission scale.
    rng = np.random.default_rng(6)
    p = 8
    chain = SpanningTree.from_edges(p, [(j, j + 1) for j in range(p - 1)])
    star = SpanningTree.from_edges(p, [(0, j) for j in range(1, p)])
    model = TreeHmmModel(
        K=2, p=p, trees=[chain, star],
        q0=np.array([0.5, 0.5]),
        trans={"a": np.array([[0.95, 0.05], [0.05, 0.95]])},
        tau=0.2,
    )
    z_true, Y = sample_hmm_series(model, "a", 200, rng)
    em = series_emissions(Y, model.trees, model.tau, model.alpha)
    z = ffbs_states(em, model.q0, model.trans["a"], rng)
    acc = max(np.mean(z == z_true), np.mean(z == 1 - z_true))
    assert acc >= 0.95


def test_classify_equal_transitions_is_half():
    model = _toy_model(seed=7)
    model.trans["b"] = model.trans["a"].copy()
    rng = np.random.default_rng(8)
    _, Y = sample_hmm_series(model, "a", 30, rng)
    assert abs(classify_condition(Y, model, ["a", "b"]) - 0.5) < 1e-12


def test_classify_label_permutation_invariant():
    model = _toy_model(K=3, p=5, seed=9)
    rng = np.random.default_rng(10)
    _, Y = sample_hmm_series(model, "a", 25, rng)
    base = classify_condition(Y, model, ["a", "b"])
    perm = np.array([2, 0, 1])
    permuted = TreeHmmModel(
        K=3, p=5,
        trees=[model.trees[i] for i in perm],
        q0=model.q0[perm],
        trans={g: m[np.ix_(perm, perm)] for g, m in model.trans.items()},
        tau=model.tau,
    )
    assert abs(classify_condition(Y, permuted, ["a", "b"]) - base) < 1e-10


def test_sample_tree_gaussian_adjacent_increments():
    rng = np.random.default_rng(11)
    tree = SpanningTree.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    draws = np.array([sample_tree_gaussian(tree, 0.1, rng) for _ in range(3000)])
    inc = draws[:, 1] - draws[:, 0]
    assert abs(inc.std() - 0.1) < 0.01


def test_sampler_updates_preserve_row_stochasticity():
    rng = np.random.default_rng(12)
    p, K = 5, 3
    series = [
        SeriesData.from_raw("s%d" % i, "a" if i % 2 else "b",
                            rng.normal(size=(30, p)))
        for i in range(4)
    ]
    sampler = TreeHmmSampler(series, K=K, seed=13)
    fitted = sampler.run(iterations=8, burn_in=4)
    assert abs(fitted.q0_mean.sum() - 1.0) < 1e-10
    for m in fitted.trans_mean.values():
        np.testing.assert_allclose(m.sum(axis=1), 1.0, atol=1e-10)
    for t in fitted.mode_trees:
        assert len(t.edges) == p - 1
    for (_, _), z in fitted.assignments.items():
        assert z.shape == (30,)
        assert np.all((0 <= z) & (z < K))


def test_sampler_deterministic_under_seed():
    rng = np.random.default_rng(14)
    raw = [rng.normal(size=(20, 4)) for _ in range(2)]
    def fit():
        series = [
            SeriesData.from_raw("s%d" % i, "a", raw[i].copy())
            for i in range(2)
        ]
        return TreeHmmSampler(series, K=2, seed=3).run(iterations=6, burn_in=3)

    f1, f2 = fit(), fit()
    np.testing.assert_array_equal(f1.q0_mean, f2.q0_mean)
    assert [t.edges for t in f1.mode_trees] == [t.edges for t in f2.mode_trees]
