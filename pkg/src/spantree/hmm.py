"""Hidden Markov model whose latent states are spanning trees.

Each time point is one p-vector; its emission density under state k is the
product over the edges of tree k of the marginal edge density with a single
sample (n = 1).  Trees and the global scale are shared across series and
conditions; the transition matrix differs by condition.  State sequences are
drawn exactly by forward-filtering backward-sampling.
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from spantree import mode as mode_mod
from spantree.tree import IncidenceMatrix, random_tree
from spantree.weights import gdp_log_marginal, standardize


@dataclass
class SeriesData:
    subject: str
    condition: str
    Y: np.ndarray  # T x p, standardized per series

    @classmethod
    def from_raw(cls, subject, condition, raw):
        return cls(subject=subject, condition=condition, Y=standardize(raw).Y)


@dataclass
class TreeHmmModel:
    K: int
    p: int
    trees: list
    q0: np.ndarray
    trans: dict  # condition -> K x K row-stochastic matrix
    tau: float
    alpha: float = 5.0
    dir_conc: float = 0.5

    def validate(self):
        assert abs(self.q0.sum() - 1.0) < 1e-12
        for m in self.trans.values():
            assert np.allclose(m.sum(axis=1), 1.0, atol=1e-12)
        assert self.tau > 0


def emission_log_density(y_t, tree, tau, alpha):
    """Log emission of one p-vector under one tree state."""
    d = np.abs(y_t[[j for j, _ in tree.edges]] - y_t[[k for _, k in tree.edges]])
    return float(np.sum(gdp_log_marginal(d, 1, alpha, tau)))


def series_emissions(Y, trees, tau, alpha):
    """T x K matrix of per-time-point log emissions."""
    T = Y.shape[0]
    em = np.empty((T, len(trees)))
    for k, tree in enumerate(trees):
        ej = [j for j, _ in tree.edges]
        ek = [kk for _, kk in tree.edges]
        d = np.abs(Y[:, ej] - Y[:, ek])
        em[:, k] = gdp_log_marginal(d, 1, alpha, tau).sum(axis=1)
    return em


def forward_log_marginal(em, q0, trans):
    """Exact log marginal likelihood by the forward algorithm (log domain)."""
    T, K = em.shape
    log_alpha = np.log(q0) + em[0]
    for t in range(1, T):
        log_alpha = logsumexp(log_alpha[:, None] + np.log(trans), axis=0) + em[t]
    return float(logsumexp(log_alpha))


def brute_force_log_marginal(em, q0, trans):
    """Sum over all K^T state paths; test oracle for small problems."""
    from itertools import product

    T, K = em.shape
    terms = []
    for path in product(range(K), repeat=T):
        lp = np.log(q0[path[0]]) + em[0, path[0]]
        for t in range(1, T):
            lp += np.log(trans[path[t - 1], path[t]]) + em[t, path[t]]
        terms.append(lp)
    return float(logsumexp(terms))


def ffbs_states(em, q0, trans, rng):
    """Exact draw of the state sequence given emissions and chain parameters."""
    T, K = em.shape
    alpha = np.empty((T, K))
    shift = em.max(axis=1)
    if not np.all(np.isfinite(shift)):
        raise ValueError("degenerate model: a time point has all -inf emissions")
    w = np.exp(em - shift[:, None])
    a = q0 * w[0]
    tot = a.sum()
    alpha[0] = a / tot
    for t in range(1, T):
        a = (alpha[t - 1] @ trans) * w[t]
        tot = a.sum()
        if tot <= 0.0:
            raise ValueError("degenerate model: zero filtering mass")
        alpha[t] = a / tot
    z = np.empty(T, dtype=np.intp)
    z[T - 1] = rng.choice(K, p=alpha[T - 1])
    for t in range(T - 2, -1, -1):
        b = alpha[t] * trans[:, z[t + 1]]
        z[t] = rng.choice(K, p=b / b.sum())
    return z


def _pairwise_abs_diff(y_t):
    return np.abs(y_t[:, None] - y_t[None, :])


@dataclass
class FittedTreeHmm:
    model: TreeHmmModel
    q0_mean: np.ndarray
    trans_mean: dict
    state_mcp: np.ndarray  # K x p x p per-state edge frequencies
    mode_trees: list
    assignments: dict  # (subject, condition) -> last sampled state sequence


class TreeHmmSampler:
    """Blocked Gibbs sampler for the tree-state HMM."""

    def __init__(
        self,
        series,
        K=20,
        alpha=5.0,
        dir_conc=0.5,
        seed=0,
        sweeps_per_state=2,
    ):
        self.series = series
        self.K = K
        self.alpha = alpha
        self.dir_conc = dir_conc
        self.rng = np.random.default_rng(seed)
        self.p = series[0].Y.shape[1]
        self.conditions = sorted({s.condition for s in series})

        pooled = np.vstack([s.Y for s in series])
        dists = np.sqrt(
            np.maximum(
                np.sum(pooled**2, axis=0)[:, None]
                + np.sum(pooled**2, axis=0)[None, :]
                - 2.0 * pooled.T @ pooled,
                0.0,
            )
        )
        iu = np.triu_indices(self.p, 1)
        self.mu_tau = float(dists[iu].min()) / pooled.shape[0]
        self.tau = self.mu_tau
        self.delta = self.mu_tau

        # Per-time-point pairwise distances, precomputed once.
        self._pool = pooled
        self._series_slices = []
        start = 0
        for s in series:
            self._series_slices.append((start, start + s.Y.shape[0]))
            start += s.Y.shape[0]

        self.q0 = self.rng.dirichlet(np.full(K, dir_conc))
        self.trans = {
            g: np.array([self.rng.dirichlet(np.full(K, dir_conc)) for _ in range(K)])
            for g in self.conditions
        }
        # Initialize trees from the mode of random partitions of the pooled points.
        groups = self.rng.integers(0, K, size=pooled.shape[0])
        self.incs = []
        for k in range(K):
            rows = np.flatnonzero(groups == k)
            if rows.size:
                q = self._pooled_log_weights(rows)
                tree = mode_mod.prim_mode(q)
            else:
                tree = random_tree(self.p, self.rng)
            self.incs.append(IncidenceMatrix(tree))
        self._tau_accepts = 0
        self._tau_proposals = 0
        self.sweeps_per_state = sweeps_per_state

    def _pooled_log_weights(self, rows):
        """Sum of per-time-point log edge densities over the given pooled rows."""
        y = self._pool[rows]
        q = np.zeros((self.p, self.p))
        for t in range(y.shape[0]):
            d = _pairwise_abs_diff(y[t])
            q += gdp_log_marginal(d, 1, self.alpha, self.tau)
        np.fill_diagonal(q, -np.inf)
        return q

    def trees(self):
        return [inc.to_tree() for inc in self.incs]

    def _sample_states(self):
        trees = self.trees()
        assignments = []
        for s in self.series:
            em = series_emissions(s.Y, trees, self.tau, self.alpha)
            z = ffbs_states(em, self.q0, self.trans[s.condition], self.rng)
            assignments.append(z)
        return assignments

    def _update_chain_params(self, assignments):
        c0 = np.full(self.K, self.dir_conc)
        for z in assignments:
            c0[z[0]] += 1.0
        self.q0 = self.rng.dirichlet(c0)
        for g in self.conditions:
            counts = np.full((self.K, self.K), self.dir_conc)
            for s, z in zip(self.series, assignments):
                if s.condition != g:
                    continue
                np.add.at(counts, (z[:-1], z[1:]), 1.0)
            self.trans[g] = np.array(
                [self.rng.dirichlet(counts[k]) for k in range(self.K)]
            )

    def _update_trees(self, assignments):
        flat = np.concatenate(assignments)
        for k in range(self.K):
            rows = np.flatnonzero(flat == k)
            if rows.size == 0:
                continue  # empty state keeps its current tree
            q = self._pooled_log_weights(rows)
            inc = self.incs[k]
            for _ in range(self.sweeps_per_state):
                uniforms = self.rng.random(self.p - 1)
                for s in range(self.p - 1):
                    inc.gibbs_edge_update(s, q, float(uniforms[s]))

    def _tau_log_target(self, tau, assignments):
        if tau <= 0.0:
            return -np.inf
        flat = np.concatenate(assignments)
        total = 0.0
        count = 0
        for k in range(self.K):
            rows = np.flatnonzero(flat == k)
            if rows.size == 0:
                continue
            inc = self.incs[k]
            d = np.abs(self._pool[np.ix_(rows, inc.ej)] - self._pool[np.ix_(rows, inc.ek)])
            total += np.sum(np.log1p(d / tau))
            count += d.size
        return -count * np.log(tau) - (self.alpha + 1) * total - tau / self.mu_tau

    def _update_tau(self, assignments, adapting):
        prop = self.tau + (2.0 * self.rng.random() - 1.0) * self.delta
        prop = abs(prop)
        log_ratio = self._tau_log_target(prop, assignments) - self._tau_log_target(
            self.tau, assignments
        )
        accept = np.log(self.rng.random()) < log_ratio
        self._tau_proposals += 1
        if accept:
            self._tau_accepts += 1
            self.tau = prop
        if adapting:
            self.delta *= np.exp(0.05 * (float(accept) - 0.3))

    def run(self, iterations=200, burn_in=100):
        kept = 0
        q0_acc = np.zeros(self.K)
        trans_acc = {g: np.zeros((self.K, self.K)) for g in self.conditions}
        mcp_acc = np.zeros((self.K, self.p, self.p))
        assignments = None
        for it in range(iterations):
            assignments = self._sample_states()
            self._update_chain_params(assignments)
            self._update_trees(assignments)
            self._update_tau(assignments, adapting=it < burn_in)
            if it >= burn_in:
                kept += 1
                q0_acc += self.q0
                for g in self.conditions:
                    trans_acc[g] += self.trans[g]
                for k, inc in enumerate(self.incs):
                    mcp_acc[k][inc.ej, inc.ek] += 1.0
                    mcp_acc[k][inc.ek, inc.ej] += 1.0
        q0_mean = q0_acc / kept
        trans_mean = {g: trans_acc[g] / kept for g in self.conditions}
        state_mcp = mcp_acc / kept
        mode_trees = []
        for k in range(self.K):
            freq = state_mcp[k]
            if freq.sum() == 0:
                mode_trees.append(self.incs[k].to_tree())
            else:
                mode_trees.append(mode_mod.prim_mode(np.where(freq > 0, freq, -1.0)))
        model = TreeHmmModel(
            K=self.K,
            p=self.p,
            trees=mode_trees,
            q0=q0_mean,
            trans=trans_mean,
            tau=self.tau,
            alpha=self.alpha,
            dir_conc=self.dir_conc,
        )
        keyed = {
            (s.subject, s.condition): z
            for s, z in zip(self.series, assignments)
        }
        return FittedTreeHmm(
            model=model,
            q0_mean=q0_mean,
            trans_mean=trans_mean,
            state_mcp=state_mcp,
            mode_trees=mode_trees,
            assignments=keyed,
        )


def classify_condition(Y, model, conditions=None):
    """Probability the series was generated under the first condition.

    Exact forward-algorithm marginals given the plug-in trees, initial
    distribution, and per-condition transition matrices.
    """
    if conditions is None:
        conditions = sorted(model.trans)
    g1, g2 = conditions
    em = series_emissions(Y, model.trees, model.tau, model.alpha)
    ll1 = forward_log_marginal(em, model.q0, model.trans[g1])
    ll2 = forward_log_marginal(em, model.q0, model.trans[g2])
    return float(np.exp(ll1 - logsumexp([ll1, ll2])))


def sample_hmm_series(model, condition, T, rng):
    """Generate (states, Y) from the HMM generative process with Gaussian
    tree emissions (root standard normal, child = parent + tau * noise)."""
    K = model.K
    z = np.empty(T, dtype=np.intp)
    z[0] = rng.choice(K, p=model.q0)
    for t in range(1, T):
        z[t] = rng.choice(K, p=model.trans[condition][z[t - 1]])
    Y = np.empty((T, model.p))
    for t in range(T):
        Y[t] = sample_tree_gaussian(model.trees[z[t]], model.tau, rng)
    return z, Y


def sample_tree_gaussian(tree, scale, rng):
    """One p-vector from the tree-Gaussian generative chain rooted at node 0."""
    p = tree.p
    adj = {i: [] for i in range(p)}
    for j, k in tree.edges:
        adj[j].append(k)
        adj[k].append(j)
    y = np.empty(p)
    y[0] = rng.normal()
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for nb in adj[x]:
            if nb not in seen:
                seen.add(nb)
                y[nb] = y[x] + scale * rng.normal()
                stack.append(nb)
    return y
