"""Gibbs sampler over (tree, tau, degree weights).

Tree edges are updated by cut-and-reconnect sweeps, the global scale tau by
adaptive random-walk Metropolis on the real line (tau = |tau_tilde|), and the
degree-prior weights by their conjugate Dirichlet draw.
"""

from dataclasses import dataclass

import numpy as np

from spantree import mode as mode_mod
from spantree.tree import IncidenceMatrix, SpanningTree
from spantree.weights import (
    PairwiseDistances,
    TreePrior,
    empirical_tau_prior_mean,
    gdp_log_marginal,
)


@dataclass
class ChainConfig:
    iterations: int = 2000
    burn_in: int = 1000
    seed: int = 0
    scan: str = "full"  # "full" or "random"
    scan_size: int = None  # edges per random-scan sweep; default ceil((p-1)/4)
    delta: float = None  # RW half-width; default mu_tau
    target_accept: float = 0.3
    adapt_rate: float = 0.05
    thin: int = 1
    fix_tau: bool = False

    def __post_init__(self):
        if self.burn_in >= self.iterations:
            raise ValueError("burn_in must be smaller than iterations")


@dataclass
class PosteriorDraw:
    tree: SpanningTree
    tau: float
    v: np.ndarray
    log_post: float


@dataclass
class ChainDiagnostics:
    accept_rate_tau: float
    tau_trace: np.ndarray
    degree_trace: np.ndarray
    ess_tau: float
    ess_degrees: np.ndarray


def effective_sample_size(x):
    """ESS via the initial positive-sum autocorrelation estimator."""
    x = np.asarray(x, dtype=float)
    n = x.size
    x = x - x.mean()
    var = np.dot(x, x)
    if var == 0.0 or n < 4:
        return float(n)
    acf = np.correlate(x, x, mode="full")[n - 1 :] / var
    total = 0.0
    for lag in range(1, n // 2):
        if acf[lag] <= 0.0:
            break
        total += acf[lag]
    return float(n / (1.0 + 2.0 * total))


class GibbsSampler:
    """One chain with exclusively owned state; seed fully determines output."""

    def __init__(self, data, prior=None, config=None, alpha=5.0):
        self.data = data
        self.prior = prior if prior is not None else TreePrior()
        self.config = config if config is not None else ChainConfig()
        self.alpha = alpha
        self.n = data.n
        self.p = data.p
        self.dist = PairwiseDistances.from_data(data).dist
        self.mu_tau = empirical_tau_prior_mean(data)
        self.rng = np.random.default_rng(self.config.seed)

        # Initialization per the mode-based scheme: tau at mu_tau, flat eta.
        self.tau_tilde = self.mu_tau
        if self.prior.kind == "degree":
            self.v = np.full(self.p, 1.0 / self.p)
        else:
            self.v = None
        init_q = gdp_log_marginal(self.dist, self.n, alpha, self.mu_tau)
        np.fill_diagonal(init_q, -np.inf)
        self.inc = IncidenceMatrix(mode_mod.prim_mode(init_q))
        self.delta = self.config.delta if self.config.delta else self.mu_tau
        self._tau_accepts = 0
        self._tau_proposals = 0
        self._refresh_q()

    @property
    def tau(self):
        return abs(self.tau_tilde)

    def _log_eta(self):
        prior = self.prior
        if prior.kind == "degree":
            prior = prior.with_v(self.v)
        return prior.log_eta(self.p)

    def _refresh_q(self):
        self._q_lik = gdp_log_marginal(self.dist, self.n, self.alpha, self.tau)
        self.q = self._q_lik + self._log_eta()
        np.fill_diagonal(self.q, -np.inf)

    def update_tree_sweep(self):
        """Cut-and-reconnect each scheduled edge in turn."""
        m = self.p - 1
        if self.config.scan == "full":
            order = np.arange(m)
        else:
            size = self.config.scan_size or -(-m // 4)
            order = self.rng.choice(m, size=min(size, m), replace=False)
        uniforms = self.rng.random(order.shape[0])
        for s, u in zip(order, uniforms):
            self.inc.gibbs_edge_update(int(s), self.q, float(u))

    def _tau_log_target(self, tau_tilde):
        t = abs(tau_tilde)
        if t == 0.0:
            return -np.inf
        d = self.dist[self.inc.ej, self.inc.ek]
        lik = -self.n * np.log(t) * d.size - (self.alpha + self.n) * np.sum(
            np.log1p(d / t)
        )
        return lik - t / self.mu_tau

    def update_tau(self, adapting=False):
        """Random-walk Metropolis step for the signed global scale."""
        if self.config.fix_tau:
            return
        prop = self.tau_tilde + (2.0 * self.rng.random() - 1.0) * self.delta
        log_ratio = self._tau_log_target(prop) - self._tau_log_target(self.tau_tilde)
        accept = np.log(self.rng.random()) < log_ratio
        self._tau_proposals += 1
        if accept:
            self._tau_accepts += 1
            self.tau_tilde = prop
            self._refresh_q()
        if adapting:
            self.delta *= np.exp(
                self.config.adapt_rate * (float(accept) - self.config.target_accept)
            )

    def update_degree_weights(self):
        """Conjugate Dirichlet draw v ~ Dir(D_1 + a - 1, ..., D_p + a - 1)."""
        if self.prior.kind != "degree":
            return
        conc = self.prior.dirichlet_conc
        d = np.zeros(self.p)
        np.add.at(d, self.inc.ej, 1.0)
        np.add.at(d, self.inc.ek, 1.0)
        params = d + conc - 1.0
        if np.any(params <= 0):
            raise ValueError("degree-prior concentration too small: D_j + a - 1 <= 0")
        self.v = self.rng.dirichlet(params)
        self.q = self._q_lik + self._log_eta()
        np.fill_diagonal(self.q, -np.inf)

    def current_draw(self):
        tree = self.inc.to_tree()
        logp = sum(self.q[j, k] for j, k in tree.edges) - self.tau / self.mu_tau
        return PosteriorDraw(
            tree=tree,
            tau=self.tau,
            v=None if self.v is None else self.v.copy(),
            log_post=float(logp),
        )

    def run(self):
        cfg = self.config
        draws = []
        tau_trace = np.empty(cfg.iterations)
        degree_trace = np.empty((cfg.iterations, self.p), dtype=np.intp)
        for it in range(cfg.iterations):
            self.update_tree_sweep()
            self.update_tau(adapting=it < cfg.burn_in)
            self.update_degree_weights()
            tau_trace[it] = self.tau
            degree_trace[it] = 0
            np.add.at(degree_trace[it], self.inc.ej, 1)
            np.add.at(degree_trace[it], self.inc.ek, 1)
            if it >= cfg.burn_in and (it - cfg.burn_in) % cfg.thin == 0:
                draws.append(self.current_draw())
        accept = self._tau_accepts / max(self._tau_proposals, 1)
        post = tau_trace[cfg.burn_in :]
        post_deg = degree_trace[cfg.burn_in :]
        diagnostics = ChainDiagnostics(
            accept_rate_tau=float(accept),
            tau_trace=tau_trace,
            degree_trace=degree_trace,
            ess_tau=effective_sample_size(post),
            ess_degrees=np.array(
                [effective_sample_size(post_deg[:, j]) for j in range(self.p)]
            ),
        )
        return draws, diagnostics


def run_chain(data, prior=None, config=None, alpha=5.0):
    """Run one Gibbs chain; deterministic given config.seed."""
    return GibbsSampler(data, prior=prior, config=config, alpha=alpha).run()


def edge_frequencies(draws, p):
    """Fraction of draws containing each pair: the MCMC estimate of the mcp."""
    freq = np.zeros((p, p))
    for draw in draws:
        for j, k in draw.tree.edges:
            freq[j, k] += 1.0
            freq[k, j] += 1.0
    if draws:
        freq /= len(draws)
    return freq
