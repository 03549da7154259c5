"""Data standardization, the heavy-tailed marginal edge density, tree priors,
and assembly of the log edge-weight matrix.

Everything is computed in the log domain: the edge score
q[j,k] = -(alpha+n) * log(1 + d[j,k]/tau) can easily be below -1000, so
exp(q) is never formed directly here (the distribution module applies a max
shift before exponentiating).
"""

from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln


@dataclass(frozen=True)
class DataMatrix:
    """n x p observation matrix, optionally column-standardized."""

    Y: np.ndarray
    standardized: bool = True

    @property
    def n(self):
        return self.Y.shape[0]

    @property
    def p(self):
        return self.Y.shape[1]


def standardize(raw, names=None):
    """Center each column and scale to unit sample SD (divisor n-1)."""
    raw = np.asarray(raw, dtype=float)
    if raw.ndim != 2 or raw.shape[0] < 2:
        raise ValueError("need an n x p matrix with n >= 2")
    sd = raw.std(axis=0, ddof=1)
    bad = np.flatnonzero(sd == 0.0)
    if bad.size:
        label = names[bad[0]] if names is not None else str(bad[0])
        raise ValueError("constant column: %s" % label)
    return DataMatrix(Y=(raw - raw.mean(axis=0)) / sd, standardized=True)


@dataclass(frozen=True)
class PairwiseDistances:
    """dist[j,k] = ||y_j - y_k||_2 and the scatter form W_n = n^-1 * dist^2."""

    dist: np.ndarray
    W_n: np.ndarray

    @classmethod
    def from_data(cls, data):
        y = data.Y
        n = y.shape[0]
        sq = np.sum(y * y, axis=0)
        d2 = sq[:, None] + sq[None, :] - 2.0 * (y.T @ y)
        np.maximum(d2, 0.0, out=d2)
        np.fill_diagonal(d2, 0.0)
        return cls(dist=np.sqrt(d2), W_n=d2 / n)


@dataclass(frozen=True)
class ShrinkageParams:
    alpha: float = 5.0
    tau: float = 1.0
    mu_tau: float = 1.0

    def __post_init__(self):
        if self.alpha <= 0 or self.tau <= 0 or self.mu_tau <= 0:
            raise ValueError("alpha, tau and mu_tau must be positive")


def gdp_log_marginal(d, n, alpha, tau):
    """Log of the generalized-double-Pareto marginal edge density.

    log[ C(n) * Gamma(alpha+n)/Gamma(alpha) * tau^-n * (1 + d/tau)^-(alpha+n) ]
    with C(n) = 1 / (2^n * Gamma((n+1)/2) * pi^((n-1)/2)).
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    d = np.asarray(d, dtype=float)
    log_c = -n * np.log(2.0) - gammaln((n + 1) / 2.0) - (n - 1) / 2.0 * np.log(np.pi)
    out = (
        log_c
        + gammaln(alpha + n)
        - gammaln(alpha)
        - n * np.log(tau)
        - (alpha + n) * np.log1p(d / tau)
    )
    return out if out.ndim else float(out)


def empirical_tau_prior_mean(data):
    """min over pairs of ||y_j - y_k||_2 / n, the smallest empirical scale."""
    dist = PairwiseDistances.from_data(data).dist
    p = dist.shape[0]
    iu = np.triu_indices(p, 1)
    mind = float(dist[iu].min())
    if mind == 0.0:
        raise ValueError("duplicate columns: smallest pairwise distance is zero")
    return mind / data.n


@dataclass(frozen=True)
class TreePrior:
    """Prior over trees: uniform, edge-based (eta matrix), or degree-based."""

    kind: str = "uniform"
    eta: np.ndarray = None
    v: np.ndarray = None
    dirichlet_conc: float = 1.0

    def __post_init__(self):
        if self.kind not in ("uniform", "edge", "degree"):
            raise ValueError("unknown tree prior kind: %r" % (self.kind,))
        if self.kind == "edge":
            eta = np.asarray(self.eta, dtype=float)
            if eta.ndim != 2 or eta.shape[0] != eta.shape[1]:
                raise ValueError("eta must be a square matrix")
            if np.any(eta < 0) or not np.allclose(eta, eta.T):
                raise ValueError("eta must be symmetric and nonnegative")
            object.__setattr__(self, "eta", eta)
        if self.kind == "degree":
            v = np.asarray(self.v, dtype=float)
            if np.any(v <= 0) or abs(v.sum() - 1.0) > 1e-8:
                raise ValueError("degree weights must be a positive simplex vector")
            if self.dirichlet_conc <= 0:
                raise ValueError("Dirichlet concentration must be positive")
            object.__setattr__(self, "v", v)

    def log_eta(self, p):
        if self.kind == "uniform":
            return np.zeros((p, p))
        if self.kind == "edge":
            if self.eta.shape[0] != p:
                raise ValueError("eta has wrong size")
            with np.errstate(divide="ignore"):
                return np.log(self.eta)
        lv = np.log(self.v)
        return lv[:, None] + lv[None, :]

    def with_v(self, v):
        return TreePrior(kind="degree", v=v, dirichlet_conc=self.dirichlet_conc)


def assemble_log_weights(dist, n, params, prior):
    """Symmetric log edge-score matrix q; diagonal set to -inf.

    Includes the terms that are constant across edges (the Gamma ratio, C(n),
    and tau^-n); they cancel in tree-posterior ratios but are needed whenever
    absolute log-likelihoods matter (tau updates, the HMM).
    """
    p = dist.shape[0]
    q = gdp_log_marginal(dist, n, params.alpha, params.tau) + prior.log_eta(p)
    np.fill_diagonal(q, -np.inf)
    return q


def degree_prior_log_normalizer(v, p=None):
    """Closed form log z(eta) = (p-2) * log(sum v) + sum log v for eta = v v^T."""
    v = np.asarray(v, dtype=float)
    if p is None:
        p = v.shape[0]
    return (p - 2) * np.log(v.sum()) + np.log(v).sum()


def load_data_csv(path):
    """CSV with a header row of variable names; rows are samples."""
    with open(path) as fh:
        names = fh.readline().strip().split(",")
    raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return raw, names
