"""Synthetic-data generators, the correlation-thresholding baseline, recovery
metrics, and scripted reproductions of the simulation studies."""

import json
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from spantree import __version__
from spantree import mode as mode_mod
from spantree.sampler import ChainConfig, GibbsSampler, edge_frequencies
from spantree.tree import random_tree
from spantree.weights import DataMatrix, standardize


@dataclass(frozen=True)
class SyntheticSpec:
    kind: str  # sparse_precision | oracle_tree | blobs | two_moons
    p: int = 200
    n: int = 100
    sparsity: float = 0.03
    corr_range: tuple = (0.3, 0.9)
    edge_scale: float = 0.3
    seed: int = 0
    replicates: int = 10

    def __post_init__(self):
        if self.kind in ("sparse_precision",) and not 0 < self.sparsity < 1:
            raise ValueError("sparsity must be in (0, 1)")


def generate_sparse_precision(p, sparsity, rng, corr_range=(0.3, 0.9)):
    """Sparse SPD precision via a random sparse Cholesky factor with
    coefficient magnitudes in corr_range; the implied covariance is rescaled
    to correlation form.

    The factor's zero-probability is calibrated by bisection so the precision
    ends up with the requested fraction of nonzero off-diagonal entries.
    """
    from sklearn.datasets import make_sparse_spd_matrix

    seed = int(rng.integers(2**31))
    target = sparsity * p * (p - 1) / 2.0
    lo, hi = 0.5, 0.99999
    omega = None
    for _ in range(40):
        a = 0.5 * (lo + hi)
        cand = make_sparse_spd_matrix(
            n_dim=p, alpha=a,
            smallest_coef=corr_range[0], largest_coef=corr_range[1],
            random_state=seed,
        )
        nnz = (np.count_nonzero(cand) - p) // 2
        if abs(nnz - target) <= 0.05 * target:
            omega = cand
            break
        if nnz > target:
            lo = a  # too dense: raise the zero-probability
        else:
            hi = a
    if omega is None:
        omega = cand
    sigma = np.linalg.inv(omega)
    scale = np.sqrt(np.diag(sigma))
    sigma = sigma / np.outer(scale, scale)
    edges = frozenset(
        (j, k) for j, k in zip(*np.nonzero(np.triu(omega, 1)))
    )
    t0 = mode_mod.oracle_tree(sigma)
    return omega, sigma, edges, t0


def generate_tree_data(p, n, rng, edge_scale=0.3):
    """Data generated from a random spanning tree via the tree-Gaussian chain."""
    tree = random_tree(p, rng)
    adj = {i: [] for i in range(p)}
    for j, k in tree.edges:
        adj[j].append(k)
        adj[k].append(j)
    Y = np.empty((n, p))
    Y[:, 0] = rng.normal(size=n)
    seen = {0}
    stack = [0]
    while stack:
        x = stack.pop()
        for nb in adj[x]:
            if nb not in seen:
                seen.add(nb)
                Y[:, nb] = Y[:, x] + edge_scale * rng.normal(size=n)
                stack.append(nb)
    return Y, tree


def generate_points(kind, p, rng, noise=0.08):
    """2-D point sets treated as p variables with the coordinates as samples."""
    from sklearn.datasets import make_blobs, make_moons

    if kind == "blobs":
        pts, _ = make_blobs(
            n_samples=p, centers=3, cluster_std=1.0,
            random_state=int(rng.integers(2**31)),
        )
    elif kind == "two_moons":
        pts, _ = make_moons(
            n_samples=p, noise=noise, random_state=int(rng.integers(2**31))
        )
    else:
        raise ValueError("unknown point-set kind: %r" % (kind,))
    return pts  # (p, 2); data matrix is the 2 x p transpose


def thresholding_baseline(data, threshold):
    """Edges where the absolute empirical correlation reaches the threshold."""
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    corr = np.corrcoef(data.Y, rowvar=False)
    edges = set()
    p = corr.shape[0]
    for j in range(p):
        for k in range(j + 1, p):
            if abs(corr[j, k]) >= threshold:
                edges.add((j, k))
    return frozenset(edges)


@dataclass
class RecoveryRow:
    method: str
    n: int
    replicate: int
    missed_backbone: int  # |T0 \ Ghat|
    extra_edges: int  # |Ghat \ G0|
    error: int
    estimate_size: int


@dataclass
class RecoveryReport:
    rows: list = field(default_factory=list)

    def aggregate(self):
        """Per (method, n): mean error and a normal-approximation 95% interval."""
        out = []
        keys = sorted({(r.method, r.n) for r in self.rows})
        for method, n in keys:
            errs = np.array(
                [r.error for r in self.rows if r.method == method and r.n == n],
                dtype=float,
            )
            mean = errs.mean()
            half = 1.96 * errs.std(ddof=1) / np.sqrt(errs.size) if errs.size > 1 else 0.0
            out.append(
                {
                    "method": method,
                    "n": n,
                    "mean_error": float(mean),
                    "ci_lo": float(mean - half),
                    "ci_hi": float(mean + half),
                    "replicates": int(errs.size),
                }
            )
        return out


def recovery_errors(estimate, g0, t0):
    """|T0 \\ Ghat| + |Ghat \\ G0| and its two parts."""
    est = frozenset(estimate)
    missed = len(t0.edge_set() - est)
    extra = len(est - g0)
    return missed, extra


_BAYES_METHOD = "bayes_mode"


def run_method(method, data, mcp_threshold=0.5, mcmc_iters=0, seed=0):
    """Edge-set estimate for one method name."""
    if method == _BAYES_METHOD:
        from spantree.pipeline import mode_fit

        fit = mode_fit(data)
        return fit.tree.edge_set()
    if method == "bayes_mcp":
        cfg = ChainConfig(iterations=mcmc_iters or 600, burn_in=(mcmc_iters or 600) // 2,
                          seed=seed, fix_tau=False)
        draws, _ = GibbsSampler(data, config=cfg).run()
        freq = edge_frequencies(draws, data.p)
        return frozenset(
            (j, k)
            for j in range(data.p)
            for k in range(j + 1, data.p)
            if freq[j, k] >= mcp_threshold
        )
    if method.startswith("threshold_"):
        return thresholding_baseline(data, float(method.split("_", 1)[1]))
    raise ValueError("unknown method: %r" % (method,))


def recovery_experiment(spec, methods, n_grid):
    """Replicated graph-recovery study over a grid of sample sizes."""
    report = RecoveryReport()
    for rep in range(spec.replicates):
        rng = np.random.default_rng(spec.seed + 1000 * rep)
        if spec.kind == "sparse_precision":
            _, sigma, g0, t0 = generate_sparse_precision(
                spec.p, spec.sparsity, rng, spec.corr_range
            )
            chol = np.linalg.cholesky(sigma)
            for n in n_grid:
                raw = rng.normal(size=(n, spec.p)) @ chol.T
                data = standardize(raw)
                for method in methods:
                    est = run_method(method, data, seed=spec.seed + rep)
                    missed, extra = recovery_errors(est, g0, t0)
                    report.rows.append(
                        RecoveryRow(method, n, rep, missed, extra, missed + extra,
                                    len(est))
                    )
        elif spec.kind == "oracle_tree":
            for n in n_grid:
                raw, t0 = generate_tree_data(spec.p, n, rng, spec.edge_scale)
                g0 = t0.edge_set()
                data = standardize(raw)
                for method in methods:
                    est = run_method(method, data, seed=spec.seed + rep)
                    missed, extra = recovery_errors(est, g0, t0)
                    report.rows.append(
                        RecoveryRow(method, n, rep, missed, extra, missed + extra,
                                    len(est))
                    )
        else:
            raise ValueError("recovery experiment needs a covariance-style kind")
    return report


def manifold_uq_experiment(kind, p=60, seed=0, iterations=1500, burn_in=500):
    """Posterior tree draws and mcp for a 2-D point-set geometry.

    The coordinates are used raw (no per-column standardization: each column
    holds the 2 coordinates of one point, and standardizing would destroy
    the geometry).
    """
    rng = np.random.default_rng(seed)
    pts = generate_points(kind, p, rng)
    data = DataMatrix(Y=pts.T.copy(), standardized=False)
    cfg = ChainConfig(iterations=iterations, burn_in=burn_in, seed=seed)
    sampler = GibbsSampler(data, config=cfg)
    draws, diagnostics = sampler.run()
    freq = edge_frequencies(draws, p)
    return pts, draws, freq, diagnostics


def write_manifest(run_dir, spec, files, extra=None):
    manifest = {
        "spec": asdict(spec) if not isinstance(spec, dict) else spec,
        "files": files,
        "version": __version__,
        "created": time.strftime("%Y-%m-%dT%H:%M:%S"),
    }
    if extra:
        manifest.update(extra)
    path = run_dir / "manifest.json"
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, default=str)
    return path
