"""Command-line interface.

Subcommands:
  mcp           exact marginal connecting probabilities at the plug-in scale
  mode          conditional posterior-mode tree, tau_hat, and mcp at tau_hat
  fit           Gibbs sampler over (tree, tau, v)
  hmm           tree-state hidden Markov model over a directory of series
  simulate      synthetic data generation (incl. the 2-D manifold studies)
  benchmark     replicated graph-recovery study
  bench-kernels timing comparison of the compiled and pure-Python backends
"""

import argparse
import json
import sys
import time
from dataclasses import asdict
from pathlib import Path

import numpy as np

from spantree import __version__, experiments, hmm as hmm_mod
from spantree.pipeline import mode_mcp
from spantree.sampler import ChainConfig, GibbsSampler, edge_frequencies
from spantree.tree import save_edges_csv
from spantree.weights import TreePrior, load_data_csv, standardize


def _load_config(path):
    cfg = {"alpha": 5.0, "tau_init": None, "prior": {"kind": "uniform"}}
    if path:
        with open(path) as fh:
            cfg.update(json.load(fh))
    return cfg


def _prior_from_config(cfg):
    spec = cfg.get("prior", {"kind": "uniform"})
    kind = spec.get("kind", "uniform")
    if kind == "uniform":
        return TreePrior()
    if kind == "edge":
        eta = np.loadtxt(spec["eta_file"], delimiter=",", ndmin=2)
        return TreePrior(kind="edge", eta=eta)
    if kind == "degree":
        return TreePrior(
            kind="degree",
            v=np.asarray(spec["v"], dtype=float),
            dirichlet_conc=float(spec.get("conc", 1.0)),
        )
    raise SystemExit("unknown prior kind in config: %r" % (kind,))


def _read_data(path):
    raw, names = load_data_csv(path)
    return standardize(raw, names=names), names


def _outdir(path):
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _save_matrix(path, mat):
    np.savetxt(path, mat, delimiter=",", fmt="%.10g")


def cmd_mcp(args):
    data, _ = _read_data(args.data)
    cfg = _load_config(args.config)
    out = _outdir(args.out)
    fit, summary = mode_mcp(
        data, alpha=cfg["alpha"], prior=_prior_from_config(cfg),
        tau_init=cfg.get("tau_init"),
    )
    _save_matrix(out / "mcp.csv", summary.mcp)
    with open(out / "summary.json", "w") as fh:
        json.dump(
            {"logZ": summary.logZ, "shift": summary.shift, "tau": fit.tau,
             "p": data.p, "n": data.n},
            fh, indent=2,
        )
    experiments.write_manifest(out, {"command": "mcp", "data": args.data},
                               ["mcp.csv", "summary.json"])


def cmd_mode(args):
    data, _ = _read_data(args.data)
    cfg = _load_config(args.config)
    out = _outdir(args.out)
    fit, summary = mode_mcp(
        data, alpha=cfg["alpha"], prior=_prior_from_config(cfg),
        tau_init=cfg.get("tau_init"),
    )
    save_edges_csv(fit.tree, out / "tree.csv")
    _save_matrix(out / "mcp.csv", summary.mcp)
    with open(out / "summary.json", "w") as fh:
        json.dump({"tau_hat": fit.tau, "logZ": summary.logZ, "p": data.p,
                   "n": data.n}, fh, indent=2)
    experiments.write_manifest(out, {"command": "mode", "data": args.data},
                               ["tree.csv", "mcp.csv", "summary.json"])


def cmd_fit(args):
    data, _ = _read_data(args.data)
    cfg = _load_config(args.config)
    prior = _prior_from_config(cfg)
    out = _outdir(args.out)
    files = []
    diagnostics = {}
    tau_traces = []
    freq_total = np.zeros((data.p, data.p))
    n_draws = 0
    for chain in range(args.chains):
        config = ChainConfig(iterations=args.iters, burn_in=args.burnin,
                             seed=args.seed + chain, thin=args.thin)
        sampler = GibbsSampler(data, prior=prior, config=config,
                               alpha=cfg["alpha"])
        draws, diag = sampler.run()
        name = "draws_chain%d.jsonl" % chain
        with open(out / name, "w") as fh:
            for d in draws:
                fh.write(json.dumps({
                    "edges": [[j + 1, k + 1] for j, k in d.tree.edges],
                    "tau": d.tau,
                    "log_post": d.log_post,
                }) + "\n")
        files.append(name)
        freq_total += edge_frequencies(draws, data.p) * len(draws)
        n_draws += len(draws)
        tau_traces.append(diag.tau_trace)
        diagnostics["chain_%d" % chain] = {
            "accept_rate_tau": diag.accept_rate_tau,
            "ess_tau": diag.ess_tau,
            "ess_degrees_min": float(diag.ess_degrees.min()),
        }
        if chain == 0:
            _save_matrix(out / "degree_trace.csv", diag.degree_trace)
            files.append("degree_trace.csv")
    _save_matrix(out / "mcp_freq.csv", freq_total / max(n_draws, 1))
    _save_matrix(out / "tau_trace.csv", np.column_stack(tau_traces))
    with open(out / "diagnostics.json", "w") as fh:
        json.dump(diagnostics, fh, indent=2)
    files += ["mcp_freq.csv", "tau_trace.csv", "diagnostics.json"]
    experiments.write_manifest(
        out, {"command": "fit", "data": args.data, "iters": args.iters,
              "burnin": args.burnin, "seed": args.seed, "chains": args.chains},
        files,
    )


def cmd_hmm(args):
    with open(args.manifest) as fh:
        manifest = json.load(fh)
    base = Path(args.data_dir)
    series = []
    for entry in manifest["series"]:
        raw, _ = load_data_csv(base / entry["file"])
        series.append(hmm_mod.SeriesData.from_raw(
            entry["subject"], entry["condition"], raw))
    sampler = hmm_mod.TreeHmmSampler(series, K=args.K, seed=args.seed)
    fitted = sampler.run(iterations=args.iters, burn_in=args.burnin)
    out = _outdir(args.out)
    files = []
    for k, tree in enumerate(fitted.mode_trees):
        name = "state_%d_tree.csv" % k
        save_edges_csv(tree, out / name)
        files.append(name)
        name = "state_%d_mcp.csv" % k
        _save_matrix(out / name, fitted.state_mcp[k])
        files.append(name)
    with open(out / "assignments.csv", "w") as fh:
        fh.write("subject,condition,t,state\n")
        for (subject, condition), z in fitted.assignments.items():
            for t, zk in enumerate(z):
                fh.write("%s,%s,%d,%d\n" % (subject, condition, t, int(zk)))
    files.append("assignments.csv")
    _save_matrix(out / "q0.csv", fitted.q0_mean[None, :])
    files.append("q0.csv")
    for g, m in fitted.trans_mean.items():
        name = "trans_%s.csv" % g
        _save_matrix(out / name, m)
        files.append(name)
    if manifest.get("holdout"):
        conditions = sorted(fitted.trans_mean)
        with open(out / "classification.csv", "w") as fh:
            fh.write("series,true_condition,pr_first,decision\n")
            for entry in manifest["holdout"]:
                raw, _ = load_data_csv(base / entry["file"])
                Y = standardize(raw).Y
                pr = hmm_mod.classify_condition(Y, fitted.model, conditions)
                decision = conditions[0] if pr > 0.5 else conditions[1]
                fh.write("%s,%s,%.6f,%s\n"
                         % (entry["file"], entry["condition"], pr, decision))
        files.append("classification.csv")
    experiments.write_manifest(
        out, {"command": "hmm", "K": args.K, "iters": args.iters,
              "burnin": args.burnin, "seed": args.seed},
        files,
    )


def cmd_simulate(args):
    with open(args.spec) as fh:
        raw_spec = json.load(fh)
    out = _outdir(args.out)
    kind = raw_spec["kind"]
    rng = np.random.default_rng(raw_spec.get("seed", 0))
    files = []
    if kind in ("blobs", "two_moons"):
        pts, draws, freq, diag = experiments.manifold_uq_experiment(
            kind,
            p=raw_spec.get("p", 60),
            seed=raw_spec.get("seed", 0),
            iterations=raw_spec.get("iterations", 1500),
            burn_in=raw_spec.get("burn_in", 500),
        )
        _save_matrix(out / "points.csv", pts)
        _save_matrix(out / "mcp.csv", freq)
        files += ["points.csv", "mcp.csv"]
        for i, idx in enumerate([0, len(draws) - 1]):
            name = "tree_draw_%d.csv" % i
            save_edges_csv(draws[idx].tree, out / name)
            files.append(name)
        _save_matrix(out / "tau_trace.csv", diag.tau_trace[:, None])
        _save_matrix(out / "degree_trace.csv", diag.degree_trace)
        files += ["tau_trace.csv", "degree_trace.csv"]
    elif kind == "oracle_tree":
        Y, tree = experiments.generate_tree_data(
            raw_spec.get("p", 200), raw_spec.get("n", 50), rng,
            raw_spec.get("edge_scale", 0.3),
        )
        _save_data_csv(out / "data.csv", Y)
        save_edges_csv(tree, out / "truth_tree.csv")
        files += ["data.csv", "truth_tree.csv"]
    elif kind == "sparse_precision":
        p = raw_spec.get("p", 200)
        _, sigma, g0, t0 = experiments.generate_sparse_precision(
            p, raw_spec.get("sparsity", 0.03), rng,
            tuple(raw_spec.get("corr_range", (0.3, 0.9))),
        )
        chol = np.linalg.cholesky(sigma)
        Y = rng.normal(size=(raw_spec.get("n", 100), p)) @ chol.T
        _save_data_csv(out / "data.csv", Y)
        save_edges_csv(t0, out / "truth_tree.csv")
        with open(out / "truth_graph.csv", "w") as fh:
            fh.write("j,k\n")
            for j, k in sorted(g0):
                fh.write("%d,%d\n" % (j + 1, k + 1))
        files += ["data.csv", "truth_tree.csv", "truth_graph.csv"]
    else:
        raise SystemExit("unknown simulate kind: %r" % (kind,))
    experiments.write_manifest(out, dict(raw_spec, command="simulate"), files)


def _save_data_csv(path, Y):
    header = ",".join("v%d" % (j + 1) for j in range(Y.shape[1]))
    np.savetxt(path, Y, delimiter=",", header=header, comments="", fmt="%.10g")


def cmd_benchmark(args):
    with open(args.spec) as fh:
        raw_spec = json.load(fh)
    spec = experiments.SyntheticSpec(
        kind=raw_spec["kind"],
        p=raw_spec.get("p", 200),
        n=raw_spec.get("n", 100),
        sparsity=raw_spec.get("sparsity", 0.03),
        corr_range=tuple(raw_spec.get("corr_range", (0.3, 0.9))),
        edge_scale=raw_spec.get("edge_scale", 0.3),
        seed=raw_spec.get("seed", 0),
        replicates=raw_spec.get("replicates", 10),
    )
    methods = args.methods.split(",")
    n_grid = [int(x) for x in args.n_grid.split(",")]
    report = experiments.recovery_experiment(spec, methods, n_grid)
    out = _outdir(args.out)
    with open(out / "benchmark.csv", "w") as fh:
        fh.write("method,n,replicate,missed_backbone,extra_edges,error,"
                 "estimate_size\n")
        for r in report.rows:
            fh.write("%s,%d,%d,%d,%d,%d,%d\n"
                     % (r.method, r.n, r.replicate, r.missed_backbone,
                        r.extra_edges, r.error, r.estimate_size))
    with open(out / "benchmark_summary.csv", "w") as fh:
        fh.write("method,n,mean_error,ci_lo,ci_hi,replicates\n")
        for row in report.aggregate():
            fh.write("%s,%d,%.6f,%.6f,%.6f,%d\n"
                     % (row["method"], row["n"], row["mean_error"],
                        row["ci_lo"], row["ci_hi"], row["replicates"]))
    experiments.write_manifest(out, asdict(spec),
                               ["benchmark.csv", "benchmark_summary.csv"],
                               extra={"methods": methods, "n_grid": n_grid})


def cmd_bench_kernels(args):
    from spantree.kernels import _pykernels

    backends = [("python", _pykernels)]
    try:
        from spantree.kernels import _ckernels

        backends.append(("cython", _ckernels))
    except ImportError:
        print("compiled backend unavailable; timing pure Python only")
    from spantree.tree import IncidenceMatrix, random_tree
    from spantree import kernels as kernel_select

    rng = np.random.default_rng(0)
    p = args.p
    q = rng.normal(size=(p, p))
    q = (q + q.T) / 2.0
    np.fill_diagonal(q, -np.inf)
    results = {}
    for name, impl in backends:
        tree = random_tree(p, np.random.default_rng(1))
        inc = IncidenceMatrix(tree)
        uniforms = np.random.default_rng(2).random((args.sweeps, p - 1))
        start = time.perf_counter()
        for it in range(args.sweeps):
            for s in range(p - 1):
                try:
                    impl.gibbs_edge_update(inc.gram_inverse, inc.ej, inc.ek,
                                           s, q, float(uniforms[it, s]))
                except Exception:
                    inc.refresh()
            inc.refresh()
        elapsed = time.perf_counter() - start
        results[name] = elapsed
        print("%-8s %d sweeps at p=%d: %.3f s (%.2f ms/sweep)"
              % (name, args.sweeps, p, elapsed, 1e3 * elapsed / args.sweeps))
    if len(results) == 2:
        print("speedup (python/cython): %.1fx"
              % (results["python"] / results["cython"]))
    print("active backend:", kernel_select.BACKEND)


def build_parser():
    parser = argparse.ArgumentParser(prog="spantree",
                                     description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mcp", help="exact marginal connecting probabilities")
    p.add_argument("--data", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mcp)

    p = sub.add_parser("mode", help="posterior-mode tree and mcp at tau_hat")
    p.add_argument("--data", required=True)
    p.add_argument("--config")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_mode)

    p = sub.add_parser("fit", help="Gibbs sampler")
    p.add_argument("--data", required=True)
    p.add_argument("--config")
    p.add_argument("--iters", type=int, default=2000)
    p.add_argument("--burnin", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--chains", type=int, default=1)
    p.add_argument("--thin", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("hmm", help="tree-state hidden Markov model")
    p.add_argument("--data-dir", required=True)
    p.add_argument("--manifest", required=True)
    p.add_argument("--K", type=int, default=20)
    p.add_argument("--iters", type=int, default=20000)
    p.add_argument("--burnin", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_hmm)

    p = sub.add_parser("simulate", help="synthetic data / manifold studies")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("benchmark", help="replicated recovery study")
    p.add_argument("--spec", required=True)
    p.add_argument("--methods", default="bayes_mode,threshold_0.5,threshold_0.9")
    p.add_argument("--n-grid", default="25,50,100,200,400")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_benchmark)

    p = sub.add_parser("bench-kernels", help="compare kernel backends")
    p.add_argument("--p", type=int, default=200)
    p.add_argument("--sweeps", type=int, default=20)
    p.set_defaults(func=cmd_bench_kernels)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    args.func(args)
    return 0


if __name__ == "__main__":
    sys.exit(main())
