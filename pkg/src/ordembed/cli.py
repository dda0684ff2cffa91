"""Command-line entry point.

Every subcommand reads/writes the JSON artifact formats, emits a manifest
sidecar (<artifact>.manifest.json) per output, and is byte-reproducible from
(inputs, seed) for any --threads value.  Exit codes: 0 success, 1 validation
error, 2 I/O error.
"""

import argparse
import sys
import time

import ordembed
from ordembed import baselines, bounds, constraints, girthlab, io, metric, terminal, verify
from ordembed._util import default_threads


def _parse_indices(text):
    try:
        vals = [int(t) for t in text.split(",") if t.strip() != ""]
    except ValueError:
        raise io.FormatError(f"bad index list {text!r}; expected comma-separated integers")
    if not vals:
        raise io.FormatError("index list is empty")
    return vals


def _load_metric(path, validate=True, tol=metric.DEFAULT_TOL):
    space = io.metric_from_dict(io.read_json(path), where=path)
    if validate:
        report = metric.check_metric(space, tol)
        if not report.ok:
            raise io.FormatError(f"{path}: not a metric: {report.to_dict()}")
    return space


class _Run:
    """Tracks inputs/outputs of one invocation for the manifest sidecars."""

    def __init__(self, argv, seed, threads):
        self.argv = list(argv)
        self.seed = seed
        self.threads = threads
        self.started = time.monotonic()
        self.inputs = []

    def read_metric(self, path, validate=True):
        self.inputs.append(path)
        return _load_metric(path, validate)

    def read_graph(self, path):
        self.inputs.append(path)
        return io.graph_from_dict(io.read_json(path), where=path)

    def read_embedding(self, path):
        self.inputs.append(path)
        return io.embedding_from_dict(io.read_json(path), where=path)

    def read_constraints(self, path):
        self.inputs.append(path)
        return io.constraints_from_dict(io.read_json(path), where=path)

    def write(self, path, doc):
        io.write_json(path, doc)
        io.write_manifest(
            path, self.argv, self.seed, self.inputs, self.started,
            ordembed.__version__, self.threads,
        )


def _add_threads(sub):
    sub.add_argument("--threads", type=int, default=None,
                     help="worker threads (default: ORDEMBED_THREADS or 1); "
                          "outputs are byte-identical for any value")


def _build_parser():
    top = argparse.ArgumentParser(
        prog="ordembed",
        description="Order-preserving embeddings of finite metric spaces: "
                    "constructions, verifiers, ensembles, and counting certificates.",
    )
    top.add_argument("--version", action="version", version=ordembed.__version__)
    subs = top.add_subparsers(dest="command", required=True)

    p = subs.add_parser("gen-graph", help="random high-girth graph or a named graph")
    p.add_argument("--n", type=int, help="vertex count (random mode)")
    p.add_argument("--girth", type=int, help="target girth g >= 3 (random mode)")
    p.add_argument("--seed", type=int, help="RNG seed (required in random mode)")
    p.add_argument("--budget", type=int, default=None, help="max proposals (default: all non-edges)")
    p.add_argument("--named", choices=sorted(metric.NAMED_GRAPHS), help="emit a named graph instead")
    p.add_argument("--out", required=True, help="graph JSON path")

    p = subs.add_parser("metric-from-graph", help="shortest-path metric of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--disconnected-cap", type=float, default=None,
                   help="distance for disconnected pairs (default: n)")
    p.add_argument("--out", required=True, help="metric JSON path")
    _add_threads(p)

    p = subs.add_parser("check-metric", help="report metric-axiom violations")
    p.add_argument("--metric", required=True)
    p.add_argument("--tol", type=float, default=metric.DEFAULT_TOL,
                   help="absolute comparison tolerance (default 1e-9)")
    p.add_argument("--out", help="optional report JSON path")

    p = subs.add_parser("constraints", help="extract a comparison family from a metric")
    p.add_argument("--metric", required=True)
    p.add_argument("--family", required=True,
                   choices=["triplet", "terminal", "topk_mixed", "topk_unmixed", "full"])
    p.add_argument("--terminals", help="comma-separated terminal indices (terminal family)")
    p.add_argument("--k", type=int, help="neighbor count (top-k families)")
    p.add_argument("--tie-policy", choices=["skip", "error"], default=None,
                   help="exact ties: skip (default for triplet/top-k/full) or error "
                        "(default for terminal)")
    p.add_argument("--jitter", type=float, default=None,
                   help="break ties by multiplying distances with (1 + eps*U); needs --seed")
    p.add_argument("--seed", type=int, help="seed for --jitter")
    p.add_argument("--out", required=True)

    p = subs.add_parser("verify", help="check an embedding against constraints")
    p.add_argument("--metric", required=True)
    p.add_argument("--embedding", required=True)
    p.add_argument("--constraints", help="constraints JSON (or use --family)")
    p.add_argument("--family",
                   choices=["triplet", "terminal", "topk_mixed", "topk_unmixed", "full"])
    p.add_argument("--terminals")
    p.add_argument("--k", type=int)
    p.add_argument("--norm-p", type=float, default=2.0, help="l_p norm exponent (default 2)")
    p.add_argument("--tie-tol", type=float, default=0.0,
                   help="slack absorbing float noise at embedded ties (default 0)")
    p.add_argument("--out", help="report JSON path")
    p.add_argument("--csv", help="flat CSV of violated comparisons")

    p = subs.add_parser("relaxation", help="empirical relaxation and distortion")
    p.add_argument("--metric", required=True)
    p.add_argument("--embedding", required=True)
    p.add_argument("--family", default="full",
                   choices=["triplet", "terminal", "topk_mixed", "topk_unmixed", "full"])
    p.add_argument("--terminals")
    p.add_argument("--k", type=int)
    p.add_argument("--norm-p", type=float, default=2.0)
    p.add_argument("--out")

    p = subs.add_parser("embed-terminal", help="exact k-dimensional terminal embedding")
    p.add_argument("--metric", required=True)
    p.add_argument("--terminals", required=True, help="comma-separated indices")
    p.add_argument("--M", default="auto", help="offset; 'auto' = k^3*n^2 (the minimum)")
    p.add_argument("--tie-break", choices=["error", "lexicographic"], default="error")
    p.add_argument("--norm-p", type=float, default=2.0)
    p.add_argument("--out", required=True, help="embedding JSON path")
    p.add_argument("--report", help="dominance report path (default <out>.dominance.json)")

    p = subs.add_parser("ensemble", help="sample edge subgraphs and audit witnesses")
    p.add_argument("--graph", required=True, help="base graph JSON")
    p.add_argument("--N", type=int, required=True)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True, help="report JSON path")
    _add_threads(p)

    p = subs.add_parser("bounds", help="counting certificate for a dimension lower bound")
    p.add_argument("--mode", required=True, choices=list(bounds.MODES))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int)
    p.add_argument("--lambda", dest="lam", type=float, help="k = lambda*n (linear modes)")
    p.add_argument("--beta-exp", type=float, help="k = lambda*n^(1-beta_exp)")
    p.add_argument("--p", type=float, default=2.0, help="norm exponent (default 2)")
    p.add_argument("--d-max", type=int, default=None, help="largest dimension scanned")
    p.add_argument("--out", required=True)

    p = subs.add_parser("relaxation-floor", help="forced relaxation for (n, d)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--c", type=float, default=8.0)
    p.add_argument("--out")

    p = subs.add_parser("fit", help="hinge-loss triplet fitter")
    p.add_argument("--metric", required=True)
    p.add_argument("--constraints", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--margin", type=float, default=None)
    p.add_argument("--step", type=float, default=0.05)
    p.add_argument("--iters", type=int, default=600)
    p.add_argument("--restarts", type=int, default=16)
    p.add_argument("--out", required=True, help="embedding JSON path")
    _add_threads(p)

    p = subs.add_parser("bourgain", help="subset-distance embedding, optionally projected")
    p.add_argument("--metric", required=True)
    p.add_argument("--reps", type=int, default=24, help="repetitions per scale (default 24)")
    p.add_argument("--jl-dim", type=int, default=None, help="project to this dimension")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)

    p = subs.add_parser("count-orderings", help="closed-form vs brute-force ordering counts")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--oracle", action="store_true",
                   help="also enumerate all C(n,2)! orders (n <= 5)")
    p.add_argument("--out")
    return top


def _cmd_gen_graph(args, run):
    if args.named:
        g = metric.NAMED_GRAPHS[args.named]()
        run.write(args.out, io.graph_to_dict(g))
        print(f"{args.named}: n={g.n} m={g.m} girth={metric.girth(g)}")
        return
    if args.n is None or args.girth is None:
        raise io.FormatError("random mode needs --n and --girth")
    if args.seed is None:
        raise io.FormatError("random gen-graph requires --seed")
    res = girthlab.generate_high_girth(args.n, args.girth, args.seed, args.budget)
    run.write(args.out, io.graph_to_dict(res.graph))
    run.write(args.out + ".report.json", res.to_dict())
    print(
        f"n={res.graph.n} m={res.graph.m} girth={res.girth_achieved} "
        f"target_m={res.edge_target:.2f} shortfall={res.density_shortfall}"
    )


def _cmd_metric_from_graph(args, run):
    g = run.read_graph(args.graph)
    cap = args.disconnected_cap if args.disconnected_cap is not None else float(g.n)
    if cap <= 0:
        raise io.FormatError("--disconnected-cap must be positive")
    space = metric.metric_from_graph(g, cap, threads=run.threads)
    run.write(args.out, io.metric_to_dict(space))
    print(f"n={space.n} max_distance={space.dist.max():.17g}")


def _cmd_check_metric(args, run):
    space = run.read_metric(args.metric, validate=False)
    report = metric.check_metric(space, args.tol)
    if args.out:
        run.write(args.out, report.to_dict())
    print("ok" if report.ok else f"violations: {report.to_dict()}")


def _cmd_constraints(args, run):
    space = run.read_metric(args.metric)
    if args.jitter is not None:
        if args.seed is None:
            raise io.FormatError("--jitter requires --seed")
        space = constraints.jitter_metric(space, args.jitter, args.seed)
    terms = _parse_indices(args.terminals) if args.terminals else None
    cs = constraints.extract_family(
        space, args.family, terminals=terms, k=args.k, tie_policy=args.tie_policy
    )
    run.write(args.out, io.constraints_to_dict(cs))
    print(f"family={cs.family} comparisons={len(cs)}")


def _resolve_constraints(args, run, space):
    if args.constraints:
        return run.read_constraints(args.constraints)
    if not args.family:
        raise io.FormatError("need --constraints or --family")
    terms = _parse_indices(args.terminals) if args.terminals else None
    return constraints.extract_family(space, args.family, terminals=terms, k=args.k)


def _cmd_verify(args, run):
    space = run.read_metric(args.metric)
    emb = run.read_embedding(args.embedding)
    cs = _resolve_constraints(args, run, space)
    report = verify.check_constraints(emb, cs, args.norm_p, args.tie_tol, space=space)
    if args.out:
        run.write(args.out, report.to_dict())
    if args.csv:
        report.write_csv(args.csv)
    print(f"violations: {report.n_violated}/{report.total} max_ratio={report.max_ratio}")


def _cmd_relaxation(args, run):
    space = run.read_metric(args.metric)
    emb = run.read_embedding(args.embedding)
    terms = _parse_indices(args.terminals) if args.terminals else None
    rel = verify.relaxation(space, emb, args.family, args.norm_p, terminals=terms, k=args.k)
    dist = verify.distortion(space, emb, args.norm_p)
    if args.out:
        run.write(args.out, {"family": args.family, "relaxation": rel, "distortion": dist})
    print(f"relaxation={rel:.17g} distortion={dist:.17g}")


def _cmd_embed_terminal(args, run):
    space = run.read_metric(args.metric)
    terms = _parse_indices(args.terminals)
    M = None if args.M == "auto" else int(args.M)
    te = terminal.embed_terminals(space, terms, M=M, tie_break=args.tie_break,
                                  norm_p=args.norm_p)
    run.write(args.out, io.embedding_to_dict(te.emb))
    if args.norm_p == 2.0:
        report = terminal.dominance_check(te, space, terms)
        run.write(args.report or args.out + ".dominance.json", report.to_dict())
        print(f"k={te.table.k} M={te.M} dominance_ok={report.ok}")
    else:
        print(f"k={te.table.k} M={te.M} (norm p={args.norm_p}: no integer audit)")


def _cmd_ensemble(args, run):
    g = run.read_graph(args.graph)
    spec = girthlab.EnsembleSpec(g, args.N, args.p, args.seed)
    ensemble = girthlab.sample_ensemble(spec)
    base_girth = metric.girth(g)
    if base_girth is None:
        raise io.FormatError("base graph is acyclic; the witness audit needs a girth")
    report = girthlab.ensemble_report(ensemble, base_girth, base_edge_count=g.m,
                                      threads=run.threads)
    doc = report.to_dict()
    doc["p"] = args.p
    doc["seed"] = args.seed
    run.write(args.out, doc)
    print(
        f"pairs={report.n_pairs} faraway_fraction={report.faraway_fraction:.6f} "
        f"distance_checks_ok={report.distance_checks_ok} "
        f"union_log2={doc['union_bound']['log2_bound']:.4f}"
    )


def _cmd_bounds(args, run):
    d_range = range(1, min(args.n, args.d_max + 1)) if args.d_max else None
    query = bounds.BoundQuery(
        mode=args.mode, n=args.n, k=args.k, lam=args.lam, beta_exp=args.beta_exp,
        p=args.p, d_range=d_range,
    )
    report = bounds.certify_lower_bound(query)
    run.write(args.out, report.to_dict())
    print(
        f"mode={report.mode} n={report.n} k={report.k} certified_d={report.certified_d} "
        f"(asymptotic threshold ~{report.asymptotic_threshold:.1f})"
    )


def _cmd_relaxation_floor(args, run):
    res = bounds.relaxation_floor(args.n, args.d, args.c)
    if args.out:
        run.write(args.out, res)
    print(f"base2={res['base2']:.6f} natural={res['natural']:.6f} (c={res['c']})")


def _cmd_fit(args, run):
    space = run.read_metric(args.metric)
    cs = run.read_constraints(args.constraints)
    cfg = baselines.FitConfig(
        d=args.dim, margin=args.margin, step=args.step, iters=args.iters,
        restarts=args.restarts, seed=args.seed,
    )
    res = baselines.fit_triplets(space, cs, cfg, threads=run.threads)
    run.write(args.out, io.embedding_to_dict(res.embedding))
    status = "satisfied" if res.satisfied else "UNSAT-in-d not proven"
    print(
        f"loss={res.loss:.17g} violations={res.violations} restart={res.restart} ({status})"
    )


def _cmd_bourgain(args, run):
    space = run.read_metric(args.metric)
    emb = baselines.bourgain_embed(space, args.reps, args.seed)
    if args.jl_dim:
        emb = baselines.jl_project(emb, args.jl_dim, args.seed)
    run.write(args.out, io.embedding_to_dict(emb))
    rel = verify.relaxation(space, emb, "full")
    dist = verify.distortion(space, emb)
    print(f"dim={emb.d} relaxation={rel:.6f} distortion={dist:.6f}")


def _cmd_count_orderings(args, run):
    n = args.n
    value = constraints.count_triplet_orderings_exact(n)
    doc = {
        "n": n,
        "closed_form": int(value),
        "log_superfactorial": constraints.log_superfactorial(n),
    }
    lines = [f"closed-form count: {value}"]
    if args.oracle:
        oracle = constraints.triplet_projection_oracle(n)
        doc["projection_oracle"] = oracle
        doc["match"] = oracle == value
        lines.append(f"projection oracle: {oracle}")
        lines.append(f"match: {doc['match']}")
        if not doc["match"]:
            lines.append(
                "MISMATCH: the closed form does not count order projections; "
                "trust the oracle for realizable orderings"
            )
    if args.out:
        run.write(args.out, doc)
    print("\n".join(lines))


_HANDLERS = {
    "gen-graph": _cmd_gen_graph,
    "metric-from-graph": _cmd_metric_from_graph,
    "check-metric": _cmd_check_metric,
    "constraints": _cmd_constraints,
    "verify": _cmd_verify,
    "relaxation": _cmd_relaxation,
    "embed-terminal": _cmd_embed_terminal,
    "ensemble": _cmd_ensemble,
    "bounds": _cmd_bounds,
    "relaxation-floor": _cmd_relaxation_floor,
    "fit": _cmd_fit,
    "bourgain": _cmd_bourgain,
    "count-orderings": _cmd_count_orderings,
}


def dispatch(argv):
    """Run one subcommand; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    threads = args.threads if getattr(args, "threads", None) else default_threads()
    run = _Run(argv, getattr(args, "seed", None), threads)
    try:
        _HANDLERS[args.command](args, run)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, IndexError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
