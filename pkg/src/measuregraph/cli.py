"""Command-line front end.

Every subcommand writes delimited text (TSV) or JSON to ``--out`` (stdout by
default); report-style subcommands also accept ``--figure PATH`` for a PNG.
Exit codes: 2 validation, 3 numerical, 4 budget, 1 failed verification.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path

import numpy as np

from .errors import BudgetError, NumericalError, ValidationError

EXIT_VERIFY = 1
EXIT_VALIDATION = 2
EXIT_NUMERICAL = 3
EXIT_BUDGET = 4


# ---------------------------------------------------------------------------
# output helpers
# ---------------------------------------------------------------------------


def _num(v):
    if isinstance(v, (np.floating, float)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def tsv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, delimiter="\t", lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_num(v) for v in row])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else repr(v)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    return json.dumps(_jsonable(obj), sort_keys=True, indent=1) + "\n"


def emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


# ---------------------------------------------------------------------------
# shared arguments
# ---------------------------------------------------------------------------


def _add_model(p: argparse.ArgumentParser, required_seed: bool = False) -> None:
    g = p.add_argument_group("model")
    g.add_argument("--spec", help="model spec JSON file (overrides the inline flags)")
    g.add_argument("--kappa", default="poisson:10", help="vertex count law, e.g. dirac:10, poisson:30, negbin:5:0.5")
    g.add_argument("--nu", default="leb", help="label law: leb, cube:d, uniform:n, uniform:m:n, zeta:s")
    g.add_argument("--transform", default="bernoulli:constant:0.3",
                   help="edge transform, e.g. bernoulli:powerlaw:1, binomial:5:exponential:2, digraphon:q01:q11[:g]")
    g.add_argument("--self-edges", action="store_true", help="keep the kernel on the diagonal (self-edges)")
    g.add_argument("--weight", default="identity", choices=["identity", "indicator"], help="weight function g")
    p.add_argument("--seed", type=int, required=required_seed, default=None if required_seed else 0)


def _add_out(p: argparse.ArgumentParser, figure: bool = True) -> None:
    p.add_argument("--out", default=None, help="output file (stdout when omitted)")
    if figure:
        p.add_argument("--figure", default=None, help="also write a PNG figure to this path")


def load_spec(args):
    from .model import spec_from_dict, spec_from_flags

    if getattr(args, "spec", None):
        try:
            data = json.loads(Path(args.spec).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise ValidationError(f"cannot read spec file {args.spec}: {exc}") from None
        return spec_from_dict(data)
    return spec_from_flags(args.kappa, args.nu, args.transform, args.self_edges, args.weight)


def _grid(text: str) -> np.ndarray:
    try:
        lo, hi, step = (float(v) for v in text.split(":"))
    except ValueError:
        raise ValidationError(f"grid must be lo:hi:step, got {text!r}") from None
    if step <= 0 or hi < lo:
        raise ValidationError("grid needs step > 0 and hi >= lo")
    n = int(np.floor((hi - lo) / step + 1e-9)) + 1
    return np.round(lo + step * np.arange(n), 12)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ValidationError(f"expected comma-separated numbers, got {text!r}") from None


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_generate(args) -> int:
    from .verification import generate_many

    spec = load_spec(args)
    if args.reps < 1:
        raise ValidationError("--reps must be >= 1")
    rows = []
    outdir = None
    if args.reps > 1:
        if not args.out:
            raise ValidationError("--reps > 1 needs --out as a directory")
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
    suffix = "json" if args.format == "json" else "txt"
    graphs = generate_many(spec, args.reps, args.seed)
    for i, g in enumerate(graphs):
        seed = args.seed + i
        text = g.to_json() + "\n" if args.format == "json" else g.to_edgelist()
        if outdir is not None:
            path = outdir / f"graph_{seed}.{suffix}"
            path.write_text(text)
        elif args.out:
            path = Path(args.out)
            path.write_text(text)
        else:
            sys.stdout.write(text)
            path = "-"
        rows.append((str(path), seed, g.n_vertices, int(g.edge_count(normalized=True)), g.total_weight(normalized=True)))
        if args.figure and i == 0:
            from .plotting import plot_adjacency

            plot_adjacency(g.adjacency, args.figure, f"seed {seed}")
    if args.out:
        sys.stdout.write(tsv(("file", "seed", "vertices", "active_edges", "total_weight"), rows))
    return 0


def cmd_verify(args) -> int:
    from .graph_generation import LabeledGraph
    from .verification import verify, verify_graphs

    spec = load_spec(args)
    if args.graphs:
        graphs = [LabeledGraph.from_json(Path(p).read_text()) for p in args.graphs]
        rows = verify_graphs(spec, graphs)
    else:
        quantities = tuple(q.strip() for q in args.quantities.split(",") if q.strip())
        rows = verify(spec, args.reps, args.seed, quantities, z=args.z_label, threads=args.threads)
    table = [(r.quantity, r.analytic, r.mc_mean, r.mc_stderr, r.z) for r in rows]
    if args.format == "json":
        emit(dumps([r.to_dict() for r in rows]), args.out)
    else:
        emit(tsv(("quantity", "analytic", "mc_mean", "mc_stderr", "z"), table), args.out)
    bad = [r.quantity for r in rows if not abs(r.z) <= args.threshold]
    if bad:
        sys.stderr.write(f"divergent quantities (|z| > {args.threshold}): {', '.join(bad)}\n")
        return EXIT_VERIFY
    return 0


def cmd_degree_dist(args) -> int:
    from .analytics import degree_distribution

    spec = load_spec(args)
    law = degree_distribution(spec, args.direction, realized=args.mode == "vertex")
    k_max = args.kmax if args.kmax is not None else law.default_kmax()
    co = law.coefficients(k_max)
    emit(tsv(("k", "probability"), enumerate(co.probs)), args.out)
    sys.stderr.write(f"mean {law.mean!r} variance {law.var!r} mass {co.mass!r}\n")
    if args.figure:
        from .plotting import plot_degree_distribution

        plot_degree_distribution(co.probs, args.figure)
    return 0


def _kernel_arg(args):
    from .edge_transforms import parse_kernel

    if args.kernel:
        return parse_kernel(args.kernel)
    return load_spec(args).transform.kernel


def _nu_arg(args):
    from .distributions import parse_label

    return parse_label(args.nu)


def cmd_sobol(args) -> int:
    from .decomposition import sobol
    from .distributions import QuadratureRule

    d = sobol(_kernel_arg(args), _nu_arg(args), QuadratureRule(nodes=args.nodes))
    s = d.indices or {}
    row = (s.get("S1", ""), s.get("S2", ""), s.get("S12", ""), d.effective_dimension, d.w0, d.var_w)
    if args.format == "json":
        emit(dumps(d.to_dict()), args.out)
    else:
        emit(tsv(("S1", "S2", "S12", "ED", "W0", "VarW"), [row]), args.out)
    if args.figure:
        from .plotting import plot_series

        x = d.points if d.points.ndim == 1 else np.arange(len(d.points))
        plot_series(x, {"D_out": d.out_degree(), "D_in": d.in_degree()}, args.figure, "x", "normalized mean degree")
    return 0


def cmd_spectral(args) -> int:
    from .decomposition import spectral
    from .distributions import QuadratureRule

    sp = spectral(_kernel_arg(args), _nu_arg(args), QuadratureRule(nodes=args.nodes), args.rank)
    if args.format == "json":
        emit(dumps(sp.to_dict()), args.out)
    else:
        emit(tsv(("n", "singular_value"), enumerate(sp.singular_values, start=1)), args.out)
    if args.figure:
        from .plotting import plot_series

        n = np.arange(1, len(sp.singular_values) + 1)
        plot_series(n, {"sigma": np.maximum(sp.singular_values, 1e-18)}, args.figure, "n", "singular value", logy=True)
    return 0


def cmd_primes(args) -> int:
    from .applications import primes
    from .distributions import parse_counting

    if args.nu == "zeta":
        rows = primes.prime_table(_grid(args.s_grid))
        emit(tsv(("s", "prime_density", "edge_density", "gc_threshold"),
                 [(r["s"], r["prime_density"], r["edge_density"], r["gc_threshold"]) for r in rows]), args.out)
        s1, v1 = primes.prime_density_max()
        s2, v2 = primes.edge_density_max()
        sys.stderr.write(f"prime density max {v1!r} at s={s1!r}; edge density max {v2!r} at s={s2!r}\n")
        if args.figure:
            from .plotting import plot_prime_densities

            plot_prime_densities(rows, args.figure)
    else:
        if args.n is None:
            raise ValidationError("uniform prime labels need --n")
        m = primes.PrimeGraphModel(parse_counting(args.kappa), n=args.n)
        res = primes.prime_analytics(m)
        emit(tsv(tuple(res.to_dict()), [tuple(res.to_dict().values())]), args.out)
    return 0


def cmd_spin(args) -> int:
    from .applications.spin import SpinNetwork, spin_laplace_mc, spin_partition, spin_partition_gibbs
    from .distributions import parse_counting

    law = parse_counting(args.spin)
    coupling = args.coupling
    field = args.field
    net = SpinNetwork(
        tuple([law] * args.sites),
        lambda x, y: np.full(np.broadcast_shapes(np.shape(x), np.shape(y)), coupling),
        args.radius,
        (lambda x: np.full(np.shape(x), field)) if field else None,
        args.self_interaction,
    )
    betas = _grid(args.beta_grid)
    z_enum = spin_partition(net, betas, budget=args.budget)
    rows = []
    for b, ze in zip(betas, z_enum):
        row = [b, ze, spin_partition_gibbs(net, float(b), budget=args.budget)]
        if args.mc:
            est = spin_laplace_mc(net, float(b), args.mc, args.seed)
            row += [est.mean, est.stderr]
        rows.append(row)
    header = ["beta", "Z_enumeration", "Z_gibbs"] + (["mc_mean", "mc_stderr"] if args.mc else [])
    emit(tsv(header, rows), args.out)
    if args.figure:
        from .plotting import plot_series

        plot_series(betas, {"Z(beta)": z_enum}, args.figure, "beta", "partition function")
    return 0


def cmd_estimate(args) -> int:
    from .decomposition import kernel_grid
    from .distributions import UnitInterval
    from .estimation import MhConfig, ObservedGraphSet, mh_estimate, relative_l1_error, relative_l2_error
    from .graph_generation import LabeledGraph, generate

    truth = None
    if args.graphs:
        graphs = [LabeledGraph.from_json(Path(p).read_text()) for p in args.graphs]
    else:
        spec = load_spec(args)
        truth = spec.transform.kernel
        graphs = [generate(spec, args.seed + i) for i in range(args.n_graphs)]
    obs = ObservedGraphSet.from_graphs(graphs)
    kappa = None if args.kappa_law == "fit" else args.kappa_law
    cfg = MhConfig(order=args.order, iterations=args.iters, sigma=args.sigma, separable=not args.general,
                   hint=args.hint, kappa=kappa)
    res = mh_estimate(obs, cfg, seed=args.seed)
    grid = np.linspace(0, 1, 21)
    fitted = res.kernel._eval(grid[:, None], grid[None, :])
    out = {
        "theta": res.theta.coeffs,
        "kappa": res.kappa.to_dict(),
        "vertex_counts": obs.sizes,
        "trace": res.trace.to_dict(),
        "ambiguous": res.ambiguous,
        "grid": grid,
        "fitted": fitted,
    }
    if truth is not None:
        out["relative_l2_error"] = relative_l2_error(truth, res.kernel)
        out["relative_l1_error"] = relative_l1_error(truth, res.kernel)
    emit(dumps(out), args.out)
    if args.figure:
        from .plotting import plot_graphons

        panels = {"estimate": fitted}
        if truth is not None:
            panels = {"truth": truth._eval(grid[:, None], grid[None, :]), "estimate": fitted}
        plot_graphons(grid, panels, args.figure)
    return 0


def _read_csv(path: str) -> np.ndarray:
    try:
        text = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ValidationError(f"cannot read BN data: {exc}") from None
    if not text:
        raise ValidationError("BN data file is empty")
    skip = 0
    try:
        [float(v) for v in text[0].split(",")]
    except ValueError:
        skip = 1
    if len(text) <= skip:
        raise ValidationError("BN data file has no samples")
    try:
        data = np.loadtxt(path, delimiter=",", skiprows=skip, ndmin=2)
    except ValueError as exc:
        raise ValidationError(f"cannot parse BN data: {exc}") from None
    return data


def cmd_bn(args) -> int:
    from .applications.bayesnet import bn_mh_infer, chain_data, exhaustive_scan, skeleton
    from .distributions import Dirac
    from .edge_transforms import BernoulliTransform, Constant
    from .distributions import UnitInterval
    from .model import ModelSpec

    if args.data:
        data = _read_csv(args.data)
    else:
        data = chain_data(args.samples, args.flip, args.seed, args.vertices)
    spec = ModelSpec(Dirac(data.shape[1]), UnitInterval(), BernoulliTransform(Constant(args.p)))
    res = bn_mh_infer(spec, data, args.iters, args.rewire_n, args.seed, args.q, args.r)
    out = {
        "best_adjacency": (res.best.adjacency > 0).astype(int),
        "best_loglik": res.best_loglik,
        "skeleton": sorted(sorted(e) for e in skeleton(res.best.adjacency)),
        "trace": {"logliks": res.trace.logliks, "accepted": res.trace.accepted, "edges": res.trace.edges},
    }
    if args.exhaustive:
        adj, ll = exhaustive_scan(data, args.q, args.r)
        out["exhaustive"] = {"adjacency": adj, "loglik": ll}
    emit(dumps(out), args.out)
    if args.figure:
        from .plotting import plot_trace

        plot_trace(res.trace.logliks, args.figure, "log-likelihood")
    return 0


def cmd_nn(args) -> int:
    from .applications.neural import nn_wire
    from .distributions import parse_counting

    weights = _floats(args.layer_weights) if args.layer_weights else [1.0] * args.layers
    probs = _floats(args.probs) if args.probs else [0.5] * (args.layers - 1)
    w = nn_wire(args.layers, weights, probs, parse_counting(args.kappa), args.seed)
    out = w.to_dict()
    out["graph"] = w.graph.to_dict()
    emit(dumps(out), args.out)
    if args.figure:
        from .plotting import plot_adjacency

        order = np.argsort(w.graph.labels, kind="stable")
        plot_adjacency(w.graph.adjacency[np.ix_(order, order)], args.figure, "wiring (sorted by layer)")
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="measuregraph", description="Random graphs from random measures.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="sample graphs from a model spec")
    _add_model(g, required_seed=True)
    g.add_argument("--reps", type=int, default=1, help="number of graphs; graph i uses seed + i")
    g.add_argument("--format", choices=["json", "edgelist"], default="json")
    _add_out(g)
    g.set_defaults(func=cmd_generate)

    v = sub.add_parser("verify", help="Monte Carlo vs closed-form concordance table")
    _add_model(v)
    v.add_argument("--reps", type=int, default=10_000)
    v.add_argument("--quantities", default="edge_count,edge_weight,mean_degree,active_vertices")
    v.add_argument("--threshold", type=float, default=4.0)
    v.add_argument("--z-label", type=float, default=0.5, help="external label for the triangle check")
    v.add_argument("--threads", type=int, default=None)
    v.add_argument("--graphs", nargs="*", help="verify these graph JSON files instead of sampling")
    v.add_argument("--format", choices=["tsv", "json"], default="tsv")
    _add_out(v, figure=False)
    v.set_defaults(func=cmd_verify)

    d = sub.add_parser("degree-dist", help="degree distribution from the pgf")
    _add_model(d)
    d.add_argument("--direction", choices=["out", "in"], default="out")
    d.add_argument("--mode", choices=["vertex", "point"], default="vertex",
                   help="degree of a sampled vertex or of an external point")
    d.add_argument("--kmax", type=int, default=None)
    _add_out(d)
    d.set_defaults(func=cmd_degree_dist)

    for name, func, helptext in (("sobol", cmd_sobol, "Sobol indices of a kernel"),
                                 ("spectral", cmd_spectral, "singular values of a kernel operator")):
        s = sub.add_parser(name, help=helptext)
        _add_model(s)
        s.add_argument("--kernel", default=None, help="compact kernel, e.g. exponential:1 (else the model's kernel)")
        s.add_argument("--nodes", type=int, default=64)
        if name == "spectral":
            s.add_argument("--rank", type=int, default=None)
        s.add_argument("--format", choices=["tsv", "json"], default="tsv")
        _add_out(s)
        s.set_defaults(func=func)

    pr = sub.add_parser("primes", help="prime-graph densities and thresholds")
    pr.add_argument("--nu", choices=["zeta", "uniform"], default="zeta")
    pr.add_argument("--s-grid", default="1.1:4:0.01")
    pr.add_argument("--n", type=int, default=None)
    pr.add_argument("--kappa", default="poisson:10")
    _add_out(pr)
    pr.set_defaults(func=cmd_primes)

    sp = sub.add_parser("spin", help="spin-network partition functions")
    sp.add_argument("--sites", type=int, default=6)
    sp.add_argument("--spin", default="binomial:2:0.4", help="spin law per site (bounded support)")
    sp.add_argument("--radius", type=int, default=1)
    sp.add_argument("--coupling", type=float, default=1.0)
    sp.add_argument("--field", type=float, default=0.0)
    sp.add_argument("--self-interaction", action="store_true")
    sp.add_argument("--beta-grid", default="0:2:0.25")
    sp.add_argument("--mc", type=int, default=0, help="Monte Carlo samples per beta (0 disables)")
    sp.add_argument("--budget", type=int, default=2**20)
    sp.add_argument("--seed", type=int, default=0)
    _add_out(sp)
    sp.set_defaults(func=cmd_spin)

    e = sub.add_parser("estimate", help="Legendre graphon estimation from degrees")
    _add_model(e)
    e.add_argument("--graphs", nargs="*", help="observed graph JSON files (else sampled from the model)")
    e.add_argument("--n-graphs", type=int, default=5)
    e.add_argument("--order", type=int, default=3)
    e.add_argument("--iters", type=int, default=1000)
    e.add_argument("--sigma", type=float, default=0.01)
    e.add_argument("--general", action="store_true", help="full m x m coefficients instead of separable")
    e.add_argument("--hint", choices=["increasing", "decreasing", "none"], default="none")
    e.add_argument("--kappa-law", choices=["poisson", "fit", "dirac"], default="poisson")
    _add_out(e)
    e.set_defaults(func=cmd_estimate)

    b = sub.add_parser("bn", help="Bayesian-network structure search over STC DAGs")
    b.add_argument("--data", default=None, help="CSV, rows are samples, columns are vertices")
    b.add_argument("--samples", type=int, default=1000, help="synthetic chain samples when no --data")
    b.add_argument("--vertices", type=int, default=3)
    b.add_argument("--flip", type=float, default=0.2)
    b.add_argument("--p", type=float, default=0.5, help="constant graphon of the DAG prior")
    b.add_argument("--iters", type=int, default=500)
    b.add_argument("--rewire-n", type=int, default=1)
    b.add_argument("--q", type=int, default=2)
    b.add_argument("--r", type=int, default=2)
    b.add_argument("--exhaustive", action="store_true")
    b.add_argument("--seed", type=int, default=0)
    _add_out(b)
    b.set_defaults(func=cmd_bn)

    n = sub.add_parser("nn", help="random feed-forward wiring")
    n.add_argument("--layers", type=int, default=3)
    n.add_argument("--layer-weights", default=None, help="comma-separated layer weights (uniform by default)")
    n.add_argument("--probs", default=None, help="comma-separated consecutive-layer probabilities")
    n.add_argument("--kappa", default="poisson:30")
    n.add_argument("--seed", type=int, default=0)
    _add_out(n)
    n.set_defaults(func=cmd_nn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args) or 0)
    except BudgetError as exc:
        sys.stderr.write(f"budget error: {exc}\n")
        return EXIT_BUDGET
    except NumericalError as exc:
        sys.stderr.write(f"numerical error: {exc}\n")
        return EXIT_NUMERICAL
    except ValidationError as exc:
        sys.stderr.write(f"invalid input: {exc}\n")
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
