"""Acceptance criteria 1 to 12, one test each; every test reports a pass/fail line in the summary."""

import time

import numpy as np
import pytest
from scipy import stats

from measuregraph.analytics import degree_distribution, gc_threshold, giant_component
from measuregraph.applications.bayesnet import bn_mh_infer, chain_data, exhaustive_scan
from measuregraph.applications.primes import (
    edge_density_max,
    prime_density_max,
    prime_table,
    zeta_gc_threshold,
)
from measuregraph.applications.spin import SpinNetwork, spin_laplace_mc, spin_partition, spin_partition_gibbs
from measuregraph.cli import main
from measuregraph.decomposition import exponential_sobol_indices, sobol
from measuregraph.degree_sequences import is_graphical, realize_degree_sequence
from measuregraph.distributions import Bernoulli, Binomial, Dirac, Poisson, QuadratureRule, UnitCube, UnitInterval
from measuregraph.edge_transforms import (
    BernoulliTransform,
    Block,
    Constant,
    DotProduct,
    Exponential,
    PoissonTransform,
    PowerLaw,
    constant_digraphon,
)
from measuregraph.estimation import MhConfig, ObservedGraphSet, mh_estimate, relative_l2_error
from measuregraph.graph_generation import (
    bernoulli_thin,
    generate,
    rewire,
    rewire_mask_probability,
    thinning_mean,
    zeta_thinning_mean,
)
from measuregraph.model import ModelSpec
from measuregraph.random_measures import make_rng
from measuregraph.verification import verify
from oracles import nonincreasing_sequences, simple_graph_sequences, symmetric_01_sequences

LEB = UnitInterval()


def bern(kappa, kernel, nu=LEB):
    return ModelSpec(kappa, nu, BernoulliTransform(kernel))


def test_criterion_01_concordance_battery(criterion):
    report = criterion(1, "MC vs closed-form edge count/weight")
    battery = {
        "ER dirac": bern(Dirac(30), Constant(0.3)),
        "ER poisson": bern(Poisson(30), Constant(0.3)),
        "power-law": bern(Poisson(30), PowerLaw(1.0)),
        "exponential": bern(Poisson(50), Exponential(2.0)),
        "block": bern(Poisson(30), Block((0.4,), ((0.6, 0.1), (0.1, 0.4)))),
        "dot-product": bern(Poisson(30), DotProduct(1.0, 2), UnitCube(2)),
        "poisson transform": ModelSpec(Poisson(20), LEB, PoissonTransform(PowerLaw(1.0))),
        "digraphon": ModelSpec(Poisson(30), LEB, constant_digraphon(0.1, 0.2, 0.5)),
    }
    start = time.perf_counter()
    worst = {}
    for name, spec in battery.items():
        rows = verify(spec, 10_000, seed=2024, quantities=("edge_count", "edge_weight"))
        worst[name] = max(abs(r.z) for r in rows)
    elapsed = time.perf_counter() - start
    name, zmax = max(worst.items(), key=lambda kv: kv[1])
    report.check(zmax <= 4 and elapsed <= 60,
                 f"{len(battery)} specs, max |z| = {zmax:.2f} ({name}), {elapsed:.1f} s")


# the mass beyond the largest sampled degree is charged to the TV below
@pytest.mark.filterwarnings("ignore::measuregraph.errors.TruncationWarning")
def test_criterion_02_degree_distribution(criterion):
    report = criterion(2, "degree-distribution extraction")
    probs = degree_distribution(bern(Dirac(20), Constant(0.3))).coefficients(19).probs
    err = float(np.max(np.abs(probs - stats.binom.pmf(np.arange(20), 19, 0.3))))

    spec = bern(Poisson(30), PowerLaw(1.0))
    degs, seed = [], 0
    while sum(map(len, degs)) < 100_000:
        degs.append(generate(spec, seed).out_degrees())
        seed += 1
    degs = np.concatenate(degs).astype(int)[:100_000]
    k_max = int(degs.max())
    hist = np.bincount(degs, minlength=k_max + 1) / len(degs)
    pmf = degree_distribution(spec).coefficients(k_max).probs
    tv = 0.5 * float(np.abs(hist - pmf).sum()) + 0.5 * max(0.0, 1 - float(pmf.sum()))
    report.check(err <= 1e-8 and tv <= 0.02, f"Binomial(19, 0.3) max error {err:.1e}; power-law TV {tv:.4f}")


def test_criterion_03_giant_component(criterion):
    report = criterion(3, "giant-component thresholds")
    verdicts_ok = all(
        giant_component(bern(Poisson(c), Constant(p))).verdict == (c * p > 1)
        for c in (0.5, 1.0, 2.0, 5.0) for p in (0.1, 0.3, 0.6, 1.0) if abs(c * p - 1) > 1e-12
    )
    verdicts_ok &= all(
        giant_component(bern(Dirac(n), Constant(p))).verdict == (p > 1 / (n - 1))
        for n in (3, 4, 8) for p in (0.1, 0.2, 0.4, 0.6, 0.9) if abs(p * (n - 1) - 1) > 1e-12
    )
    # with p = 1 the Poisson boundary sits at c = 1
    verdicts_ok &= not giant_component(bern(Poisson(1.0), Constant(1.0))).verdict
    errs = [abs(gc_threshold(lambda p: giant_component(bern(Poisson(c), Constant(p))).margin, 1e-6, 1.0) - 1 / c)
            for c in (2.0, 4.0, 10.0)]
    errs += [abs(gc_threshold(lambda p: giant_component(bern(Dirac(n), Constant(p))).margin, 1e-6, 1.0) - 1 / (n - 1))
             for n in (3, 6, 11)]
    report.check(verdicts_ok and max(errs) <= 1e-9, f"verdicts {'ok' if verdicts_ok else 'wrong'}, max root error {max(errs):.1e}")


def test_criterion_04_prime_graphs(criterion):
    report = criterion(4, "prime-graph maxima and GC curve")
    s1, v1 = prime_density_max()
    s2, v2 = edge_density_max()
    curve = np.array([zeta_gc_threshold(s) for s in np.arange(1.2, 4.0001, 0.01)])
    ok = (abs(s1 - 1.49107) <= 1e-3 and abs(v1 - 0.325236) <= 1e-4
          and abs(s2 - 1.41152) <= 1e-3 and abs(v2 - 0.0819344) <= 1e-4
          and bool(np.all(np.isfinite(curve) & (curve > 0))))
    report.check(ok, f"nu(P) max {v1:.6f} at s={s1:.5f}; edge max {v2:.7f} at s={s2:.5f}; GC curve min {curve.min():.3f}")


def test_criterion_05_sobol(criterion):
    report = criterion(5, "Sobol decomposition of exp(-a(x+y))")
    idx_err, ident_err = 0.0, 0.0
    for a in (0.5, 1.0, 2.0, 5.0):
        d = sobol(Exponential(a))
        closed = exponential_sobol_indices(a)
        idx_err = max(idx_err, *(abs(d.indices[k] - closed[k]) for k in ("S1", "S2", "S12")))
        w = d.weights
        ident_err = max(ident_err, abs(w @ d.w1), abs(w @ d.w2), float(np.max(np.abs(d.w12 @ w))),
                        float(np.max(np.abs(w @ d.w12))), abs(d.var_w1 + d.var_w2 + d.var_w12 - d.var_w),
                        abs(sum(d.indices.values()) - 1))
    ed = sobol(Exponential(50.0), rule=QuadratureRule(nodes=200)).effective_dimension
    report.check(idx_err <= 1e-6 and ident_err <= 1e-8 and ed >= 1.9,
                 f"index error {idx_err:.1e}, identity error {ident_err:.1e}, ED(50) = {ed:.4f}")


def test_criterion_06_graphon_estimation(criterion):
    report = criterion(6, "graphon estimation (5 Poisson(30) graphs, m=3, sigma=0.01, l=1000)")
    truth = PowerLaw(1.0)
    spec = bern(Poisson(30), truth)
    config = MhConfig(order=3, iterations=1000, sigma=0.01, separable=True, hint="decreasing")
    errors, slowest = [], 0.0
    for s in range(10):
        start = time.perf_counter()
        obs = ObservedGraphSet.from_graphs([generate(spec, 1000 * s + i) for i in range(5)])
        res = mh_estimate(obs, config, seed=s)
        slowest = max(slowest, time.perf_counter() - start)
        errors.append(relative_l2_error(truth, res.kernel))
    good = sum(e <= 0.10 for e in errors)
    report.check(good >= 8 and slowest <= 300,
                 f"{good}/10 runs with relative L2 <= 0.10 (max {max(errors):.3f}), slowest run {slowest:.1f} s")


def test_criterion_07_graphicality(criterion):
    report = criterion(7, "graphicality vs brute force")
    mismatches, realized, bad_realizations = 0, 0, 0
    for n in range(1, 7):
        simple, symmetric = simple_graph_sequences(n), symmetric_01_sequences(n)
        for seq in nonincreasing_sequences(n, 5):
            eg, gr = is_graphical(seq, "EG"), is_graphical(seq, "GR")
            mismatches += (eg != (seq in simple)) + (gr != (seq in symmetric))
            if eg:
                realized += 1
                bad_realizations += not np.array_equal(realize_degree_sequence(seq, "simple").out_degrees(), seq)
            if gr:
                realized += 1
                g = realize_degree_sequence(seq, "bipartite-flow")
                bad_realizations += not np.array_equal(g.out_degrees(), seq)
    report.check(mismatches == 0 and bad_realizations == 0,
                 f"{mismatches} disagreements; {realized} realizations, {bad_realizations} with wrong degrees")


def test_criterion_08_spin(criterion):
    report = criterion(8, "spin partition function: enumeration vs Gibbs vs MC")
    nets = [
        SpinNetwork((Bernoulli(0.5),) * 10, lambda x, y: np.ones(np.broadcast_shapes(np.shape(x), np.shape(y))), radius=1),
        SpinNetwork((Binomial(2, 0.4),) * 8, lambda x, y: 0.3 + 0.2 * np.abs(x - y), radius=2, field=lambda x: 0.1 * x),
        SpinNetwork((Binomial(3, 0.3),) * 10, lambda x, y: np.full(np.broadcast_shapes(np.shape(x), np.shape(y)), 0.5),
                    radius=1, self_interaction=True),
    ]
    route_err, zmax = 0.0, 0.0
    for i, net in enumerate(nets):
        for beta in (0.25, 1.0):
            exact = float(spin_partition(net, beta))
            route_err = max(route_err, abs(exact - spin_partition_gibbs(net, beta)))
            est = spin_laplace_mc(net, beta, 100_000, seed=17 + i)
            zmax = max(zmax, abs(est.mean - exact) / est.stderr)
    report.check(route_err <= 1e-12 and zmax <= 4, f"route difference {route_err:.1e}, max MC |z| {zmax:.2f}")


def test_criterion_09_thinning(criterion):
    report = criterion(9, "Bernoulli thinning at s=2")
    n = 2000
    x = np.arange(1, n + 1, dtype=float)
    p = x**-2.0
    a = np.ones((n, n))
    truncated = thinning_mean(a, p)
    tail = zeta_thinning_mean(2.0) - truncated
    rng = make_rng(2)
    totals = np.array([bernoulli_thin(a, p, 0, rng).total for _ in range(10_000)])
    z = (totals.mean() - truncated) / (totals.std(ddof=1) / np.sqrt(len(totals)))
    report.check(abs(z) <= 4, f"truncated mean {truncated:.6f}, tail {tail:.2e}, MC z = {z:.2f}")


def test_criterion_10_rewiring(criterion):
    report = criterion(10, "rewiring keeps the mean adjacency")
    spec = bern(Dirac(10), Constant(0.3))
    g = generate(spec, 1)
    rng = make_rng(77)
    steps = 10_000
    total = np.zeros((10, 10))
    for _ in range(steps):
        g = rewire(g, spec, 2, 0, rng=rng)
        total += g.adjacency
    mean = total / steps
    off = ~np.eye(10, dtype=bool)
    # successive states share most entries; scale the iid error by the refresh time of one entry
    refresh = 1 / rewire_mask_probability(10, 2)
    se = np.sqrt(0.3 * 0.7 / steps * (2 * refresh - 1))
    worst = float(np.max(np.abs(mean[off] - 0.3)) / se)
    report.check(worst <= 4, f"max entrywise |z| {worst:.2f} over 90 entries")


def test_criterion_11_bn_recovery(criterion):
    report = criterion(11, "BN structure recovery on 3-vertex chains")
    spec = bern(Dirac(3), Constant(0.5))
    hits = 0
    for s in range(10):
        data = chain_data(1000, 0.2, 100 + s)
        _, best_ll = exhaustive_scan(data)
        res = bn_mh_infer(spec, data, iterations=500, seed=s)
        hits += res.best_loglik >= best_ll - 1e-9
    report.check(hits >= 8, f"{hits}/10 runs reach the exhaustive maximum log-likelihood")


def test_criterion_12_tables_regenerate(criterion, capsys):
    report = criterion(12, "prime density table regenerated by the CLI")
    code = main(["primes", "--nu", "zeta", "--s-grid", "1.1:4:0.01"])
    out = capsys.readouterr().out.strip().splitlines()
    rows = [list(map(float, l.split("\t"))) for l in out[1:]]
    s = np.round(1.1 + 0.01 * np.arange(291), 12)
    expected = prime_table(s)
    same = code == 0 and len(rows) == len(expected) and all(
        r[0] == e["s"] and r[1] == e["prime_density"] and r[2] == e["edge_density"] for r, e in zip(rows, expected)
    )
    report.check(same, f"{len(rows)} rows, identical to the library table: {same}")
