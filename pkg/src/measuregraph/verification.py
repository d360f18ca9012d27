"""Monte Carlo versus closed-form concordance tables."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .analytics import mean_active_vertices, mean_edge_terms, triangle_mean
from .distributions import DEFAULT_RULE, QuadratureRule
from .edge_transforms import Digraphon
from .errors import ValidationError
from .graph_generation import _sample_adjacency, generate
from .model import ModelSpec
from .random_measures import make_rng

QUANTITIES = ("edge_count", "edge_weight", "mean_degree", "active_vertices", "triangle")


@dataclass(frozen=True)
class VerifyRow:
    quantity: str
    analytic: float
    mc_mean: float
    mc_stderr: float
    z: float

    def to_dict(self) -> dict:
        return asdict(self)


def thread_count(default: int = 1) -> int:
    """Worker threads, capped by MEASUREGRAPH_THREADS when set."""
    env = os.environ.get("MEASUREGRAPH_THREADS")
    if env:
        try:
            cap = int(env)
        except ValueError:
            raise ValidationError(f"MEASUREGRAPH_THREADS must be an integer, got {env!r}") from None
        return max(1, min(cap, os.cpu_count() or 1))
    return max(1, default)


def _z(analytic: float, mean: float, se: float) -> float:
    if se == 0:
        return 0.0 if np.isclose(mean, analytic, rtol=1e-12, atol=1e-12) else float(np.inf)
    return (mean - analytic) / se


def _triangle_draw(spec: ModelSpec, labels, adj, z, rng) -> float:
    """Sum over ordered vertex pairs i != j of w(i, j) w(j, z) w(z, i), z an external label."""
    t = spec.transform
    k = len(labels)
    if k < 2:
        return 0.0
    zz = np.full(k, z, dtype=float) if spec.nu.dim is None else np.tile(np.asarray(z, float), (k, 1))
    to_z = spec.weight(t.sample_from(rng, t.param(labels, zz)))
    if spec.directed:
        from_z = spec.weight(t.sample_from(rng, t.param(zz, labels)))
    else:
        from_z = to_z
    inner = adj.copy()
    np.fill_diagonal(inner, 0.0)
    return float(from_z @ inner @ to_z)


def _replicate(spec: ModelSpec, seed: int, quantities, z) -> dict:
    rng = make_rng(seed)
    k = int(spec.kappa.sample(rng))
    labels = spec.nu.sample(rng, k)
    raw = _sample_adjacency(spec.transform, labels, rng)
    adj = spec.weight(raw) if spec.weight.kind != "identity" else raw
    out = {"vertices": float(k)}
    active = adj > 0
    if "edge_count" in quantities or "mean_degree" in quantities:
        out["edge_count"] = float(active.sum())
    if "edge_weight" in quantities:
        out["edge_weight"] = float(adj.sum())
    if "active_vertices" in quantities:
        out["active_vertices"] = float(np.sum(active.any(axis=0) | active.any(axis=1)))
    if "triangle" in quantities:
        out["triangle"] = _triangle_draw(spec, labels, adj, z, rng)
    return out


def _run(spec, reps, seed, quantities, z, threads) -> list[dict]:
    seeds = [seed + i for i in range(reps)]
    if threads <= 1:
        return [_replicate(spec, s, quantities, z) for s in seeds]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda s: _replicate(spec, s, quantities, z), seeds, chunksize=64))


def verify(spec: ModelSpec, reps: int = 10_000, seed: int = 0, quantities=("edge_count", "edge_weight"),
           z=0.5, threads: int | None = None, rule: QuadratureRule = DEFAULT_RULE) -> list[VerifyRow]:
    """Analytic value, MC mean, MC standard error and z-score per requested quantity.

    Replication i uses seed + i, so its graph equals generate(spec, seed + i).
    """
    if reps < 2:
        raise ValidationError("verification needs at least 2 replications")
    unknown = set(quantities) - set(QUANTITIES)
    if unknown:
        raise ValidationError(f"unknown quantities {sorted(unknown)}")
    quantities = tuple(quantities)
    if "triangle" in quantities and isinstance(spec.transform, Digraphon):
        raise ValidationError("triangle verification does not cover digraphons")
    draws = _run(spec, reps, seed, quantities, z, thread_count(1) if threads is None else threads)
    table = {key: np.array([d[key] for d in draws]) for key in draws[0]}
    rows = []

    def add(name, analytic, sample):
        mean = float(sample.mean())
        se = float(sample.std(ddof=1) / np.sqrt(len(sample)))
        rows.append(VerifyRow(name, float(analytic), mean, se, _z(analytic, mean, se)))

    if "edge_count" in quantities:
        s, e, _ = mean_edge_terms(spec, rule)
        add("edge_count", s + e, table["edge_count"])
    if "edge_weight" in quantities:
        s, e, _ = mean_edge_terms(spec, rule, weighted=True)
        add("edge_weight", s + e, table["edge_weight"])
    if "mean_degree" in quantities:
        # pooled degree per vertex estimates E[sum of degrees] / E K; delta-method error
        s, e, _ = mean_edge_terms(spec, rule)
        analytic = (s + e) / spec.kappa.mean
        num, den = table["edge_count"], table["vertices"]
        ratio = num.sum() / den.sum() if den.sum() else 0.0
        resid = (num - ratio * den) / den.mean() if den.mean() else num * 0
        se = float(resid.std(ddof=1) / np.sqrt(len(num)))
        rows.append(VerifyRow("mean_degree", analytic, float(ratio), se, _z(analytic, float(ratio), se)))
    if "active_vertices" in quantities:
        add("active_vertices", mean_active_vertices(spec, rule=rule), table["active_vertices"])
    if "triangle" in quantities:
        add("triangle", triangle_mean(spec, z, rule), table["triangle"])
    return rows


def verify_graphs(spec: ModelSpec, graphs, rule: QuadratureRule = DEFAULT_RULE) -> list[VerifyRow]:
    """Concordance of already-generated graphs (e.g. re-read from JSON) with the closed forms."""
    if len(graphs) < 2:
        raise ValidationError("need at least 2 graphs")
    counts = np.array([g.edge_count() for g in graphs])
    weights = np.array([g.total_weight() for g in graphs])
    rows = []
    for name, sample, weighted in (("edge_count", counts, False), ("edge_weight", weights, True)):
        s, e, _ = mean_edge_terms(spec, rule, weighted=weighted)
        mean = float(sample.mean())
        se = float(sample.std(ddof=1) / np.sqrt(len(sample)))
        rows.append(VerifyRow(name, s + e, mean, se, _z(s + e, mean, se)))
    return rows


def generate_many(spec: ModelSpec, reps: int, seed: int, threads: int | None = None):
    seeds = [seed + i for i in range(reps)]
    n = thread_count(1) if threads is None else threads
    if n <= 1:
        return [generate(spec, s) for s in seeds]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(lambda s: generate(spec, s), seeds))
