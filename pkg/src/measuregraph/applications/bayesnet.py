"""Random Bayesian networks on STC random DAGs.

Vertex v of the DAG indexes column v of the data. Each vertex gets a
counting transition kernel from its binned parent values to its own binned
value. Structure inference runs Metropolis-Hastings over DAGs whose
proposals are rewiring moves of the STC DAG model.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from ..errors import ValidationError
from ..graph_generation import LabeledGraph, generate_dag, restrict_to_dag, rewire, topological_order
from ..model import ModelSpec
from ..random_measures import make_rng

LOG_FLOOR = 1e-300


def quantile_bins(values: np.ndarray, bins: int) -> np.ndarray:
    """Bin index per value: one bin per distinct value when there are few, else quantile cuts."""
    values = np.asarray(values, dtype=float)
    uniq = np.unique(values)
    if uniq.size <= bins:
        return np.searchsorted(uniq, values)
    cuts = np.unique(np.quantile(values, np.linspace(0, 1, bins + 1)[1:-1]))
    return np.searchsorted(cuts, values, side="right")


@dataclass(frozen=True)
class VertexKernel:
    parents: tuple
    cells: np.ndarray          # parent-cell index per sample
    table: np.ndarray          # rows: parent cells, columns: child bins
    child_bins: np.ndarray     # child bin per sample


@dataclass(frozen=True)
class BayesNet:
    adjacency: np.ndarray
    kernels: tuple
    merged_cells: int = 0

    def loglik(self) -> float:
        total = 0.0
        for k in self.kernels:
            probs = k.table[k.cells, k.child_bins]
            total += float(np.sum(np.log(np.maximum(probs, LOG_FLOOR))))
        return total


def _as_matrix(dag) -> np.ndarray:
    adj = np.asarray(dag.adjacency if isinstance(dag, LabeledGraph) else dag, dtype=float)
    if adj.ndim != 2 or adj.shape[0] != adj.shape[1]:
        raise ValidationError("DAG adjacency must be square")
    return (adj > 0).astype(int)


def _check_acyclic(adj: np.ndarray) -> None:
    g = LabeledGraph(np.arange(len(adj), dtype=float), adj.astype(float), directed=True, self_edges=True)
    if topological_order(g) is None:
        raise ValidationError("graph is not acyclic")


def _merge_empty(counts: np.ndarray, shape: tuple) -> tuple[np.ndarray, int]:
    """Give each empty parent cell the counts of its nearest nonempty cell (L1 in bin indices)."""
    totals = counts.sum(axis=1)
    empty = np.flatnonzero(totals == 0)
    full = np.flatnonzero(totals > 0)
    if empty.size == 0 or full.size == 0:
        return counts, 0
    coords_full = np.array(np.unravel_index(full, shape)).T
    out = counts.copy()
    for e in empty:
        ce = np.array(np.unravel_index(e, shape))
        nearest = full[np.argmin(np.abs(coords_full - ce).sum(axis=1))]
        out[e] = counts[nearest]
    return out, int(empty.size)


def bn_build_kernels(dag, data: np.ndarray, q: int = 2, r: int = 2) -> BayesNet:
    """Counting transition kernels: row i of vertex z is D_z(A_i x B_j) / D_z(A_i x F_z)."""
    adj = _as_matrix(dag)
    data = np.asarray(data, dtype=float)
    if data.ndim != 2 or data.shape[1] != len(adj):
        raise ValidationError(f"data needs {len(adj)} columns, got shape {data.shape}")
    if data.shape[0] == 0:
        raise ValidationError("data has no samples")
    if q < 1 or r < 1:
        raise ValidationError("bin counts must be >= 1")
    _check_acyclic(adj)
    parent_bins = [quantile_bins(data[:, v], q) for v in range(len(adj))]
    kernels = []
    merged = 0
    for z in range(len(adj)):
        parents = tuple(int(p) for p in np.flatnonzero(adj[:, z]))
        child = quantile_bins(data[:, z], r)
        n_child = int(child.max()) + 1
        if parents:
            shape = tuple(int(parent_bins[p].max()) + 1 for p in parents)
            cells = np.ravel_multi_index([parent_bins[p] for p in parents], shape)
            n_cells = int(np.prod(shape))
        else:
            shape = (1,)
            cells = np.zeros(len(data), dtype=int)
            n_cells = 1
        counts = np.zeros((n_cells, n_child))
        np.add.at(counts, (cells, child), 1.0)
        counts, n_merged = _merge_empty(counts, shape)
        merged += n_merged
        table = counts / counts.sum(axis=1, keepdims=True)
        kernels.append(VertexKernel(parents, cells, table, child))
    if merged:
        warnings.warn(f"{merged} empty parent cells merged with their nearest neighbours", RuntimeWarning, stacklevel=2)
    return BayesNet(adj, tuple(kernels), merged)


def bn_likelihood(dag, data, q: int = 2, r: int = 2) -> float:
    """Log-likelihood of the data under the counting kernels of the given DAG."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        return bn_build_kernels(dag, data, q, r).loglik()


def all_dags(n: int):
    """Every DAG on n labelled vertices (25 for n = 3)."""
    pairs = [(i, j) for i in range(n) for j in range(n) if i != j]
    for bits in itertools.product((0, 1), repeat=len(pairs)):
        adj = np.zeros((n, n), dtype=int)
        for (i, j), b in zip(pairs, bits):
            adj[i, j] = b
        try:
            _check_acyclic(adj)
        except ValidationError:
            continue
        yield adj


def exhaustive_scan(data, q: int = 2, r: int = 2) -> tuple[np.ndarray, float]:
    """Maximum-likelihood DAG over all DAGs on the data's columns (small n only)."""
    n = np.asarray(data).shape[1]
    if n > 4:
        raise ValidationError("exhaustive DAG scan is limited to 4 vertices")
    best, best_ll = None, -np.inf
    for adj in all_dags(n):
        ll = bn_likelihood(adj, data, q, r)
        if ll > best_ll + 1e-12:
            best, best_ll = adj, ll
    return best, best_ll


@dataclass
class BnTrace:
    logliks: list = field(default_factory=list)
    accepted: list = field(default_factory=list)
    edges: list = field(default_factory=list)


@dataclass(frozen=True)
class BnResult:
    best: LabeledGraph
    best_loglik: float
    trace: BnTrace


def bn_mh_infer(spec: ModelSpec, data, iterations: int = 500, rewire_n: int = 1, seed: int = 0,
                q: int = 2, r: int = 2) -> BnResult:
    """MH over STC DAGs with rewiring proposals; returns the best DAG visited."""
    data = np.asarray(data, dtype=float)
    dag_spec = restrict_to_dag(spec)
    rng = make_rng(seed)
    n_vars = data.shape[1]
    current = None
    # the STC vertex count is random; draw until it matches the data dimension
    for attempt in range(1000):
        g = generate_dag(dag_spec, seed, make_rng(seed, attempt))
        if g.n_vertices == n_vars:
            current = g
            break
    if current is None:
        raise ValidationError(f"spec never produced a {n_vars}-vertex DAG; use a Dirac({n_vars}) vertex count")
    cache: dict = {}

    def loglik(graph: LabeledGraph) -> float:
        key = (graph.adjacency > 0).tobytes()
        if key not in cache:
            cache[key] = bn_likelihood(graph.adjacency, data, q, r)
        return cache[key]

    cur_ll = loglik(current)
    best, best_ll = current, cur_ll
    trace = BnTrace([cur_ll], [True], [int((current.adjacency > 0).sum())])
    for _ in range(iterations):
        proposal = rewire(current, dag_spec, rewire_n, seed, rng=rng)
        if topological_order(proposal) is None:
            raise ValidationError("rewiring produced a cyclic graph")
        ll = loglik(proposal)
        accept = np.log(rng.random()) < ll - cur_ll
        if accept:
            current, cur_ll = proposal, ll
            if ll > best_ll:
                best, best_ll = proposal, ll
        trace.logliks.append(cur_ll)
        trace.accepted.append(bool(accept))
        trace.edges.append(int((current.adjacency > 0).sum()))
    return BnResult(best, best_ll, trace)


def chain_data(samples: int, flip: float, seed: int, n: int = 3) -> np.ndarray:
    """Binary Markov chain X1 -> X2 -> ... with each link flipping the bit w.p. ``flip``."""
    rng = make_rng(seed)
    out = np.zeros((samples, n), dtype=int)
    out[:, 0] = rng.random(samples) < 0.5
    for j in range(1, n):
        flips = rng.random(samples) < flip
        out[:, j] = np.where(flips, 1 - out[:, j - 1], out[:, j - 1])
    return out


def skeleton(adj) -> frozenset:
    a = np.asarray(adj) > 0
    return frozenset(frozenset((int(i), int(j))) for i, j in zip(*np.nonzero(a | a.T)) if i < j)
