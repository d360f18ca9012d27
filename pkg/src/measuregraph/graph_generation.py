"""Graph samplers: STC graphs, DAGs, rewiring, fixed-edge multigraphs, thinning.

Degree-sequence tools live in :mod:`measuregraph.degree_sequences` and are
re-exported here.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from math import comb
from typing import Sequence

import numpy as np

from .distributions import EmpiricalLabels, UnitCube
from .edge_transforms import (
    BernoulliTransform,
    Digraphon,
    Kernel,
    PoissonTransform,
    Product,
    Restricted,
    Transform,
    WeightFunction,
)
from .errors import ValidationError
from .model import ModelSpec
from .random_measures import FaiwMeasure, make_rng, sample_faiw, w_transform
from .degree_sequences import (  # noqa: F401  (re-exported)
    DegreeSequence,
    conjugate,
    is_graphical,
    realize_degree_sequence,
)


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """Vertex labels plus a nonnegative weighted adjacency array.

    For undirected graphs the array is symmetric and each unordered pair
    appears twice, so ``adjacency.sum()`` is the product-measure value M(g o f)
    summed over ordered pairs.
    """

    labels: np.ndarray
    adjacency: np.ndarray
    directed: bool = False
    self_edges: bool = False
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        adj = np.asarray(self.adjacency, dtype=float)
        labels = np.asarray(self.labels)
        if adj.shape != (len(labels), len(labels)):
            raise ValidationError(f"adjacency {adj.shape} does not match {len(labels)} labels")
        if adj.size and adj.min() < 0:
            raise ValidationError("adjacency weights must be nonnegative")
        if not self.directed and not np.array_equal(adj, adj.T):
            raise ValidationError("undirected graph needs a symmetric adjacency")
        if not self.self_edges and np.any(np.diag(adj) != 0):
            raise ValidationError("graph without self-edges has a nonzero diagonal")
        object.__setattr__(self, "adjacency", adj)
        object.__setattr__(self, "labels", labels)

    @property
    def n_vertices(self) -> int:
        return len(self.labels)

    def edge_count(self, normalized: bool = False) -> float:
        """Number of active entries; normalized counts each unordered pair once."""
        active = self.adjacency > 0
        if normalized and not self.directed:
            return float(np.triu(active).sum())
        return float(active.sum())

    def total_weight(self, normalized: bool = False) -> float:
        if normalized and not self.directed:
            return float(np.triu(self.adjacency).sum())
        return float(self.adjacency.sum())

    def out_degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=1)

    def in_degrees(self) -> np.ndarray:
        return self.adjacency.sum(axis=0)

    def active_vertices(self) -> int:
        a = self.adjacency > 0
        return int(np.sum(a.any(axis=0) | a.any(axis=1)))

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        adj = self.adjacency
        if self.directed:
            ii, jj = np.nonzero(adj)
        else:
            ii, jj = np.nonzero(np.triu(adj))
        edges = [[int(i), int(j), _num(adj[i, j])] for i, j in zip(ii, jj)]
        return {
            "vertices": [_label_json(v) for v in self.labels],
            "edges": edges,
            "directed": bool(self.directed),
            "self_edges": bool(self.self_edges),
            "provenance": dict(self.provenance),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_edgelist(self) -> str:
        d = self.to_dict()
        return "".join(f"{i} {j} {w!r}\n" for i, j, w in d["edges"])

    @classmethod
    def from_dict(cls, d: dict) -> "LabeledGraph":
        try:
            labels = d["vertices"]
            n = len(labels)
            adj = np.zeros((n, n))
            for i, j, w in d["edges"]:
                adj[i, j] = w
                if not d["directed"]:
                    adj[j, i] = w
            arr = np.array(labels) if labels else np.zeros(0)
            return cls(arr, adj, bool(d["directed"]), bool(d["self_edges"]), dict(d.get("provenance", {})))
        except (KeyError, TypeError, IndexError) as exc:
            raise ValidationError(f"malformed graph document: {exc}") from None

    @classmethod
    def from_json(cls, text: str) -> "LabeledGraph":
        return cls.from_dict(json.loads(text))


def _num(v):
    v = float(v)
    return int(v) if v.is_integer() and abs(v) < 2**53 else v


def _label_json(v):
    if np.ndim(v):
        return [_label_json(u) for u in v]
    if isinstance(v, (np.integer, int)):
        return int(v)
    return float(v)


# ---------------------------------------------------------------------------
# STC sampling
# ---------------------------------------------------------------------------


def _param_matrix(transform: Transform, labels: np.ndarray, rows=None) -> np.ndarray:
    """Per-pair parameters; ``rows`` restricts to the given row indices."""
    xs = labels if rows is None else labels[rows]
    if labels.ndim > 1:
        return transform.param(xs[:, None, :], labels[None, :, :])
    return transform.param(xs[:, None], labels[None, :])


def _sample_adjacency(transform: Transform, labels: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    k = len(labels)
    if k == 0:
        return np.zeros((0, 0))
    if isinstance(transform, Digraphon):
        return _sample_digraphon(transform, labels, rng)
    params = _param_matrix(transform, labels)
    draws = transform.sample_from(rng, params)
    if transform.symmetric:
        upper = np.triu(draws)
        draws = upper + np.triu(draws, 1).T
    return draws


def _sample_digraphon(t: Digraphon, labels: np.ndarray, rng) -> np.ndarray:
    k = len(labels)
    adj = np.zeros((k, k))
    ii, jj = np.triu_indices(k, 1)
    if ii.size:
        fwd, back = t.sample_pairs(rng, labels[ii], labels[jj])
        same = labels[ii] == labels[jj]
        if same.any():
            # equal labels fall on the diagonal kernel R: a loop-like mutual pair
            g = t.loop_prob(labels[ii][same])
            mutual = (rng.random(g.shape) < g).astype(float)
            fwd[same] = mutual
            back[same] = mutual
        adj[ii, jj] = fwd
        adj[jj, ii] = back
    adj[np.arange(k), np.arange(k)] = (rng.random(k) < t.loop_prob(labels)).astype(float)
    return adj


def generate(spec: ModelSpec, seed: int, rng: np.random.Generator | None = None) -> LabeledGraph:
    """Sample K ~ kappa labels from nu and draw every pair's weight from Q."""
    rng = make_rng(seed) if rng is None else rng
    k = int(spec.kappa.sample(rng))
    labels = spec.nu.sample(rng, k)
    raw = _sample_adjacency(spec.transform, labels, rng)
    adj = spec.weight(raw) if spec.weight.kind != "identity" else raw
    return LabeledGraph(
        labels,
        adj,
        directed=spec.directed,
        self_edges=spec.self_edges,
        provenance={"spec_hash": spec.spec_hash(), "seed": int(seed)},
    )


def restrict_to_dag(spec: ModelSpec) -> ModelSpec:
    """Same model with the graphon f replaced by f 1{x < y}."""
    t = spec.transform
    if not isinstance(t, BernoulliTransform):
        raise ValidationError("DAG generation needs a Bernoulli transform")
    if not spec.nu.ordered:
        raise ValidationError("DAG generation needs an ordered label space")
    if isinstance(t.kernel, Restricted):
        return spec
    # multiplying by 1{x < y} keeps a validated kernel in range, so skip the probe
    return ModelSpec(spec.kappa, spec.nu, BernoulliTransform(Restricted(t.kernel)), spec.weight, validate=False)


def generate_dag(spec: ModelSpec, seed: int, rng: np.random.Generator | None = None) -> LabeledGraph:
    """Directed graph whose arcs always point from a smaller to a larger label."""
    return generate(restrict_to_dag(spec), seed, rng)


def topological_order(g: LabeledGraph) -> list[int] | None:
    """Kahn's algorithm; None when the graph has a cycle (self-loops count)."""
    a = g.adjacency > 0
    indeg = a.sum(axis=0).astype(int)
    order = []
    ready = [i for i in range(g.n_vertices) if indeg[i] == 0]
    while ready:
        v = ready.pop()
        order.append(v)
        for w in np.nonzero(a[v])[0]:
            indeg[w] -= 1
            if indeg[w] == 0:
                ready.append(int(w))
    return order if len(order) == g.n_vertices else None


def rewire(g: LabeledGraph, spec: ModelSpec, n: int, seed: int, variant: str = "touching",
           rng: np.random.Generator | None = None) -> LabeledGraph:
    """n-rewiring move: resample n labels and the edges they touch.

    variant "touching" redraws every entry in a row or column of J;
    "block" redraws only entries in J x J.
    """
    if g.provenance.get("spec_hash") not in (None, spec.spec_hash()):
        raise ValidationError("graph was not generated from this spec")
    k = g.n_vertices
    if not 0 <= n <= k:
        raise ValidationError(f"rewire size must lie in 0..{k}, got {n}")
    if variant not in ("touching", "block"):
        raise ValidationError(f"unknown rewiring variant {variant!r}")
    if n == 0:
        return g
    rng = make_rng(seed) if rng is None else rng
    chosen = np.sort(rng.choice(k, size=n, replace=False))
    labels = g.labels.copy()
    labels[chosen] = spec.nu.sample(rng, n)
    fresh = spec.weight(_sample_adjacency(spec.transform, labels, rng))
    mask = np.zeros((k, k), dtype=bool)
    if variant == "touching":
        mask[chosen, :] = True
        mask[:, chosen] = True
    else:
        mask[np.ix_(chosen, chosen)] = True
    adj = np.where(mask, fresh, g.adjacency)
    prov = dict(g.provenance)
    prov["seed"] = int(seed)
    return LabeledGraph(labels, adj, g.directed, g.self_edges, prov)


def rewire_mask_probability(k: int, n: int) -> float:
    """Chance that a fixed off-diagonal entry is redrawn by one 'touching' move."""
    if n <= 0:
        return 0.0
    return 1.0 - comb(k - 2, n) / comb(k, n) if k >= 2 else 1.0


# ---------------------------------------------------------------------------
# FAIW graphs and friends
# ---------------------------------------------------------------------------


def generate_faiw(m: FaiwMeasure, kernel, seed: int, transform: Transform | None = None) -> LabeledGraph:
    """Graph on the atoms with weights W_x W_y phi(x, y).

    With ``transform`` None the kernel is used deterministically.
    """
    rng = make_rng(seed)
    real = sample_faiw(m, seed, rng)
    atoms = np.asarray(m.atoms)
    if transform is None:
        base = kernel(atoms[:, None], atoms[None, :]) * np.ones((len(atoms), len(atoms)))
        directed = not getattr(kernel, "symmetric", True)
    else:
        base = _sample_adjacency(transform, atoms, rng)
        directed = not transform.symmetric
    adj = w_transform(real.weights, base)
    return LabeledGraph(atoms, adj, directed=directed, self_edges=bool(np.any(np.diag(adj))),
                        provenance={"seed": int(seed)})


def fixed_edge_multigraph(n_edges: int, probs, seed: int, symmetric: bool = False,
                          loops: bool = True, labels: Sequence | None = None) -> LabeledGraph:
    """Multigraph with exactly ``n_edges`` edges placed by a multinomial draw.

    The symmetric variant needs an even count: n/2 edges go to the upper
    triangle (with the diagonal when ``loops``) with cell probabilities
    p_xy + p_yx, and are mirrored, so entry means stay n p_xy.
    """
    p = np.asarray(probs, dtype=float)
    if p.ndim != 2 or p.shape[0] != p.shape[1]:
        raise ValidationError("cell probabilities must form a square table")
    if p.min() < 0 or abs(p.sum() - 1) > 1e-9:
        raise ValidationError("cell probabilities must be nonnegative and sum to 1")
    if int(n_edges) != n_edges or n_edges < 0:
        raise ValidationError("edge count must be a nonnegative integer")
    n_edges = int(n_edges)
    rng = make_rng(seed)
    m = p.shape[0]
    labels = np.arange(1, m + 1) if labels is None else np.asarray(labels)
    if not symmetric:
        counts = rng.multinomial(n_edges, p.ravel()).reshape(m, m).astype(float)
        return LabeledGraph(labels, counts, directed=True, self_edges=True, provenance={"seed": int(seed)})
    if n_edges % 2:
        raise ValidationError("symmetric fixed-edge multigraph needs an even edge count")
    if not np.allclose(p, p.T):
        raise ValidationError("symmetric variant needs p_xy = p_yx")
    ii, jj = np.triu_indices(m, 0 if loops else 1)
    cell = np.where(ii == jj, p[ii, jj], 2 * p[ii, jj])
    if not loops and np.any(np.diag(p) > 0):
        raise ValidationError("loop-free variant needs a zero diagonal")
    counts = rng.multinomial(n_edges // 2, cell / cell.sum())
    adj = np.zeros((m, m))
    adj[ii, jj] = counts
    adj[jj, ii] = counts
    # a diagonal cell carries both mirrored halves
    adj[np.diag_indices(m)] *= 2
    return LabeledGraph(labels, adj, directed=False, self_edges=loops, provenance={"seed": int(seed)})


@dataclass(frozen=True)
class ThinResult:
    weights: np.ndarray
    total: float
    source: np.ndarray = field(repr=False)

    @property
    def array(self) -> np.ndarray:
        return w_transform(self.weights, self.source)


def bernoulli_thin(a, p, seed: int, rng: np.random.Generator | None = None) -> ThinResult:
    """Keep row/column x with probability p_x; the total is ||diag(W) A diag(W)||_1."""
    a = np.asarray(a, dtype=float)
    p = np.asarray(p, dtype=float)
    if a.ndim != 2 or a.shape != (p.size, p.size):
        raise ValidationError(f"probability vector of length {p.size} does not match array {a.shape}")
    rng = make_rng(seed) if rng is None else rng
    w = (rng.random(p.size) < p).astype(float)
    keep = np.flatnonzero(w)
    total = float(a[np.ix_(keep, keep)].sum())
    return ThinResult(w, total, a)


def thinning_mean(a, p) -> float:
    """Sum of Z_xy A_xy with Z_xx = p_x and Z_xy = p_x p_y."""
    a = np.asarray(a, dtype=float)
    p = np.asarray(p, dtype=float)
    z = np.outer(p, p)
    np.fill_diagonal(z, p)
    return float(np.sum(z * a))


def zeta_thinning_mean(s: float) -> float:
    """Untruncated E M(E x E) for Bernoulli(x^-s) weights on the positive integers."""
    from .special import zeta

    return zeta(s) - zeta(2 * s) + zeta(s) ** 2


def soft_fixed_degree(degrees: Sequence[float], seed: int) -> LabeledGraph:
    """Poisson multigraph on degree labels with mean x y / m, preserving degrees in mean."""
    d = np.asarray(degrees, dtype=float)
    m = float(d.sum())
    if m <= 0:
        raise ValidationError("soft fixed-degree graph needs a positive total degree")
    spec = ModelSpec(
        _FixedCount(len(d)),
        EmpiricalLabels(tuple(d.tolist())),
        PoissonTransform(Product(1.0 / m)),
        validate=False,
    )
    rng = make_rng(seed)
    adj = _sample_adjacency(spec.transform, d, rng)
    return LabeledGraph(d, adj, directed=False, self_edges=True, provenance={"seed": int(seed)})


def _FixedCount(n: int):
    from .distributions import Dirac

    return Dirac(n)


def empirical_graph(points: Sequence, transform: Transform, seed: int) -> LabeledGraph:
    """Graph on the observed points themselves (no resampling)."""
    x = np.asarray(points)
    rng = make_rng(seed)
    adj = _sample_adjacency(transform, x, rng)
    return LabeledGraph(x, adj, directed=not transform.symmetric,
                        self_edges=not transform.zero_diagonal, provenance={"seed": int(seed)})
