"""Degree sequences: conjugates, graphicality criteria and realizations.

Three notions of graphical are supported:

* ``CM``: realizable by a configuration-model multigraph (even total).
* ``GR``: realizable by a symmetric 0/1 matrix, loops allowed and counted
  once (Gale-Ryser majorization by the conjugate).
* ``EG``: realizable by a simple graph (Erdos-Gallai inequalities).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import InfeasibleError, ValidationError


@dataclass(frozen=True)
class DegreeSequence:
    values: tuple

    def __post_init__(self):
        vals = tuple(int(v) for v in self.values)
        if any(v < 0 for v in vals):
            raise ValidationError("degrees must be nonnegative")
        object.__setattr__(self, "values", tuple(sorted(vals, reverse=True)))

    @property
    def total(self) -> int:
        return sum(self.values)

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


def _seq(d) -> tuple[int, ...]:
    if isinstance(d, DegreeSequence):
        return d.values
    vals = tuple(int(v) for v in d)
    if any(v < 0 for v in vals):
        raise ValidationError("degrees must be nonnegative")
    return vals


def conjugate(d) -> tuple[int, ...]:
    """D*_k = |{i : D_i >= k}| for k = 1..n."""
    vals = np.asarray(_seq(d))
    n = len(vals)
    return tuple(int(np.sum(vals >= k)) for k in range(1, n + 1))


def _sorted(d) -> tuple[int, ...]:
    vals = _seq(d)
    if list(vals) != sorted(vals, reverse=True):
        raise ValidationError("degree sequence must be sorted nonincreasing")
    return vals


def first_violation(d, criterion: str = "EG") -> str | None:
    """Human-readable description of the first failing condition, or None."""
    vals = _sorted(d)
    n = len(vals)
    total = sum(vals)
    if criterion == "CM":
        return None if total % 2 == 0 else f"total degree {total} is odd"
    if criterion == "GR":
        star = conjugate(vals)
        lhs = rhs = 0
        for k in range(n):
            lhs += vals[k]
            rhs += star[k]
            if lhs > rhs:
                return f"k={k + 1}: sum of first {k + 1} degrees {lhs} > conjugate sum {rhs}"
        if lhs != rhs:
            return f"total {lhs} differs from conjugate total {rhs}"
        return None
    if criterion == "EG":
        if total % 2:
            return f"total degree {total} is odd"
        lhs = 0
        for k in range(1, n + 1):
            lhs += vals[k - 1]
            rhs = k * (k - 1) + sum(min(v, k) for v in vals[k:])
            if lhs > rhs:
                return f"k={k}: {lhs} > {rhs}"
        return None
    raise ValidationError(f"unknown graphicality criterion {criterion!r}")


def is_graphical(d, criterion: str = "EG") -> bool:
    return first_violation(d, criterion) is None


def realize_degree_sequence(d, mode: str = "simple", seed: int | None = None):
    """Build a graph with exactly the given degrees.

    simple: Havel-Hakimi, simple undirected graph.
    bipartite-flow: max-flow 0/1 matrix with row and column sums D, rounded
        to a symmetric 0/1 matrix (loops count once) by cycle rounding.
    configuration: uniform stub matching; loops add 2 to the diagonal so
        row sums equal degrees.
    """
    from .graph_generation import LabeledGraph
    from .random_measures import make_rng

    vals = _seq(d)
    n = len(vals)
    labels = np.arange(n)
    if mode == "simple":
        _raise_if(vals, "EG")
        adj = _havel_hakimi(vals)
        return LabeledGraph(labels, adj, directed=False, self_edges=False)
    if mode == "bipartite-flow":
        _raise_if(vals, "GR")
        adj = _flow_symmetric(vals)
        return LabeledGraph(labels, adj, directed=False, self_edges=True)
    if mode == "configuration":
        _raise_if(vals, "CM")
        rng = make_rng(0 if seed is None else seed)
        stubs = np.repeat(np.arange(n), vals)
        rng.shuffle(stubs)
        adj = np.zeros((n, n))
        for a, b in stubs.reshape(-1, 2):
            adj[a, b] += 1
            adj[b, a] += 1
        return LabeledGraph(labels, adj, directed=False, self_edges=True)
    raise ValidationError(f"unknown realization mode {mode!r}")


def _raise_if(vals, criterion):
    ordered = tuple(sorted(vals, reverse=True))
    problem = first_violation(ordered, criterion)
    if problem:
        raise InfeasibleError(f"degree sequence is not {criterion}-graphical: {problem}")


def _havel_hakimi(vals) -> np.ndarray:
    n = len(vals)
    adj = np.zeros((n, n))
    remaining = list(vals)
    while True:
        order = sorted(range(n), key=lambda i: (-remaining[i], i))
        v = order[0]
        k = remaining[v]
        if k == 0:
            return adj
        targets = order[1 : k + 1]
        if len(targets) < k or any(remaining[t] == 0 for t in targets):
            raise InfeasibleError("Havel-Hakimi ran out of partners")
        remaining[v] = 0
        for t in targets:
            remaining[t] -= 1
            adj[v, t] = adj[t, v] = 1


def _flow_symmetric(vals) -> np.ndarray:
    import networkx as nx

    n = len(vals)
    g = nx.DiGraph()
    for i in range(n):
        g.add_edge("s", ("r", i), capacity=vals[i])
        g.add_edge(("c", i), "t", capacity=vals[i])
        for j in range(n):
            g.add_edge(("r", i), ("c", j), capacity=1)
    value, flow = nx.maximum_flow(g, "s", "t")
    if value != sum(vals):
        raise InfeasibleError("max-flow could not saturate the degree sequence")
    b = np.array([[flow[("r", i)][("c", j)] for j in range(n)] for i in range(n)], dtype=float)
    return _round_symmetric(b)


def _round_symmetric(b: np.ndarray) -> np.ndarray:
    """Turn a 0/1 matrix with equal row and column sums into a symmetric one.

    (B + B^T)/2 has half entries forming an even-degree loopless graph. Each
    cycle of half entries is rounded alternately; an odd cycle leaves one
    vertex off by one, which is absorbed by toggling its loop.
    """
    s = (b + b.T) / 2
    n = len(s)
    half = {(min(i, j), max(i, j)) for i in range(n) for j in range(n) if i != j and s[i, j] == 0.5}
    out = np.where(s == 1.0, 1.0, 0.0)
    adjacency: dict[int, set[int]] = {i: set() for i in range(n)}
    for i, j in half:
        adjacency[i].add(j)
        adjacency[j].add(i)
    while half:
        start = next(iter(half))[0]
        cycle = [start]
        v = start
        while True:
            w = min(adjacency[v])
            adjacency[v].discard(w)
            adjacency[w].discard(v)
            half.discard((min(v, w), max(v, w)))
            v = w
            if v == start:
                break
            cycle.append(v)
        m = len(cycle)
        edges = [(cycle[i], cycle[(i + 1) % m]) for i in range(m)]
        if m % 2 == 0:
            for idx, (u, w) in enumerate(edges):
                out[u, w] = out[w, u] = float(idx % 2 == 0)
            continue
        anchor = cycle[0]
        if out[anchor, anchor] == 0:
            # anchor ends one short; add its loop
            bits = [idx % 2 == 1 for idx in range(m)]
            out[anchor, anchor] = 1.0
        else:
            # anchor ends one over; drop its loop
            bits = [idx % 2 == 0 for idx in range(m)]
            out[anchor, anchor] = 0.0
        for (u, w), bit in zip(edges, bits):
            out[u, w] = out[w, u] = float(bit)
    return out
