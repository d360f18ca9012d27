"""Spin networks: FAIW graphs on a one-dimensional lattice.

Each site x carries an independent integer spin W_x ~ kappa_x. The energy of
a configuration is E_W = sum over 0 < |x - y| <= radius of W_x W_y f(x, y),
optionally plus self-interactions W_x^2 f(x, x) and an external field
sum_x W_x k(x). The Laplace transform E exp(-beta E_W) is the partition
function of the corresponding Gibbs field.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import BudgetError, ValidationError
from ..random_measures import FaiwMeasure, _sample_weights, make_rng, w_transform

STATE_BUDGET = 2**20


@dataclass(frozen=True)
class SpinNetwork:
    laws: tuple
    interaction: Callable
    radius: int = 1
    field: Callable | None = None
    self_interaction: bool = False

    def __post_init__(self):
        object.__setattr__(self, "laws", tuple(self.laws))
        if not self.laws:
            raise ValidationError("spin network needs at least one site")
        if self.radius < 0:
            raise ValidationError("neighbourhood radius must be >= 0")

    @property
    def sites(self) -> np.ndarray:
        return np.arange(1, len(self.laws) + 1)

    def potential(self) -> np.ndarray:
        """Local potential B = f 1_A on the lattice (plus the diagonal with self-interaction)."""
        x = self.sites.astype(float)
        dist = np.abs(x[:, None] - x[None, :])
        mask = (dist > 0) & (dist <= self.radius)
        if self.self_interaction:
            mask |= dist == 0
        f = np.asarray(self.interaction(x[:, None], x[None, :]), dtype=float) * np.ones(mask.shape)
        if np.any(f < 0):
            raise ValidationError("interaction must be nonnegative")
        return np.where(mask, f, 0.0)

    def external(self) -> np.ndarray:
        if self.field is None:
            return np.zeros(len(self.laws))
        return np.asarray(self.field(self.sites.astype(float)), dtype=float) * np.ones(len(self.laws))

    def state_counts(self) -> list[int]:
        counts = []
        for law in self.laws:
            lo, hi = law.support()
            if hi is None:
                raise BudgetError(f"spin law {law} has unbounded support; use Monte Carlo")
            counts.append(hi + 1)
        return counts

    def faiw(self) -> FaiwMeasure:
        return FaiwMeasure(tuple(self.sites.tolist()), self.laws)

    def mean_energy(self) -> float:
        """sum_A Z_xy f(x, y) + sum_x c_x k(x)."""
        m = self.faiw()
        return float(np.sum(m.z_matrix() * self.potential()) + m.means @ self.external())


def spin_energy(net: SpinNetwork, w: Sequence[float]) -> float:
    """Energy of one configuration, summed pair by pair."""
    w = list(map(float, w))
    if len(w) != len(net.laws):
        raise ValidationError(f"configuration has {len(w)} spins for {len(net.laws)} sites")
    b = net.potential()
    k = net.external()
    total = 0.0
    for i, wi in enumerate(w):
        for j, wj in enumerate(w):
            if b[i, j]:
                total += wi * wj * b[i, j]
        total += wi * k[i]
    return total


def spin_adjacency(net: SpinNetwork, w: Sequence[float]) -> np.ndarray:
    """Spin-weighted local potential diag(W) B diag(W)."""
    return w_transform(w, net.potential())


def _check_budget(net: SpinNetwork, budget: int) -> list[int]:
    counts = net.state_counts()
    total = math.prod(counts)
    if total > budget:
        raise BudgetError(f"{total} configurations exceed the enumeration budget {budget}; use Monte Carlo")
    return counts


def _pmf_tables(net: SpinNetwork, counts) -> list[np.ndarray]:
    return [np.asarray(law.pmf(np.arange(n)), dtype=float) for law, n in zip(net.laws, counts)]


def enumerate_states(net: SpinNetwork, budget: int = STATE_BUDGET) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(configurations, probabilities, energies) over the whole configuration space."""
    counts = _check_budget(net, budget)
    grids = np.meshgrid(*[np.arange(n) for n in counts], indexing="ij")
    states = np.stack([g.ravel() for g in grids], axis=1).astype(float)
    tables = _pmf_tables(net, counts)
    probs = np.ones(len(states))
    for j, table in enumerate(tables):
        probs *= table[states[:, j].astype(int)]
    b = net.potential()
    energies = np.einsum("ni,ij,nj->n", states, b, states) + states @ net.external()
    return states, probs, energies


def spin_partition(net: SpinNetwork, beta, budget: int = STATE_BUDGET) -> np.ndarray | float:
    """Z(beta) = sum_w P(W = w) exp(-beta E_w) by vectorized enumeration."""
    _, probs, energies = enumerate_states(net, budget)
    beta_arr = np.atleast_1d(np.asarray(beta, dtype=float))
    z = np.exp(-np.outer(beta_arr, energies)) @ probs
    return float(z[0]) if np.ndim(beta) == 0 else z


def spin_partition_gibbs(net: SpinNetwork, beta: float, budget: int = STATE_BUDGET) -> float:
    """The same partition function from the Gibbs side, one configuration at a time."""
    counts = _check_budget(net, budget)
    tables = _pmf_tables(net, counts)
    total = 0.0
    for state in itertools.product(*[range(n) for n in counts]):
        weight = 1.0
        for table, s in zip(tables, state):
            weight *= float(table[s])
        if weight == 0.0:
            continue
        total += weight * math.exp(-beta * spin_energy(net, state))
    return total


def gibbs_probabilities(net: SpinNetwork, beta: float, budget: int = STATE_BUDGET):
    """Configurations and their Gibbs probabilities P(w) exp(-beta E_w) / Z(beta)."""
    states, probs, energies = enumerate_states(net, budget)
    weights = probs * np.exp(-beta * energies)
    return states, weights / weights.sum()


@dataclass(frozen=True)
class McEstimate:
    mean: float
    stderr: float
    samples: int


def spin_laplace_mc(net: SpinNetwork, beta: float, samples: int, seed: int) -> McEstimate:
    """Monte Carlo estimate of E exp(-beta E_W) from independent spin draws."""
    rng = make_rng(seed)
    b = net.potential()
    k = net.external()
    w = np.stack([_sample_weights(net.laws, rng) for _ in range(samples)])
    energies = np.einsum("ni,ij,nj->n", w, b, w) + w @ k
    vals = np.exp(-beta * energies)
    return McEstimate(float(vals.mean()), float(vals.std(ddof=1) / np.sqrt(samples)), samples)


def spin_energy_mc(net: SpinNetwork, samples: int, seed: int) -> McEstimate:
    rng = make_rng(seed)
    b = net.potential()
    k = net.external()
    w = np.stack([_sample_weights(net.laws, rng) for _ in range(samples)])
    energies = np.einsum("ni,ij,nj->n", w, b, w) + w @ k
    return McEstimate(float(energies.mean()), float(energies.std(ddof=1) / np.sqrt(samples)), samples)
