"""Random feed-forward wiring: neurons scattered over hidden layers, arcs only between consecutive layers."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..distributions import CategoricalLabels, CountingDistribution
from ..edge_transforms import BernoulliTransform, Layered
from ..errors import ValidationError
from ..graph_generation import LabeledGraph, generate
from ..model import ModelSpec


@dataclass(frozen=True)
class NnArchitecture:
    layers: int
    layer_weights: tuple
    probs: tuple
    kappa: CountingDistribution

    def __post_init__(self):
        if self.layers < 1:
            raise ValidationError("need at least one hidden layer")
        w = tuple(float(v) for v in self.layer_weights)
        p = tuple(float(v) for v in self.probs)
        if len(w) != self.layers:
            raise ValidationError(f"need {self.layers} layer weights, got {len(w)}")
        if len(p) != self.layers - 1:
            raise ValidationError(f"need {self.layers - 1} consecutive-layer probabilities, got {len(p)}")
        if any(not 0 <= v <= 1 for v in p):
            raise ValidationError("connection probabilities must lie in [0, 1]")
        object.__setattr__(self, "layer_weights", w)
        object.__setattr__(self, "probs", p)

    @property
    def nu(self) -> CategoricalLabels:
        return CategoricalLabels(self.layer_weights)

    def spec(self) -> ModelSpec:
        return ModelSpec(self.kappa, self.nu, BernoulliTransform(Layered(self.probs)), validate=False)

    def expected_edges(self) -> float:
        """(c^2 + delta^2 - c) sum_x p(x) nu{x} nu{x+1}."""
        nu = np.asarray(self.nu.weights)
        p = np.asarray(self.probs)
        return float(self.kappa.second_factorial() * np.sum(p * nu[:-1] * nu[1:]))

    def expected_out_degree(self) -> np.ndarray:
        """c p(x) nu{x+1} per layer; zero on the last layer."""
        nu = np.asarray(self.nu.weights)
        out = np.zeros(self.layers)
        out[:-1] = self.kappa.mean * np.asarray(self.probs) * nu[1:]
        return out

    def expected_in_degree(self) -> np.ndarray:
        """c p(x-1) nu{x-1} per layer; zero on the first layer."""
        nu = np.asarray(self.nu.weights)
        out = np.zeros(self.layers)
        out[1:] = self.kappa.mean * np.asarray(self.probs) * nu[:-1]
        return out

    def expected_parameters(self) -> float:
        """E e(G) + E K_{>1}: one weight per arc plus one bias per neuron beyond the first layer."""
        return self.expected_edges() + self.kappa.mean * (1 - self.nu.weights[0])


@dataclass(frozen=True)
class NnWiring:
    architecture: NnArchitecture
    graph: LabeledGraph

    @property
    def edges(self) -> int:
        return int(self.graph.edge_count())

    @property
    def parameters(self) -> int:
        return self.edges + int(np.sum(self.graph.labels > 1))

    def to_dict(self) -> dict:
        a = self.architecture
        return {
            "edges": self.edges,
            "parameters": self.parameters,
            "expected_edges": a.expected_edges(),
            "expected_parameters": a.expected_parameters(),
            "expected_out_degree": a.expected_out_degree().tolist(),
            "expected_in_degree": a.expected_in_degree().tolist(),
        }


def nn_wire(layers: int, layer_weights, probs, kappa: CountingDistribution, seed: int) -> NnWiring:
    arch = NnArchitecture(layers, tuple(layer_weights), tuple(probs), kappa)
    graph = generate(arch.spec(), seed)
    return NnWiring(arch, graph)
