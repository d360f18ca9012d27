"""Graphon identification from unlabeled graphs via a degree pseudo-likelihood.

Only degree sequences are used. The graphon is a Legendre expansion on
[0, 1]; its leading coefficient (the mean of f) is pinned by the observed
mean degree, and the rest are searched with random-walk Metropolis-Hastings.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .analytics import degree_distribution, pgf_coefficients
from .decomposition import kernel_grid
from .distributions import (
    DEFAULT_RULE,
    CountingDistribution,
    Dirac,
    PTClassification,
    Poisson,
    QuadratureRule,
    UnitInterval,
    classify_pt,
)
from .edge_transforms import BernoulliTransform, LegendreExpansion, legendre_basis
from .errors import InfeasibleError, NumericalError, ValidationError
from .model import ModelSpec
from .random_measures import make_rng

LOG_FLOOR = 1e-300
_FEAS_TOL = 1e-9


@dataclass(frozen=True)
class ObservedGraphSet:
    adjacencies: tuple
    symmetric: bool = field(init=False)
    zero_diagonal: bool = field(init=False)

    def __post_init__(self):
        mats = []
        for a in self.adjacencies:
            a = np.asarray(a, dtype=float)
            if a.ndim != 2 or a.shape[0] != a.shape[1]:
                raise ValidationError("adjacency matrices must be square")
            if not np.all((a == 0) | (a == 1)):
                raise ValidationError("adjacency matrices must be 0/1")
            mats.append(a)
        if not mats:
            raise ValidationError("need at least one observed graph")
        object.__setattr__(self, "adjacencies", tuple(mats))
        object.__setattr__(self, "symmetric", all(np.array_equal(a, a.T) for a in mats))
        object.__setattr__(self, "zero_diagonal", all(not np.any(np.diag(a)) for a in mats))

    @property
    def sizes(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacencies])

    @property
    def degrees(self) -> list[np.ndarray]:
        return [a.sum(axis=1).astype(int) for a in self.adjacencies]

    @property
    def pooled_degrees(self) -> np.ndarray:
        return np.concatenate(self.degrees) if self.sizes.sum() else np.zeros(0, dtype=int)

    @classmethod
    def from_graphs(cls, graphs) -> "ObservedGraphSet":
        return cls(tuple(np.asarray(g.adjacency) for g in graphs))


@dataclass(frozen=True)
class CountingFit:
    c: float
    delta2: float
    classification: PTClassification | None
    distribution: CountingDistribution


def fit_counting(sizes: Sequence[int], assume: str | None = None) -> CountingFit:
    """Moment fit of the vertex-count law; ``assume`` may force 'poisson' or 'dirac'."""
    k = np.asarray(list(sizes), dtype=float)
    if k.size == 0:
        raise ValidationError("fit_counting needs at least one vertex count")
    c = float(k.mean())
    d2 = float(k.var(ddof=1)) if k.size > 1 else 0.0
    if assume == "dirac" or (k.size == 1 and assume is None):
        if k.size > 1 and d2 > 0:
            raise ValidationError("Dirac assumption contradicts varying vertex counts")
        return CountingFit(c, 0.0, None, Dirac(int(round(c))))
    if assume == "poisson":
        return CountingFit(c, d2, None, Poisson(c))
    if assume is not None:
        raise ValidationError(f"unknown counting assumption {assume!r}")
    cls = classify_pt(c, d2)
    return CountingFit(c, d2, cls, cls.distribution)


# ---------------------------------------------------------------------------
# parameterization
# ---------------------------------------------------------------------------


def _feasibility_points(rule: QuadratureRule = DEFAULT_RULE) -> np.ndarray:
    return np.concatenate([np.linspace(0, 1, 101), UnitInterval().outer(rule).points])


_FEAS_BASIS: dict = {}


def _basis_on_grid(m: int) -> np.ndarray:
    if m not in _FEAS_BASIS:
        _FEAS_BASIS[m] = legendre_basis(_feasibility_points(), m)
    return _FEAS_BASIS[m]


@dataclass(frozen=True)
class GraphonParam:
    """Legendre coefficients: a vector beta when separable, else an m x m matrix."""

    coeffs: np.ndarray
    separable: bool = True

    @property
    def order(self) -> int:
        return int(np.shape(self.coeffs)[0])

    @property
    def matrix(self) -> np.ndarray:
        c = np.asarray(self.coeffs, dtype=float)
        return np.outer(c, c) if self.separable else c

    @property
    def mean(self) -> float:
        """(nu x nu) f, which is the leading coefficient beta_11."""
        return float(self.matrix[0, 0])

    def kernel(self, zero_diagonal: bool = True) -> LegendreExpansion:
        return LegendreExpansion(np.asarray(self.coeffs), self.separable, zero_diagonal)

    def feasibility(self) -> tuple[bool, float, float]:
        """(feasible, min, max) of f on the 101 x 101 grid plus quadrature nodes."""
        phi = _basis_on_grid(self.order)
        if self.separable:
            g = phi @ np.asarray(self.coeffs, dtype=float)
            lo_g, hi_g = g.min(), g.max()
            cands = (lo_g * lo_g, lo_g * hi_g, hi_g * hi_g)
            lo, hi = min(cands), max(cands)
        else:
            vals = phi @ self.matrix @ phi.T
            lo, hi = float(vals.min()), float(vals.max())
        return bool(lo >= -_FEAS_TOL and hi <= 1 + _FEAS_TOL), float(lo), float(hi)

    def reflected(self) -> "GraphonParam":
        """Coefficients of f(1 - x, 1 - y): phi_i(1 - x) = (-1)^(i-1) phi_i(x)."""
        sign = (-1.0) ** np.arange(self.order)
        c = np.asarray(self.coeffs, dtype=float)
        return GraphonParam(c * sign if self.separable else sign[:, None] * c * sign[None, :], self.separable)


def pinned_initial(mean_degree: float, c: float, m: int, separable: bool = True) -> GraphonParam:
    """theta_0 = (beta_11, 0, ..., 0) with beta_11 = E Y / c."""
    beta11 = mean_degree / c
    if not 0 <= beta11 <= 1:
        raise InfeasibleError(f"pinned mean E Y / c = {beta11:.4g} is outside [0, 1]")
    if separable:
        coeffs = np.zeros(m)
        coeffs[0] = np.sqrt(beta11)
    else:
        coeffs = np.zeros((m, m))
        coeffs[0, 0] = beta11
    return GraphonParam(coeffs, separable)


# ---------------------------------------------------------------------------
# likelihood
# ---------------------------------------------------------------------------


def degree_probabilities(theta: GraphonParam, kappa: CountingDistribution, k_max: int,
                         rule: QuadratureRule = DEFAULT_RULE) -> np.ndarray:
    spec = ModelSpec(kappa, UnitInterval(), BernoulliTransform(theta.kernel()), validate=False)
    law = degree_distribution(spec, realized=True, rule=rule)
    return pgf_coefficients(law.pgf, k_max, tail_tol=1.0).probs


def pseudo_loglik(theta: GraphonParam, obs: ObservedGraphSet, kappa: CountingDistribution,
                  rule: QuadratureRule = DEFAULT_RULE) -> float:
    """Sum over every observed vertex of log P(Y = degree)."""
    ok, lo, hi = theta.feasibility()
    if not ok:
        raise InfeasibleError(f"graphon leaves [0, 1]: range [{lo:.4g}, {hi:.4g}]")
    degrees = obs.pooled_degrees
    if degrees.size == 0:
        return 0.0
    probs = degree_probabilities(theta, kappa, int(degrees.max()), rule)
    counts = np.bincount(degrees, minlength=probs.size)
    return float(counts @ np.log(np.maximum(probs, LOG_FLOOR)))


# ---------------------------------------------------------------------------
# Metropolis-Hastings
# ---------------------------------------------------------------------------


@dataclass
class MhTrace:
    thetas: list = field(default_factory=list)
    logliks: list = field(default_factory=list)
    accepted: list = field(default_factory=list)

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.logliks))

    def best_so_far(self) -> np.ndarray:
        return np.maximum.accumulate(np.asarray(self.logliks))

    def to_dict(self) -> dict:
        return {
            "thetas": [np.asarray(t).tolist() for t in self.thetas],
            "logliks": list(map(float, self.logliks)),
            "accepted": list(map(bool, self.accepted)),
            "best_index": self.best_index,
        }


@dataclass(frozen=True)
class MhConfig:
    order: int = 3
    iterations: int = 50
    sigma: float = 0.01
    separable: bool = True
    hint: str = "none"
    stall_limit: int = 100
    kappa: str | None = "poisson"


@dataclass(frozen=True)
class MhResult:
    theta: GraphonParam
    trace: MhTrace
    kappa: CountingDistribution
    candidates: tuple
    ambiguous: bool

    @property
    def kernel(self) -> LegendreExpansion:
        return self.theta.kernel()


def _free_mask(m: int, separable: bool) -> np.ndarray:
    mask = np.ones(m if separable else (m, m), dtype=bool)
    mask[(0,) if separable else (0, 0)] = False
    return mask


def mh_estimate(obs: ObservedGraphSet, config: MhConfig = MhConfig(), seed: int = 0,
                rule: QuadratureRule = DEFAULT_RULE) -> MhResult:
    """Random-walk MH over the non-leading Legendre coefficients; returns the best iterate."""
    if config.sigma < 0:
        raise ValidationError("proposal scale must be nonnegative")
    fit = fit_counting(obs.sizes, config.kappa)
    kappa = fit.distribution
    degrees = obs.pooled_degrees
    theta = pinned_initial(float(degrees.mean()) if degrees.size else 0.0, fit.c, config.order, config.separable)
    mask = _free_mask(config.order, config.separable)
    rng = make_rng(seed)

    trace = MhTrace()
    current = pseudo_loglik(theta, obs, kappa, rule)
    trace.thetas.append(np.array(theta.coeffs))
    trace.logliks.append(current)
    trace.accepted.append(True)
    infeasible_run = 0
    steps = 0
    while steps < config.iterations:
        coeffs = np.array(theta.coeffs, dtype=float)
        if not config.separable:
            # keep the matrix symmetric: propose on the upper triangle
            step = np.triu(rng.normal(0.0, config.sigma, coeffs.shape))
            step = step + np.triu(step, 1).T
        else:
            step = rng.normal(0.0, config.sigma, coeffs.shape)
        coeffs[mask] += step[mask]
        proposal = GraphonParam(coeffs, config.separable)
        if not proposal.feasibility()[0]:
            infeasible_run += 1
            if infeasible_run >= config.stall_limit:
                raise NumericalError(f"{config.stall_limit} consecutive infeasible proposals; chain stalled")
            continue
        infeasible_run = 0
        steps += 1
        value = pseudo_loglik(proposal, obs, kappa, rule)
        accept = np.log(rng.random()) < value - current
        if accept:
            theta, current = proposal, value
        trace.thetas.append(np.array(theta.coeffs))
        trace.logliks.append(current)
        trace.accepted.append(bool(accept))

    best = GraphonParam(trace.thetas[trace.best_index], config.separable)
    chosen, candidates, ambiguous = resolve_symmetry(best, config.hint)
    return MhResult(chosen, trace, kappa, candidates, ambiguous)


def resolve_symmetry(theta: GraphonParam, hint: str = "none"):
    """Choose between f(x, y) and f(1 - x, 1 - y) using a monotonicity hint on the diagonal.

    Returns (chosen, candidates, ambiguous).
    """
    if hint not in ("increasing", "decreasing", "none"):
        raise ValidationError(f"unknown monotonicity hint {hint!r}")
    mirror = theta.reflected()
    candidates = (theta, mirror)
    if hint == "none":
        same = np.allclose(theta.matrix, mirror.matrix)
        return theta, candidates, not same
    t = np.linspace(0, 1, 201)
    diag = theta.kernel(zero_diagonal=False)._eval(t, t)
    trend = float(diag[-1] - diag[0])
    want_up = hint == "increasing"
    if trend == 0 or (trend > 0) == want_up:
        return theta, candidates, False
    return mirror, candidates, False


def relative_l2_error(truth, estimate, rule: QuadratureRule = QuadratureRule(nodes=96)) -> float:
    """(nu x nu)(f - f_hat)^2 / (nu x nu) f^2 on Lebesgue labels."""
    nu = UnitInterval()
    _, w, a = kernel_grid(truth, nu, rule)
    _, _, b = kernel_grid(estimate, nu, rule)
    return float(w @ (a - b) ** 2 @ w / (w @ a**2 @ w))


def relative_l1_error(truth, estimate, rule: QuadratureRule = QuadratureRule(nodes=96)) -> float:
    nu = UnitInterval()
    _, w, a = kernel_grid(truth, nu, rule)
    _, _, b = kernel_grid(estimate, nu, rule)
    return float(w @ np.abs(a - b) @ w / (w @ np.abs(a) @ w))
