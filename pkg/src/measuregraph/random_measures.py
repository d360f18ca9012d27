"""STC and FAIW random measures: samplers and mean-measure calculus."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .distributions import (
    DEFAULT_RULE,
    CountingDistribution,
    EmpiricalLabels,
    LabelDistribution,
    QuadratureRule,
    integrate,
)
from .errors import TruncationWarning, ValidationError


def make_rng(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based (Philox) generator for a seed and optional stream keys."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *map(int, keys)])))


# ---------------------------------------------------------------------------
# nested quadrature shared by the analytics
# ---------------------------------------------------------------------------


def _kernel_attr(f, name, default):
    return getattr(f, name, default)


def pair_nodes(nu: LabelDistribution, f=None, rule: QuadratureRule = DEFAULT_RULE):
    """Outer nodes plus per-x inner nodes suitable for integrating f over nu x nu.

    Returns (x, wx, y, wy, tail) with y and wy shaped (len(x), m[, dim]).
    """
    breaks = _kernel_attr(f, "breakpoints", ())
    split = _kernel_attr(f, "split_diagonal", False)
    if nu.atomic:
        outer = nu.inner_nodes(rule)
    else:
        outer = nu.outer(rule, breaks)
    y, wy = nu.inner(outer.points, rule, breaks, split)
    tail = outer.tail
    if nu.atomic:
        tail = 1 - (1 - tail) ** 2
    return outer.points, outer.weights, y, wy, tail


def expand_outer(x: np.ndarray, dim: int | None) -> np.ndarray:
    """Add the axis that broadcasts outer labels against their inner node rows."""
    return x[:, None, :] if dim else x[:, None]


def pair_integral(nu: LabelDistribution, f: Callable, rule: QuadratureRule = DEFAULT_RULE) -> tuple[float, float]:
    """(nu x nu) f and the leftover mass from truncation."""
    x, wx, y, wy, tail = pair_nodes(nu, f, rule)
    vals = np.asarray(f(expand_outer(x, nu.dim), y), dtype=float)
    return float(wx @ np.sum(wy * vals, axis=1)), tail


def diag_integral(nu: LabelDistribution, f: Callable, rule: QuadratureRule = DEFAULT_RULE) -> tuple[float, float]:
    """(nu x I) f = integral of f(x, x) nu(dx)."""
    nodes = nu.outer(rule, _kernel_attr(f, "breakpoints", ()))
    vals = np.asarray(f(nodes.points, nodes.points), dtype=float)
    return float(nodes.weights @ vals), nodes.tail


def _warn_tail(tail: float, rule: QuadratureRule) -> bool:
    if tail > rule.tail_tol:
        warnings.warn(f"truncated sum leaves mass {tail:.3g}", TruncationWarning, stacklevel=3)
        return True
    return False


# ---------------------------------------------------------------------------
# STC measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PointRealization:
    labels: np.ndarray | None = None
    weights: np.ndarray | None = None
    seed: int | None = None

    @property
    def size(self) -> int:
        if self.labels is not None:
            return len(self.labels)
        return int(np.sum(self.weights))


@dataclass(frozen=True)
class StcMeasure:
    """N = sum_{i <= K} delta_{X_i} with K ~ kappa and X_i iid nu."""

    kappa: CountingDistribution
    nu: LabelDistribution

    @property
    def c(self) -> float:
        return self.kappa.mean

    @property
    def delta2(self) -> float:
        return self.kappa.var

    def sample(self, seed: int) -> PointRealization:
        return sample_stc(self, seed)


def sample_stc(m: StcMeasure, seed: int, rng: np.random.Generator | None = None) -> PointRealization:
    rng = make_rng(seed) if rng is None else rng
    k = int(m.kappa.sample(rng))
    return PointRealization(labels=m.nu.sample(rng, k), seed=seed)


@dataclass(frozen=True)
class IntegralStats:
    mean: float
    var: float
    cov: float | None = None
    warning: bool = False


def stc_integral_stats(m: StcMeasure, f: Callable, g: Callable | None = None,
                       rule: QuadratureRule = DEFAULT_RULE) -> IntegralStats:
    """Mean c nu f, variance c nu f^2 + (delta^2 - c)(nu f)^2, and Cov(Nf, Ng)."""
    c, d2 = m.c, m.delta2
    nf = integrate(m.nu, f, rule)
    nf2 = integrate(m.nu, lambda x: np.asarray(f(x)) ** 2, rule)
    cov = None
    warn = nf.warning or nf2.warning
    if g is not None:
        ng = integrate(m.nu, g, rule)
        nfg = integrate(m.nu, lambda x: np.asarray(f(x)) * np.asarray(g(x)), rule)
        cov = c * nfg.value + (d2 - c) * nf.value * ng.value
    return IntegralStats(c * nf.value, c * nf2.value + (d2 - c) * nf.value**2, cov, warn)


@dataclass(frozen=True)
class TraceResult:
    """The STC measure restricted to a set A with nu(A) = a."""

    a: float
    parent: StcMeasure
    indicator: Callable

    @property
    def distribution(self) -> CountingDistribution | None:
        """Closed-form count law when kappa is Poisson-type, else None."""
        return self.parent.kappa.thin(self.a)

    def pgf(self, t):
        return self.parent.kappa.pgf(1 - self.a + self.a * np.asarray(t))

    def stats(self, f: Callable, rule: QuadratureRule = DEFAULT_RULE) -> IntegralStats:
        """Mean a c nu_A f and variance a c nu_A f^2 + a^2 (delta^2 - c)(nu_A f)^2."""
        restricted = lambda x: np.asarray(f(x)) * self.indicator(x)
        return stc_integral_stats(self.parent, restricted, rule=rule)


def trace(m: StcMeasure, indicator: Callable, rule: QuadratureRule = DEFAULT_RULE) -> TraceResult:
    a = integrate(m.nu, lambda x: np.asarray(indicator(x), dtype=float), rule).value
    if a <= 0:
        raise ValidationError("trace onto a nu-null set is empty")
    return TraceResult(min(a, 1.0), m, indicator)


@dataclass(frozen=True)
class ProductMean:
    """E Mf split into self-edge (diagonal) and external (off-diagonal) terms."""

    diagonal: float
    off_diagonal: float
    tail: float = 0.0

    @property
    def total(self) -> float:
        return self.diagonal + self.off_diagonal

    @property
    def normalized(self) -> float:
        return self.diagonal + 0.5 * self.off_diagonal

    def __float__(self) -> float:
        return self.total


def product_mean(m: StcMeasure, f: Callable, rule: QuadratureRule = DEFAULT_RULE) -> ProductMean:
    """E Mf = c (nu x I) f + (c^2 + delta^2 - c)(nu x nu) f for M = N x N."""
    c = m.c
    diag, t1 = diag_integral(m.nu, f, rule)
    off, t2 = pair_integral(m.nu, f, rule)
    tail = max(t1, t2)
    _warn_tail(tail, rule)
    return ProductMean(c * diag, m.kappa.second_factorial() * off, tail)


def empirical_measure(points: Sequence) -> EmpiricalLabels:
    return EmpiricalLabels(tuple(points))


def bootstrap_product_mean(points: Sequence, f: Callable) -> float:
    """E Mf for the bootstrap graph on n points: sum f(X_i, X_i) + (n-1)/n sum_ij f(X_i, X_j)."""
    x = np.asarray(points, dtype=float)
    n = len(x)
    if n == 0:
        raise ValidationError("bootstrap needs at least one point")
    diag = np.sum(f(x, x))
    full = np.sum(f(x[:, None], x[None, :]))
    return float(diag + (n - 1) / n * full)


# ---------------------------------------------------------------------------
# FAIW measures
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FaiwMeasure:
    """N = sum_{x in D} W_x delta_x with independent integer weights W_x ~ kappa_x.

    ``tail`` optionally records analytic mass beyond a truncated atom set.
    """

    atoms: tuple
    laws: tuple
    tail: dict = field(default_factory=dict)

    def __post_init__(self):
        atoms = tuple(self.atoms)
        laws = tuple(self.laws)
        if len(atoms) != len(laws):
            raise ValidationError("FAIW needs one weight law per atom")
        if len(set(atoms)) != len(atoms):
            raise ValidationError("FAIW atoms must be distinct")
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "laws", laws)

    @property
    def means(self) -> np.ndarray:
        return np.array([law.mean for law in self.laws])

    @property
    def variances(self) -> np.ndarray:
        return np.array([law.var for law in self.laws])

    def z_matrix(self) -> np.ndarray:
        """Z_xx = c_x^2 + delta_x^2 and Z_xy = c_x c_y."""
        c = self.means
        z = np.outer(c, c)
        np.fill_diagonal(z, c**2 + self.variances)
        return z


def sample_faiw(m: FaiwMeasure, seed: int, rng: np.random.Generator | None = None) -> PointRealization:
    rng = make_rng(seed) if rng is None else rng
    weights = _sample_weights(m.laws, rng)
    return PointRealization(labels=np.asarray(m.atoms), weights=weights, seed=seed)


def _sample_weights(laws, rng) -> np.ndarray:
    from .distributions import Binomial, Poisson, Dirac

    kinds = {type(law) for law in laws}
    # vectorized fast paths for homogeneous families
    if kinds == {Binomial}:
        return rng.binomial([law.n for law in laws], [law.p for law in laws]).astype(float)
    if kinds == {Poisson}:
        return rng.poisson([law.c for law in laws]).astype(float)
    if kinds == {Dirac}:
        return np.array([law.n for law in laws], dtype=float)
    return np.array([float(law.sample(rng)) for law in laws])


def faiw_product_mean(m: FaiwMeasure, f) -> float:
    """E Mf = sum_xy Z_xy f(x, y); f may be a callable or a ready array."""
    fm = _as_array(m, f)
    return float(np.sum(m.z_matrix() * fm))


def faiw_normalized_mean(m: FaiwMeasure, f) -> float:
    """M* f = sum_x W_x^2 f(x, x) + half the off-diagonal sum, in expectation."""
    fm = _as_array(m, f)
    z = m.z_matrix()
    diag = float(np.sum(np.diag(z) * np.diag(fm)))
    return diag + 0.5 * (float(np.sum(z * fm)) - diag)


def _as_array(m: FaiwMeasure, f) -> np.ndarray:
    if callable(f):
        x = np.asarray(m.atoms)
        return np.asarray(f(x[:, None], x[None, :]), dtype=float) * np.ones((len(x), len(x)))
    arr = np.asarray(f, dtype=float)
    if arr.shape != (len(m.atoms), len(m.atoms)):
        raise ValidationError("array argument must match the atom count")
    return arr


def w_transform(w, b) -> np.ndarray:
    """diag(W) B diag(W)."""
    w = np.asarray(w, dtype=float)
    b = np.asarray(b, dtype=float)
    if b.ndim != 2 or b.shape != (w.size, w.size):
        raise ValidationError(f"weight vector of length {w.size} does not match array {b.shape}")
    return w[:, None] * b * w[None, :]
