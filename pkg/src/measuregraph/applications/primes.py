"""Prime graphs: STC graphs on integer labels whose edges join distinct primes."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import mpmath
import numpy as np
from scipy.optimize import minimize_scalar

from ..distributions import CountingDistribution, Poisson, UniformLabels, ZetaLabels
from ..edge_transforms import Deterministic, PrimePairs
from ..errors import DomainError, ValidationError
from ..model import ModelSpec
from ..special import prime_count, prime_zeta, primes_up_to, zeta, zeta_tail


@dataclass(frozen=True)
class PrimeGraphModel:
    """Labels are Zeta(s) when ``s`` is given, else uniform on {1..n}."""

    kappa: CountingDistribution
    s: float | None = None
    n: int | None = None

    def __post_init__(self):
        if (self.s is None) == (self.n is None):
            raise ValidationError("prime graph needs exactly one of s (zeta labels) or n (uniform labels)")
        if self.s is not None and not self.s > 1:
            raise DomainError(f"zeta labels need s > 1, got {self.s}")
        if self.n is not None and int(self.n) < 1:
            raise ValidationError("uniform labels need n >= 1")

    @property
    def nu(self):
        return ZetaLabels(self.s) if self.s is not None else UniformLabels(int(self.n))

    def spec(self) -> ModelSpec:
        return ModelSpec(self.kappa, self.nu, Deterministic(PrimePairs()), validate=False)


def zeta_prime_density(s: float) -> float:
    """nu(P) = P(s) / zeta(s) for Zeta(s) labels, P the prime zeta function."""
    return prime_zeta(s) / zeta(s)


def zeta_edge_density(s: float) -> float:
    """(nu x nu)(A) over distinct prime pairs: (P(s)^2 - P(2s)) / zeta(s)^2."""
    p = prime_zeta(s)
    return (p * p - prime_zeta(2 * s)) / zeta(s) ** 2


def zeta_densities_mpmath(s: float) -> tuple[float, float]:
    """Second route through mpmath's own prime zeta and zeta implementations."""
    s = mpmath.mpf(s)
    p = mpmath.primezeta(s)
    z = mpmath.zeta(s)
    return float(p / z), float((p * p - mpmath.primezeta(2 * s)) / z**2)


def zeta_densities_direct(s: float, n_max: int = 10**6) -> tuple[float, float, float]:
    """Truncated sums over primes <= n_max, plus a bound on the omitted label mass."""
    pr = primes_up_to(n_max).astype(float)
    z = zeta(s)
    w = pr**-s / z
    dens = float(w.sum())
    edge = float(dens * dens - np.sum(w * w))
    return dens, edge, zeta_tail(s, n_max) / z


def zeta_gc_threshold(s: float) -> float:
    """Critical Poisson mean c above which a giant component exists."""
    p1, p2, p3 = prime_zeta(s), prime_zeta(2 * s), prime_zeta(3 * s)
    return (p1 * p1 - p2) * zeta(s) / (p1**3 - 2 * p1 * p2 + p3)


def uniform_prime_density(n: int) -> float:
    return prime_count(n) / n


def uniform_edge_density(n: int) -> float:
    k = prime_count(n)
    return k * (k - 1) / n**2


def uniform_gc_threshold(n: int) -> float:
    k = prime_count(n)
    return np.inf if k < 2 else n / (k - 1)


def _argmax(fn, lo: float = 1.0, hi: float = 5.0, tol: float = 1e-6) -> tuple[float, float]:
    # golden-section search; the densities vanish at s -> 1 and s -> infinity
    res = minimize_scalar(lambda s: -fn(s), bracket=(lo + 0.05, 1.5, hi), method="golden", tol=tol)
    s = float(res.x)
    if not lo < s <= hi:
        raise ValidationError(f"maximum left the search interval: s = {s}")
    return s, float(fn(s))


def prime_density_max() -> tuple[float, float]:
    return _argmax(zeta_prime_density)


def edge_density_max() -> tuple[float, float]:
    return _argmax(zeta_edge_density)


@dataclass(frozen=True)
class PrimeAnalytics:
    prime_density: float
    edge_density: float
    mean_degree: float
    mean_edges: float
    gc_threshold: float
    mean_active_vertices: float
    active_tail: float

    def to_dict(self) -> dict:
        return asdict(self)


def _active_vertices(m: PrimeGraphModel, density: float, n_max: int) -> tuple[float, float]:
    """c sum_p nu{p} (1 - psi(1 - a(p))) with a(p) = nu(P) - nu{p}.

    Composite labels never connect. For zeta labels the omitted primes carry
    at most zeta_tail(s, n_max)/zeta(s) mass, each contributing at most c.
    """
    kappa = m.kappa
    c = kappa.mean
    if m.s is not None:
        pr = primes_up_to(n_max).astype(float)
        w = pr**-m.s / zeta(m.s)
        tail = c * zeta_tail(m.s, n_max) / zeta(m.s)
    else:
        pr = primes_up_to(int(m.n)).astype(float)
        w = np.full(pr.size, 1.0 / m.n)
        tail = 0.0
    a = density - w
    value = c * float(np.sum(w * (1 - np.real(kappa.pgf(1 - a)))))
    return value, tail


def prime_analytics(m: PrimeGraphModel, n_max: int = 10**6) -> PrimeAnalytics:
    """Densities, mean degree and edge count, giant-component threshold and active vertices.

    The threshold is the critical mean of a Poisson vertex count.
    """
    if m.s is not None:
        dens, edge, thr = zeta_prime_density(m.s), zeta_edge_density(m.s), zeta_gc_threshold(m.s)
    else:
        n = int(m.n)
        dens, edge, thr = uniform_prime_density(n), uniform_edge_density(n), uniform_gc_threshold(n)
    kappa = m.kappa
    active, tail = _active_vertices(m, dens, n_max)
    return PrimeAnalytics(dens, edge, kappa.mean * edge, kappa.second_factorial() * edge, thr, active, tail)


def prime_graph_sample(m: PrimeGraphModel, seed: int):
    from ..graph_generation import generate

    return generate(m.spec(), seed)


def prime_table(s_values) -> list[dict]:
    """Rows of s, nu(P), (nu x nu)(A) and the Poisson threshold for plotting."""
    rows = []
    for s in s_values:
        rows.append({
            "s": float(s),
            "prime_density": zeta_prime_density(s),
            "edge_density": zeta_edge_density(s),
            "gc_threshold": zeta_gc_threshold(s),
        })
    return rows


def default_model(s: float = 2.0, c: float = 10.0) -> PrimeGraphModel:
    return PrimeGraphModel(Poisson(c), s=s)
