"""Closed-form analytics: edge counts, degrees, degree distributions, giant
components, active vertices and triangle functions.

Degree laws come in two flavours. ``realized=False`` is the degree d(x) of
an external point x against the whole STC sample, which is what the
integral formulas in terms of psi describe. ``realized=True`` is the degree
of a vertex that is itself one of the sampled points: the other vertices
then number K' with pgf psi'(t)/c (the size-biased count minus one). The
two agree for Poisson kappa; for Dirac(n) the realized law gives the
Binomial(n-1, p) of an Erdos-Renyi vertex.
"""

from __future__ import annotations

import warnings
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .distributions import DEFAULT_RULE, QuadratureRule
from .edge_transforms import (
    ANY_EDGE,
    ARC_OUT,
    Deterministic,
    Digraphon,
    Transform,
    WeightFunction,
)
from .errors import TruncationWarning, ValidationError
from .model import ModelSpec
from .random_measures import expand_outer, pair_nodes
from .special import erf, expint_ei


# ---------------------------------------------------------------------------
# per-pair laws
# ---------------------------------------------------------------------------


class _PairLaw:
    """Per-pair count law seen through the weight function (identity or indicator)."""

    def __init__(self, spec: ModelSpec, direction: str = "out", states=None):
        if direction not in ("out", "in"):
            raise ValidationError(f"direction must be 'out' or 'in', got {direction!r}")
        t = spec.transform
        if isinstance(t, Digraphon):
            states = ARC_OUT if states is None else states
            if direction == "in":
                # in-arcs of x are out-arcs of the partner: swap the state pair
                states = frozenset((b, a) for a, b in states)
            t = t.with_states(states)
        self.transform: Transform = t
        self.direction = direction
        self.kernel = spec.transform.kernel
        self.indicator = spec.weight.kind == "indicator"
        if spec.weight.kind not in ("identity", "indicator"):
            raise ValidationError("degree analytics support identity or indicator weights")
        self.digraphon = isinstance(t, Digraphon)

    def param(self, x, y):
        if self.direction == "in" and not self.digraphon:
            return self.transform.param(y, x)
        return self.transform.param(x, y)

    def self_param(self, x):
        return self.transform.param(x, x)

    def _p1(self, p):
        return 1 - self.transform.prob_zero(p)

    def factorial(self, p):
        if self.indicator:
            q = self._p1(p)
            return q, np.zeros_like(q)
        return self.transform.factorial_of(p)

    def pgf(self, p, t):
        if self.indicator:
            q = self._p1(p)
            q = q[..., None] if np.ndim(t) else q
            return 1 - q + q * t
        if isinstance(self.transform, Deterministic) and not self.transform.integer_valued:
            raise ValidationError("deterministic non-indicator kernels have no pgf; use the Laplace transform")
        return self.transform.pgf_of(p, t)

    def prob_zero(self, p):
        return self.transform.prob_zero(p)


def _inner_grid(spec: ModelSpec, x: np.ndarray, rule: QuadratureRule):
    kernel = spec.transform.kernel
    y, wy = spec.nu.inner(x, rule, getattr(kernel, "breakpoints", ()), getattr(kernel, "split_diagonal", False))
    return expand_outer(x, spec.nu.dim), y, wy


def _as_labels(spec: ModelSpec, x) -> np.ndarray:
    arr = np.asarray(x, dtype=float)
    if spec.nu.dim:
        return arr.reshape(-1, spec.nu.dim)
    return arr.reshape(-1)


def _palm_moments(spec: ModelSpec) -> tuple[float, float, float]:
    """Mean, second factorial moment and variance of K', the count of other vertices."""
    kappa = spec.kappa
    c = kappa.mean
    if c <= 0:
        raise ValidationError("realized-vertex laws need c > 0")
    m1 = kappa.factorial_moment(2) / c
    f2 = kappa.factorial_moment(3) / c
    return m1, f2, f2 + m1 - m1 * m1


# ---------------------------------------------------------------------------
# degree of a fixed label
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DegreeStats:
    mean: np.ndarray
    var: np.ndarray
    pgf: Callable | None
    laplace: Callable | None
    direction: str
    realized: bool


def _degree_pieces(spec, x, direction, rule, states=None):
    law = _PairLaw(spec, direction, states)
    xe, y, wy = _inner_grid(spec, x, rule)
    p = law.param(xe, y)
    f1, f2 = law.factorial(p)
    m1 = np.sum(wy * f1, axis=1)
    s2 = np.sum(wy * (f2 + f1), axis=1)
    return law, p, wy, m1, s2


def degree_stats(spec: ModelSpec, x, direction: str = "out", realized: bool = False,
                 rule: QuadratureRule = DEFAULT_RULE, states=None) -> DegreeStats:
    """Mean, variance and pgf (or Laplace transform) of the degree at label(s) x."""
    xs = _as_labels(spec, x)
    law, p, wy, m1, s2 = _degree_pieces(spec, xs, direction, rule, states)
    kappa = spec.kappa
    c, d2 = kappa.mean, kappa.var
    scalar = np.ndim(x) == 0 or (spec.nu.dim and np.ndim(x) == 1)

    if realized:
        k1, _, kvar = _palm_moments(spec)
        p0 = law.self_param(xs)
        s1, sf2 = law.factorial(p0)
        var_self = sf2 + s1 - s1 * s1
        mean = s1 + k1 * m1
        var = var_self + k1 * (s2 - m1 * m1) + kvar * m1 * m1
    else:
        mean = c * m1
        var = c * s2 + (d2 - c) * m1 * m1

    def pgf(t):
        t = np.asarray(t, dtype=complex)
        h = np.sum(wy[..., None] * law.pgf(p, t.reshape(-1)), axis=1)
        if realized:
            out = law.pgf(law.self_param(xs), t.reshape(-1)) * kappa.dpgf(h) / c
        else:
            out = kappa.pgf(h)
        out = out.reshape(xs.shape[:1] + t.shape)
        return out[0] if scalar else out

    def laplace(alpha):
        alpha = np.asarray(alpha, dtype=float)
        vals = law.transform.mean_of(p)
        h = np.sum(wy[..., None] * np.exp(-vals[..., None] * alpha.reshape(-1)), axis=1)
        out = kappa.pgf(h).reshape(xs.shape[:1] + alpha.shape)
        return out[0] if scalar else out

    integer = law.indicator or law.transform.integer_valued
    if scalar:
        mean, var = float(mean[0]), float(var[0])
    return DegreeStats(mean, var, pgf if integer else None, laplace, direction, realized)


# ---------------------------------------------------------------------------
# degree distributions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Coefficients:
    probs: np.ndarray
    mass: float
    deficit: float
    warning: bool


def pgf_coefficients(pgf: Callable, k_max: int, points: int | None = None,
                     tail_tol: float = 1e-8) -> Coefficients:
    """p[k] for k <= k_max from the trapezoid rule on the unit circle (an FFT)."""
    if k_max < 0:
        raise ValidationError("k_max must be >= 0")
    if points is None:
        points = max(256, 1 << int(np.ceil(np.log2(max(4 * k_max, 1)))))
    t = np.exp(2j * np.pi * np.arange(points) / points)
    vals = np.asarray(pgf(t), dtype=complex)
    coeffs = np.fft.fft(vals).real / points
    probs = np.clip(coeffs[: k_max + 1], 0.0, 1.0)
    if k_max + 1 > points:
        probs = np.concatenate([probs, np.zeros(k_max + 1 - probs.size)])
    mass = float(probs.sum())
    deficit = max(0.0, 1.0 - mass)
    warn = deficit > tail_tol
    if warn:
        warnings.warn(f"coefficients up to {k_max} miss mass {deficit:.3g}", TruncationWarning, stacklevel=2)
    return Coefficients(probs, mass, deficit, warn)


@dataclass(frozen=True)
class DegreeLaw:
    pgf: Callable
    mean: float
    var: float
    factorial2: float
    direction: str
    realized: bool
    tail: float = 0.0

    def coefficients(self, k_max: int, points: int | None = None, tail_tol: float = 1e-8) -> Coefficients:
        return pgf_coefficients(self.pgf, k_max, points, tail_tol)

    def default_kmax(self) -> int:
        return int(np.ceil(self.mean + 12 * np.sqrt(max(self.var, 1.0)) + 10))


def degree_distribution(spec: ModelSpec, direction: str = "out", realized: bool = True,
                        rule: QuadratureRule = DEFAULT_RULE, states=None) -> DegreeLaw:
    """Law of the degree of a random vertex, averaged over its label.

    The default is the degree of a sampled vertex (what a pooled histogram
    of realized degrees estimates); ``realized=False`` gives the external
    point law psi_Y(t) = int nu(dx) psi(h_x(t)).
    """
    kernel = spec.transform.kernel
    x, wx, _, _, tail = pair_nodes(spec.nu, kernel, rule)
    st = degree_stats(spec, x, direction, realized, rule, states)
    mean = float(wx @ st.mean)
    second = float(wx @ (st.var + st.mean**2))
    if st.pgf is None:
        raise ValidationError("degree distribution needs an integer-valued transform")

    def pgf(t, _chunk=64):
        scalar = np.ndim(t) == 0
        real = not np.iscomplexobj(t)
        t = np.atleast_1d(np.asarray(t, dtype=complex))
        out = np.empty(t.shape, dtype=complex)
        flat = t.reshape(-1)
        res = out.reshape(-1)
        for i in range(0, flat.size, _chunk):
            res[i : i + _chunk] = wx @ st.pgf(flat[i : i + _chunk])
        if real:
            out = out.real
        return out[0] if scalar else out

    return DegreeLaw(pgf, mean, second - mean * mean, second - mean, direction, realized, tail)


def separable_powerlaw_degree_pgf(c: float, b: float, t):
    """Closed-form psi_Y for Poisson kappa and f = (1+bx)^-2 (1+by)^-2 on [0, 1].

    Uses the principal square root, so complex t on the unit circle works.
    """
    t = np.asarray(t, dtype=complex)
    nu_g = 1.0 / (1.0 + b)
    u = c * nu_g * (1 - t)
    root = np.sqrt(u)
    from scipy.special import erf as cerf

    body = np.sqrt(np.pi) * root * (cerf(root / (1 + b)) - cerf(root)) + (1 + b) * np.exp(-u / (1 + b) ** 2) - np.exp(-u)
    out = body / b
    return np.where(u == 0, 1.0, out)


# ---------------------------------------------------------------------------
# edge report
# ---------------------------------------------------------------------------


class _AttrFn:
    """Callable carrying a kernel's quadrature attributes."""

    def __init__(self, fn, kernel):
        self.fn = fn
        self.breakpoints = getattr(kernel, "breakpoints", ())
        self.split_diagonal = getattr(kernel, "split_diagonal", False)

    def __call__(self, x, y):
        return self.fn(x, y)


def _count_fn(t: Transform, g: WeightFunction):
    if g.kind == "zero":
        return lambda p: np.zeros_like(np.asarray(p, dtype=float))
    return lambda p: 1 - t.prob_zero(p)


@dataclass(frozen=True)
class AnalyticsReport:
    mean_edge_count: float
    mean_edge_weight: float
    self_edge_count: float
    external_edge_count: float
    self_edge_weight: float
    external_edge_weight: float
    normalized_edge_count: float
    normalized_edge_weight: float
    giant_component: bool | None
    gc_margin: float | None
    mean_active_vertices: float | None
    tail: float = 0.0

    def to_dict(self) -> dict:
        return asdict(self)


def _pair_terms(spec: ModelSpec, per_pair: Callable, rule: QuadratureRule) -> tuple[float, float, float]:
    from .random_measures import diag_integral, pair_integral

    t = spec.transform
    fn = _AttrFn(lambda x, y: per_pair(t.param(x, y)), t.kernel)
    diag, t1 = diag_integral(spec.nu, fn, rule)
    off, t2 = pair_integral(spec.nu, fn, rule)
    return spec.kappa.mean * diag, spec.kappa.second_factorial() * off, max(t1, t2)


def mean_edge_terms(spec: ModelSpec, rule: QuadratureRule = DEFAULT_RULE, weighted: bool = False):
    t = spec.transform
    g = spec.weight
    per_pair = (lambda p: t.expect(p, g)) if weighted else _count_fn(t, g)
    return _pair_terms(spec, per_pair, rule)


def edge_report(spec: ModelSpec, rule: QuadratureRule = DEFAULT_RULE) -> AnalyticsReport:
    sc_, ec_, t1 = mean_edge_terms(spec, rule)
    sw, ew, t2 = mean_edge_terms(spec, rule, weighted=True)
    gc = margin = None
    if not spec.directed and spec.weight.kind in ("identity", "indicator"):
        try:
            res = giant_component(spec, rule)
            gc, margin = res.verdict, res.margin
        except ValidationError:
            pass
    try:
        active = mean_active_vertices(spec, rule=rule)
    except ValidationError:
        active = None
    return AnalyticsReport(
        sc_ + ec_, sw + ew, sc_, ec_, sw, ew, sc_ + ec_ / 2, sw + ew / 2, gc, margin, active, max(t1, t2)
    )


# ---------------------------------------------------------------------------
# giant component, active vertices, triangles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GiantComponent:
    verdict: bool
    margin: float
    mean_degree: float
    second_moment: float


def giant_component(spec: ModelSpec, rule: QuadratureRule = DEFAULT_RULE) -> GiantComponent:
    """Molloy-Reed style criterion E Y^2 - 2 E Y > 0 for the external-point degree law.

    E Y and E Y(Y-1) come from closed-form inner integrals:
    E Y = c nu(m1), E Y(Y-1) = psi''(1) nu(m1^2) + c nu(m2).
    """
    if spec.directed:
        raise ValidationError("giant-component criterion applies to undirected graphs")
    kernel = spec.transform.kernel
    x, wx, _, _, _ = pair_nodes(spec.nu, kernel, rule)
    law, p, wy, m1, s2 = _degree_pieces(spec, x, "out", rule)
    c = spec.kappa.mean
    fact2 = s2 - m1
    ey = c * float(wx @ m1)
    eyy = spec.kappa.second_factorial() * float(wx @ (m1 * m1)) + c * float(wx @ fact2)
    margin = eyy - ey
    return GiantComponent(bool(margin > 0), margin, ey, eyy + ey)


def gc_threshold(margin_of: Callable[[float], float], lo: float, hi: float, xtol: float = 1e-13) -> float:
    """Root of a giant-component margin curve in a bracketing interval."""
    from scipy.optimize import brentq

    return float(brentq(margin_of, lo, hi, xtol=xtol, rtol=4 * np.finfo(float).eps))


def mean_active_vertices(spec: ModelSpec, realized: bool = True, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """Expected number of vertices with at least one edge (either direction).

    ``realized=False`` evaluates c int nu(dx)(1 - psi(1 - a(x))(1 - f(x,x)))
    as written for an external point; the default conditions on the vertex
    being one of the K sampled points.
    """
    t = spec.transform
    kernel = t.kernel
    x, wx, _, _, _ = pair_nodes(spec.nu, kernel, rule)
    xe, y, wy = _inner_grid(spec, x, rule)
    if isinstance(t, Digraphon):
        none = t.mass(xe, y, {(0, 0)})
        self_none = 1 - t.loop_prob(x)
    else:
        none = t.prob_zero(t.param(xe, y))
        if spec.directed:
            none = none * t.prob_zero(t.param(y, xe))
        self_none = t.prob_zero(t.param(x, x))
    if spec.weight.kind == "zero":
        return 0.0
    a = np.sum(wy * (1 - none), axis=1)
    kappa = spec.kappa
    c = kappa.mean
    if realized:
        iso = self_none * np.real(kappa.dpgf(1 - a)) / c
    else:
        iso = self_none * np.real(kappa.pgf(1 - a))
    return float(c * (wx @ (1 - iso)))


def exponential_active_vertices(c: float, b: float) -> float:
    """Poisson kappa, f = exp(-b(x + y)) off the diagonal: c (1 - nu e^{-c a})."""
    nu_g = (1 - np.exp(-b)) / b
    inner = (expint_ei(-c * nu_g) - expint_ei(-c * np.exp(-b) * nu_g)) / b
    return float(c * (1 - inner))


def mean_weight_kernel(spec: ModelSpec) -> Callable:
    """W(x, y) = E g(phi(x, y)), carrying the kernel's quadrature attributes."""
    t = spec.transform
    return _AttrFn(lambda x, y: t.expect(t.param(x, y), spec.weight), t.kernel)


def triangle_mean(spec: ModelSpec, z, rule: QuadratureRule = DEFAULT_RULE) -> float:
    """(c^2 + delta^2 - c) int int W~(x,y) W~(y,z) W~(z,x) with W~ zero on equal labels."""
    w = mean_weight_kernel(spec)
    dim = spec.nu.dim
    z = np.asarray(z, dtype=float)

    def tilde(a, b):
        a = np.asarray(a)
        b = np.asarray(b)
        same = np.all(a == b, axis=-1) if dim else a == b
        return np.where(same, 0.0, w(a, b))

    x, wx, y, wy, tail = pair_nodes(spec.nu, w, rule)
    if not spec.nu.atomic:
        # equal labels are null for continuous nu; keep z off the quadrature
        # nodes so the kernel's own diagonal mask never fires
        z = z + 1e-12 * (1 - 2 * (z > 0.5))
    xe = expand_outer(x, dim)
    zz = z if dim is None else z.reshape((1, 1, dim))
    vals = tilde(xe, y) * tilde(y, zz) * tilde(zz, xe)
    return float(spec.kappa.second_factorial() * (wx @ np.sum(wy * vals, axis=1)))
