"""Counting distributions, label distributions and the quadrature that realizes nu f.

Counting distributions carry their pgf, its first derivative and closed-form
factorial moments. Label distributions know how to sample themselves and how
to lay down quadrature nodes for single and nested (x, then y given x)
integrals.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np
from scipy import special as sc
from scipy import stats

from . import special
from .errors import InvalidDistributionError, TruncationWarning, ValidationError


# ---------------------------------------------------------------------------
# counting distributions
# ---------------------------------------------------------------------------


class CountingDistribution:
    """A law on the nonnegative integers with pgf calculus."""

    kind: str = ""

    @property
    def mean(self) -> float:
        return self.factorial_moment(1)

    @property
    def var(self) -> float:
        c = self.mean
        return self.factorial_moment(2) + c - c * c

    def moments(self) -> tuple[float, float]:
        return self.mean, self.var

    def second_factorial(self) -> float:
        """E K(K-1) = c^2 + delta^2 - c, the coefficient of the off-diagonal term."""
        return self.factorial_moment(2)

    def support(self) -> tuple[int, int | None]:
        raise NotImplementedError

    def pmf(self, k) -> np.ndarray:
        raise NotImplementedError

    def pgf(self, t):
        raise NotImplementedError

    def dpgf(self, t):
        raise NotImplementedError

    def factorial_moment(self, r: int) -> float:
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, size=None):
        raise NotImplementedError

    def thin(self, a: float) -> "CountingDistribution | None":
        """Law of the count after independent thinning with retention a (PT laws only)."""
        return None

    def to_dict(self) -> dict:
        raise NotImplementedError

    def __str__(self) -> str:
        d = self.to_dict()
        return ":".join([d["kind"]] + [repr(v) for k, v in d.items() if k != "kind"])


def _check(cond: bool, msg: str) -> None:
    if not cond:
        raise InvalidDistributionError(msg)


def _as_t(t):
    return np.asarray(t, dtype=complex if np.iscomplexobj(t) else float)


@dataclass(frozen=True)
class Dirac(CountingDistribution):
    n: int
    kind: str = field(default="dirac", init=False, repr=False)

    def __post_init__(self):
        _check(int(self.n) == self.n and self.n >= 0, f"Dirac needs integer n >= 0, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    def support(self):
        return self.n, self.n

    def pmf(self, k):
        return (np.asarray(k) == self.n).astype(float)

    def pgf(self, t):
        return _as_t(t) ** self.n

    def dpgf(self, t):
        if self.n == 0:
            return np.zeros_like(_as_t(t))
        return self.n * _as_t(t) ** (self.n - 1)

    def factorial_moment(self, r):
        return float(math.perm(self.n, r)) if r <= self.n else 0.0

    def sample(self, rng, size=None):
        return np.full(size, self.n, dtype=np.int64) if size is not None else self.n

    def to_dict(self):
        return {"kind": "dirac", "n": self.n}


@dataclass(frozen=True)
class Poisson(CountingDistribution):
    c: float
    kind: str = field(default="poisson", init=False, repr=False)

    def __post_init__(self):
        _check(np.isfinite(self.c) and self.c > 0, f"Poisson needs c > 0, got {self.c}")

    def support(self):
        return 0, None

    def pmf(self, k):
        return stats.poisson.pmf(k, self.c)

    def pgf(self, t):
        return np.exp(-self.c * (1 - _as_t(t)))

    def dpgf(self, t):
        return self.c * self.pgf(t)

    def factorial_moment(self, r):
        return float(self.c**r)

    def sample(self, rng, size=None):
        return rng.poisson(self.c, size)

    def thin(self, a):
        return Poisson(self.c * a)

    def to_dict(self):
        return {"kind": "poisson", "c": self.c}


@dataclass(frozen=True)
class NegativeBinomial(CountingDistribution):
    """pmf C(r+x-1, x) (1-p)^r p^x; mean rp/(1-p), variance rp/(1-p)^2.

    r may be any positive real so that moment fits are always representable.
    """

    r: float
    p: float
    kind: str = field(default="negbin", init=False, repr=False)

    def __post_init__(self):
        _check(self.r > 0, f"NegativeBinomial needs r > 0, got {self.r}")
        _check(0 < self.p < 1, f"NegativeBinomial needs 0 < p < 1, got {self.p}")

    def support(self):
        return 0, None

    def pmf(self, k):
        return stats.nbinom.pmf(k, self.r, 1 - self.p)

    def pgf(self, t):
        return ((1 - self.p) / (1 - self.p * _as_t(t))) ** self.r

    def dpgf(self, t):
        t = _as_t(t)
        return self.r * self.p * (1 - self.p) ** self.r / (1 - self.p * t) ** (self.r + 1)

    def factorial_moment(self, r):
        rising = math.prod(self.r + i for i in range(r))
        return float(rising * (self.p / (1 - self.p)) ** r)

    def sample(self, rng, size=None):
        return rng.negative_binomial(self.r, 1 - self.p, size)

    def thin(self, a):
        return NegativeBinomial(self.r, a * self.p / (1 - self.p + a * self.p))

    def to_dict(self):
        return {"kind": "negbin", "r": self.r, "p": self.p}


@dataclass(frozen=True)
class Binomial(CountingDistribution):
    n: int
    p: float
    kind: str = field(default="binomial", init=False, repr=False)

    def __post_init__(self):
        _check(int(self.n) == self.n and self.n >= 1, f"Binomial needs integer n >= 1, got {self.n}")
        _check(0 <= self.p <= 1, f"Binomial needs 0 <= p <= 1, got {self.p}")
        object.__setattr__(self, "n", int(self.n))

    def support(self):
        return 0, self.n

    def pmf(self, k):
        return stats.binom.pmf(k, self.n, self.p)

    def pgf(self, t):
        return (1 - self.p + self.p * _as_t(t)) ** self.n

    def dpgf(self, t):
        return self.n * self.p * (1 - self.p + self.p * _as_t(t)) ** (self.n - 1)

    def factorial_moment(self, r):
        return float(math.perm(self.n, r) * self.p**r) if r <= self.n else 0.0

    def sample(self, rng, size=None):
        return rng.binomial(self.n, self.p, size)

    def thin(self, a):
        return Binomial(self.n, a * self.p)

    def to_dict(self):
        return {"kind": "binomial", "n": self.n, "p": self.p}


def Bernoulli(p: float) -> Binomial:
    return Binomial(1, p)


class _FiniteSupport(CountingDistribution):
    """Shared pgf machinery for laws given by an explicit finite pmf table."""

    def _table(self) -> tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def pmf(self, k):
        ks, ps = self._table()
        k = np.asarray(k)
        idx = np.clip(k - ks[0], 0, len(ks) - 1).astype(np.int64)
        return np.where((k >= ks[0]) & (k <= ks[-1]) & (k == np.floor(k)), ps[idx], 0.0)

    def pgf(self, t):
        ks, ps = self._table()
        t = _as_t(t)
        out = np.zeros_like(t)
        for k, p in zip(ks, ps):
            out = out + p * t**k
        return out

    def dpgf(self, t):
        ks, ps = self._table()
        t = _as_t(t)
        out = np.zeros_like(t)
        for k, p in zip(ks, ps):
            if k:
                out = out + k * p * t ** (k - 1)
        return out

    def factorial_moment(self, r):
        ks, ps = self._table()
        falling = np.ones_like(ks, dtype=float)
        for i in range(r):
            falling *= ks - i
        return float(np.sum(falling * ps))

    def sample(self, rng, size=None):
        ks, ps = self._table()
        return rng.choice(ks, size=size, p=ps)


@dataclass(frozen=True)
class UniformInt(_FiniteSupport):
    m: int
    n: int
    kind: str = field(default="uniform", init=False, repr=False)

    def __post_init__(self):
        _check(int(self.m) == self.m and int(self.n) == self.n, "UniformInt bounds must be integers")
        _check(0 <= self.m <= self.n, f"UniformInt needs 0 <= m <= n, got ({self.m}, {self.n})")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))

    def support(self):
        return self.m, self.n

    def _table(self):
        ks = np.arange(self.m, self.n + 1)
        return ks, np.full(ks.size, 1.0 / ks.size)

    def sample(self, rng, size=None):
        return rng.integers(self.m, self.n + 1, size)

    def to_dict(self):
        return {"kind": "uniform", "m": self.m, "n": self.n}


@dataclass(frozen=True)
class Zipf(_FiniteSupport):
    """pmf x^-s / H_n(s) on {1..n}."""

    s: float
    n: int
    kind: str = field(default="zipf", init=False, repr=False)

    def __post_init__(self):
        _check(self.s >= 0, f"Zipf needs s >= 0, got {self.s}")
        _check(int(self.n) == self.n and self.n >= 1, f"Zipf needs integer n >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    def support(self):
        return 1, self.n

    def _table(self):
        ks = np.arange(1, self.n + 1)
        w = ks.astype(float) ** -self.s
        return ks, w / w.sum()

    def to_dict(self):
        return {"kind": "zipf", "s": self.s, "n": self.n}


def _polylog(order: float, t) -> np.ndarray:
    import mpmath

    t = np.asarray(t)
    flat = [complex(mpmath.polylog(order, complex(v))) for v in t.ravel()]
    return np.array(flat).reshape(t.shape)


@dataclass(frozen=True)
class Zeta(CountingDistribution):
    """pmf x^-s / zeta(s) on {1, 2, ...}."""

    s: float
    kind: str = field(default="zeta", init=False, repr=False)

    def __post_init__(self):
        _check(self.s > 1, f"Zeta needs s > 1, got {self.s}")

    def support(self):
        return 1, None

    def pmf(self, k):
        k = np.asarray(k, dtype=float)
        with np.errstate(divide="ignore"):
            return np.where(k >= 1, np.abs(k) ** -self.s / special.zeta(self.s), 0.0)

    def pgf(self, t):
        t = _as_t(t)
        out = _polylog(self.s, t) / special.zeta(self.s)
        out = np.where(t == 1, 1.0, out)
        return out if np.iscomplexobj(t) else out.real

    def dpgf(self, t):
        t = _as_t(t)
        safe = np.where(t == 0, 0.5, t)
        out = _polylog(self.s - 1, safe) / (safe * special.zeta(self.s))
        out = np.where(t == 0, 1.0 / special.zeta(self.s), out)
        return out if np.iscomplexobj(t) else out.real

    def factorial_moment(self, r):
        if self.s <= r + 1:
            return math.inf
        # falling factorial k(k-1)...(k-r+1) expanded in powers of k
        coeffs = np.polynomial.polynomial.polyfromroots(np.arange(r))
        total = sum(a * special.zeta(self.s - j) for j, a in enumerate(coeffs) if a)
        return float(total / special.zeta(self.s))

    def sample(self, rng, size=None):
        draws = _zeta_sampler(self.s).sample(rng, 1 if size is None else size)
        return int(draws[0]) if size is None else draws

    def to_dict(self):
        return {"kind": "zeta", "s": self.s}


class _ZetaSampler:
    """Inverse-CDF over a prefix {1..N} plus exact rejection for the tail.

    The tail proposal is floor(Y) with Y Pareto on [N+1, inf); the acceptance
    ratio k^-s / int_k^{k+1} y^-s dy is bounded by its value at k = N+1.
    """

    _MAX_LABEL = 2**62

    def __init__(self, s: float, prefix_max: int = 2**20, prefix_mass: float = 1 - 1e-9):
        self.s = s
        z = special.zeta(s)
        n = 1024
        while n < prefix_max and special.zeta_tail(s, n) / z > 1 - prefix_mass:
            n *= 2
        n = min(n, prefix_max)
        ks = np.arange(1, n + 1, dtype=float)
        self.cdf = np.cumsum(ks**-s) / z
        self.n = n

    def _tail(self, rng, count: int) -> np.ndarray:
        s, n = self.s, self.n
        out = np.empty(count, dtype=np.int64)
        ratio_max = self._ratio(np.array([n + 1.0]))[0]
        filled = 0
        while filled < count:
            need = count - filled
            u = rng.random(need)
            y = (n + 1.0) * (1.0 - u) ** (-1.0 / (s - 1.0))
            k = np.floor(np.minimum(y, float(self._MAX_LABEL)))
            keep = rng.random(need) * ratio_max <= self._ratio(k)
            got = k[keep].astype(np.int64)
            out[filled : filled + got.size] = got
            filled += got.size
        return out

    def _ratio(self, k: np.ndarray) -> np.ndarray:
        s = self.s
        interval = (k ** (1 - s) - (k + 1) ** (1 - s)) / (s - 1)
        return k**-s / interval

    def sample(self, rng, size) -> np.ndarray:
        u = rng.random(size)
        idx = np.searchsorted(self.cdf, u, side="right")
        out = (idx + 1).astype(np.int64)
        in_tail = idx >= self.n
        if in_tail.any():
            out[in_tail] = self._tail(rng, int(in_tail.sum()))
        return out


@lru_cache(maxsize=32)
def _zeta_sampler(s: float, prefix_max: int = 2**20) -> _ZetaSampler:
    return _ZetaSampler(s, prefix_max)


def pgf_eval(dist: CountingDistribution, t):
    """psi(t) on [0, 1]; complex t on the closed unit disk via the same method."""
    t_arr = np.asarray(t)
    if not np.iscomplexobj(t_arr) and ((t_arr < 0) | (t_arr > 1)).any():
        raise ValidationError("pgf_eval expects t in [0, 1]")
    out = dist.pgf(t_arr)
    return float(out) if np.ndim(out) == 0 and not np.iscomplexobj(out) else out


def moments(dist: CountingDistribution) -> tuple[float, float]:
    return dist.moments()


@dataclass(frozen=True)
class PTClassification:
    kind: str
    distribution: CountingDistribution | None
    c: float
    delta2: float
    degenerate: bool = False


def classify_pt(c: float, delta2: float, tol: float = 0.25) -> PTClassification:
    """Pick the Poisson-type law whose first two moments match (c, delta2).

    Poisson when |delta2 - c| <= tol * c, binomial when under-dispersed,
    negative binomial when over-dispersed. A zero variance maps to the
    binomial limit p = 1 and is flagged as degenerate.
    """
    if not c > 0:
        raise InvalidDistributionError(f"classify_pt needs c > 0, got {c}")
    if delta2 < 0:
        raise InvalidDistributionError(f"classify_pt needs delta2 >= 0, got {delta2}")
    gap = delta2 - c
    if abs(gap) <= tol * c:
        return PTClassification("poisson", Poisson(c), c, delta2)
    if gap < 0:
        n = max(1, int(round(c * c / (c - delta2))))
        p = min(1.0, c / n)
        degenerate = delta2 == 0 or p >= 1.0
        return PTClassification("binomial", Binomial(n, p), c, delta2, degenerate)
    p = 1 - c / delta2
    r = c * c / (delta2 - c)
    return PTClassification("negbin", NegativeBinomial(r, p), c, delta2)


_COUNTING_KINDS = {
    "dirac": (Dirac, ("n",)),
    "poisson": (Poisson, ("c",)),
    "negbin": (NegativeBinomial, ("r", "p")),
    "binomial": (Binomial, ("n", "p")),
    "bernoulli": (Bernoulli, ("p",)),
    "uniform": (UniformInt, ("m", "n")),
    "zeta": (Zeta, ("s",)),
    "zipf": (Zipf, ("s", "n")),
}


def counting_from_dict(d: dict) -> CountingDistribution:
    kind = d.get("kind")
    if kind not in _COUNTING_KINDS:
        raise ValidationError(f"unknown counting distribution {kind!r}")
    cls, names = _COUNTING_KINDS[kind]
    try:
        return cls(*(d[n] for n in names))
    except KeyError as exc:
        raise ValidationError(f"{kind} needs parameter {exc.args[0]!r}") from None


def parse_counting(text: str) -> CountingDistribution:
    """Parse the compact CLI form, e.g. ``poisson:30`` or ``binomial:10:0.3``."""
    kind, *args = text.split(":")
    if kind not in _COUNTING_KINDS:
        raise ValidationError(f"unknown counting distribution {kind!r}")
    _, names = _COUNTING_KINDS[kind]
    if len(args) != len(names):
        raise ValidationError(f"{kind} expects {len(names)} parameter(s): {', '.join(names)}")
    return counting_from_dict({"kind": kind, **{n: _number(a) for n, a in zip(names, args)}})


def _number(text: str):
    try:
        v = float(text)
    except ValueError:
        raise ValidationError(f"not a number: {text!r}") from None
    return int(v) if v.is_integer() and "." not in text and "e" not in text.lower() else v


# ---------------------------------------------------------------------------
# quadrature
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadratureRule:
    """Integration settings shared by every nu f computation.

    nodes: Gauss-Legendre nodes per subinterval of [0, 1].
    cube_nodes: nodes per axis for the unit cube (tensor product).
    truncation: support cutoff for single sums over infinite discrete labels.
    pair_truncation: cutoff for the inner sum of nested (pair) integrals.
    tail_tol: leftover mass above which a TruncationWarning is raised.
    """

    nodes: int = 64
    cube_nodes: int = 12
    truncation: int = 10**6
    pair_truncation: int = 2000
    tail_tol: float = 1e-8


DEFAULT_RULE = QuadratureRule()


@lru_cache(maxsize=64)
def _leggauss01(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    return (x + 1) / 2, w / 2


def gauss_legendre(n: int, a: float = 0.0, b: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    x, w = _leggauss01(n)
    return a + (b - a) * x, (b - a) * w


def _composite(n: int, edges: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    xs, ws = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b > a:
            x, w = gauss_legendre(n, a, b)
            xs.append(x)
            ws.append(w)
    return np.concatenate(xs), np.concatenate(ws)


@dataclass(frozen=True)
class Nodes:
    points: np.ndarray
    weights: np.ndarray
    tail: float = 0.0


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    tail: float = 0.0
    warning: bool = False

    def __float__(self) -> float:
        return float(self.value)


# ---------------------------------------------------------------------------
# label distributions
# ---------------------------------------------------------------------------


class LabelDistribution:
    """A probability measure nu on the label space E."""

    kind: str = ""
    atomic: bool = False
    ordered: bool = True
    dim: int | None = None

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        raise NotImplementedError

    def contains(self, x) -> np.ndarray:
        raise NotImplementedError

    def outer(self, rule: QuadratureRule = DEFAULT_RULE, breaks: Sequence[float] = ()) -> Nodes:
        raise NotImplementedError

    def inner(
        self,
        x: np.ndarray,
        rule: QuadratureRule = DEFAULT_RULE,
        breaks: Sequence[float] = (),
        split: bool = False,
    ) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights for y given each x, shaped (len(x), m[, dim]).

        ``split`` asks for the y-range to be cut at y = x, which keeps
        Gauss-Legendre exact-ish for kernels that jump on the diagonal.
        """
        nodes = self.inner_nodes(rule)
        nx = len(x)
        pts = np.broadcast_to(nodes.points, (nx,) + nodes.points.shape)
        w = np.broadcast_to(nodes.weights, (nx, nodes.weights.size))
        return pts, w

    def inner_nodes(self, rule: QuadratureRule) -> Nodes:
        return self.outer(rule)

    def to_dict(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class UnitInterval(LabelDistribution):
    """Lebesgue measure on [0, 1]."""

    kind: str = field(default="leb", init=False, repr=False)

    def sample(self, rng, size):
        return rng.random(size)

    def contains(self, x):
        x = np.asarray(x)
        return (x >= 0) & (x <= 1)

    def outer(self, rule=DEFAULT_RULE, breaks=()):
        edges = sorted({0.0, 1.0, *[float(b) for b in breaks if 0 < b < 1]})
        pts, w = _composite(rule.nodes, edges)
        return Nodes(pts, w)

    def inner(self, x, rule=DEFAULT_RULE, breaks=(), split=False):
        x = np.asarray(x, dtype=float)
        if not split:
            # n + 1 nodes: Legendre roots of consecutive orders interlace, so inner
            # and outer nodes never coincide and the diagonal (nu-null) is never hit
            nodes = self.outer(QuadratureRule(rule.nodes + 1), breaks)
            nx = x.shape[0]
            return (
                np.broadcast_to(nodes.points, (nx, nodes.points.size)),
                np.broadcast_to(nodes.weights, (nx, nodes.weights.size)),
            )
        ref, refw = _leggauss01(rule.nodes)
        inner_breaks = sorted(float(b) for b in breaks if 0 < b < 1)
        col = x[:, None]
        lower = [np.zeros_like(col)] + [np.minimum(b, col) for b in inner_breaks] + [col]
        upper = [col] + [np.maximum(b, col) for b in inner_breaks] + [np.ones_like(col)]
        pts, wts = [], []
        for edges in (lower, upper):
            for a, b in zip(edges[:-1], edges[1:]):
                pts.append(a + (b - a) * ref[None, :])
                wts.append((b - a) * refw[None, :])
        return np.concatenate(pts, axis=1), np.concatenate(wts, axis=1)

    def to_dict(self):
        return {"kind": "leb"}


@dataclass(frozen=True)
class UnitCube(LabelDistribution):
    """Lebesgue measure on [0, 1]^d; labels are arrays of shape (..., d)."""

    d: int
    kind: str = field(default="cube", init=False, repr=False)

    def __post_init__(self):
        if int(self.d) != self.d or self.d < 1:
            raise ValidationError(f"cube dimension must be a positive integer, got {self.d}")
        object.__setattr__(self, "d", int(self.d))

    @property
    def dim(self):
        return self.d

    @property
    def ordered(self):
        return self.d == 1

    def sample(self, rng, size):
        return rng.random((size, self.d))

    def contains(self, x):
        x = np.asarray(x)
        return np.all((x >= 0) & (x <= 1), axis=-1)

    def outer(self, rule=DEFAULT_RULE, breaks=()):
        x, w = gauss_legendre(rule.cube_nodes)
        grids = np.meshgrid(*([x] * self.d), indexing="ij")
        wgrids = np.meshgrid(*([w] * self.d), indexing="ij")
        pts = np.stack([g.ravel() for g in grids], axis=-1)
        wts = np.prod(np.stack([g.ravel() for g in wgrids], axis=-1), axis=-1)
        return Nodes(pts, wts)

    def inner_nodes(self, rule):
        return self.outer(QuadratureRule(cube_nodes=rule.cube_nodes + 1))

    def to_dict(self):
        return {"kind": "cube", "d": self.d}


class _Discrete(LabelDistribution):
    atomic = True

    def _atoms(self, limit: int) -> tuple[np.ndarray, np.ndarray, float]:
        raise NotImplementedError

    def outer(self, rule=DEFAULT_RULE, breaks=()):
        pts, w, tail = self._atoms(rule.truncation)
        return Nodes(pts, w, tail)

    def inner_nodes(self, rule):
        pts, w, tail = self._atoms(rule.pair_truncation)
        return Nodes(pts, w, tail)


@dataclass(frozen=True)
class UniformLabels(_Discrete):
    """Uniform measure on the integers {m..n}."""

    n: int
    m: int = 1
    kind: str = field(default="uniform", init=False, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or int(self.m) != self.m or not 0 <= self.m <= self.n:
            raise InvalidDistributionError(f"uniform labels need integers 0 <= m <= n, got ({self.m}, {self.n})")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "m", int(self.m))

    def sample(self, rng, size):
        return rng.integers(self.m, self.n + 1, size)

    def contains(self, x):
        x = np.asarray(x)
        return (x >= self.m) & (x <= self.n) & (x == np.floor(x))

    def _atoms(self, limit):
        pts = np.arange(self.m, self.n + 1)
        return pts, np.full(pts.size, 1.0 / pts.size), 0.0

    def to_dict(self):
        return {"kind": "uniform", "m": self.m, "n": self.n}


@dataclass(frozen=True)
class ZetaLabels(_Discrete):
    """nu{x} = x^-s / zeta(s) on {1, 2, ...}."""

    s: float
    kind: str = field(default="zeta", init=False, repr=False)

    def __post_init__(self):
        if not self.s > 1:
            raise InvalidDistributionError(f"zeta labels need s > 1, got {self.s}")

    def sample(self, rng, size):
        return _zeta_sampler(self.s).sample(rng, size)

    def contains(self, x):
        x = np.asarray(x)
        return (x >= 1) & (x == np.floor(x))

    def _atoms(self, limit):
        pts = np.arange(1, limit + 1)
        z = special.zeta(self.s)
        w = pts.astype(float) ** -self.s / z
        return pts, w, special.zeta_tail(self.s, limit) / z

    def to_dict(self):
        return {"kind": "zeta", "s": self.s}


@dataclass(frozen=True)
class CategoricalLabels(_Discrete):
    """nu{x} = weights[x - 1] on {1..n}; weights are normalized."""

    weights: tuple
    kind: str = field(default="categorical", init=False, repr=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0 or np.any(w < 0) or not w.sum() > 0:
            raise InvalidDistributionError("categorical labels need nonnegative weights with positive sum")
        object.__setattr__(self, "weights", tuple((w / w.sum()).tolist()))

    def sample(self, rng, size):
        return rng.choice(np.arange(1, len(self.weights) + 1), size=size, p=np.asarray(self.weights))

    def contains(self, x):
        x = np.asarray(x)
        return (x >= 1) & (x <= len(self.weights)) & (x == np.floor(x))

    def _atoms(self, limit):
        return np.arange(1, len(self.weights) + 1), np.asarray(self.weights), 0.0

    def to_dict(self):
        return {"kind": "categorical", "weights": list(self.weights)}


@dataclass(frozen=True)
class EmpiricalLabels(_Discrete):
    """Empirical distribution F_n of a finite point list (points may repeat)."""

    points: tuple
    kind: str = field(default="empirical", init=False, repr=False)

    def __post_init__(self):
        pts = tuple(self.points)
        if not pts:
            raise ValidationError("empirical measure needs at least one point")
        object.__setattr__(self, "points", pts)

    @property
    def _array(self) -> np.ndarray:
        return np.asarray(self.points, dtype=float)

    @property
    def dim(self):
        arr = self._array
        return None if arr.ndim == 1 else arr.shape[1]

    @property
    def ordered(self):
        return self._array.ndim == 1

    def sample(self, rng, size):
        arr = self._array
        return arr[rng.integers(0, len(arr), size)]

    def contains(self, x):
        arr = self._array
        x = np.asarray(x, dtype=float)
        if arr.ndim == 1:
            return np.isin(x, arr)
        return np.array([any(np.array_equal(v, p) for p in arr) for v in x.reshape(-1, arr.shape[1])])

    def _atoms(self, limit):
        arr = self._array
        return arr, np.full(len(arr), 1.0 / len(arr)), 0.0

    def to_dict(self):
        return {"kind": "empirical", "points": [list(p) if np.ndim(p) else p for p in self.points]}


def integrate(nu: LabelDistribution, f: Callable, rule: QuadratureRule = DEFAULT_RULE) -> IntegrationResult:
    """nu f by Gauss-Legendre (continuous) or truncated summation (discrete).

    For discrete laws with infinite support the leftover mass beyond the
    truncation is reported; for f bounded by 1 it bounds the error.
    """
    nodes = nu.outer(rule)
    vals = np.asarray(f(nodes.points), dtype=float)
    value = float(np.dot(nodes.weights, np.broadcast_to(vals, nodes.weights.shape)))
    warn = nodes.tail > rule.tail_tol
    if warn:
        warnings.warn(f"truncated sum leaves mass {nodes.tail:.3g}", TruncationWarning, stacklevel=2)
    return IntegrationResult(value, nodes.tail, warn)


_LABEL_KINDS = {
    "leb": lambda d: UnitInterval(),
    "cube": lambda d: UnitCube(d["d"]),
    "uniform": lambda d: UniformLabels(d["n"], d.get("m", 1)),
    "zeta": lambda d: ZetaLabels(d["s"]),
    "categorical": lambda d: CategoricalLabels(tuple(d["weights"])),
    "empirical": lambda d: EmpiricalLabels(tuple(tuple(p) if isinstance(p, list) else p for p in d["points"])),
}


def label_from_dict(d: dict) -> LabelDistribution:
    kind = d.get("kind")
    if kind not in _LABEL_KINDS:
        raise ValidationError(f"unknown label distribution {kind!r}")
    try:
        return _LABEL_KINDS[kind](d)
    except KeyError as exc:
        raise ValidationError(f"{kind} labels need parameter {exc.args[0]!r}") from None


def parse_label(text: str) -> LabelDistribution:
    """Compact CLI form: ``leb``, ``cube:2``, ``uniform:10``, ``uniform:2:10``, ``zeta:2``."""
    kind, *args = text.split(":")
    vals = [_number(a) for a in args]
    if kind == "leb" and not vals:
        return UnitInterval()
    if kind == "cube" and len(vals) == 1:
        return UnitCube(vals[0])
    if kind == "uniform" and len(vals) == 1:
        return UniformLabels(vals[0])
    if kind == "uniform" and len(vals) == 2:
        return UniformLabels(vals[1], vals[0])
    if kind == "zeta" and len(vals) == 1:
        return ZetaLabels(vals[0])
    raise ValidationError(f"cannot parse label distribution {text!r}")
