"""Graphon kernels and random edge transformations.

A transformation is described by its marginal transition kernel
Q((x, y), .). Every integer-valued transformation here depends on (x, y)
only through one per-pair parameter (a kernel value, or a digraphon mass),
so the analytics work with ``param(x, y)`` plus per-parameter pgfs and
factorial moments.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import special as sc
from scipy import stats

from .errors import ValidationError


def _same_label(x, y, dim: int | None) -> np.ndarray:
    eq = np.asarray(x) == np.asarray(y)
    return np.all(eq, axis=-1) if dim else eq


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------


class Kernel:
    """A two-argument function on labels.

    Attributes describe what the quadrature needs to know: ``breakpoints``
    are jump locations along each axis and ``split_diagonal`` marks kernels
    that jump across the line y = x.
    """

    symmetric: bool = True
    zero_diagonal: bool = False
    breakpoints: tuple = ()
    split_diagonal: bool = False
    indicator: bool = False
    dim: int | None = None

    def _eval(self, x, y):
        raise NotImplementedError

    def __call__(self, x, y) -> np.ndarray:
        x = np.asarray(x)
        y = np.asarray(y)
        v = np.asarray(self._eval(x, y), dtype=float)
        if self.zero_diagonal:
            same = _same_label(x, y, self.dim)
            v = np.where(same, 0.0, v)
        return v

    def pairwise(self, xs: np.ndarray, ys: np.ndarray | None = None) -> np.ndarray:
        """Kernel matrix K[i, j] = k(xs[i], ys[j])."""
        ys = xs if ys is None else ys
        if self.dim:
            return self(xs[:, None, :], ys[None, :, :])
        return self(xs[:, None], ys[None, :])

    def to_dict(self) -> dict:
        raise ValidationError(f"{type(self).__name__} kernels cannot be serialized")

    def _flags(self) -> dict:
        return {"zero_diagonal": self.zero_diagonal}


@dataclass(frozen=True)
class Constant(Kernel):
    p: float
    zero_diagonal: bool = True

    def _eval(self, x, y):
        return np.full(np.broadcast_shapes(np.shape(x), np.shape(y)), float(self.p))

    def to_dict(self):
        return {"kind": "constant", "p": self.p, **self._flags()}


@dataclass(frozen=True)
class PowerLaw(Kernel):
    """f(x, y) = (1 + bx)^-2 (1 + by)^-2."""

    b: float
    zero_diagonal: bool = True

    def _eval(self, x, y):
        return (1 + self.b * x) ** -2.0 * (1 + self.b * y) ** -2.0

    def to_dict(self):
        return {"kind": "powerlaw", "b": self.b, **self._flags()}


@dataclass(frozen=True)
class Exponential(Kernel):
    """f(x, y) = exp(-b (x + y))."""

    b: float
    zero_diagonal: bool = True

    def _eval(self, x, y):
        return np.exp(-self.b * (x + y))

    def to_dict(self):
        return {"kind": "exponential", "b": self.b, **self._flags()}


@dataclass(frozen=True)
class Block(Kernel):
    """Stochastic block model on [0, 1]: cells cut at ``cuts``, probabilities ``probs``."""

    cuts: tuple
    probs: tuple
    zero_diagonal: bool = True

    def __post_init__(self):
        cuts = tuple(float(c) for c in self.cuts)
        probs = np.asarray(self.probs, dtype=float)
        k = len(cuts) + 1
        if probs.shape != (k, k):
            raise ValidationError(f"block model with {k} cells needs a {k}x{k} probability table")
        if list(cuts) != sorted(cuts) or any(not 0 < c < 1 for c in cuts):
            raise ValidationError("block cuts must be increasing and inside (0, 1)")
        object.__setattr__(self, "cuts", cuts)
        object.__setattr__(self, "probs", tuple(map(tuple, probs.tolist())))

    @property
    def symmetric(self):
        p = np.asarray(self.probs)
        return bool(np.array_equal(p, p.T))

    @property
    def breakpoints(self):
        return self.cuts

    def _eval(self, x, y):
        p = np.asarray(self.probs)
        i = np.searchsorted(self.cuts, x, side="right")
        j = np.searchsorted(self.cuts, y, side="right")
        return p[i, j]

    def to_dict(self):
        return {"kind": "block", "cuts": list(self.cuts), "probs": [list(r) for r in self.probs], **self._flags()}


@dataclass(frozen=True)
class DotProduct(Kernel):
    """f(x, y) = <x^a, y^a> / d on the unit cube [0, 1]^d."""

    a: float
    d: int
    zero_diagonal: bool = True

    @property
    def dim(self):
        return self.d

    def _eval(self, x, y):
        return np.sum(x**self.a * y**self.a, axis=-1) / self.d

    def to_dict(self):
        return {"kind": "dotproduct", "a": self.a, "d": self.d, **self._flags()}


def legendre_basis(x, m: int) -> np.ndarray:
    """Orthonormal shifted Legendre polynomials on [0, 1]; shape x.shape + (m,)."""
    x = np.asarray(x, dtype=float)
    out = np.empty(x.shape + (m,))
    for k in range(m):
        out[..., k] = np.sqrt(2 * k + 1) * sc.eval_legendre(k, 2 * x - 1)
    return out


@dataclass(frozen=True)
class LegendreExpansion(Kernel):
    """f = sum_ij B_ij phi_i(x) phi_j(y); with ``separable`` the coefficients are a vector beta and B = beta beta^T."""

    coeffs: tuple
    separable: bool = False
    zero_diagonal: bool = True

    def __post_init__(self):
        arr = np.asarray(self.coeffs, dtype=float)
        if self.separable and arr.ndim != 1:
            raise ValidationError("separable Legendre expansion takes a coefficient vector")
        if not self.separable and (arr.ndim != 2 or arr.shape[0] != arr.shape[1]):
            raise ValidationError("Legendre expansion takes a square coefficient matrix")
        object.__setattr__(
            self, "coeffs", tuple(arr.tolist()) if arr.ndim == 1 else tuple(map(tuple, arr.tolist()))
        )

    @property
    def matrix(self) -> np.ndarray:
        arr = np.asarray(self.coeffs, dtype=float)
        return np.outer(arr, arr) if self.separable else arr

    @property
    def order(self) -> int:
        return self.matrix.shape[0]

    @property
    def symmetric(self):
        b = self.matrix
        return bool(np.allclose(b, b.T, rtol=0, atol=0))

    def _eval(self, x, y):
        m = self.order
        px = legendre_basis(x, m)
        py = legendre_basis(y, m)
        return np.einsum("...i,ij,...j->...", px, self.matrix, py)

    def to_dict(self):
        return {"kind": "legendre", "coeffs": [list(r) if isinstance(r, tuple) else r for r in self.coeffs],
                "separable": self.separable, **self._flags()}


@dataclass(frozen=True)
class Restricted(Kernel):
    """base(x, y) * 1{x < y}: the restricted graphon that makes STC graphs acyclic."""

    base: Kernel

    symmetric = False
    split_diagonal = True

    @property
    def zero_diagonal(self):
        return True

    @property
    def breakpoints(self):
        return self.base.breakpoints

    @property
    def indicator(self):
        return self.base.indicator

    def _eval(self, x, y):
        return np.where(x < y, self.base(x, y), 0.0)

    def to_dict(self):
        return {"kind": "restricted", "base": self.base.to_dict()}


@dataclass(frozen=True)
class PrimePairs(Kernel):
    """Indicator of distinct prime labels, 1{x, y prime, x != y}."""

    indicator = True

    @property
    def zero_diagonal(self):
        return True

    def _eval(self, x, y):
        from .special import is_prime

        return (is_prime(x) & is_prime(y)).astype(float)

    def to_dict(self):
        return {"kind": "primes"}


@dataclass(frozen=True)
class Layered(Kernel):
    """f(x, y) = 1(y = x + 1) p(x): consecutive-layer wiring on {1..n}.

    ``p[x - 1]`` is the connection probability from layer x to layer x + 1.
    """

    p: tuple

    symmetric = False

    def __post_init__(self):
        object.__setattr__(self, "p", tuple(float(v) for v in self.p))

    @property
    def zero_diagonal(self):
        return True

    def _eval(self, x, y):
        x = np.asarray(x)
        y = np.asarray(y)
        table = np.asarray(self.p + (0.0,))
        idx = np.clip(x.astype(np.int64) - 1, 0, len(table) - 1)
        return np.where(y == x + 1, table[idx], 0.0)

    def to_dict(self):
        return {"kind": "layered", "p": list(self.p)}


@dataclass(frozen=True)
class Product(Kernel):
    """f(x, y) = x * y / m, the soft fixed-degree mean on degree labels."""

    scale: float = 1.0
    zero_diagonal: bool = False

    def _eval(self, x, y):
        return np.asarray(x, dtype=float) * np.asarray(y, dtype=float) * self.scale

    def to_dict(self):
        return {"kind": "product", "scale": self.scale, **self._flags()}


class Custom(Kernel):
    """Wrap a vectorized callable f(x, y)."""

    def __init__(self, fn: Callable, symmetric: bool = True, zero_diagonal: bool = False,
                 dim: int | None = None, breakpoints: Sequence[float] = (), split_diagonal: bool = False,
                 indicator: bool = False, name: str = "custom"):
        self.fn = fn
        self.symmetric = symmetric
        self.zero_diagonal = zero_diagonal
        self.dim = dim
        self.breakpoints = tuple(breakpoints)
        self.split_diagonal = split_diagonal
        self.indicator = indicator
        self.name = name

    def _eval(self, x, y):
        return self.fn(x, y)

    def __repr__(self):
        return f"Custom({self.name})"


def eval_kernel(k: Kernel, x, y):
    v = k(x, y)
    return float(v) if np.ndim(v) == 0 else v


_KERNEL_KINDS = {
    "constant": lambda d: Constant(d["p"], d.get("zero_diagonal", True)),
    "powerlaw": lambda d: PowerLaw(d["b"], d.get("zero_diagonal", True)),
    "exponential": lambda d: Exponential(d["b"], d.get("zero_diagonal", True)),
    "block": lambda d: Block(tuple(d["cuts"]), tuple(map(tuple, d["probs"])), d.get("zero_diagonal", True)),
    "dotproduct": lambda d: DotProduct(d["a"], d["d"], d.get("zero_diagonal", True)),
    "legendre": lambda d: LegendreExpansion(
        tuple(tuple(r) if isinstance(r, list) else r for r in d["coeffs"]),
        d.get("separable", False),
        d.get("zero_diagonal", True),
    ),
    "restricted": lambda d: Restricted(kernel_from_dict(d["base"])),
    "primes": lambda d: PrimePairs(),
    "layered": lambda d: Layered(tuple(d["p"])),
    "product": lambda d: Product(d.get("scale", 1.0), d.get("zero_diagonal", False)),
}


def kernel_from_dict(d: dict) -> Kernel:
    kind = d.get("kind")
    if kind not in _KERNEL_KINDS:
        raise ValidationError(f"unknown kernel {kind!r}")
    try:
        return _KERNEL_KINDS[kind](d)
    except KeyError as exc:
        raise ValidationError(f"{kind} kernel needs parameter {exc.args[0]!r}") from None


def validation_points(nu=None, n_probe: int = 1000) -> np.ndarray:
    """Labels on which kernel ranges are checked: a uniform grid, GL nodes and random probes."""
    from .distributions import DEFAULT_RULE, UnitInterval

    rng = np.random.default_rng(12345)
    if nu is None or isinstance(nu, UnitInterval):
        grid = np.linspace(0, 1, 101)
        gl = UnitInterval().outer(DEFAULT_RULE).points
        return np.concatenate([grid, gl, rng.random(n_probe)])
    if nu.dim:
        corners = np.array(np.meshgrid(*([[0.0, 1.0]] * nu.dim))).reshape(nu.dim, -1).T
        return np.concatenate([corners, rng.random((200, nu.dim))])
    atoms = nu.outer(DEFAULT_RULE).points[:200]
    return np.concatenate([atoms, nu.sample(rng, 200)])


def validate_range(kernel: Kernel, nu=None, upper: float | None = 1.0) -> None:
    """Reject kernels that leave [0, upper] on the validation points."""
    pts = validation_points(nu)
    if kernel.dim and pts.ndim == 1:
        return
    vals = kernel.pairwise(pts)
    lo, hi = float(np.min(vals)), float(np.max(vals))
    if lo < -1e-9:
        raise ValidationError(f"kernel takes negative value {lo:.6g}")
    if upper is not None and hi > upper + 1e-9:
        raise ValidationError(f"kernel value {hi:.6g} exceeds {upper}")


# ---------------------------------------------------------------------------
# weight functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightFunction:
    """Nonnegative test function g on the transform's value space.

    kind "identity" keeps the sampled weight, "indicator" maps it to 1{w > 0},
    "power" raises it to ``exponent``.
    """

    kind: str = "identity"
    exponent: float = 1.0

    def __post_init__(self):
        if self.kind not in ("identity", "indicator", "power", "zero"):
            raise ValidationError(f"unknown weight function {self.kind!r}")

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        if self.kind == "identity":
            return w
        if self.kind == "indicator":
            return (w > 0).astype(float)
        if self.kind == "zero":
            return np.zeros_like(w)
        return np.where(w > 0, w**self.exponent, 0.0)

    def positive(self, w) -> np.ndarray:
        return self(w) > 0

    def to_dict(self):
        d = {"kind": self.kind}
        if self.kind == "power":
            d["exponent"] = self.exponent
        return d


IDENTITY = WeightFunction()


# ---------------------------------------------------------------------------
# random transformations
# ---------------------------------------------------------------------------


class Transform:
    """Random transformation phi with marginal kernel Q((x, y), .)."""

    kind: str = ""
    integer_valued: bool = True

    @property
    def symmetric(self) -> bool:
        return self.kernel.symmetric

    @property
    def zero_diagonal(self) -> bool:
        return self.kernel.zero_diagonal

    def param(self, x, y) -> np.ndarray:
        return self.kernel(x, y)

    def mean_of(self, p) -> np.ndarray:
        raise NotImplementedError

    def sample_from(self, rng, p) -> np.ndarray:
        raise NotImplementedError

    def pgf_of(self, p, t):
        raise NotImplementedError

    def factorial_of(self, p) -> tuple[np.ndarray, np.ndarray]:
        """First and second factorial moments of Q given the per-pair parameter."""
        raise NotImplementedError

    def prob_zero(self, p) -> np.ndarray:
        raise NotImplementedError

    def pmf_table(self, p) -> tuple[np.ndarray, np.ndarray]:
        """Support values and probabilities with shape p.shape + (len(support),)."""
        raise NotImplementedError

    def expect(self, p, g: WeightFunction = IDENTITY) -> np.ndarray:
        """Integral of g against Q for each per-pair parameter."""
        p = np.asarray(p, dtype=float)
        if g.kind == "identity":
            return self.mean_of(p)
        if g.kind == "zero":
            return np.zeros_like(p)
        if g.kind == "indicator" and self.integer_valued:
            return 1.0 - self.prob_zero(p)
        vals, probs = self.pmf_table(p)
        return np.sum(g(vals) * probs, axis=-1)

    def mean(self, x, y) -> np.ndarray:
        return self.mean_of(self.param(x, y))

    def to_dict(self) -> dict:
        return {"kind": self.kind, "kernel": self.kernel.to_dict()}

    def validate(self, nu=None) -> None:
        pass


def transform_mean(t: Transform, x, y):
    v = t.mean(x, y)
    return float(v) if np.ndim(v) == 0 else v


@dataclass(frozen=True)
class Deterministic(Transform):
    kernel: Kernel
    kind: str = field(default="deterministic", init=False, repr=False)

    @property
    def integer_valued(self):
        return self.kernel.indicator

    def mean_of(self, p):
        return np.asarray(p, dtype=float)

    def sample_from(self, rng, p):
        return np.asarray(p, dtype=float)

    def pgf_of(self, p, t):
        if not self.kernel.indicator:
            raise ValidationError("pgf needs an integer-valued (indicator) deterministic kernel")
        p = np.asarray(p)
        return np.where(p[..., None] > 0, t, 1.0) if np.ndim(t) else np.where(p > 0, t, 1.0)

    def factorial_of(self, p):
        p = np.asarray(p, dtype=float)
        return p, p * (p - 1)

    def prob_zero(self, p):
        return (np.asarray(p) == 0).astype(float)

    def pmf_table(self, p):
        p = np.asarray(p, dtype=float)
        return p[..., None], np.ones(p.shape + (1,))

    def validate(self, nu=None):
        validate_range(self.kernel, nu, upper=None)


@dataclass(frozen=True)
class BernoulliTransform(Transform):
    kernel: Kernel
    kind: str = field(default="bernoulli", init=False, repr=False)

    def mean_of(self, p):
        return np.asarray(p, dtype=float)

    def sample_from(self, rng, p):
        p = np.asarray(p, dtype=float)
        return (rng.random(p.shape) < p).astype(float)

    def pgf_of(self, p, t):
        p = np.asarray(p)
        if np.ndim(t):
            p = p[..., None]
        return 1 - p + p * t

    def factorial_of(self, p):
        p = np.asarray(p, dtype=float)
        return p, np.zeros_like(p)

    def prob_zero(self, p):
        return 1 - np.asarray(p, dtype=float)

    def pmf_table(self, p):
        p = np.asarray(p, dtype=float)
        return np.broadcast_to([0.0, 1.0], p.shape + (2,)), np.stack([1 - p, p], axis=-1)

    def validate(self, nu=None):
        validate_range(self.kernel, nu)


@dataclass(frozen=True)
class BinomialTransform(Transform):
    n: int
    kernel: Kernel
    kind: str = field(default="binomial", init=False, repr=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValidationError(f"binomial transform needs integer n >= 1, got {self.n}")
        object.__setattr__(self, "n", int(self.n))

    def mean_of(self, p):
        return self.n * np.asarray(p, dtype=float)

    def sample_from(self, rng, p):
        return np.asarray(rng.binomial(self.n, np.asarray(p, dtype=float)), dtype=float)

    def pgf_of(self, p, t):
        p = np.asarray(p)
        if np.ndim(t):
            p = p[..., None]
        return (1 - p + p * t) ** self.n

    def factorial_of(self, p):
        p = np.asarray(p, dtype=float)
        return self.n * p, self.n * (self.n - 1) * p * p

    def prob_zero(self, p):
        return (1 - np.asarray(p, dtype=float)) ** self.n

    def pmf_table(self, p):
        p = np.asarray(p, dtype=float)
        ks = np.arange(self.n + 1, dtype=float)
        return np.broadcast_to(ks, p.shape + ks.shape), stats.binom.pmf(ks, self.n, p[..., None])

    def validate(self, nu=None):
        validate_range(self.kernel, nu)

    def to_dict(self):
        return {"kind": "binomial", "n": self.n, "kernel": self.kernel.to_dict()}


@dataclass(frozen=True)
class PoissonTransform(Transform):
    kernel: Kernel
    kind: str = field(default="poisson", init=False, repr=False)

    def mean_of(self, p):
        return np.asarray(p, dtype=float)

    def sample_from(self, rng, p):
        return np.asarray(rng.poisson(np.asarray(p, dtype=float)), dtype=float)

    def pgf_of(self, p, t):
        p = np.asarray(p)
        if np.ndim(t):
            p = p[..., None]
        return np.exp(-p * (1 - t))

    def factorial_of(self, p):
        p = np.asarray(p, dtype=float)
        return p, p * p

    def prob_zero(self, p):
        return np.exp(-np.asarray(p, dtype=float))

    def pmf_table(self, p):
        p = np.asarray(p, dtype=float)
        top = int(np.ceil(np.max(p, initial=0.0) + 12 * np.sqrt(np.max(p, initial=0.0)) + 30))
        ks = np.arange(top + 1, dtype=float)
        return np.broadcast_to(ks, p.shape + ks.shape), stats.poisson.pmf(ks, p[..., None])

    def validate(self, nu=None):
        validate_range(self.kernel, nu, upper=None)


STATES = ((0, 0), (0, 1), (1, 0), (1, 1))
ARC_OUT = frozenset({(1, 0), (1, 1)})
ANY_EDGE = frozenset({(0, 1), (1, 0), (1, 1)})


@dataclass(frozen=True)
class Digraphon(Transform):
    """Joint law of (phi(x, y), phi(y, x)) on {0,1}^2 plus a diagonal loop probability g.

    ``states`` is the target set A used when the transformation is read as
    an integer count (default: the arc x -> y exists).
    """

    f00: Kernel
    f01: Kernel
    f10: Kernel
    f11: Kernel
    g: Callable
    states: frozenset = ARC_OUT
    kind: str = field(default="digraphon", init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(tuple(s) for s in self.states))
        if not self.states <= set(STATES):
            raise ValidationError("digraphon target states must be pairs in {0,1}^2")

    @property
    def kernel(self):
        return self.f11

    @property
    def symmetric(self):
        return False

    @property
    def zero_diagonal(self):
        return False

    def components(self, x, y) -> np.ndarray:
        comps = np.stack([k(x, y) for k in (self.f00, self.f01, self.f10, self.f11)], axis=-1)
        return comps

    def loop_prob(self, x) -> np.ndarray:
        g = self.g
        return np.asarray(g(x) if callable(g) else np.full(np.shape(x), float(g)), dtype=float)

    def mass(self, x, y, states=None) -> np.ndarray:
        """P((x, y), A) with the diagonal R((x, x), .) = Bernoulli(g(x)) x I."""
        states = self.states if states is None else frozenset(tuple(s) for s in states)
        x = np.asarray(x)
        y = np.asarray(y)
        comps = self.components(x, y)
        off = sum(comps[..., i] for i, s in enumerate(STATES) if s in states)
        off = np.asarray(off, dtype=float) + np.zeros(comps.shape[:-1])
        g = self.loop_prob(x) + np.zeros(comps.shape[:-1])
        diag = g * ((1, 1) in states) + (1 - g) * ((0, 0) in states)
        return np.where(x == y, diag, off)

    def with_states(self, states) -> "Digraphon":
        return Digraphon(self.f00, self.f01, self.f10, self.f11, self.g, frozenset(states))

    def param(self, x, y):
        return self.mass(x, y)

    mean_of = BernoulliTransform.mean_of
    pgf_of = BernoulliTransform.pgf_of
    factorial_of = BernoulliTransform.factorial_of
    prob_zero = BernoulliTransform.prob_zero
    pmf_table = BernoulliTransform.pmf_table

    def sample_pairs(self, rng, x_i, x_j) -> tuple[np.ndarray, np.ndarray]:
        """Draw (phi(x_i, x_j), phi(x_j, x_i)) for off-diagonal pairs."""
        comps = self.components(x_i, x_j)
        cum = np.cumsum(comps, axis=-1)
        u = rng.random(comps.shape[:-1])
        state = np.minimum((u[..., None] >= cum).sum(axis=-1), 3)
        return (state >= 2).astype(float), (state % 2).astype(float)

    def validate(self, nu=None):
        pts = validation_points(nu)
        if pts.ndim > 1:
            return
        xs, ys = pts[:, None], pts[None, :]
        comps = self.components(xs, ys)
        if comps.min() < -1e-9:
            raise ValidationError("digraphon components must be nonnegative")
        if np.abs(comps.sum(axis=-1) - 1).max() > 1e-9:
            raise ValidationError("digraphon components must sum to 1 pointwise")
        for k in (self.f00, self.f11):
            if np.abs(k(xs, ys) - k(ys, xs)).max() > 1e-12:
                raise ValidationError("f00 and f11 must be symmetric")
        if np.abs(self.f01(xs, ys) - self.f10(ys, xs)).max() > 1e-12:
            raise ValidationError("f01(x, y) must equal f10(y, x)")
        g = self.loop_prob(pts)
        if g.min() < -1e-9 or g.max() > 1 + 1e-9:
            raise ValidationError("digraphon loop probability must lie in [0, 1]")

    def to_dict(self):
        if callable(self.g):
            raise ValidationError("digraphon with a callable loop probability cannot be serialized")
        return {
            "kind": "digraphon",
            "f00": self.f00.to_dict(),
            "f01": self.f01.to_dict(),
            "f10": self.f10.to_dict(),
            "f11": self.f11.to_dict(),
            "g": self.g,
            "states": sorted(list(s) for s in self.states),
        }


def digraphon_mass(t: Digraphon, x, y, states) -> float | np.ndarray:
    v = t.mass(x, y, states)
    return float(v) if np.ndim(v) == 0 else v


def constant_digraphon(q01: float, q11: float, g: float = 0.0) -> Digraphon:
    """Digraphon with constant components: one-way arcs with probability q01 each way, mutual arcs q11."""
    if q11 + 2 * q01 > 1 + 1e-12:
        raise ValidationError("constant digraphon needs q11 + 2 q01 <= 1")
    return Digraphon(
        Constant(1 - q11 - 2 * q01, zero_diagonal=False),
        Constant(q01, zero_diagonal=False),
        Constant(q01, zero_diagonal=False),
        Constant(q11, zero_diagonal=False),
        g,
    )


@dataclass(frozen=True)
class Multinomial:
    """phi_n ~ Multinomial(n, p) over the cells of a finite label square."""

    n: int
    probs: np.ndarray
    kind: str = field(default="multinomial", init=False, repr=False)

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise ValidationError("multinomial cell probabilities must be a square table")
        if p.min() < 0 or abs(p.sum() - 1) > 1e-9:
            raise ValidationError("multinomial cell probabilities must be nonnegative and sum to 1")
        if int(self.n) != self.n or self.n < 0:
            raise ValidationError(f"multinomial needs an integer count n >= 0, got {self.n}")
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "n", int(self.n))

    def mean(self, x, y):
        return self.n * self.probs[np.asarray(x), np.asarray(y)]


# ---------------------------------------------------------------------------
# keyed per-pair sampling
# ---------------------------------------------------------------------------


def _label_key(v) -> list[int]:
    arr = np.atleast_1d(np.asarray(v, dtype=float))
    digest = hashlib.blake2b(b"".join(struct.pack("<d", float(a)) for a in arr), digest_size=8).digest()
    return [int.from_bytes(digest[:4], "little"), int.from_bytes(digest[4:], "little")]


def pair_rng(seed: int, x, y, symmetric: bool) -> np.random.Generator:
    """Counter-based generator keyed by (seed, x, y); unordered key when symmetric."""
    kx, ky = _label_key(x), _label_key(y)
    if symmetric and ky < kx:
        kx, ky = ky, kx
    ss = np.random.SeedSequence([int(seed) & 0xFFFFFFFF, *kx, *ky])
    return np.random.Generator(np.random.Philox(ss))


def sample_edge(t: Transform, x, y, seed: int):
    """One draw from Q((x, y), .), reproducible from (seed, x, y)."""
    rng = pair_rng(seed, x, y, t.symmetric)
    if isinstance(t, Digraphon):
        if np.all(np.asarray(x) == np.asarray(y)):
            return float(rng.random() < t.loop_prob(x))
        fwd, _ = t.sample_pairs(rng, np.asarray(x), np.asarray(y))
        return float(fwd)
    return float(t.sample_from(rng, t.param(x, y)))


_TRANSFORM_KINDS = ("deterministic", "bernoulli", "binomial", "poisson", "digraphon")


def transform_from_dict(d: dict) -> Transform:
    kind = d.get("kind")
    try:
        if kind == "deterministic":
            return Deterministic(kernel_from_dict(d["kernel"]))
        if kind == "bernoulli":
            return BernoulliTransform(kernel_from_dict(d["kernel"]))
        if kind == "binomial":
            return BinomialTransform(d["n"], kernel_from_dict(d["kernel"]))
        if kind == "poisson":
            return PoissonTransform(kernel_from_dict(d["kernel"]))
        if kind == "digraphon":
            states = frozenset(tuple(s) for s in d.get("states", sorted(ARC_OUT)))
            return Digraphon(*(kernel_from_dict(d[k]) for k in ("f00", "f01", "f10", "f11")), d.get("g", 0.0), states)
    except KeyError as exc:
        raise ValidationError(f"{kind} transform needs field {exc.args[0]!r}") from None
    raise ValidationError(f"unknown transform {kind!r}")


_COMPACT_KERNELS = {"constant": ("p",), "powerlaw": ("b",), "exponential": ("b",), "dotproduct": ("a", "d")}


def parse_kernel(text: str, zero_diagonal: bool = True) -> Kernel:
    """Compact kernel form: ``constant:0.3``, ``powerlaw:1``, ``exponential:2``, ``dotproduct:1:2``."""
    from .distributions import _number

    kname, *args = text.split(":")
    if kname not in _COMPACT_KERNELS:
        raise ValidationError(f"kernel {kname!r} is not available in compact form; use a spec file")
    vals = [_number(a) for a in args]
    names = _COMPACT_KERNELS[kname]
    if len(vals) != len(names):
        raise ValidationError(f"kernel {kname} expects {len(names)} parameter(s)")
    return kernel_from_dict({"kind": kname, "zero_diagonal": zero_diagonal, **dict(zip(names, vals))})


def parse_transform(text: str, zero_diagonal: bool = True) -> Transform:
    """Compact CLI form ``<transform>[:n]:<kernel>:<params>``.

    Examples: ``bernoulli:constant:0.3``, ``poisson:powerlaw:1``,
    ``binomial:5:exponential:2``, ``bernoulli:dotproduct:1:2``,
    ``digraphon:0.1:0.2:0.5`` (q01, q11, loop probability).
    """
    from .distributions import _number

    kind, *rest = text.split(":")
    if kind == "digraphon":
        vals = [float(v) for v in rest]
        if len(vals) not in (2, 3):
            raise ValidationError("digraphon expects q01:q11[:g]")
        return constant_digraphon(*vals)
    n = None
    if kind == "binomial":
        if not rest:
            raise ValidationError("binomial transform expects binomial:n:<kernel>:...")
        n = _number(rest.pop(0))
    if not rest:
        raise ValidationError(f"transform {text!r} is missing a kernel")
    kernel = parse_kernel(":".join(rest), zero_diagonal)
    spec = {"kind": kind, "kernel": kernel.to_dict()}
    if n is not None:
        spec["n"] = n
    return transform_from_dict(spec)
