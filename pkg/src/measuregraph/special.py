"""Special functions: Riemann and prime zeta, prime counting, erf and Ei."""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy import special as sc

from .errors import DomainError

_SIEVE_LIMIT = 10**7


def zeta(s: float) -> float:
    """Riemann zeta function for real s > 1."""
    s = float(s)
    if not s > 1.0:
        raise DomainError(f"zeta requires s > 1, got {s}")
    return float(sc.zeta(s))


def zeta_tail(s: float, n: int) -> float:
    """Sum of k**-s over k > n (Hurwitz zeta at n + 1)."""
    if not s > 1.0:
        raise DomainError(f"zeta requires s > 1, got {s}")
    return float(sc.zeta(s, n + 1))


@lru_cache(maxsize=1)
def _mobius_table(n: int = 512) -> np.ndarray:
    mu = np.ones(n + 1, dtype=np.int64)
    mu[0] = 0
    is_prime = np.ones(n + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, n + 1):
        if not is_prime[p]:
            continue
        is_prime[2 * p :: p] = False
        mu[p::p] *= -1
        mu[p * p :: p * p] = 0
    return mu


def mobius(n: int) -> int:
    table = _mobius_table()
    if n < len(table):
        return int(table[n])
    import sympy

    return int(sympy.mobius(n))


def prime_zeta(s: float) -> float:
    """Prime zeta function P(s) = sum over primes p of p**-s, for s > 1.

    Uses the Moebius-weighted series sum_n mu(n)/n * log zeta(ns), with
    log zeta evaluated as log1p(zetac) so late terms keep full precision.
    """
    s = float(s)
    if not s > 1.0:
        raise DomainError(f"prime_zeta requires s > 1, got {s}")
    total = 0.0
    n = 1
    while True:
        log_z = float(np.log1p(sc.zetac(n * s)))
        mu = mobius(n)
        if mu:
            total += mu * log_z / n
        # log zeta(ns) ~ 2**-ns bounds every later term
        if n > 1 and log_z / n < 1e-17:
            break
        n += 1
    return total


@lru_cache(maxsize=4)
def _sieve(limit: int) -> np.ndarray:
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, int(limit**0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return flags


def _sieve_size(n: int) -> int:
    size = 1024
    while size < n:
        size *= 2
    return size


def primes_up_to(n: int) -> np.ndarray:
    """All primes <= n as an int64 array."""
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    flags = _sieve(_sieve_size(n))
    return np.flatnonzero(flags[: n + 1]).astype(np.int64)


def prime_count(n: int) -> int:
    """Exact prime counting function pi(n)."""
    if int(n) != n or n < 0:
        raise DomainError(f"prime_count requires an integer >= 0, got {n}")
    n = int(n)
    if n <= _SIEVE_LIMIT:
        return int(primes_up_to(n).size)
    import sympy

    return int(sympy.primepi(n))


def is_prime(values) -> np.ndarray:
    """Vectorized primality test for nonnegative integers."""
    arr = np.asarray(values)
    flat = arr.ravel()
    out = np.zeros(flat.shape, dtype=bool)
    if flat.size == 0:
        return out.reshape(arr.shape)
    ints = flat.astype(np.int64)
    small = (ints >= 0) & (ints <= _SIEVE_LIMIT)
    if small.any():
        top = int(ints[small].max())
        flags = _sieve(_sieve_size(max(top, 2)))
        out[small] = flags[ints[small]]
    if (~small).any():
        import sympy

        out[~small] = [bool(v > 1 and sympy.isprime(int(v))) for v in ints[~small]]
    return out.reshape(arr.shape)


def erf(x):
    return sc.erf(x)


def expint_ei(x):
    """Exponential integral Ei(x)."""
    return sc.expi(x)


def special(name: str, arg):
    """Dispatch by name, mirroring the CLI and config vocabulary."""
    table = {
        "zeta": zeta,
        "prime_zeta": prime_zeta,
        "prime_count": prime_count,
        "erf": erf,
        "expint_Ei": expint_ei,
    }
    if name not in table:
        raise DomainError(f"unknown special function {name!r}")
    return table[name](arg)
