"""Integer helpers: prime sieve, factorisation, valuations, big-int logs."""

from __future__ import annotations

import math
from functools import lru_cache

import gmpy2
import numpy as np
from sympy import factorint

SIEVE_LIMIT = 10**6
_LOG2 = math.log(2.0)


@lru_cache(maxsize=8)
def _sieve(limit: int) -> np.ndarray:
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_prime = np.ones(limit + 1, dtype=bool)
    is_prime[:2] = False
    for p in range(2, math.isqrt(limit) + 1):
        if is_prime[p]:
            is_prime[p * p :: p] = False
    return np.flatnonzero(is_prime).astype(np.int64)


def primes_upto(limit: int) -> np.ndarray:
    """All primes <= limit, by a deterministic Eratosthenes sieve."""
    limit = int(limit)
    if limit > SIEVE_LIMIT:
        raise ValueError(f"prime sieve limited to {SIEVE_LIMIT}")
    base = _sieve(SIEVE_LIMIT if limit > 10**4 else 10**4)
    return base[: np.searchsorted(base, limit, side="right")]


def primes_in(lo: float, hi: float) -> list[int]:
    """Primes p with lo < p <= hi."""
    ps = primes_upto(int(math.floor(hi)))
    return [int(p) for p in ps if p > lo]


def prime_count(x: float) -> int:
    """Exact pi(x) by counting sieve output."""
    return int(primes_upto(int(math.floor(x))).size)


def prime_factors(n: int) -> list[int]:
    """Sorted distinct prime divisors of |n| (empty for 0 and +-1)."""
    n = abs(int(n))
    if n <= 1:
        return []
    return sorted(factorint(n))


def valuation(n: int, p: int) -> int:
    """p-adic valuation of a nonzero integer."""
    if n == 0:
        raise ValueError("valuation of zero")
    return int(gmpy2.remove(gmpy2.mpz(n), p)[1])


def frac_valuation(num: int, den: int, p: int) -> int:
    return valuation(num, p) - valuation(den, p)


def log_abs(n) -> float:
    """log|n| for arbitrarily large integers (n != 0)."""
    n = abs(gmpy2.mpz(n))
    b = n.bit_length()
    if b < 1000:
        return math.log(int(n))
    s = b - 64
    return math.log(int(n >> s)) + s * _LOG2


def is_square(n: int) -> tuple[bool, int]:
    """Exact perfect-square test; returns (flag, isqrt)."""
    if n < 0:
        return False, 0
    r = math.isqrt(n)
    return r * r == n, r


def iroot_floor(n: int, d: int) -> int:
    """floor(n ** (1/d)) for n >= 0, exact."""
    return int(gmpy2.iroot(gmpy2.mpz(n), d)[0])
