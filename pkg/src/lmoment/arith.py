"""Exact integer arithmetic and multiplicative functions.

Everything here works on a :class:`Factorization`, so a modulus is factored
once and every derived quantity (phi, mu, omega, the primitive-character
count, Euler products) reads off the prime-power list.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

MAX_N = 2**63 - 1

# Deterministic for n < 3.3e24.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin for 64-bit integers."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class Factorization:
    """A positive integer together with its prime-power decomposition.

    ``factors`` is a tuple of ``(prime, exponent)`` with strictly increasing
    primes; it is empty exactly when ``n == 1``.
    """

    n: int
    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prod = 1
        last = 1
        for p, e in self.factors:
            if p <= last or e < 1:
                raise ValueError(f"malformed factorization of {self.n}: {self.factors}")
            last = p
            prod *= p**e
        if prod != self.n:
            raise ValueError(f"factors {self.factors} do not multiply to {self.n}")

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def divisors(self) -> list[int]:
        divs = [1]
        for p, e in self.factors:
            divs = [d * p**k for d in divs for k in range(e + 1)]
        return sorted(divs)


def _trial_limit(n: int) -> int:
    # Trial division up to 10^6 covers every modulus this package handles;
    # larger cofactors fall through to Pollard rho.
    return min(math.isqrt(n), 10**6)


def _pollard_rho(n: int) -> int:
    if n % 2 == 0:
        return 2
    c = 1
    while True:
        x = y = 2
        d = 1
        while d == 1:
            x = (x * x + c) % n
            y = (y * y + c) % n
            y = (y * y + c) % n
            d = math.gcd(abs(x - y), n)
        if d != n:
            return d
        c += 1


def _split(n: int, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    d = _pollard_rho(n)
    _split(d, out)
    _split(n // d, out)


@lru_cache(maxsize=4096)
def factorize(n: int) -> Factorization:
    """Factor ``1 <= n <= 2**63 - 1``.

    >>> factorize(12).factors
    ((2, 2), (3, 1))
    """
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        raise TypeError(f"expected an integer, got {n!r}")
    n = int(n)
    if n < 1 or n > MAX_N:
        raise ValueError(f"factorize requires 1 <= n <= 2**63-1, got {n}")
    found: dict[int, int] = {}
    m = n
    p = 2
    limit = _trial_limit(m)
    while p <= limit and p * p <= m:
        if m % p == 0:
            e = 0
            while m % p == 0:
                m //= p
                e += 1
            found[p] = e
        p += 1 if p == 2 else 2
    if m > 1:
        _split(m, found)
    return Factorization(n, tuple(sorted(found.items())))


def _as_fac(f: Factorization | int) -> Factorization:
    return f if isinstance(f, Factorization) else factorize(f)


def euler_phi(f: Factorization | int) -> int:
    f = _as_fac(f)
    out = 1
    for p, e in f.factors:
        out *= (p - 1) * p ** (e - 1)
    return out


def moebius(f: Factorization | int) -> int:
    f = _as_fac(f)
    if any(e > 1 for _, e in f.factors):
        return 0
    return -1 if len(f.factors) % 2 else 1


def omega(f: Factorization | int) -> int:
    return len(_as_fac(f).factors)


def divisor_count(f: Factorization | int) -> int:
    out = 1
    for _, e in _as_fac(f).factors:
        out *= e + 1
    return out


def phi_star(f: Factorization | int) -> int:
    """Number of primitive characters modulo ``n``.

    Evaluated as the Dirichlet convolution ``sum_{d | n} mu(d) phi(n/d)``.
    """
    f = _as_fac(f)
    return sum(moebius(d) * euler_phi(f.n // d) for d in f.divisors())


def orth_divisor_sum(q: Factorization | int, r: int) -> int:
    """``sum_{k | gcd(q, r)} phi(k) mu(q/k)`` with ``gcd(q, 0) = q``."""
    q = _as_fac(q)
    g = math.gcd(q.n, int(r)) if r != 0 else q.n
    return sum(euler_phi(k) * moebius(q.n // k) for k in factorize(g).divisors())


def euler_product_fraction(q: Factorization | int) -> Fraction:
    out = Fraction(1)
    for p, _ in _as_fac(q).factors:
        inv = Fraction(1, p)
        out *= (1 - inv) ** 3 / (1 + inv)
    return out


def euler_product_theorem1(q: Factorization | int) -> float:
    """``prod_{p | q} (1 - 1/p)^3 / (1 + 1/p)``, exact until the final cast."""
    return float(euler_product_fraction(q))


def omega_sieve(nmax: int) -> np.ndarray:
    """Array ``w`` of length ``nmax + 1`` with ``w[n] = omega(n)`` (``w[0] = 0``)."""
    w = np.zeros(nmax + 1, dtype=np.int8)
    is_comp = np.zeros(nmax + 1, dtype=bool)
    for p in range(2, nmax + 1):
        if not is_comp[p]:
            w[p::p] += 1
            is_comp[p * p :: p] = True
    return w


def coprime_mask(nmax: int, q: Factorization | int) -> np.ndarray:
    """Boolean array over ``0..nmax`` marking ``gcd(n, q) == 1``."""
    mask = np.ones(nmax + 1, dtype=bool)
    mask[0] = False
    for p in _as_fac(q).primes:
        mask[::p] = False
    return mask
