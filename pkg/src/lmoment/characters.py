"""Dirichlet characters modulo q.

A character is stored as an exponent vector against fixed generators of the
cyclic components of ``(Z/qZ)^*``; its value at ``n`` is
``exp(2 pi i * sum_c e_c * dlog_c(n) / ord_c)``.  The phase is kept as an
exact integer over the lcm of the component orders until the final
conversion to complex.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .arith import Factorization, euler_phi, factorize

MAX_MODULUS = 10**6


@dataclass(frozen=True)
class Component:
    """One cyclic factor of the unit group, living modulo ``p**e``."""

    p: int
    e: int
    generator: int
    order: int
    dlog: np.ndarray = field(repr=False, compare=False)  # -1 off the units

    @property
    def modulus(self) -> int:
        return self.p**self.e


def _is_primitive_root(g: int, pe: int, order: int, order_primes) -> bool:
    if math.gcd(g, pe) != 1:
        return False
    return all(pow(g, order // ell, pe) != 1 for ell in order_primes)


def _cyclic_table(g: int, pe: int, order: int) -> np.ndarray:
    table = np.full(pe, -1, dtype=np.int64)
    x = 1
    for k in range(order):
        table[x] = k
        x = x * g % pe
    return table


def _prime_power_components(p: int, e: int) -> list[Component]:
    pe = p**e
    if p == 2:
        if e == 1:
            return [Component(2, 1, 1, 1, np.array([-1, 0]))]
        if e == 2:
            return [Component(2, 2, 3, 2, _cyclic_table(3, 4, 2))]
        # (Z/2^e)^* = <-1> x <5>
        half = 2 ** (e - 2)
        t_minus = np.full(pe, -1, dtype=np.int64)
        t_five = np.full(pe, -1, dtype=np.int64)
        x = 1
        for j in range(half):
            t_minus[x], t_five[x] = 0, j
            t_minus[pe - x], t_five[pe - x] = 1, j
            x = x * 5 % pe
        return [Component(2, e, pe - 1, 2, t_minus), Component(2, e, 5, half, t_five)]
    order = (p - 1) * p ** (e - 1)
    order_primes = factorize(order).primes
    g = 2
    while not _is_primitive_root(g, pe, order, order_primes):
        g += 1
    return [Component(p, e, g, order, _cyclic_table(g, pe, order))]


@dataclass(frozen=True, eq=False)
class CharGroup:
    q: int
    factorization: Factorization
    components: tuple[Component, ...]

    @property
    def order(self) -> int:
        return math.prod(c.order for c in self.components)

    @cached_property
    def phase_denominator(self) -> int:
        return math.lcm(*(c.order for c in self.components)) if self.components else 1

    def dlogs(self, n) -> np.ndarray:
        """Discrete logs of ``n`` (array-like) per component, shape ``(C, len(n))``.

        Entries are -1 where ``gcd(n, q) > 1``.
        """
        n = np.asarray(n, dtype=np.int64)
        if not self.components:
            return np.zeros((0,) + n.shape, dtype=np.int64)
        return np.stack([c.dlog[np.mod(n, c.modulus)] for c in self.components])

    def character(self, exponents) -> "DirichletCharacter":
        exps = tuple(int(k) % c.order for k, c in zip(exponents, self.components))
        if len(exps) != len(self.components):
            raise ValueError(
                f"expected {len(self.components)} exponents for q={self.q}, got {len(exponents)}"
            )
        return DirichletCharacter(self, exps)


@lru_cache(maxsize=256)
def build_group(q: int) -> CharGroup:
    if q < 1:
        raise ValueError(f"modulus must be positive, got {q}")
    if q > MAX_MODULUS:
        raise ValueError(f"modulus {q} exceeds the table limit {MAX_MODULUS}")
    fac = factorize(q)
    comps: list[Component] = []
    for p, e in fac.factors:
        comps.extend(_prime_power_components(p, e))
    group = CharGroup(q, fac, tuple(comps))
    assert group.order == euler_phi(fac)
    return group


def _local_conductor_exponent(comps: list[Component], exps: list[int]) -> int:
    p, e = comps[0].p, comps[0].e
    if p == 2:
        if e == 1:
            return 0
        if e == 2:
            return 2 if exps[0] else 0
        i, j = exps
        if j == 0:
            return 2 if i else 0
        v = (j & -j).bit_length() - 1
        return e - v
    (k,) = exps
    if k == 0:
        return 0
    # trivial on 1 + p^f Z  iff  p^(e-1) | k p^(f-1)
    v = 0
    while k % p == 0:
        k //= p
        v += 1
    return max(1, e - v)


@dataclass(frozen=True)
class DirichletCharacter:
    group: CharGroup = field(repr=False, compare=False)
    exponents: tuple[int, ...]

    @property
    def q(self) -> int:
        return self.group.q

    def __eq__(self, other):
        return (
            isinstance(other, DirichletCharacter)
            and self.q == other.q
            and self.exponents == other.exponents
        )

    def __hash__(self):
        return hash((self.q, self.exponents))

    @property
    def id(self) -> str:
        return f"{self.q}:" + ",".join(map(str, self.exponents))

    def __repr__(self) -> str:
        return f"DirichletCharacter({self.id!r})"

    @cached_property
    def conductor(self) -> int:
        f = 1
        by_prime: dict[int, tuple[list[Component], list[int]]] = {}
        for c, k in zip(self.group.components, self.exponents):
            by_prime.setdefault(c.p, ([], []))
            by_prime[c.p][0].append(c)
            by_prime[c.p][1].append(k)
        for p, (comps, exps) in by_prime.items():
            f *= p ** _local_conductor_exponent(comps, exps)
        return f

    @property
    def primitive(self) -> bool:
        return self.conductor == self.q

    @property
    def is_principal(self) -> bool:
        return not any(self.exponents)

    @cached_property
    def parity_a(self) -> int:
        if self.q <= 2:
            return 0
        return 0 if self.phases(self.q - 1)[()] == 0 else 1

    def conj(self) -> "DirichletCharacter":
        return self.group.character([-k for k in self.exponents])

    def phases(self, n) -> np.ndarray:
        """Integer phase numerators over ``group.phase_denominator``; -1 off the units."""
        g = self.group
        n = np.asarray(n, dtype=np.int64)
        if not g.components:
            return np.zeros(n.shape, dtype=np.int64)
        L = g.phase_denominator
        logs = g.dlogs(n)
        num = np.zeros(n.shape, dtype=np.int64)
        for c, k, lg in zip(g.components, self.exponents, logs):
            num = (num + (k * (L // c.order)) * lg) % L
        return np.where((logs < 0).any(axis=0), -1, num)

    def values(self, n) -> np.ndarray:
        """Vectorized ``chi(n)``."""
        ph = self.phases(n)
        L = self.group.phase_denominator
        roots = _roots_of_unity(L)
        return np.where(ph < 0, 0.0 + 0.0j, roots[np.maximum(ph, 0)])

    def __call__(self, n: int) -> complex:
        return complex(self.values(n)[()])


@lru_cache(maxsize=64)
def _roots_of_unity(L: int) -> np.ndarray:
    out = np.exp(2j * np.pi * np.arange(L) / L)
    # exact quarter points keep real characters exactly real
    out[0] = 1
    if L % 2 == 0:
        out[L // 2] = -1
    if L % 4 == 0:
        out[L // 4], out[3 * L // 4] = 1j, -1j
    return out


def enumerate_characters(group: CharGroup | int, primitive_only: bool = False) -> list[DirichletCharacter]:
    """All characters mod q in lexicographic exponent order."""
    if not isinstance(group, CharGroup):
        group = build_group(group)
    out = []
    for exps in itertools.product(*(range(c.order) for c in group.components)):
        chi = DirichletCharacter(group, tuple(exps))
        if not primitive_only or chi.primitive:
            out.append(chi)
    return out


def char_eval(chi: DirichletCharacter, n: int) -> complex:
    return chi(n)


def parity(chi: DirichletCharacter) -> int:
    return chi.parity_a


def conductor(chi: DirichletCharacter) -> int:
    return chi.conductor


def gauss_sum(chi: DirichletCharacter) -> complex:
    """``tau(chi) = sum_{a=1}^{q} chi(a) e(a/q)``, summed with ``math.fsum``."""
    q = chi.q
    a = np.arange(1, q + 1)
    terms = chi.values(a) * np.exp(2j * np.pi * a / q)
    return complex(math.fsum(terms.real), math.fsum(terms.imag))


def parse_character(ident: str) -> DirichletCharacter:
    """Inverse of :attr:`DirichletCharacter.id` (``"q:e1,e2,..."``)."""
    try:
        q_part, _, e_part = ident.partition(":")
        q = int(q_part)
        exps = [int(x) for x in e_part.split(",") if x.strip()]
    except ValueError as exc:
        raise ValueError(f"bad character id {ident!r}") from exc
    group = build_group(q)
    if len(exps) != len(group.components):
        raise ValueError(f"character id {ident!r} needs {len(group.components)} exponents")
    for k, c in zip(exps, group.components):
        if not 0 <= k < c.order:
            raise ValueError(f"exponent {k} out of range for component of order {c.order}")
    return group.character(exps)


def character_matrix(chars: list[DirichletCharacter], n) -> np.ndarray:
    """``M[i, j] = chars[i](n[j])``."""
    return np.stack([chi.values(n) for chi in chars]) if chars else np.zeros((0, len(n)), complex)
