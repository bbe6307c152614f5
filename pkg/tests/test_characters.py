import cmath
import math
from math import gcd

import numpy as np
import pytest

from lmoment.arith import euler_phi, phi_star
from lmoment.characters import (
    build_group,
    char_eval,
    character_matrix,
    conductor,
    enumerate_characters,
    gauss_sum,
    parity,
    parse_character,
)


def test_group_structure():
    assert build_group(1).order == 1
    g5 = build_group(5)
    assert [c.order for c in g5.components] == [4]
    assert g5.components[0].generator == 2
    assert sorted(c.order for c in build_group(8).components) == [2, 2]
    with pytest.raises(ValueError):
        build_group(10**6 + 1)


def test_enumeration_counts():
    assert len(enumerate_characters(5, primitive_only=True)) == 3
    assert enumerate_characters(2, primitive_only=True) == []
    assert len(enumerate_characters(4)) == 2
    for q in range(1, 120):
        assert len(enumerate_characters(q)) == euler_phi(q)
        assert len(enumerate_characters(q, primitive_only=True)) == phi_star(q)


def test_values_examples():
    chi4 = enumerate_characters(4, primitive_only=True)[0]
    assert char_eval(chi4, 3) == -1
    assert parity(chi4) == 1
    assert char_eval(enumerate_characters(1)[0], 5) == 1
    for chi in enumerate_characters(12):
        assert chi(6) == 0 and chi(9) == 0


def test_parity_examples():
    principal = enumerate_characters(7)[0]
    assert principal.is_principal and parity(principal) == 0
    quad5 = [c for c in enumerate_characters(5) if c.exponents == (2,)][0]
    assert parity(quad5) == 0


def test_conductor_examples():
    assert conductor(enumerate_characters(9)[0]) == 1
    lifted = [c for c in enumerate_characters(8) if c(3) == -1 and c(5) == 1 and c(7) == -1]
    assert len(lifted) == 1 and conductor(lifted[0]) == 4
    for chi in enumerate_characters(13)[1:]:
        assert conductor(chi) == 13


def brute_conductor(chi):
    q = chi.q
    for f in range(1, q + 1):
        if q % f:
            continue
        # induced from modulus f iff chi(n) = 1 whenever n = 1 mod f and gcd(n, q) = 1
        if all(abs(chi(n) - 1) < 1e-12 for n in range(1, q + 1) if n % f == 1 % f and gcd(n, q) == 1):
            return f
    return q


def test_conductor_brute_force():
    for q in list(range(2, 50)) + [64, 72, 100]:
        for chi in enumerate_characters(q):
            assert conductor(chi) == brute_conductor(chi), chi.id


def test_group_axioms():
    for q in (7, 8, 15, 16, 45):
        chars = enumerate_characters(q)
        units = [n for n in range(1, q) if gcd(n, q) == 1]
        for chi in chars:
            for m in units:
                for n in units[:6]:
                    assert abs(chi(m * n) - chi(m) * chi(n)) < 1e-12
            assert abs(chi(q + 3) - chi(3)) < 1e-15
            assert chi.conj() in chars
        # column orthogonality over the full group
        M = character_matrix(chars, np.array(units))
        G = M.conj().T @ M
        assert np.allclose(G, len(chars) * np.eye(len(units)), atol=1e-9)


def test_gauss_sums():
    assert gauss_sum(enumerate_characters(1)[0]) == pytest.approx(1)
    chi4 = enumerate_characters(4, primitive_only=True)[0]
    assert gauss_sum(chi4) == pytest.approx(2j, abs=1e-14)
    for q in (5, 7, 8, 9, 12, 25, 33):
        for chi in enumerate_characters(q, primitive_only=True):
            assert abs(abs(gauss_sum(chi)) - math.sqrt(q)) < 1e-12
            direct = sum(chi(a) * cmath.exp(2j * math.pi * a / q) for a in range(q))
            assert abs(gauss_sum(chi) - direct) < 1e-11


def test_parse_roundtrip():
    for chi in enumerate_characters(24):
        assert parse_character(chi.id) == chi
    for bad in ("5", "5:9", "x:1", "5:1,2"):
        with pytest.raises(ValueError):
            parse_character(bad)
