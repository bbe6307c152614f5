import math

import mpmath
import numpy as np
import pytest

from lmoment.analytic import (
    abs_L_sq_smoothed,
    completed_lambda,
    digamma,
    functional_equation_residual,
    hurwitz_depth,
    hurwitz_zeta,
    l_oracle,
    log_gamma,
    root_number,
    series_cutoff,
    smoothed_series,
    weight_dt,
    weight_W,
    weight_W_shifted,
)
from lmoment.characters import enumerate_characters, parse_character
from lmoment.verify import make_rng

mpmath.mp.dps = 30


def mp_weight(x, t, a):
    """W_a(x; t) by mpmath quadrature on Re z = 1."""
    u = mpmath.mpf(0.25) + a / 2 + 0.5j * mpmath.mpf(t)
    norm = mpmath.loggamma(u) + mpmath.loggamma(mpmath.conj(u))

    def f(y):
        z = 1 + 1j * y
        lg = mpmath.loggamma(u + z / 2) + mpmath.loggamma(mpmath.conj(u) + z / 2) - norm
        return mpmath.re(mpmath.exp(lg + z * z - z * mpmath.log(x)) / z)

    return float(mpmath.quad(f, [-12, -4, 0, 4, 12]) / (2 * mpmath.pi))


def test_log_gamma_special_values():
    assert abs(log_gamma(1.0)) < 1e-15
    assert abs(log_gamma(0.5) - math.log(math.sqrt(math.pi))) < 1e-13 * math.log(math.sqrt(math.pi))
    with pytest.raises(ValueError):
        log_gamma(-2.0)


def test_log_gamma_against_mpmath():
    rng = make_rng(1)
    pts = [0.25 + 5j, 3 + 700j, 1e-3 + 0.1j, 0.75 - 400j]
    pts += list(rng.uniform(0.01, 20, 30) + 1j * rng.uniform(-1000, 1000, 30))
    for w in pts:
        ref = complex(mpmath.loggamma(w))
        assert abs(log_gamma(w) - ref) <= 1e-13 * max(1.0, abs(ref)), w


def test_log_gamma_recursion_path_agrees():
    # Stirling directly at w + 20 versus recursion from w
    w = 0.25 + 5j
    shifted = log_gamma(w + 20)
    via = log_gamma(w) + sum(np.log(w + k) for k in range(20))
    assert abs(shifted - via) < 1e-12


def test_digamma_against_mpmath():
    for w in (0.3 + 2j, 5 - 40j, 0.75 + 500j):
        assert abs(digamma(w) - complex(mpmath.digamma(w))) < 1e-12


@pytest.mark.parametrize("x,t,a", [(1.0, 10.0, 0), (0.3, 0.0, 1), (25.0, 3.5, 0), (0.02, 40.0, 1)])
def test_weight_against_mpmath(x, t, a):
    w = weight_W(x, t, a)
    assert abs(w.value - mp_weight(x, t, a)) < 1e-10
    assert w.quad_error <= 1e-10
    assert w.tau == abs(t) + 2


def test_weight_examples():
    assert abs(weight_W(1e-8, 100.0, 0).value - 1) < 0.02
    for t in (0.0, 5.0, 50.0):
        tau = t + 2
        w = weight_W(100 * tau, t, 0).value
        assert abs(w) <= 10 * (1 / 100) ** 2
    with pytest.raises(ValueError):
        weight_W(0.0, 1.0, 0)
    with pytest.raises(ValueError):
        weight_W(1.0, 1.0, 2)


def test_weight_error_contract():
    rng = make_rng(2)
    for _ in range(40):
        x = 10 ** rng.uniform(-8, 8)
        t = rng.uniform(-1000, 1000)
        a = int(rng.integers(2))
        w = weight_W(x, t, a)
        assert w.quad_error <= 1e-10
        assert w.imag_residual <= w.quad_error
        # any other line right of zero gives the same integral
        alt = weight_W(x, t, a, line=2.0) if x > 1e-3 else weight_W(x, t, a, line=0.3)
        assert abs(alt.value - w.value) <= w.quad_error + alt.quad_error + 1e-14


def test_shifted_weight():
    for x in (1e-3, 0.5, 7.0, 300.0):
        for t in (0.0, 10.0):
            for a in (0, 1):
                assert abs(weight_W(x, t, a).value - 1 - weight_W_shifted(x, t, a)) < 1e-9
    assert weight_W_shifted(2.0, 7.0, 1) == pytest.approx(weight_W_shifted(2.0, -7.0, 1), abs=1e-12)
    assert abs(weight_W_shifted(1e-12, 3.0, 0)) < 1e-2


def test_weight_dt():
    assert weight_dt(0.7, 0.0, 0) == 0.0
    h = 1e-4
    fd = (weight_W(0.5, 5 + h, 1).value - weight_W(0.5, 5 - h, 1).value) / (2 * h)
    assert abs(weight_dt(0.5, 5.0, 1) - fd) < 1e-6


def test_hurwitz_special_values():
    assert hurwitz_zeta(2, 1.0) == pytest.approx(math.pi**2 / 6, abs=1e-14)
    assert hurwitz_zeta(2, 0.5) == pytest.approx(math.pi**2 / 2, abs=1e-13)
    s = 0.5 + 1j
    a = hurwitz_zeta(s, 1 / 3, depth=40)
    b = hurwitz_zeta(s, 1 / 3, depth=80)
    assert abs(a - b) < 1e-12
    with pytest.raises(ValueError):
        hurwitz_zeta(1, 0.5)


def rounding_allowance(s, alpha, depth):
    # each term n^{-s} carries a phase error of about ulp * |s| * |log n|
    n = np.arange(depth) + alpha
    mag = n ** (-s.real) * (1 + abs(s) * np.abs(np.log(n)))
    return 8 * np.finfo(float).eps * math.sqrt(float(np.sum(mag**2)))


def test_hurwitz_against_mpmath():
    rng = make_rng(3)
    for _ in range(40):
        s = complex(rng.uniform(-0.9, 3), rng.uniform(-1000, 1000))
        alpha = float(rng.uniform(0.01, 1))
        val, err = hurwitz_zeta(s, alpha, return_error=True)
        ref = complex(mpmath.zeta(s, alpha))
        assert err < 1e-12
        assert abs(val - ref) < err + rounding_allowance(s, alpha, hurwitz_depth(s))
        if s.real >= 0 and alpha > 0.1:
            assert abs(val - ref) < 1e-11 * max(1.0, abs(ref))


def test_l_oracle_examples():
    trivial = enumerate_characters(1)[0]
    assert l_oracle(2, trivial).value == pytest.approx(math.pi**2 / 6, abs=1e-13)
    chi4 = enumerate_characters(4, primitive_only=True)[0]
    assert abs(l_oracle(0.5, chi4).value - 0.667691457189609) < 1e-12
    for chi in enumerate_characters(5)[1:]:
        direct = sum(chi(n) / n**3 for n in range(1, 20001))
        assert abs(l_oracle(3, chi).value - direct) < 1e-10
    with pytest.raises(ValueError):
        l_oracle(1, enumerate_characters(7)[0])


def test_l_oracle_at_one():
    # L(1, chi_4) = pi / 4
    chi4 = enumerate_characters(4, primitive_only=True)[0]
    assert l_oracle(1, chi4).value == pytest.approx(math.pi / 4, abs=1e-13)


def test_l_oracle_against_mpmath():
    chi = parse_character("7:1")
    chi_vals = [complex(chi(a)) for a in range(1, 8)]
    for t in (0.0, 14.0, 300.0):
        s = 0.5 + 1j * t
        ref = complex(mpmath.dirichlet(s, [0] + chi_vals[:6]))
        assert abs(l_oracle(s, chi).value - ref) < 1e-11


def test_functional_equation():
    quad5 = parse_character("5:2")
    assert functional_equation_residual(0, quad5) < 1e-13
    assert root_number(quad5) == pytest.approx(1)
    chi = parse_character("5:1")
    assert functional_equation_residual(0.3 + 2j, chi) < 1e-8
    r1 = functional_equation_residual(0.3 + 2j, chi)
    r2 = functional_equation_residual(0.3 - 2j, chi.conj())
    assert abs(r1 - r2) < 1e-13
    with pytest.raises(ValueError):
        completed_lambda(0.1, enumerate_characters(8)[0])


def test_smoothed_examples():
    chi = parse_character("5:1")
    o = abs(l_oracle(0.5 + 1j, chi).value) ** 2
    assert abs(abs_L_sq_smoothed(1.0, chi, 1e-6) - o) < 1e-5
    with pytest.raises(ValueError):
        abs_L_sq_smoothed(1.0, enumerate_characters(9)[0], 1e-6)
    with pytest.raises(ValueError):
        abs_L_sq_smoothed(1.0, chi, 1e-12)


def test_smoothed_symmetry_and_sign():
    eps = 1e-6
    for ident, t in (("7:1", 3.0), ("8:1,1", 6.2), ("13:4", 9.5)):
        chi = parse_character(ident)
        v = abs_L_sq_smoothed(t, chi, eps)
        assert v > -eps
        assert abs(v - abs_L_sq_smoothed(-t, chi.conj(), eps)) < 2 * eps


def test_series_cutoff_grows():
    assert series_cutoff(5, 1.0, 1e-6) < series_cutoff(5, 1.0, 1e-8)
    s = smoothed_series(2.0, parse_character("5:1"), 1e-6)
    assert s.N >= series_cutoff(5, 2.0, 1e-6)
    assert 2 * s.block_swing() < 1e-6 / 4
