import math

import numpy as np
import pytest

from lmoment.analytic import l_oracle
from lmoment.characters import enumerate_characters, parse_character
from lmoment.moments import (
    MomentSpec,
    SplitSpec,
    ab_split,
    char_count_consistent,
    integrate_power,
    integrate_power_detailed,
    moment,
)

# frozen from the first run that matched the Hurwitz oracle and the step-halving check
GOLDEN_Q5_T10_ORDER4 = 361.47416971856217
GOLDEN_Q5_T10_ORDER2 = 69.3397314202892


def test_spec_validation():
    for kwargs in ({"order": 3}, {"panel_width": 0}, {"points_per_panel": 2}, {"parity_filter": 2}):
        with pytest.raises(ValueError):
            MomentSpec(5, 10, **kwargs)
    with pytest.raises(ValueError):
        MomentSpec(0, 10)


def test_split_levels():
    s = SplitSpec.for_modulus(5, 10)
    assert s.Z == 25 and s.Z0 == pytest.approx(25 / 9)
    s = SplitSpec.for_modulus(6, 10)
    assert s.Z == 15 and s.Z0 == pytest.approx(15 / 81)


def test_integrate_examples():
    chi = parse_character("5:2")
    assert integrate_power(chi, 0.0, 4) == 0
    with pytest.raises(ValueError):
        integrate_power(enumerate_characters(8)[0], 1.0, 2)


def test_additivity():
    chi = parse_character("7:1")
    spec = MomentSpec(7, 6.0, 2)
    a, ea = integrate_power_detailed(chi, 2.5, 2, spec)
    b, eb = integrate_power_detailed(chi, 6.0, 2, spec, start=2.5)
    c, ec = integrate_power_detailed(chi, 6.0, 2, spec)
    assert abs(a + b - c) <= 2 * (ea + eb + ec) + 1e-12


def test_step_halving():
    chi = parse_character("5:2")
    coarse = integrate_power(chi, 5.0, 2, MomentSpec(5, 5.0, 2, panel_width=0.5))
    fine = integrate_power(chi, 5.0, 2, MomentSpec(5, 5.0, 2, panel_width=0.25))
    assert abs(coarse - fine) <= 1e-6 * abs(fine)


def test_against_simple_quadrature():
    # independent check: composite Simpson on |L|^2 from the Hurwitz oracle
    chi = parse_character("5:1")
    t = np.linspace(0, 3, 1201)
    f = np.array([abs(l_oracle(0.5 + 1j * x, chi).value) ** 2 for x in t])
    h = t[1] - t[0]
    simpson = h / 3 * (f[0] + f[-1] + 4 * f[1:-1:2].sum() + 2 * f[2:-1:2].sum())
    assert integrate_power(chi, 3.0, 2) == pytest.approx(simpson, rel=1e-9)


def test_moment_examples():
    r = moment(2, 10.0, 4)
    assert r.empirical == 0 and r.char_count == 0 and r.predicted == 0 and math.isnan(r.ratio)
    assert moment(5, 0.0).empirical == 0


def test_golden():
    r4 = moment(5, 10.0, 4)
    assert r4.empirical == pytest.approx(GOLDEN_Q5_T10_ORDER4, rel=1e-12)
    assert r4.quadrature_error < 1e-9
    assert r4.char_count == 3 and char_count_consistent(r4)
    r2 = moment(5, 10.0, 2)
    assert r2.empirical == pytest.approx(GOLDEN_Q5_T10_ORDER2, rel=1e-12)


def test_conjugate_reflection():
    # |L(1/2 + it, conj chi)| = |L(1/2 - it, chi)|: conj chi on [0, T] matches chi on [-T, 0]
    T = 8.0
    r = moment(7, T, 4)
    spec = MomentSpec(7, T, 4)
    mirrored = {}
    for chi in enumerate_characters(7, primitive_only=True):
        val, err = integrate_power_detailed(chi, 0.0, 4, spec, start=-T)
        mirrored[chi.id] = val
        assert abs(r.per_character[chi.conj().id] - val) <= 2 * err + 1e-9 * val
    # hence the family total is the same on both half-lines
    assert math.fsum(mirrored.values()) == pytest.approx(r.empirical, rel=1e-9)


def test_conjugates_differ_on_half_line():
    r = moment(7, 8.0, 4)
    chi = parse_character("7:1")
    assert abs(r.per_character[chi.id] - r.per_character[chi.conj().id]) > 1.0


def test_parity_filter():
    full = moment(8, 6.0, 2)
    even = moment(8, 6.0, 2, MomentSpec(8, 6.0, 2, parity_filter=0))
    odd = moment(8, 6.0, 2, MomentSpec(8, 6.0, 2, parity_filter=1))
    assert even.char_count + odd.char_count == full.char_count
    assert even.empirical + odd.empirical == pytest.approx(full.empirical, rel=1e-13)
    assert even.predicted == full.predicted


def test_worker_independence():
    a = moment(7, 10.0, 4, workers=1)
    b = moment(7, 10.0, 4, workers=3)
    assert a.empirical == b.empirical
    assert a.quadrature_error == b.quadrature_error


def test_ab_split():
    chi = parse_character("5:1")
    A, B = ab_split(3.0, chi, 0.5)
    assert A == 0
    assert 2 * B.real == pytest.approx(abs(l_oracle(0.5 + 3j, chi).value) ** 2, abs=1e-5)
    Z = SplitSpec.for_modulus(5, 10).Z
    A, B = ab_split(3.0, chi, Z)
    assert 2 * (A + B).real == pytest.approx(abs(l_oracle(0.5 + 3j, chi).value) ** 2, abs=1e-6)
    A, B = ab_split(3.0, chi, 1e9)
    assert abs(B) < 1e-6
