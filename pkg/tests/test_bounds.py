import math
import time
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from legendrian_persistence.bounds import (ChordSpectrum, ConformalProfile, ExpScaled,
                                           action_growth_check, adversarial_min_survivors,
                                           certify_exp_bound, exp_enclosure, main_theorem_bound,
                                           oscillation_variants, scf_energy_constant,
                                           trace_lengths)
from legendrian_persistence.errors import DomainError
from legendrian_persistence.pwc import PLFunction

F = Fraction


def test_main_theorem_examples():
    chords = ChordSpectrum((F(1, 2), 1, 2))
    assert main_theorem_bound((1, 1), 1, F(1, 4), chords).value == 2
    for n in range(1, 6):
        assert main_theorem_bound((1,) * (n + 1), 1, F(1, 4), chords).value == n + 1
    res = main_theorem_bound((1, 1), 1, F(1, 2), chords)
    assert not res.admissible and "not below l(c_k) = 1/2" in res.reason


def test_main_theorem_level_gate():
    chords = ChordSpectrum((1, 2), hbar=F(1, 3))
    res = main_theorem_bound((1, 1), 1, F(1, 2), chords)
    assert not res.admissible and "action level" in res.reason
    with pytest.raises(DomainError):
        ChordSpectrum((1, 2), hbar=1, l=2)
    with pytest.raises(DomainError):
        ChordSpectrum((2, 1))
    with pytest.raises(DomainError):
        main_theorem_bound((1,), 3, 0, ChordSpectrum((1, 2)))


@given(st.lists(st.integers(0, 5), min_size=1, max_size=5), st.integers(1, 5), st.integers(0, 20))
def test_bound_nonincreasing_in_k_and_spectrum_free(betti, k, o):
    lengths = tuple(F(i + 1) for i in range(6))
    osc = F(o, 4)
    a = main_theorem_bound(betti, k, osc, ChordSpectrum(lengths))
    b = main_theorem_bound(betti, k + 1, osc, ChordSpectrum(lengths))
    if a.admissible and b.admissible:
        assert b.value <= a.value
    other = ChordSpectrum(tuple(x + F(1, 7) for x in lengths))
    c = main_theorem_bound(betti, k, osc, other)
    if a.admissible and c.admissible:
        assert a.value == c.value


def test_scf_examples():
    assert scf_energy_constant([F(6, 10), F(8, 10), 1], F(1, 10)) == F(1, 500)
    with pytest.raises(DomainError, match="normalization"):
        scf_energy_constant([F(1, 2), 1], F(1, 10))
    with pytest.raises(DomainError, match="distinct"):
        scf_energy_constant([F(6, 10), F(6, 10), F(8, 10)], F(1, 10))


def test_exp_enclosure_brackets():
    for x in (F(0), F(1, 3), F(-2), F(101, 100)):
        lo, hi = exp_enclosure(x, 80)
        assert lo <= hi and float(lo) <= math.exp(x) <= float(hi)
        assert hi - lo < F(1, 10 ** 15)
    assert certify_exp_bound(3, 1, upper=True)
    assert certify_exp_bound(F(27, 10), 1, upper=False)
    assert not certify_exp_bound(F(27, 10), 1, upper=True)


def test_action_growth_examples():
    assert action_growth_check([(2, 1)], 0).ok
    assert not action_growth_check([(1, 1)], 0).ok
    # e^(2 delta) <= 3/2 when delta = 1/5
    v = action_growth_check([(1, 2)], F(1, 5), exp_upper=F(3, 2))
    assert v.status == "fail" and "pair 0" in v.messages[0]
    # e^(2 delta) >= 4/3 when delta = 3/20
    assert action_growth_check([(1, F(5, 4))], F(3, 20), exp_lower=F(4, 3)).ok
    with pytest.raises(DomainError, match="not certified"):
        action_growth_check([(1, 1)], F(1, 5), exp_lower=F(3, 2))


@given(st.integers(1, 50), st.integers(1, 50), st.integers(0, 20))
def test_action_growth_matches_float_away_from_ties(lin, lout, d):
    delta = F(d, 20)
    ratio = F(lout, lin)
    edge = math.exp(2 * delta)
    if abs(float(ratio) - edge) < 1e-9:
        return
    assert action_growth_check([(lin, lout)], delta).ok == (float(ratio) < edge)


def test_trace_length_examples():
    zero = trace_lengths(ConformalProfile(0, 0, F(1, 100)))
    assert zero.len01.coef == zero.len10.coef == zero.c0.coef == 0
    tl = trace_lengths(ConformalProfile(F(-1, 10), F(1, 5), F(1, 100)))
    assert tl.len01 == ExpScaled(F(1, 10), F(101, 100))
    assert tl.c0 == ExpScaled(F(3, 10), F(101, 100))
    assert tl.c0.decimal().startswith("0.8236803045")
    assert trace_lengths(ConformalProfile(0, F(1, 2), 1)).len01.coef == 0


@given(st.integers(-20, 20), st.integers(-20, 20), st.integers(1, 20))
def test_trace_additivity(a, b, e):
    f_min, f_max = sorted((F(a, 10), F(b, 10)))
    tl = trace_lengths(ConformalProfile(f_min, f_max, F(e, 100)))
    if f_min <= 0 <= f_max:
        assert tl.len01 + tl.len10 == tl.c0
    lo, hi = tl.c0.enclosure()
    assert lo <= hi


@given(st.integers(0, 8), st.integers(0, 8), st.integers(-8, 0), st.integers(-8, 0),
       st.integers(0, 4))
def test_alternate_norms_dominate(m0, m1, n0, n1, g):
    h_max = PLFunction(((0, F(m0, 4)), (1, F(m1, 4))))
    h_min = PLFunction(((0, F(n0, 4)), (1, F(n1, 4))))
    v = oscillation_variants(h_max, h_min, F(g, 4))
    assert v.l == (F(m0 - n0, 4) + F(m1 - n1, 4)) / 2
    assert v.l2 >= v.l and v.l2_dominates
    assert v.l1 <= v.l and v.l1 == (F(m0, 4) + F(m1, 4)) / 2


def test_integral_of_max_dominates_when_min_nonnegative():
    v = oscillation_variants(PLFunction(((0, 1), (1, 2))), PLFunction.constant(F(1, 2)), 0)
    assert v.l == 1 and v.l1 == F(3, 2) and v.l1_dominates


def test_adversarial_small_instances():
    res = adversarial_min_survivors((1, 1), (F(3, 4), 1), F(1, 2), steps=4, k=1)
    assert res.bound.value == 2 and res.min_survivors == 2 and res.holds and res.speed_law_ok
    res = adversarial_min_survivors((1, 1, 1), (F(3, 4), 1), F(1, 2), steps=8, k=2)
    assert res.bound.value == 1 and res.holds and res.speed_law_ok


def test_adversarial_gate_violation_can_break_bound():
    # with the oscillation at the first chord length every Morse bar can be cancelled
    res = adversarial_min_survivors((1, 1), (F(1, 2), 1), 1, steps=4, k=1)
    assert not res.bound.admissible and res.holds
    assert res.min_survivors < 2


def test_adversarial_runtime_on_four_chords():
    start = time.perf_counter()
    res = adversarial_min_survivors((1, 1, 1, 1), (F(1, 4), F(1, 2), F(3, 4), 1), F(7, 10),
                                    steps=8, k=3)
    assert time.perf_counter() - start < 60
    assert res.holds and res.speed_law_ok


def test_enclosure_width_follows_precision():
    for prec in (64, 128, 256):
        lo, hi = exp_enclosure(F(101, 100), prec)
        assert 0 <= hi - lo < F(8, 2 ** (prec - 4))


def test_near_tie_growth_is_decided_by_refinement():
    # e^(2/5) = 1.49182469764127031782...
    assert action_growth_check([(10 ** 20, 149182469764127031781)], F(1, 5)).ok
    assert not action_growth_check([(10 ** 20, 149182469764127031783)], F(1, 5)).ok


@given(st.integers(-300, 300), st.integers(1, 50), st.sampled_from([53, 64, 128, 256]))
def test_enclosure_contains_high_precision_value(num, den, prec):
    import mpmath
    lo, hi = exp_enclosure(F(num, den), prec)
    with mpmath.workdps(300):
        value = mpmath.exp(mpmath.mpf(num) / den)
        assert mpmath.mpf(lo.numerator) / lo.denominator <= value
        assert value <= mpmath.mpf(hi.numerator) / hi.denominator
