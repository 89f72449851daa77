from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from legendrian_persistence.barcode import compute_barcode
from legendrian_persistence.errors import DomainError
from legendrian_persistence.grading import (ChordIndexInput, OrbitIndexInput, RPnChordLabel,
                                            default_epsilon, halfplane_index,
                                            min_perturbed_chord_degree, min_perturbed_orbit_degree,
                                            next_label, plane_index, rpn_action_shift_script,
                                            rpn_generate_rfc, rpn_mixed_chord, rpn_orbit_degree,
                                            rpn_pure_chord_degree, rpn_shift)
from legendrian_persistence.pwc import evolve
from legendrian_persistence.scalars import PiLinear

RANGE = range(1, 7)


def test_plane_index_examples():
    assert plane_index(OrbitIndexInput(1, 1, 2)) == 4
    for n in RANGE:
        assert plane_index(OrbitIndexInput(n, 3 - (n + 1), 0)) == 0
    assert rpn_orbit_degree(2, 1, morse_index=0) == 4


def test_halfplane_index_examples():
    assert halfplane_index(ChordIndexInput(1, 2)) == 2
    assert halfplane_index(ChordIndexInput(1, 0)) == 0
    for n in RANGE:
        assert rpn_pure_chord_degree(n, 1, morse_index=0) == n


def test_morse_index_range_enforced():
    with pytest.raises(DomainError):
        OrbitIndexInput(1, 0, 0, bott_dim=2, morse_index=3)
    with pytest.raises(DomainError):
        ChordIndexInput(1, 0, bott_dim=1, morse_index=-1)
    with pytest.raises(DomainError):
        OrbitIndexInput(0, 0, 0)


@pytest.mark.parametrize("n", RANGE)
def test_index_tables(n):
    for m in RANGE:
        assert plane_index(OrbitIndexInput(n, n, m * (n + 1))) == (2 * m + 2) * (n + 1) - 4
    for k in RANGE:
        assert halfplane_index(ChordIndexInput(n, k * (n + 1))) == (1 + k) * (n + 1) - 2


@pytest.mark.parametrize("n", RANGE)
def test_minimal_perturbed_degrees(n):
    assert min_perturbed_orbit_degree(n) == 2 * n
    assert min_perturbed_chord_degree(n) == n


def test_mixed_chord_examples():
    assert rpn_mixed_chord(RPnChordLabel(1, 1, 0)).degree == 0
    ch = rpn_mixed_chord(RPnChordLabel(2, 3, -1))
    assert ch.degree == -1 and ch.direction == "1->0" and ch.action < 0
    eps = default_epsilon(1)
    assert rpn_mixed_chord(RPnChordLabel(1, 2, 0)).action == (PiLinear(1) - eps) / 2


def test_label_checks():
    with pytest.raises(DomainError):
        RPnChordLabel(1, 3, 0)
    with pytest.raises(DomainError):
        RPnChordLabel(1, 1, 0, PiLinear(Fraction(1, 2)))


@given(st.integers(1, 6), st.integers(-6, 6), st.integers(-6, 6))
def test_degrees_biject_onto_integers(n, k_lo, span):
    k_hi = k_lo + abs(span)
    degs = sorted(rpn_mixed_chord(RPnChordLabel(n, j, k)).degree
                  for k in range(k_lo, k_hi + 1) for j in range(1, n + 2))
    assert degs == list(range(degs[0], degs[0] + len(degs)))


@given(st.integers(1, 5), st.integers(-4, 4), st.integers(1, 6), st.integers(-4, 4), st.integers(1, 6))
def test_actions_ordered_lexicographically(n, k1, j1, k2, j2):
    j1, j2 = min(j1, n + 1), min(j2, n + 1)
    a1 = rpn_mixed_chord(RPnChordLabel(n, j1, k1)).action
    a2 = rpn_mixed_chord(RPnChordLabel(n, j2, k2)).action
    assert (a1 < a2) == ((k1, j1) < (k2, j2))


def test_rpn_rfc_small_window():
    rfc = rpn_generate_rfc(1, (0, PiLinear(Fraction(4, 5))))
    assert sorted(b.degree for b in rfc.basis) == [0, 1, 2]
    assert not rfc.complex.d.any()
    assert all(b.infinite for b in compute_barcode(rfc.complex).bars)


def test_rpn_rfc_empty_window():
    assert len(rpn_generate_rfc(2, (PiLinear(Fraction(1, 100)), PiLinear(Fraction(1, 50))))
               .complex) == 0
    assert len(rpn_generate_rfc(2, (1, 1)).complex) == 0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_rpn_rfc_degrees_follow_actions(n):
    C = rpn_generate_rfc(n, (-8, 8)).complex
    order = sorted(C.basis, key=lambda b: b.action)
    degs = [b.degree for b in order]
    assert degs == list(range(degs[0], degs[0] + len(degs)))
    bars = compute_barcode(C).bars
    assert len(bars) == len(C) and all(b.infinite for b in bars)


def test_next_label_wraps():
    assert next_label(RPnChordLabel(1, 1, 0)) == RPnChordLabel(1, 2, 0)
    assert next_label(RPnChordLabel(2, 3, 4)) == RPnChordLabel(2, 1, 5)
    for n in (1, 2, 3):
        for k in (-2, 0, 3):
            for j in range(1, n + 2):
                lab = RPnChordLabel(n, j, k)
                gap = rpn_mixed_chord(next_label(lab)).action - rpn_mixed_chord(lab).action
                assert gap == rpn_shift(n)


@pytest.mark.parametrize("n", [1, 2])
def test_shift_script_keeps_barcode_up_to_translation(n):
    script = rpn_action_shift_script(n, (-5, 5))
    assert script.events == ()
    frames = evolve(script, samples=[Fraction(1, 2)])
    first, last = frames[0], frames[-1]
    step = rpn_shift(n)
    assert [(b.degree, b.start + step) for b in first.barcode.bars] == \
           [(b.degree, b.start) for b in last.barcode.bars]
    assert all(b.infinite for f in frames for b in f.barcode.bars)
    c01 = rpn_mixed_chord(RPnChordLabel(1, 1, 0)).action
    if n == 1:
        traj = script.trajectories["c1_k0"]
        assert traj(0) == c01 and traj(1) == rpn_mixed_chord(RPnChordLabel(1, 2, 0)).action
