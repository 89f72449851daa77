from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from legendrian_persistence.barcode import (EVENT_KINDS, Bar, Barcode, Death, ExitBelow,
                                            HandleSlide, apply_event, compute_barcode,
                                            rank_oracle_barcode)
from legendrian_persistence.complexes import FilteredComplex
from legendrian_persistence.errors import IllegalMoveError
from legendrian_persistence.linalg import inverse, matmul
from legendrian_persistence.randgen import (random_complex, random_event,
                                            random_filtered_basis_change, rng_from)
from legendrian_persistence.scalars import INF


def _bars(bc):
    return [(b.degree, b.start, b.end) for b in bc.bars]


def test_zero_differential_gives_infinite_bars():
    C = FilteredComplex([("a", 0, 1), ("b", 0, 2)], None)
    assert _bars(compute_barcode(C)) == [(0, 1, INF), (0, 2, INF)]


def test_acyclic_pair_gives_one_bar():
    C = FilteredComplex([("x", 1, 3), ("y", 0, 1)], [[0, 0], [1, 0]])
    assert _bars(compute_barcode(C)) == [(0, 1, 3)]


def test_empty_bars_rejected():
    with pytest.raises(Exception):
        Bar(0, 2, 2)


@given(st.integers(0, 100_000), st.sampled_from([2, 3]), st.booleans())
def test_reduction_matches_rank_oracle(seed, p, ties):
    C = random_complex(seed, p=p, ties=ties)
    assert compute_barcode(C).bars == rank_oracle_barcode(C).bars


@given(st.integers(0, 100_000), st.sampled_from([2, 3]))
def test_infinite_bars_count_homology(seed, p):
    C = random_complex(seed, p=p)
    bc = compute_barcode(C)
    for k, dim in C.homology_dims().items():
        assert len(bc.infinite(k)) == dim
    assert len(bc.infinite()) == C.total_homology()


@given(st.integers(0, 100_000), st.sampled_from([2, 3]))
def test_barcode_invariant_under_filtered_automorphisms(seed, p):
    rng = rng_from(seed)
    C = random_complex(rng, p=p, ties=True)
    P = random_filtered_basis_change(rng, C)
    D = C.replace(d=matmul(matmul(P, C.d, p), inverse(P, p), p))
    assert compute_barcode(C).bars == compute_barcode(D).bars


@given(st.integers(0, 100_000), st.integers(0, 1))
def test_endpoint_continuity(seed, eta_num):
    rng = rng_from(seed)
    C = random_complex(rng, p=2)
    eta = Fraction(eta_num, 8)
    moved = C.with_actions({b.name: b.action + eta * int(rng.integers(-1, 2)) for b in C.basis})
    before, after = compute_barcode(C), compute_barcode(moved)
    assert len(before) == len(after)
    # original endpoints lie on the half-integer grid; rounding recovers the matching
    snap = lambda v: v if v == INF else Fraction(round(v * 2), 2)
    matched = sorted((b.degree, snap(b.start), snap(b.end)) for b in after.bars)
    assert matched == _bars(before)
    for b in after.bars:
        assert abs(b.start - snap(b.start)) <= eta
        assert b.end == INF or abs(b.end - snap(b.end)) <= eta


def test_handle_slide_leaves_barcode():
    C = FilteredComplex([("x", 1, 3), ("w", 1, 4), ("y", 0, 1)], [[0, 0, 0], [0, 0, 0], [1, 0, 0]])
    bc = compute_barcode(C)
    out, D = apply_event(bc, C, HandleSlide("w", "x", 1))
    assert out.bars == bc.bars
    assert D.boundary("w") == {"y": 1}


def test_death_removes_bar():
    C = FilteredComplex([("x", 1, 3), ("y", 0, 1), ("z", 0, 5)], [[0, 0, 0], [1, 0, 0], [0, 0, 0]])
    out, D = apply_event(compute_barcode(C), C, Death("x", "y"))
    assert _bars(out) == [(0, 5, INF)]
    assert D.names == ["z"]


def test_exit_below_makes_bar_infinite():
    C = FilteredComplex([("x", 1, 3), ("y", 0, 1)], [[0, 0], [1, 0]])
    out, D = apply_event(compute_barcode(C), C, ExitBelow("y"))
    assert _bars(out) == [(1, 3, INF)]


def test_illegal_slide_rejected():
    C = FilteredComplex([("x", 1, 3), ("w", 1, 4), ("y", 0, 1)], [[0, 0, 0], [0, 0, 0], [1, 0, 0]])
    with pytest.raises(IllegalMoveError):
        apply_event(compute_barcode(C), C, HandleSlide("x", "w", 1))


@pytest.mark.parametrize("kind", sorted(EVENT_KINDS))
def test_every_event_kind_matches_recomputation(kind):
    applied = 0
    for seed in range(150):
        C = random_complex([seed, 7], n_max=10, p=(2, 3)[seed % 2])
        ev = random_event([seed, 8], C, kind)
        if ev is None:
            continue
        try:
            out, D = apply_event(compute_barcode(C), C, ev, verify=False)
        except IllegalMoveError:
            continue
        assert out.bars == compute_barcode(D).bars
        applied += 1
    assert applied >= 20
