from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from legendrian_persistence.linalg import inverse, nullspace, rank, solve
from legendrian_persistence.scalars import INF, PiLinear, format_scalar, pi_linear, pi_sign

rationals = st.fractions(min_value=-50, max_value=50, max_denominator=30)


def test_pi_linear_collapses_to_fraction():
    assert pi_linear(0, Fraction(1, 3)) == Fraction(1, 3)
    assert isinstance(pi_linear(0, 2), Fraction)
    assert isinstance(pi_linear(1, 0), PiLinear)


def test_pi_comparisons_are_exact():
    assert PiLinear(1) > Fraction(314159, 100000)
    assert PiLinear(1) < Fraction(314160, 100000)
    assert PiLinear(1, -3) > 0
    assert PiLinear(Fraction(1, 2)) < 2
    assert PiLinear(1) < INF


@given(rationals, rationals)
def test_pi_sign_matches_float_away_from_zero(q, r):
    v = float(q) * 3.141592653589793 + float(r)
    if abs(v) > 1e-9:
        assert pi_sign(q, r) == (1 if v > 0 else -1)


@given(rationals, rationals, rationals, rationals)
def test_pi_linear_arithmetic(q1, r1, q2, r2):
    a, b = pi_linear(q1, r1), pi_linear(q2, r2)
    assert (a + b) - b == a
    assert (a < b) == (float(a) < float(b)) or abs(float(a) - float(b)) < 1e-9


def test_format_scalar():
    assert format_scalar(Fraction(3, 2)) == "3/2"
    assert format_scalar(INF) == "inf"
    assert format_scalar(PiLinear(Fraction(1, 4), Fraction(-1, 200))) == "1/4*pi - 1/200"


def _random_matrix(seed, p, n, m):
    rng = np.random.default_rng(seed)
    return rng.integers(0, p, size=(n, m))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_rank_nullity(p):
    for seed in range(30):
        a = _random_matrix(seed, p, 5, 7)
        ker = nullspace(a, p)
        assert ker.shape[1] == 7 - rank(a, p)
        assert not np.any((a @ ker) % p)


@pytest.mark.parametrize("p", [2, 3, 7])
def test_inverse_and_solve(p):
    rng = np.random.default_rng(p)
    found = 0
    for _ in range(40):
        a = rng.integers(0, p, size=(4, 4))
        if rank(a, p) < 4:
            with pytest.raises(ValueError):
                inverse(a, p)
            continue
        found += 1
        inv = inverse(a, p)
        assert np.array_equal((a @ inv) % p, np.eye(4, dtype=np.int64))
        b = rng.integers(0, p, size=4)
        x = solve(a, b, p)
        assert np.array_equal((a @ x) % p, b % p)
    assert found


def test_solve_inconsistent():
    a = np.array([[1, 0], [1, 0]])
    assert solve(a, np.array([0, 1]), 2) is None
