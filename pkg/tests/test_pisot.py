"""Exact arithmetic around Pisot bases: minimal polynomials, traces,
greedy expansions, beta-intervals, and the translation lattice."""

import math
from fractions import Fraction

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from betacocycle.errors import InadmissibleDigits, NotPisot, ReduciblePolynomial
from betacocycle.pisot import (
    FieldElement,
    admissible_strings,
    beta_expand,
    beta_interval,
    distance_to_integers,
    is_admissible,
    make_pisot,
    trace_power,
    translation_lattice,
)

GOLDEN = make_pisot([1, -1, -1])
BASE2 = make_pisot([1, -2])
TRIBONACCI = make_pisot([1, -1, -1, -1])


def test_golden_constants():
    assert GOLDEN.beta == pytest.approx((1 + math.sqrt(5)) / 2, abs=1e-14)
    assert GOLDEN.rho == pytest.approx((math.sqrt(5) - 1) / 2, abs=1e-14)
    assert GOLDEN.degree == 2
    assert GOLDEN.digit_max == 1


def test_integer_base():
    assert BASE2.beta == 2.0
    assert BASE2.rho == 0.0
    assert BASE2.degree == 1


def test_silver_mean_is_pisot():
    p = make_pisot([1, -2, -1])
    assert p.beta == pytest.approx(1 + math.sqrt(2), abs=1e-12)
    assert p.rho < 1


def test_plastic_number_is_pisot():
    p = make_pisot([1, 0, -1, -1])
    assert p.beta == pytest.approx(1.3247179572447460, abs=1e-12)
    assert p.rho < 1


def test_non_pisot_rejected():
    with pytest.raises(NotPisot):
        make_pisot([1, 0, -3])  # beta = sqrt(3), conjugate -sqrt(3)


def test_reducible_rejected():
    with pytest.raises(ReduciblePolynomial):
        make_pisot([1, -1, -2])  # (x-2)(x+1)


def test_string_roundtrip():
    s = GOLDEN.to_string()
    assert make_pisot([int(c) for c in s.split(",")]) == GOLDEN


def test_trace_power_golden_is_lucas():
    lucas = [2, 1]
    while len(lucas) <= 90:
        lucas.append(lucas[-1] + lucas[-2])
    for n in range(91):
        assert trace_power(GOLDEN, n) == lucas[n]


def test_trace_power_tribonacci_seeds():
    # p_1 = 1, p_2 = 3, p_3 = 7 from Newton's identities, then the recurrence
    assert [trace_power(TRIBONACCI, n) for n in range(1, 6)] == [1, 3, 7, 11, 21]


def test_trace_approximates_beta_power():
    with mp.workdps(80):
        beta = GOLDEN.beta_mp(80)
        for n in range(1, 61):
            err = abs(beta**n - trace_power(GOLDEN, n))
            assert err <= GOLDEN.rho**n * (GOLDEN.degree - 1) + 1e-60


def test_field_element_golden_identity():
    # (beta - 1) * beta = 1 since beta^2 = beta + 1
    beta = FieldElement(GOLDEN, (Fraction(0), Fraction(1)))
    one = FieldElement(GOLDEN, (Fraction(1), Fraction(0)))
    assert (beta - one) * beta == one


def test_beta_expand_reconstructs_value():
    for x in (Fraction(1, 2), Fraction(2, 7), Fraction(13, 17)):
        digits = beta_expand(GOLDEN, x, 40)
        value = digits.value()
        assert abs(value - float(x)) < GOLDEN.beta ** (-38)
        assert is_admissible(GOLDEN, digits.digits)


def test_admissible_strings_golden_are_fibonacci_counts():
    # no "11" factor: counts follow the Fibonacci recursion
    counts = [len(admissible_strings(GOLDEN, n)) for n in range(1, 8)]
    assert counts == [2, 3, 5, 8, 13, 21, 34]
    assert not is_admissible(GOLDEN, (1, 1))


def test_beta_interval_rejects_inadmissible():
    with pytest.raises(InadmissibleDigits):
        beta_interval(GOLDEN, (1, 1, 0))


def test_beta_intervals_partition_level5():
    strings = admissible_strings(GOLDEN, 5)
    intervals = [beta_interval(GOLDEN, s) for s in strings]
    assert intervals[0].left == 0.0
    assert intervals[-1].right == 1.0
    for prev, cur in zip(intervals, intervals[1:]):
        assert abs(prev.right - cur.left) <= 1e-14
    total = sum(iv.length for iv in intervals)
    assert total == pytest.approx(1.0, abs=1e-12)


def test_translation_lattice_is_relatively_dense():
    taus = translation_lattice(GOLDEN, 6)
    assert taus[0] == 0.0
    gaps = np.diff(taus)
    assert np.all(gaps > 0)
    assert np.max(gaps) <= GOLDEN.beta + 1e-9


def test_lattice_orbit_stays_near_integers():
    # dist(beta^k tau, Z) <= C' rho^k with C' = digit_max (r-1) / (1 - rho)
    c_prime = GOLDEN.digit_max * (GOLDEN.degree - 1) / (1 - GOLDEN.rho)
    taus = translation_lattice(GOLDEN, 5)
    with mp.workdps(60):
        beta = GOLDEN.beta_mp(60)
        for tau in taus[1:8]:
            t = mp.mpf(tau)
            for k in range(25):
                y = float(beta**k * mp.mpf(repr(tau)))
                assert distance_to_integers(y) <= c_prime * GOLDEN.rho**k + 1e-6


@given(st.fractions(min_value=0, max_value=1).filter(lambda q: q < 1))
@settings(max_examples=40, deadline=None)
def test_greedy_expansion_always_admissible(x):
    digits = beta_expand(GOLDEN, x, 12)
    assert is_admissible(GOLDEN, digits.digits)
    assert all(0 <= e <= GOLDEN.digit_max for e in digits.digits)


@given(st.integers(min_value=0, max_value=60))
@settings(max_examples=30, deadline=None)
def test_trace_recurrence_matches_float_power(n):
    # the integer trace tracks beta^n to within the conjugate tail
    approx = GOLDEN.beta**n
    assert abs(trace_power(GOLDEN, n) - approx) < 1.0 + approx * 1e-9
