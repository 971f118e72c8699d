import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from greedylab import InvalidInput
from greedylab.recursion import alpha_sweep, check_power_bound, extremal_sequence, sweep_to_csv


def exact_sequence(A, m_max):
    # alpha = 1 in rationals
    a = [Fraction(A)]
    for m in range(2, m_max + 1):
        a.append(max(Fraction(0), (1 - Fraction(2, m)) * a[-1] + Fraction(A, m * m)))
    return a


def test_first_terms():
    seq = extremal_sequence(4, 1.0, 3)
    assert seq[0] == 4 and seq[1] == 1
    assert seq[2] == pytest.approx(7 / 9, abs=1e-15)


def test_matches_rationals():
    seq = extremal_sequence(4, 1.0, 300)
    ex = exact_sequence(4, 300)
    assert np.allclose(seq, [float(v) for v in ex], rtol=1e-13, atol=0)


def test_alpha_zero_clamps():
    seq = extremal_sequence(1.0, 0.0, 20)
    # factor is -1: a_2 = max(0, -1 + 1) = 0, then a_3 = 1, a_4 = 0, ...
    assert seq.tolist()[:4] == [1.0, 0.0, 1.0, 0.0]
    assert np.all(seq >= 0)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 100), st.floats(0, 3), st.integers(1, 500))
def test_nonnegative(A, alpha, m):
    assert np.all(extremal_sequence(A, alpha, m) >= 0)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 10), st.floats(0.1, 2.5), st.floats(0.01, 50))
def test_homogeneity(A, alpha, c):
    a = extremal_sequence(A, alpha, 400)
    b = extremal_sequence(c * A, alpha, 400)
    assert np.allclose(b, c * a, rtol=1e-10, atol=1e-300)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.3, 2.0), st.integers(0, 2 ** 31))
def test_domination(alpha, seed):
    A, m_max = 4.0, 400
    a = extremal_sequence(A, alpha, m_max)
    m0 = math.ceil(2 ** (1 / alpha))
    while 2 / m0 ** alpha > 1:
        m0 += 1
    rng = np.random.default_rng(seed)
    b = a[m0 - 1]
    for m in range(m0 + 1, m_max + 1):
        b = rng.uniform() * ((1 - 2 / m ** alpha) * b + A / m ** (2 * alpha))
        assert b <= a[m - 1] * (1 + 1e-12)


def test_power_bound_examples():
    pb = check_power_bound(extremal_sequence(4, 1.0, 10 ** 6), 4, 1.0)
    assert pb.holds and pb.max_ratio <= 1 + 1e-12
    holds, first, _ = check_power_bound(extremal_sequence(4, 1.5, 10 ** 4), 4, 1.5)
    assert not holds and first >= 2
    assert check_power_bound(extremal_sequence(4, 0.5, 10 ** 5), 4, 0.5).holds


def test_power_bound_on_user_sequence():
    pb = check_power_bound([1.0, 0.5, 0.4], 1.0, 1.0)
    assert not pb.holds and pb.first_violation == 3
    assert pb.max_ratio == pytest.approx(1.2)
    with pytest.raises(InvalidInput):
        check_power_bound([1.0, -0.1], 1.0, 1.0)


def test_power_bound_slack():
    # an excess at the 1e-15 level is rounding, not a violation
    assert check_power_bound([1.0 * (1 + 1e-15)], 1.0, 1.0).holds
    assert not check_power_bound([1.0 * (1 + 1e-9)], 1.0, 1.0).holds


@pytest.mark.parametrize("A", [0.5, 4.0, 123.0])
def test_alpha_one_independent_of_A(A):
    (row,) = alpha_sweep(A, [1.0], 10 ** 4)
    assert row.holds and row.max_ratio <= 1 + 1e-12


def test_sweep_and_csv():
    rows = alpha_sweep(4.0, [0.5, 1.1], 10 ** 5)
    assert rows[0].holds and not rows[1].holds and rows[1].first_violation
    lines = sweep_to_csv(rows).splitlines()
    assert lines[0] == "alpha,holds,first_violation,max_ratio,m_max"
    assert lines[1].startswith("0.5,true,,")
    short = alpha_sweep(4.0, [1.1], 5)
    assert short[0].insufficient
    with pytest.raises(InvalidInput):
        alpha_sweep(4.0, [])
