import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from greedylab import CapacityError, InvalidInput, c0, dsum, eval_norm, kt, lp, project
from greedylab.tga import (SubsetTable, best_projection_error, chebyshev_rows, chebyshev_sum,
                           greedy_ordering, greedy_sets, greedy_sum, is_greedy_set,
                           oversampled_greedy_error, oversampled_size, sigma_m_oracle)

from conftest import ALL_SPACES
from oracles import grid_chebyshev, lp_tail

vectors = arrays(np.float64, st.integers(1, 9),
                 elements=st.sampled_from([0.0, 1.0, -1.0, 0.5, -2.0, 3.0, 0.25]) | st.floats(-5, 5))


def test_ordering_examples():
    assert greedy_ordering([1, -3, 2]).pi == (1, 2, 0)
    o = greedy_ordering([2, -2, 1])
    assert o.pi == (0, 1, 2) and o.tie_events == ((0, 1),)
    assert greedy_ordering([3, 1, 2]).tie_events == ()
    # zero entries are not ties
    assert greedy_ordering([1, 0, 0]).tie_events == ()


@settings(max_examples=100, deadline=None)
@given(vectors)
def test_ordering_invariants(x):
    o = greedy_ordering(x)
    a = np.abs(x)[list(o.pi)]
    assert sorted(o.pi) == list(range(len(x)))
    assert np.all(np.diff(a) <= 0)
    for j in range(len(x) - 1):
        if a[j] == a[j + 1]:
            assert o.pi[j] < o.pi[j + 1]
    nz = np.abs(x[x != 0])
    assert (len(o.tie_events) == 0) == (len(np.unique(nz)) == len(nz))


@settings(max_examples=100, deadline=None)
@given(vectors, st.integers(0, 9))
def test_greedy_sum_threshold(x, m):
    m = min(m, len(x))
    G, A = greedy_sum(x, m)
    assert np.array_equal(G, project(x, A))
    assert len(A) == m and is_greedy_set(x, A)
    sets = list(greedy_sets(x, m))
    assert A in sets
    assert all(is_greedy_set(x, B) and len(B) == m for B in sets)


def test_greedy_sum_example():
    G, A = greedy_sum([1, -3, 2], 1)
    assert G.tolist() == [0, -3, 0] and A == (1,)
    with pytest.raises(InvalidInput):
        greedy_sum([1, 2], 3)


def test_greedy_sets_ties():
    assert list(greedy_sets([1, 1, 1, 2], 2)) == [(0, 3), (1, 3), (2, 3)]
    # ties at zero collapse to the canonical set
    assert list(greedy_sets([3, 0, 0], 2)) == [(0, 1)]
    assert len(list(greedy_sets(np.ones(20), 10, cap=7))) == 7


def test_discontinuity():
    m = 5
    one_A = np.r_[np.ones(m), np.zeros(m)]
    one_B = np.r_[np.zeros(m), np.ones(m)]
    for n in range(1, 30):
        t = (n * n + 1) / (n * n)
        G, _ = greedy_sum(t * one_A + one_B, m)
        assert np.array_equal(G, t * one_A)
        G, _ = greedy_sum(one_A + t * one_B, m)
        assert np.array_equal(G, t * one_B)


def test_nonadditivity():
    k, n = 5, 20
    j = np.arange(1, n + 1, dtype=float)
    tail = np.where(j > k, j ** -3.0, 0.0)
    head = (j <= k).astype(float)
    f, g = head + tail, -head + tail
    Gf, _ = greedy_sum(f, k)
    Gg, _ = greedy_sum(g, k)
    Gfg, _ = greedy_sum(f + g, k)
    assert not np.any(Gf + Gg)
    assert np.array_equal(Gfg, np.where((j > k) & (j <= 2 * k), 2 * j ** -3.0, 0.0))


def test_chebyshev_lp_half():
    r = chebyshev_sum(lp(0.5), [5, 1, 1], [0])
    assert r.coefficients.tolist() == [5.0]
    assert r.residual == pytest.approx(4.0, abs=1e-12)
    with pytest.raises(InvalidInput):
        chebyshev_sum(lp(2), [1, 2], [0], tol=0)


@pytest.mark.parametrize("name", list(ALL_SPACES))
def test_chebyshev_full_support(name, rng):
    sp = ALL_SPACES[name]
    x = rng.standard_normal(6)
    if name == "lp0.5":
        sp = lp(0.5)
    assert chebyshev_sum(sp, x, range(6)).residual == 0.0


@pytest.mark.parametrize("sp", [lp(1), lp(3), c0(), dsum(lp(2), c0())])
def test_chebyshev_lattice_exact(sp, rng):
    x = rng.standard_normal(7)
    A = [1, 4, 5]
    r = chebyshev_sum(sp, x, A)
    assert np.array_equal(r.coefficients, x[A])
    assert r.residual == eval_norm(sp, x - project(x, A))


def test_chebyshev_capacity():
    with pytest.raises(CapacityError):
        chebyshev_sum(dsum(kt(), lp(0.5)), np.ones(4), [0])


def test_chebyshev_kt_grid(rng):
    for _ in range(25):
        x = rng.uniform(-1, 1, 3)
        A = [int(rng.integers(3))]
        ref, _ = grid_chebyshev(kt(), x, A)
        r = chebyshev_sum(kt(), x, A)
        assert abs(r.residual - ref) <= 1e-4
        assert r.residual <= eval_norm(kt(), x - project(x, A)) + 1e-9


def test_chebyshev_kt_grid_improving_cases():
    # positive entries make the partial sums dominate, so the optimum moves
    # away from the projection start
    rng = np.random.default_rng(5)
    improved = 0
    for _ in range(30):
        x = rng.uniform(0.2, 1, 4)
        A = [int(rng.integers(4))]
        r = chebyshev_sum(kt(), x, A).residual
        improved += r < eval_norm(kt(), x - project(x, A)) - 1e-6
        assert abs(r - grid_chebyshev(kt(), x, A)[0]) <= 1e-6
    assert improved >= 10


def test_chebyshev_kt_grid_two_coordinates(rng):
    for _ in range(4):
        x = rng.uniform(-1, 1, 4)
        ref, _ = grid_chebyshev(kt(), x, [0, 2], levels=25, points=9)
        assert abs(chebyshev_sum(kt(), x, [0, 2]).residual - ref) <= 1e-4


def test_chebyshev_dsum_blocks(rng):
    x = rng.uniform(-1, 1, 6)
    r = chebyshev_sum(dsum(kt(), c0()), x, [0, 1])
    left = chebyshev_sum(kt(), x[0::2], [0]).residual
    right = np.abs(x[1::2][1:]).max()
    assert r.residual == pytest.approx(max(left, right), abs=1e-9)


def test_chebyshev_rows_clip(rng):
    x = rng.uniform(-1, 1, 5)
    vals, proj, _, _ = chebyshev_rows(kt(), x, [(), (0,), (1, 3)])
    assert np.all(vals <= proj)
    assert vals[0] == proj[0] == eval_norm(kt(), x)


def test_sigma_examples():
    o = sigma_m_oracle(lp(2), [3, 2, 1], 1)
    assert o.value == pytest.approx(math.sqrt(5), abs=1e-12) and o.witness_set == (0,)
    assert sigma_m_oracle(lp(2), [3, 0, 1], 2).value == 0.0
    assert sigma_m_oracle(kt(), [3, -2, 1], 0).value == eval_norm(kt(), [3, -2, 1])
    d = o.to_dict()
    assert set(d) >= {"m", "value", "witness_set", "solver_iters"}
    with pytest.raises(CapacityError, match="best_projection_error"):
        sigma_m_oracle(lp(2), np.ones(17), 1)
    with pytest.raises(CapacityError):
        sigma_m_oracle(lp(2), np.ones(8), 6)


def test_sigma_lp_tail(rng):
    for p in (0.5, 1.0, 2.0):
        for _ in range(10):
            x = rng.standard_normal(8)
            for m in range(4):
                assert sigma_m_oracle(lp(p), x, m).value == pytest.approx(lp_tail(x, m, p),
                                                                         rel=1e-12)


def test_off_support_coefficient_can_win():
    # x = (0, 1, ..., 1): a coefficient at the empty first coordinate shifts every
    # partial sum at a smaller l2 cost than any coordinate of the support
    n = 40
    x = np.r_[0.0, np.ones(n - 1)]
    off = chebyshev_sum(kt(), x, [0]).residual
    on = min(chebyshev_sum(kt(), x, [i]).residual for i in range(1, n))
    assert off < on - 1e-3


def test_best_projection_examples():
    for p in (0.5, 1.0, 2.0):
        v, B = best_projection_error(lp(p), [3, 2, 1], 1)
        assert B == (0,) and v == pytest.approx((2 ** p + 1) ** (1 / p))
    assert best_projection_error(kt(), [3, 2, 1], 0) == (eval_norm(kt(), [3, 2, 1]), ())
    assert best_projection_error(kt(), np.zeros(4), 2) == (0.0, ())
    with pytest.raises(CapacityError):
        best_projection_error(lp(2), np.ones(21), 1)


@pytest.mark.parametrize("name", ["lp2", "kt", "dsum_kt", "c0"])
def test_oracle_order(name, rng):
    sp = ALL_SPACES[name]
    for _ in range(5):
        x = rng.uniform(-1, 1, 7)
        prev_s = prev_b = math.inf
        for m in range(4):
            s = sigma_m_oracle(sp, x, m).value
            b = best_projection_error(sp, x, m)[0]
            assert s <= b <= eval_norm(sp, x)
            assert s <= prev_s and b <= prev_b
            prev_s, prev_b = s, b


def test_oversampling():
    assert oversampled_size(10, 1.1) == 11 and oversampled_size(2, 1.5) == 3
    rng = np.random.default_rng(0)
    for _ in range(10):
        x = rng.standard_normal(6)
        assert oversampled_greedy_error(lp(2), x, 1, 2.0).ratio <= 1.0
    r = oversampled_greedy_error(lp(2), [1, 0, 0, 0], 1, 2.0)
    assert r.ratio == 0 and not r.infinite
    with pytest.raises(InvalidInput):
        oversampled_greedy_error(lp(2), [1, 2, 3], 1, 1.0)
    with pytest.raises(InvalidInput):
        oversampled_greedy_error(lp(2), [1, 2, 3], 2, 2.0)


def test_subset_table_matches_oracles(rng):
    x = rng.uniform(-1, 1, 6)
    T = SubsetTable(kt(), x)
    for m in range(4):
        assert T.sigma(m)[0] == pytest.approx(sigma_m_oracle(kt(), x, m).value, abs=1e-12)
        assert T.best_projection(m)[0] == best_projection_error(kt(), x, m)[0]
    assert T.norm == eval_norm(kt(), x)
