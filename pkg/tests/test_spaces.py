import json
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from greedylab import (CapacityError, InvalidInput, SpaceSpec, c0, dsum, eval_norm, indicator,
                       kt, lp, parse_space, project, verify_space_axioms)
from greedylab.spaces import basis_constants, complement, eval_norm_rows, support

from conftest import ALL_SPACES


def kt_norm_loop(a):
    # straight from the definition: max of the l2 norm and the weighted partial sums
    s, best = 0.0, 0.0
    for j, v in enumerate(a, start=1):
        s += v / math.sqrt(j)
        best = max(best, abs(s))
    return max(math.sqrt(sum(v * v for v in a)), best)


def test_norm_examples():
    assert eval_norm(lp(2), [3, 4, 0]) == 5.0
    assert eval_norm(lp(0.5), [1, 1]) == pytest.approx(4.0, abs=1e-12)
    assert eval_norm(kt(), [1, -1]) == pytest.approx(math.sqrt(2), abs=1e-12)
    m = 9
    x = indicator(range(0, 2 * m, 2), None, 2 * m)
    assert eval_norm(dsum(lp(2), c0()), x) == pytest.approx(3.0, abs=1e-12)


def test_norm_zero_iff_zero():
    for sp in ALL_SPACES.values():
        assert eval_norm(sp, np.zeros(7)) == 0.0
        assert eval_norm(sp, np.eye(7)[3] * 1e-300) > 0


def test_non_finite_rejected():
    with pytest.raises(InvalidInput):
        eval_norm(lp(2), [1.0, math.nan])
    with pytest.raises(InvalidInput):
        eval_norm(kt(), [math.inf])


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, st.integers(1, 30), elements=st.floats(-1e3, 1e3)))
def test_kt_matches_definition(a):
    assert eval_norm(kt(), a) == pytest.approx(kt_norm_loop(a), rel=1e-12, abs=1e-300)


def test_lp_matches_definition(rng):
    for p in (0.3, 0.5, 1.0, 1.5, 2.0, 3.0):
        x = rng.standard_normal(11)
        assert eval_norm(lp(p), x) == pytest.approx((np.abs(x) ** p).sum() ** (1 / p), rel=1e-12)


def test_lp_small_p_no_underflow():
    x = np.array([1e-200, 1e-200])
    assert eval_norm(lp(0.5), x) == pytest.approx(4e-200, rel=1e-12)


def test_dsum_interleaving():
    sp = dsum(lp(1), c0())
    # even positions go to the left summand
    assert eval_norm(sp, [1, 5, 1, 0]) == 5.0
    assert eval_norm(sp, [3, 1, 3, 1]) == 6.0


def test_rows_match_single():
    Y = np.random.default_rng(0).standard_normal((20, 9))
    for sp in ALL_SPACES.values():
        rows = eval_norm_rows(sp, Y)
        assert np.allclose(rows, [eval_norm(sp, y) for y in Y], rtol=0, atol=1e-14)


def test_project_examples():
    assert project([1, 2, 3], [1]).tolist() == [0, 2, 0]
    assert project([1, 2, 3], []).tolist() == [0, 0, 0]
    assert project([1, 2, 3], [0, 1, 2]).tolist() == [1, 2, 3]
    with pytest.raises(InvalidInput):
        project([1, 2, 3], [3])
    assert complement([0, 2], 4) == (1, 3)
    assert support([0, 1.5, 0, -2]) == (1, 3)


def test_indicator():
    x = indicator([0, 1], [1, -1], 3)
    assert x.tolist() == [1, -1, 0]
    assert eval_norm(lp(1), x) == 2.0
    assert indicator([], None, 4).tolist() == [0, 0, 0, 0]
    with pytest.raises(InvalidInput):
        indicator([0, 1], [1], 3)


def test_axioms_lp2(rng):
    samples = [(rng.standard_normal(6), rng.standard_normal(6)) for _ in range(100)]
    rep = verify_space_axioms(lp(2), samples, q=1.0)
    assert rep.passed


def test_axioms_lp_half(rng):
    samples = [(rng.standard_normal(6), rng.standard_normal(6)) for _ in range(100)]
    assert verify_space_axioms(lp(0.5), samples, q=0.5).passed
    rep = verify_space_axioms(lp(0.5), samples + [(np.array([1.0, 0]), np.array([0, 1.0]))], q=1.0)
    assert not rep.passed and not rep.subadditive_ok


def test_axioms_homogeneity_kt():
    f = np.array([1.0, 0.0])
    assert eval_norm(kt(), 2 * f) == 2 * eval_norm(kt(), f)
    assert verify_space_axioms(kt(), [(f, f)]).homogeneity_ok


def test_axioms_all_spaces(rng):
    samples = [(rng.standard_normal(8), rng.standard_normal(8)) for _ in range(50)]
    for sp in ALL_SPACES.values():
        assert verify_space_axioms(sp, samples).passed, sp


def test_convexity_and_lattice():
    assert lp(0.5).convexity_exponent == 0.5
    assert kt().convexity_exponent == 1.0
    assert dsum(lp(0.5), kt()).convexity_exponent == 0.5
    assert lp(3).is_lattice and c0().is_lattice and dsum(lp(2), c0()).is_lattice
    assert not kt().is_lattice and not dsum(kt(), c0()).is_lattice


def test_spec_validation():
    with pytest.raises(InvalidInput):
        lp(0)
    with pytest.raises(InvalidInput):
        lp(math.inf)
    with pytest.raises(InvalidInput):
        parse_space("hilbert")


@pytest.mark.parametrize("text", ["lp:0.5", "kt", "c0", "dsum(lp:2,c0)", "dsum(dsum(kt,c0),lp:1)"])
def test_space_roundtrip(text):
    sp = parse_space(text)
    assert SpaceSpec.from_json(sp.to_json()) == sp
    assert parse_space(sp.to_json()) == sp
    assert parse_space(str(sp)) == sp
    d = json.loads(sp.to_json())
    assert d["kind"] == sp.kind


def test_basis_constants():
    assert basis_constants(lp(0.5), 5) == (1.0, 1.0)
    assert basis_constants(kt(), 5) == (1.0, 1.0)
