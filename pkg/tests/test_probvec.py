import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from majorization.probvec import (
    MajOrder,
    ProbVec,
    compare,
    from_partial_sums,
    infimum,
    is_uncertain,
    least_concave_majorant,
    majorizes,
    outer,
    partial_sums,
    point_mass,
    sort_desc,
    supremum,
)

from conftest import brute_partial_sums


def probvecs(min_size=2, max_size=8):
    return st.lists(st.floats(0.0, 1.0), min_size=min_size, max_size=max_size).filter(
        lambda xs: sum(xs) > 1e-3
    ).map(lambda xs: ProbVec(np.array(xs) / sum(xs)))


def test_construction_validates():
    with pytest.raises(ValueError):
        ProbVec([0.5, 0.6])
    with pytest.raises(ValueError):
        ProbVec([1.1, -0.1])
    p = ProbVec([1.0 + 1e-13, -1e-13])
    assert p.entries.min() >= 0
    assert p.entries.sum() == pytest.approx(1.0, abs=1e-15)


def test_entries_read_only():
    p = ProbVec([0.5, 0.5])
    with pytest.raises(ValueError):
        p.entries[0] = 1.0


def test_point_mass_and_padding():
    assert point_mass(3) == ProbVec([1, 0, 0])
    assert np.array_equal(ProbVec([0.5, 0.5]).padded(4), [0.5, 0.5, 0, 0])


def test_partial_sums_requires_sorted():
    with pytest.raises(ValueError):
        partial_sums([0.2, 0.8])
    assert np.allclose(partial_sums(sort_desc([0.2, 0.8])), [0.8, 1.0])


def test_compare_cases():
    a = ProbVec([0.5, 0.5])
    b = ProbVec([0.7, 0.3])
    assert compare(a, b) is MajOrder.FIRST_MAJORIZED
    assert compare(b, a) is MajOrder.SECOND_MAJORIZED
    assert compare(a, ProbVec([0.5, 0.5, 0.0])) is MajOrder.EQUAL
    x = ProbVec([0.6, 0.2, 0.2])
    y = ProbVec([0.5, 0.5, 0.0])
    assert compare(x, y) is MajOrder.INCOMPARABLE
    assert majorizes(b, a) and not majorizes(a, b)


def test_uncertainty():
    assert not is_uncertain(point_mass(4))
    assert is_uncertain(ProbVec([0.9, 0.1]))


def test_outer_product():
    p = outer(ProbVec([0.5, 0.5]), ProbVec([0.25, 0.75]))
    assert np.allclose(p.entries, [0.125, 0.375, 0.125, 0.375])


def test_flattening_golden():
    s = supremum([ProbVec([0.45, 0.2, 0.2, 0.15]), ProbVec([0.4, 0.3, 0.3, 0.0])])
    assert np.allclose(s.padded(4), [0.45, 0.275, 0.275, 0.0], atol=1e-12)


def test_infimum_simple():
    i = infimum([ProbVec([0.6, 0.2, 0.2]), ProbVec([0.5, 0.5, 0.0])])
    # partial sums min((0.6,0.8,1),(0.5,1,1)) = (0.5,0.8,1)
    assert np.allclose(i.padded(3), [0.5, 0.3, 0.2])


def test_least_concave_majorant_is_concave_and_above():
    mu = np.array([0.3, 0.35, 0.9, 0.95, 1.0])
    h = least_concave_majorant(mu)
    assert np.all(h >= mu - 1e-15)
    steps = np.diff(np.concatenate([[0.0], h]))
    assert np.all(np.diff(steps) <= 1e-15)


def test_from_partial_sums_roundtrip():
    p = ProbVec([0.4, 0.3, 0.2, 0.1])
    assert np.allclose(from_partial_sums(partial_sums(p.entries)).entries, p.entries, atol=1e-15)


@settings(max_examples=200, deadline=None)
@given(st.lists(probvecs(), min_size=2, max_size=4))
def test_infimum_properties(vecs):
    n = max(len(v) for v in vecs)
    inf = infimum(vecs)
    s = brute_partial_sums(inf.entries, n)
    for v in vecs:
        assert np.all(s <= brute_partial_sums(v.entries, n) + 1e-12)
    # greatest lower bound: partial sums equal the pointwise minimum
    lo = np.min([brute_partial_sums(v.entries, n) for v in vecs], axis=0)
    assert np.allclose(s, lo, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(st.lists(probvecs(), min_size=2, max_size=4))
def test_supremum_properties(vecs):
    n = max(len(v) for v in vecs)
    sup = supremum(vecs)
    s = brute_partial_sums(sup.entries, n)
    hi = np.max([brute_partial_sums(v.entries, n) for v in vecs], axis=0)
    assert np.all(s >= hi - 1e-12)
    # tightness: each partial sum that exceeds the pointwise max lies on a
    # chord, so lowering it breaks concavity
    padded = np.concatenate([[0.0], s])
    steps = np.diff(padded)
    assert np.all(np.diff(steps) <= 1e-12)
    for k in range(n - 1):
        if s[k] > hi[k] + 1e-12:
            # interior point of a chord of the hull: equal slopes on both sides
            assert steps[k] == pytest.approx(steps[k + 1], abs=1e-9)


@settings(max_examples=100, deadline=None)
@given(probvecs(), probvecs())
def test_compare_matches_brute(a, b):
    n = max(len(a), len(b))
    sa, sb = brute_partial_sums(a.entries, n), brute_partial_sums(b.entries, n)
    le = np.all(sa <= sb + 1e-12)
    ge = np.all(sb <= sa + 1e-12)
    expect = {
        (True, True): MajOrder.EQUAL,
        (True, False): MajOrder.FIRST_MAJORIZED,
        (False, True): MajOrder.SECOND_MAJORIZED,
        (False, False): MajOrder.INCOMPARABLE,
    }[(bool(le), bool(ge))]
    assert compare(a, b) is expect
