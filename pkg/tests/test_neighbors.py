import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ccitest.neighbors import build, nearest, nearest_bruteforce, nearest_many


def _brute_all(points, queries):
    out = [nearest_bruteforce(points, q) for q in queries]
    return np.array([i for i, _ in out]), np.array([d for _, d in out])


@pytest.mark.parametrize("d", [1, 2, 5, 10])
def test_matches_bruteforce_random(d):
    rng = np.random.default_rng(d)
    pts = rng.standard_normal((500, d))
    qs = rng.standard_normal((300, d))
    idx, dist = nearest_many(build(pts), qs)
    bidx, bdist = _brute_all(pts, qs)
    np.testing.assert_array_equal(idx, bidx)
    np.testing.assert_array_equal(dist, bdist)


def test_ties_go_to_lowest_index():
    pts = np.array([[1.0], [-1.0], [1.0], [3.0]])
    assert nearest(build(pts), [0.0]) == (0, 1.0)
    pts = np.array([[0.0, 0.0], [2.0, 0.0], [0.0, 0.0]])
    assert nearest(build(pts), [1.0, 0.0])[0] == 0
    # duplicates spread over several leaves
    pts = np.repeat(np.arange(10.0), 20).reshape(-1, 1)[::-1].copy()
    i, dist = nearest(build(pts, leaf_size=4), [4.0])
    assert dist == 0.0
    assert i == np.flatnonzero(pts[:, 0] == 4.0).min()


def test_single_point_and_exact_hit():
    assert nearest(build([[2.0, 3.0]]), [10.0, 10.0])[0] == 0
    pts = np.random.default_rng(1).random((50, 3))
    assert nearest(build(pts), pts[17]) == (17, 0.0)


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        build(np.empty((0, 2)))
    with pytest.raises(ValueError):
        build([[np.inf, 0.0]])
    with pytest.raises(ValueError):
        nearest_many(build([[0.0, 1.0]]), [[0.0, 1.0, 2.0]])


coords = st.floats(-100, 100, allow_nan=False, width=32)


@settings(max_examples=150, deadline=None)
@given(
    data=st.data(),
    d=st.integers(1, 4),
    n=st.integers(1, 80),
    leaf=st.integers(1, 20),
)
def test_property_equals_bruteforce(data, d, n, leaf):
    # float32-representable values on a coarse grid make ties common
    pts = data.draw(arrays(np.float64, (n, d), elements=coords.map(round)))
    qs = data.draw(arrays(np.float64, (10, d), elements=coords.map(round)))
    idx, dist = nearest_many(build(pts, leaf_size=leaf), qs)
    bidx, bdist = _brute_all(pts, qs)
    np.testing.assert_array_equal(idx, bidx)
    np.testing.assert_array_equal(dist, bdist)
