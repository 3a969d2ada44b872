import math

import numpy as np
import pytest

import medbin


def test_exact_modes_agree():
    rng = np.random.default_rng(3)
    for n in (1, 2, 19, 20, 21, 1000, 100001):
        x = rng.normal(size=n)
        want = float(np.median(x))
        assert medbin.binmedian(x) == want
        assert medbin.median_select(x) == want
        assert medbin.sort_median(x) == want
        assert medbin.median(x, mode="exact-select") == want


def test_small_hand_cases():
    assert medbin.binmedian([5, 1, 9, 3, 7]) == 5
    assert medbin.binmedian([1, 2, 3, 4]) == 2.5
    assert medbin.select_kth([4.0, 1.0, 3.0], 1) == 1.0
    assert medbin.median([3, 1, 2], mode="sort") == 2


def test_input_is_not_modified():
    x = np.array([3.0, 1.0, 2.0, 0.5])
    before = x.copy()
    medbin.median_select(x)
    medbin.binmedian(x)
    medbin.select_kth(x, 2)
    assert np.array_equal(x, before)


def test_binapprox_bound():
    x = np.random.default_rng(4).exponential(size=50001)
    s = medbin.compute_moments(x).sigma
    for b in (10, 100, 1000):
        assert abs(medbin.binapprox(x, b) - np.median(x)) <= s / b


def test_moments():
    m = medbin.compute_moments(np.array([1.0, 2.0, 3.0]))
    assert m.count == 3
    assert m.mean == 2.0
    assert math.isclose(m.sigma, math.sqrt(2 / 3), rel_tol=1e-15)
    a = medbin.compute_moments([1.0, 2.0])
    b = medbin.compute_moments([3.0])
    assert medbin.merge_moments(a, b) == m


def test_updatable():
    rng = np.random.default_rng(5)
    base = rng.normal(0, 5, size=10001)
    um = medbin.UpdatableMedian(base)
    assert um.rebuild_count == 1
    allx = base
    for j in range(1, 6):
        batch = rng.normal(0, 5, size=1000)
        um.add(batch)
        allx = np.concatenate([allx, batch])
        assert um.query_exact() == float(np.median(allx))
        value, bound = um.query_approx()
        assert abs(value - np.median(allx)) <= bound
    assert len(um) == allx.size
    um.remove(batch)
    assert um.query_exact() == float(np.median(allx[:-1000]))


def test_distributed():
    odds = np.array([1.0, 3, 5, 7, 9])
    evens = np.array([2.0, 4, 6, 8])
    assert medbin.distributed_binmedian([odds, evens]) == 5
    x = np.random.default_rng(6).uniform(size=9999)
    parts = [x[:100], x[100:100], x[100:5000], x[5000:]]
    assert medbin.distributed_binmedian(parts) == float(np.median(x))
    assert abs(medbin.distributed_binapprox(parts) - np.median(x)) <= medbin.compute_moments(x).sigma / 1000


def test_errors():
    with pytest.raises(ValueError):
        medbin.binmedian([])
    with pytest.raises(medbin.ContractViolation):
        medbin.select_kth([1.0, 2.0], 3)
    with pytest.raises(ValueError):
        medbin.binmedian([1.0, 2.0], bins=1)
    with pytest.raises(ValueError):
        medbin.binmedian([1.0, float("nan")])
    with pytest.raises(ValueError):
        medbin.median([1.0], mode="fast")
    um = medbin.UpdatableMedian([1.0, 2.0, 3.0])
    with pytest.raises(medbin.ContractViolation):
        um.remove([42.0])
    assert len(um) == 3
